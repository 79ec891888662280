import sys
from pathlib import Path

import pytest

HERE = Path(__file__).resolve().parent
sys.path.insert(0, str(HERE))  # randprog

from hodefunc.frontend import parse_problem  # noqa: E402
from hodefunc.sortcheck import check_problem  # noqa: E402

CORPUS = HERE / "corpus"
GOLDEN = HERE / "golden"

SAMPLE = """\
# the add/twice sample
environment
add: int -> int -> int -> bool
twice: (int -> int -> bool) -> int -> int -> bool

program
add := \\x: int. \\y: int. \\z: int. x + y = z;
twice := \\f: int -> int -> bool. \\x: int. \\y: int. E z: int. f x z && f z y;

goal
E x: int. add 1 2 x
"""


def load(text: str):
    p = parse_problem(text)
    check_problem(p)
    return p


def corpus_files():
    return sorted(CORPUS.glob("*.hochc"))


@pytest.fixture
def sample():
    return load(SAMPLE)


@pytest.fixture
def sample_path(tmp_path):
    path = tmp_path / "sample.hochc"
    path.write_text(SAMPLE)
    return path


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
