"""Run an external CHC solver on an SMT-LIB2 document."""

from __future__ import annotations

import os
import re
import signal
import subprocess
import tempfile
from dataclasses import dataclass
from typing import Optional, Sequence

DEFAULT_TIMEOUT_MS = 120_000
SOLVER_ENV_VAR = "HODEFUNC_SOLVER"

SAT, UNSAT, UNKNOWN, TIMEOUT, ERROR = "sat", "unsat", "unknown", "timeout", "error"
_VERDICT = re.compile(r"(?<![\w-])(sat|unsat|unknown)(?![\w-])")


@dataclass(frozen=True)
class SolverVerdict:
    kind: str  # one of SAT, UNSAT, UNKNOWN, TIMEOUT, ERROR
    timeout_ms: Optional[int] = None
    text: str = ""

    def __str__(self):
        return self.kind


def resolve_solver_path(explicit: Optional[str] = None) -> Optional[str]:
    return explicit or os.environ.get(SOLVER_ENV_VAR) or None


def parse_verdict(output: str) -> Optional[str]:
    m = _VERDICT.search(output)
    return m.group(1) if m else None


def solve(doc, solver_path: str, timeout_ms: int = DEFAULT_TIMEOUT_MS,
          extra_args: Sequence[str] = ()) -> SolverVerdict:
    """Write ``doc`` to a temporary file and run ``solver_path`` on it."""
    text = doc if isinstance(doc, str) else doc.text()
    with tempfile.TemporaryDirectory(prefix="hodefunc-") as tmp:
        path = os.path.join(tmp, "problem.smt2")
        with open(path, "w") as fh:
            fh.write(text)
        try:
            proc = subprocess.Popen([solver_path, *extra_args, path], stdout=subprocess.PIPE,
                                    stderr=subprocess.PIPE, text=True, start_new_session=True)
        except OSError as exc:
            return SolverVerdict(ERROR, text=f"cannot run {solver_path}: {exc}")
        try:
            out, err = proc.communicate(timeout=timeout_ms / 1000)
        except subprocess.TimeoutExpired:
            _kill(proc)
            return SolverVerdict(TIMEOUT, timeout_ms=timeout_ms)
        except BaseException:
            _kill(proc)
            raise
    diagnostics = (out + err).strip()
    if "(error" in out:
        return SolverVerdict(ERROR, text=diagnostics)
    verdict = parse_verdict(out)
    if verdict is None:
        return SolverVerdict(ERROR, text=diagnostics or f"exit status {proc.returncode}, no verdict")
    return SolverVerdict(verdict, text=diagnostics)


def _kill(proc: subprocess.Popen):
    try:
        os.killpg(proc.pid, signal.SIGKILL)
    except (ProcessLookupError, PermissionError):
        proc.kill()
    proc.communicate()
