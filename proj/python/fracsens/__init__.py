"""Python bindings for the fracsens solvers.

Configs are the same JSON documents the command-line tool reads; pass either the
text or a path through ``load``.
"""

from pathlib import Path
import json

from ._core import (
    DomainError,
    RangeError,
    SolverError,
    SyntaxError,
    ValidationError,
    appendix_gaps,
    beta,
    gamma,
    mittag_leffler,
    run_cli,
)
from . import _core

__all__ = [
    "DomainError",
    "RangeError",
    "SolverError",
    "SyntaxError",
    "ValidationError",
    "appendix_gaps",
    "beta",
    "gamma",
    "load",
    "mittag_leffler",
    "run_cli",
    "sensitivities",
    "solve",
]


def load(source):
    """Config text from a path, a JSON string, or a dict."""
    if isinstance(source, dict):
        return json.dumps(source)
    if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith("{")):
        return Path(source).read_text()
    return source


def solve(source, N=None):
    return _core.solve(load(source), N)


def sensitivities(source, N=None):
    return _core.sensitivities(load(source), N)
