"""Structured pass/fail records shared by all identity checks."""
from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class CheckResult:
    """Outcome of a single machine-checked identity.

    residual is a scalar magnitude (a Fraction in the exact domain, a float
    otherwise); it is exactly 0 for exact passes.  witness, when present,
    points at the offending entry (typically a pair of basis states) or
    carries an error message.
    """

    name: str
    status: str
    residual: object
    params: dict = field(default_factory=dict)
    sector: tuple | None = None
    witness: object = None

    @property
    def passed(self) -> bool:
        return self.status == "pass"


def from_residual(name, residual, threshold, witness=None, params=None, sector=None):
    """Build a CheckResult from a computed residual against a threshold."""
    ok = residual <= threshold
    return CheckResult(
        name=name,
        status="pass" if ok else "fail",
        residual=residual,
        params=dict(params or {}),
        sector=tuple(sector) if sector is not None else None,
        witness=None if ok else witness,
    )


def error_result(name, exc, params=None, sector=None):
    """Record an exception as a failed check instead of aborting the suite."""
    return CheckResult(
        name=name,
        status="fail",
        residual=None,
        params=dict(params or {}),
        sector=tuple(sector) if sector is not None else None,
        witness=f"{type(exc).__name__}: {exc}",
    )
