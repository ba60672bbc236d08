"""Advisory parameter-regime reports.

Each scheme is derived under "much smaller than" conditions.  The final
authority on gate quality is the simulation itself, so these checks never
block a run; they classify each condition as

``pass``
    the ratio is at or below the threshold,
``warn``
    the ratio exceeds the threshold (the scheme may still work, degraded),
``violation``
    the parameters make the scheme structurally undefined (for example a
    zero decay rate appearing in a denominator, or unequal effective Rabi
    frequencies that break the gate construction).

The thresholds encode how strictly "much smaller" is read; the default of
0.1 means one order of magnitude.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "LEVEL_PASS",
    "LEVEL_WARN",
    "LEVEL_VIOLATION",
    "DEFAULT_THRESHOLD",
    "RegimeWarning",
    "RegimeCheck",
    "RegimeReport",
    "ratio_check",
    "equality_check",
]

LEVEL_PASS = "pass"
LEVEL_WARN = "warn"
LEVEL_VIOLATION = "violation"

DEFAULT_THRESHOLD = 0.1


class RegimeWarning(UserWarning):
    """Emitted when a result is produced outside its validity regime."""


@dataclass(frozen=True)
class RegimeCheck:
    name: str
    ratio: float
    threshold: float
    level: str
    note: str = ""

    def line(self) -> str:
        ratio = "n/a" if math.isnan(self.ratio) else f"{self.ratio:.4g}"
        txt = f"[{self.level:>9}] {self.name}: ratio={ratio} threshold={self.threshold:g}"
        if self.note:
            txt += f" ({self.note})"
        return txt


@dataclass(frozen=True)
class RegimeReport:
    scheme: str
    checks: tuple

    @property
    def n_warnings(self) -> int:
        return sum(1 for c in self.checks if c.level == LEVEL_WARN)

    @property
    def has_violation(self) -> bool:
        return any(c.level == LEVEL_VIOLATION for c in self.checks)

    @property
    def all_pass(self) -> bool:
        return all(c.level == LEVEL_PASS for c in self.checks)

    @property
    def exit_code(self) -> int:
        """0 all pass, 1 warnings only, 2 at least one violation."""
        if self.has_violation:
            return 2
        return 0 if self.all_pass else 1

    def check(self, name: str) -> RegimeCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(f"no regime check named {name!r}")

    def lines(self) -> list:
        head = f"regime report ({self.scheme}): " + (
            "all conditions satisfied" if self.all_pass else
            f"{self.n_warnings} warning(s)" + (", violation" if self.has_violation else "")
        )
        return [head] + [c.line() for c in self.checks]


def ratio_check(name: str, numerator: float, denominator: float,
                threshold: float, hard_denominator: bool = False,
                note: str = "") -> RegimeCheck:
    """Classify the condition numerator << denominator.

    A non-positive denominator is a violation when ``hard_denominator`` is
    set (the quantity is structurally required), otherwise a warning.
    """
    if denominator <= 0.0:
        level = LEVEL_VIOLATION if hard_denominator else LEVEL_WARN
        ratio = 0.0 if numerator == 0.0 else math.inf
        return RegimeCheck(name, ratio, threshold, level,
                           note or "denominator is not positive")
    ratio = numerator / denominator
    level = LEVEL_PASS if ratio <= threshold else LEVEL_WARN
    return RegimeCheck(name, ratio, threshold, level, note)


def equality_check(name: str, lhs: float, rhs: float,
                   hard: bool = False, rel_tol: float = 1e-12,
                   note: str = "") -> RegimeCheck:
    """Classify an exact-equality condition; mismatch warns or violates."""
    scale = max(abs(lhs), abs(rhs), 1e-300)
    diff = abs(lhs - rhs) / scale
    if diff <= rel_tol:
        return RegimeCheck(name, 0.0, rel_tol, LEVEL_PASS)
    level = LEVEL_VIOLATION if hard else LEVEL_WARN
    return RegimeCheck(name, diff, rel_tol, level,
                       note or f"{lhs!r} != {rhs!r}")
