"""Step-size and regularization schedules with regime validation.

Both sequences are inverse power laws in the iteration counter:

    step(k)  = gamma0 * (k+1)^(-a)
    reg(k)   = eta0   * (k+1)^(-b)

Two exponent regimes are supported.  Over a bounded feasible set the
rate guarantees need a = 0.5 and 0 < b < 0.5; over an unbounded set
convergence needs 0 < b < 0.5 < a with a + b < 1.  The averaging
exponent r must lie in [0, 1) in either regime.
"""

from __future__ import annotations

from dataclasses import dataclass

BOUNDED = "bounded"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class Schedule:
    gamma0: float
    eta0: float
    a: float
    b: float
    r: float = 0.0
    mode: str = BOUNDED

    def __post_init__(self):
        if self.gamma0 <= 0 or self.eta0 <= 0:
            raise ValueError("gamma0 and eta0 must be positive")
        if self.mode not in (BOUNDED, UNBOUNDED):
            raise ValueError(f"unknown schedule mode {self.mode!r}")


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[str, ...]

    def __bool__(self) -> bool:
        return self.ok


def stepsize(schedule: Schedule, k: int) -> float:
    """gamma0 * (k+1)^(-a); positive and nonincreasing in k."""
    if k < 0:
        raise ValueError("iteration counter must be >= 0")
    return schedule.gamma0 * float(k + 1) ** (-schedule.a)


def regparam(schedule: Schedule, k: int) -> float:
    """eta0 * (k+1)^(-b); positive and nonincreasing in k."""
    if k < 0:
        raise ValueError("iteration counter must be >= 0")
    return schedule.eta0 * float(k + 1) ** (-schedule.b)


def validate_schedule(schedule: Schedule) -> ValidationReport:
    """Check the exponent regime for the schedule's mode.

    Rejection is reported, not raised: the report lists every violated
    inequality so configs can be fixed in one pass.
    """
    bad: list[str] = []
    a, b, r = schedule.a, schedule.b, schedule.r
    if not (0.0 <= r < 1.0):
        bad.append(f"averaging exponent r={r} outside [0, 1)")
    if schedule.mode == BOUNDED:
        if a != 0.5:
            bad.append(f"bounded mode requires a = 0.5, got a={a}")
        if not (0.0 < b < 0.5):
            bad.append(f"bounded mode requires 0 < b < 0.5, got b={b}")
    else:
        if not (0.0 < b):
            bad.append(f"unbounded mode requires b > 0, got b={b}")
        if not (b < 0.5):
            bad.append(f"unbounded mode requires b < 0.5, got b={b}")
        if not (0.5 < a):
            bad.append(f"unbounded mode requires a > 0.5, got a={a}")
        if not (a + b < 1.0):
            bad.append(f"unbounded mode requires a + b < 1, got a+b={a + b}")
    return ValidationReport(ok=not bad, violations=tuple(bad))
