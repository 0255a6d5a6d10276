"""Commensurate drift clocks: integer rotation counts that line up two periods.

Given two periods ``t_a`` and ``t_b`` (ns), find the smallest ``a`` (with an
optional odd-parity constraint) such that some ``b`` with its own parity
constraint gives ``(a t_a - b t_b)**2 <= error**2``. The search walks ``a``
upward and pairs it with the nearest admissible ``b``, so the first feasible
``a`` has the shortest total time ``a t_a``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, NoSolution

CHUNK = 1 << 16


@dataclass(frozen=True)
class ClockSolution:
    a: int
    b: int
    total_time: float  # µs
    residual: float  # squared mismatch, in the squared unit of the inputs
    t_a: float
    t_b: float

    @property
    def mismatch(self) -> float:
        """Signed ``a t_a - b t_b`` in the input unit."""
        return self.a * self.t_a - self.b * self.t_b

    def to_dict(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "total_time_us": self.total_time,
            "residual": self.residual,
            "mismatch": self.mismatch,
            "t_a": self.t_a,
            "t_b": self.t_b,
        }


def _nearest(x: np.ndarray, odd: bool) -> np.ndarray:
    if odd:
        return 2 * np.rint((x - 1) / 2).astype(np.int64) + 1
    return np.rint(x).astype(np.int64)


def clock_solve(
    t_a: float,
    t_b: float,
    parity: tuple[bool, bool] = (True, False),
    error: float = 0.01,
    search_bound: int = 100_000,
) -> ClockSolution:
    """Shortest ``a t_a`` matching a multiple of ``t_b`` within ``error``.

    ``parity`` is ``(a must be odd, b must be odd)``. Times are in ns and the
    error is in the same unit; the reported total is in µs.
    """
    if not (t_a > 0 and t_b > 0 and np.isfinite(t_a) and np.isfinite(t_b)):
        raise InvalidArgument("periods must be positive and finite")
    if not error > 0:
        raise InvalidArgument("error must be positive")
    if search_bound < 1:
        raise InvalidArgument("search bound must be at least 1")
    odd_a, odd_b = bool(parity[0]), bool(parity[1])
    step = 2 if odd_a else 1
    err2 = error * error
    for start in range(1, search_bound + 1, CHUNK * step):
        a = np.arange(start, min(start + CHUNK * step, search_bound + 1), step, dtype=np.int64)
        b = _nearest(a * t_a / t_b, odd_b)
        b = np.where(b < 1, 1, b)
        resid = (a * t_a - b * t_b) ** 2
        hits = np.flatnonzero(resid <= err2)
        if hits.size:
            k = hits[0]
            return ClockSolution(int(a[k]), int(b[k]), float(a[k] * t_a * 1e-3), float(resid[k]),
                                 float(t_a), float(t_b))
    raise NoSolution(
        f"no (a, b) with a <= {search_bound} matches t_a={t_a} and t_b={t_b} within {error}"
    )


def brute_force_clock(t_a, t_b, parity, error, search_bound) -> ClockSolution | None:
    """Plain double loop over ``a`` and every admissible ``b``; used as an oracle."""
    odd_a, odd_b = parity
    for a in range(1, search_bound + 1):
        if odd_a and a % 2 == 0:
            continue
        target = a * t_a
        hi = int(target / t_b) + 2
        for b in range(max(1, hi - 3), hi + 1):
            if odd_b and b % 2 == 0:
                continue
            r = (target - b * t_b) ** 2
            if r <= error * error:
                return ClockSolution(a, b, a * t_a * 1e-3, r, float(t_a), float(t_b))
    return None


def compare_with_reference(solution: ClockSolution, a=None, b=None, total_time=None) -> dict:
    """Differences between a solver result and externally quoted values.

    ``reference_consistent`` reports whether the quoted ``a`` times ``t_a``
    reproduces the quoted total (to 0.01 µs).
    """
    out = {"solver": solution.to_dict(), "reference": {"a": a, "b": b, "total_time_us": total_time}}
    flags = []
    if a is not None and a != solution.a:
        flags.append(f"a: solver {solution.a} vs reference {a}")
    if b is not None and b != solution.b:
        flags.append(f"b: solver {solution.b} vs reference {b}")
    if total_time is not None and abs(total_time - solution.total_time) > 0.01:
        flags.append(f"total: solver {solution.total_time:.4f} us vs reference {total_time} us")
    if a is not None and total_time is not None:
        implied = a * solution.t_a * 1e-3
        out["reference_implied_total_us"] = implied
        out["reference_consistent"] = bool(abs(implied - total_time) <= 0.01)
        if not out["reference_consistent"]:
            flags.append(f"reference a*t_a = {implied:.4f} us, not {total_time} us")
    out["discrepancies"] = flags
    out["matches"] = not flags
    return out
