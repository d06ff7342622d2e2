"""Composed-characteristic iteration (spiderweb) and the closed-loop equilibrium.

The composed map F(u) = PN-characteristic(ks * mRNA-characteristic(u)) is
continuous and strictly decreasing. Its even and odd iterates are therefore
each monotone, so the iteration either settles on the fixed point or splits
into a stable period-2 orbit.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .characteristics import char_mrna, char_per
from .errors import NoBracket, SaturationExceeded, UsageError
from .model import FullState, ModelParams

DEFAULT_SEEDS = (0.0, 0.25, 0.5, 1.0, 2.0)
DEFAULT_MAX_ITER = 500
DEFAULT_TOL = 1e-9
BISECTION_TOL = 1e-10
BISECTION_MAX = 200


def composed_map(u: float, p: ModelParams) -> float:
    c = p.ks * char_mrna(u, p)
    try:
        return char_per(c, p).PN
    except SaturationExceeded as exc:
        raise SaturationExceeded(
            f"composed map undefined at u={u!r}: PER input {c:.6g} saturates ({exc})",
            stage=exc.stage,
            target=exc.target,
            limit=exc.limit,
        ) from exc


@dataclass(frozen=True)
class Converged:
    u_star: float
    iterations: int
    name = "Converged"


@dataclass(frozen=True)
class TwoCycle:
    lo: float
    hi: float
    iterations: int
    name = "TwoCycle"


@dataclass(frozen=True)
class MaxIterReached:
    iterations: int
    name = "MaxIterReached"


@dataclass
class SpiderwebTrace:
    iterates: list[float]
    verdict: object
    segments: list[tuple[float, float]] = field(default_factory=list)

    def rows(self):
        """(step, u, F(u)) rows; the final iterate has no image recorded."""
        u = self.iterates
        return [(k, u[k], u[k + 1]) for k in range(len(u) - 1)]


def _cobweb_segments(iterates):
    # (u0, 0) -> (u0, F u0) -> (F u0, F u0) -> (F u0, F F u0) -> ...
    if not iterates:
        return []
    pts = [(iterates[0], 0.0)]
    for a, b in zip(iterates, iterates[1:]):
        pts.append((a, b))
        pts.append((b, b))
    return pts


def iterate_spiderweb(
    u0: float,
    p: ModelParams,
    max_iter: int = DEFAULT_MAX_ITER,
    tol: float = DEFAULT_TOL,
) -> SpiderwebTrace:
    if u0 < 0:
        raise UsageError(f"seed must be nonnegative, got {u0}")
    u = [float(u0)]
    verdict = None
    for k in range(1, max_iter + 1):
        u.append(composed_map(u[-1], p))
        if abs(u[-1] - u[-2]) < tol:
            verdict = Converged(u_star=u[-1], iterations=k)
            break
        if (
            k >= 3
            and abs(u[-1] - u[-3]) < tol
            and abs(u[-2] - u[-4]) < tol
            and abs(u[-1] - u[-2]) > 10 * tol
        ):
            lo, hi = sorted((u[-1], u[-2]))
            verdict = TwoCycle(lo=lo, hi=hi, iterations=k)
            break
    if verdict is None:
        verdict = MaxIterReached(iterations=max_iter)
    return SpiderwebTrace(iterates=u, verdict=verdict, segments=_cobweb_segments(u))


class Verdict(enum.Enum):
    STABLE = "Stable"
    UNSTABLE = "Unstable"
    INCONCLUSIVE = "Inconclusive"


def small_gain_verdict(
    p: ModelParams,
    seeds=DEFAULT_SEEDS,
    max_iter: int = DEFAULT_MAX_ITER,
    tol: float = DEFAULT_TOL,
) -> Verdict:
    seeds = list(seeds)
    if not seeds:
        raise UsageError("at least one seed is required")
    traces = [iterate_spiderweb(s, p, max_iter, tol) for s in seeds]
    verdicts = [t.verdict for t in traces]
    if any(isinstance(v, TwoCycle) for v in verdicts):
        return Verdict.UNSTABLE
    if all(isinstance(v, Converged) for v in verdicts):
        limits = [v.u_star for v in verdicts]
        if max(limits) - min(limits) < 10 * tol:
            return Verdict.STABLE
    return Verdict.INCONCLUSIVE


def fixed_point(p: ModelParams, tol: float = BISECTION_TOL, max_bisections: int = BISECTION_MAX) -> float:
    """Bisection for F(u) = u on [0, F(0)]."""
    lo, hi = 0.0, composed_map(0.0, p)
    g_lo = composed_map(lo, p) - lo
    g_hi = composed_map(hi, p) - hi
    if g_lo == 0.0:
        return lo
    if not (g_lo > 0.0 and g_hi <= 0.0):
        raise NoBracket(f"no sign change on [0, {hi:.6g}]: g(0)={g_lo:.3g}, g(hi)={g_hi:.3g}")
    if g_hi == 0.0:
        return hi
    for _ in range(max_bisections):
        if hi - lo < tol:
            break
        mid = 0.5 * (lo + hi)
        if composed_map(mid, p) - mid > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def closed_loop_equilibrium(p: ModelParams, tol: float = BISECTION_TOL) -> FullState:
    u_star = fixed_point(p, tol)
    M = char_mrna(u_star, p)
    per = char_per(p.ks * M, p)
    return FullState(M, per.P0, per.P1, per.P2, per.PN)


def map_derivative(u: float, p: ModelParams, h: float = 1e-6) -> float:
    return (composed_map(u + h, p) - composed_map(u - h, p)) / (2 * h)
