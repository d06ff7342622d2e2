"""Fixed-step RK4 for the closed loop, with and without a lag in the PN -> M feedback.

The delayed system uses the method of steps: the same RK4 step, with the
transcription term reading PN(t - tau) from a cubic Hermite interpolant of
the stored trajectory (value and exact derivative at every grid point).
Everything is fixed-step, so identical inputs give bit-identical output.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConstraintViolation, InsufficientData, NonFinite, NotConverged, UsageError
from .model import NEG_TOL, FullState, ModelParams, _per_rhs, full_rhs_tuple, rhs_mrna

COMPONENTS = ("M", "P0", "P1", "P2", "PN")
DEFAULT_H_ODE = 0.01
DEFAULT_H_DDE = 0.05


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    y: np.ndarray  # shape (len(times), 5), columns COMPONENTS

    def __post_init__(self):
        if self.y.shape != (len(self.times), len(COMPONENTS)):
            raise ValueError(f"state array shape {self.y.shape} does not match {len(self.times)} times")
        if len(self.times) > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("times must be strictly increasing")
        self.times.setflags(write=False)
        self.y.setflags(write=False)

    def __len__(self):
        return len(self.times)

    def column(self, name: str) -> np.ndarray:
        return self.y[:, COMPONENTS.index(name)]

    def state(self, i: int) -> FullState:
        return FullState.from_sequence(self.y[i])

    @property
    def states(self) -> list[FullState]:
        return [FullState.from_sequence(row) for row in self.y]

    @property
    def final(self) -> FullState:
        return self.state(-1)


def _finish(times, rows):
    return Trajectory(np.asarray(times, dtype=float), np.array(rows))


def _check_step(t_end, h):
    if not h > 0:
        raise UsageError(f"step must be positive, got {h}")
    if t_end < h:
        raise UsageError(f"t_end={t_end} must be at least one step h={h}")
    return int(round(t_end / h))


def _nonfinite(x, t):
    raise NonFinite(f"state became non-finite at t={t:.6g}: {x}; step too large?")


def _guard(x, t):
    if not math.isfinite(sum(x)):
        _nonfinite(x, t)
    if min(x) < -NEG_TOL:
        j = x.index(min(x))
        raise ConstraintViolation(f"{COMPONENTS[j]} dropped to {x[j]:.3g} at t={t:.6g}; reduce the step")


def integrate_ode(x0: FullState, p: ModelParams, t_end: float, h: float = DEFAULT_H_ODE) -> Trajectory:
    n = _check_step(t_end, h)
    x = tuple(x0.as_array().tolist())
    rows = [x]
    f = full_rhs_tuple
    h2 = 0.5 * h
    for k in range(n):
        a = f(*x, x[4], p)
        xa = tuple(xi + h2 * ai for xi, ai in zip(x, a))
        b = f(*xa, xa[4], p)
        xb = tuple(xi + h2 * bi for xi, bi in zip(x, b))
        c = f(*xb, xb[4], p)
        xc = tuple(xi + h * ci for xi, ci in zip(x, c))
        d = f(*xc, xc[4], p)
        x = tuple(
            xi + h / 6.0 * (ai + 2.0 * bi + 2.0 * ci + di)
            for xi, ai, bi, ci, di in zip(x, a, b, c, d)
        )
        _guard(x, (k + 1) * h)
        rows.append(x)
    return _finish(np.arange(n + 1) * h, rows)


class DelayHistory:
    """Interpolable record of PN on a uniform grid t0 + k*h.

    Before ``t0`` the history is the constant ``initial``. Samples older than
    the trailing delay window are discarded in batches.
    """

    def __init__(self, t0: float, h: float, tau: float, initial: float):
        self.t0 = t0
        self.h = h
        self.tau = tau
        self.initial = initial
        self._base = 0  # grid index of _pn[0]
        self._pn: list[float] = []
        self._dpn: list[float] = []
        self._keep = int(math.ceil(tau / h)) + 2

    def append(self, pn: float, dpn: float):
        self._pn.append(pn)
        self._dpn.append(dpn)
        if len(self._pn) > 4 * self._keep:
            drop = len(self._pn) - self._keep
            del self._pn[:drop]
            del self._dpn[:drop]
            self._base += drop

    @property
    def span(self) -> tuple[float, float]:
        first = self.t0 + self._base * self.h
        return first, first + (len(self._pn) - 1) * self.h

    def __call__(self, t: float) -> float:
        if t <= self.t0:
            return self.initial
        pos = (t - self.t0) / self.h
        i = int(math.floor(pos))
        theta = pos - i
        if theta > 1.0 - 1e-9:
            i, theta = i + 1, 0.0
        elif theta < 1e-9:
            theta = 0.0
        j = i - self._base
        last = len(self._pn) - 1
        if j < 0 or j > last or (j == last and theta > 0.0):
            lo, hi = self.span
            raise UsageError(f"history queried at t={t:.6g} outside buffered span [{lo:.6g}, {hi:.6g}]")
        if theta == 0.0:
            return self._pn[j]
        y0, y1 = self._pn[j], self._pn[j + 1]
        m0, m1 = self._dpn[j] * self.h, self._dpn[j + 1] * self.h
        s, s2 = theta, theta * theta
        s3 = s2 * s
        return (
            (2 * s3 - 3 * s2 + 1) * y0
            + (s3 - 2 * s2 + s) * m0
            + (-2 * s3 + 3 * s2) * y1
            + (s3 - s2) * m1
        )


def integrate_dde(
    x0: FullState,
    p: ModelParams,
    tau: float,
    t_end: float,
    h: float = DEFAULT_H_DDE,
) -> Trajectory:
    """Closed loop with transcription seeing PN(t - tau); constant PN history before t=0."""
    if tau < 0:
        raise UsageError(f"delay must be nonnegative, got {tau}")
    if tau == 0:
        return integrate_ode(x0, p, t_end, h)
    if h > tau:
        raise UsageError(f"step h={h} exceeds delay tau={tau}")
    n = _check_step(t_end, h)
    x = tuple(x0.as_array().tolist())
    rows = [x]
    hist = DelayHistory(0.0, h, tau, x[4])
    hist.append(x[4], p.k1 * x[3] - p.k2 * x[4])
    f = full_rhs_tuple
    h2 = 0.5 * h
    for k in range(n):
        t = k * h
        fb0 = hist(t - tau)
        fb_half = hist(t + h2 - tau)
        fb1 = hist((k + 1) * h - tau)
        a = f(*x, fb0, p)
        xa = tuple(xi + h2 * ai for xi, ai in zip(x, a))
        b = f(*xa, fb_half, p)
        xb = tuple(xi + h2 * bi for xi, bi in zip(x, b))
        c = f(*xb, fb_half, p)
        xc = tuple(xi + h * ci for xi, ci in zip(x, c))
        d = f(*xc, fb1, p)
        x = tuple(
            xi + h / 6.0 * (ai + 2.0 * bi + 2.0 * ci + di)
            for xi, ai, bi, ci, di in zip(x, a, b, c, d)
        )
        _guard(x, (k + 1) * h)
        rows.append(x)
        hist.append(x[4], p.k1 * x[3] - p.k2 * x[4])
    return _finish(np.arange(n + 1) * h, rows)


def steady_state(x0, rhs, tol: float = 1e-9, t_max: float = 1e4, h: float = 0.1) -> np.ndarray:
    """Integrate ``x' = rhs(x)`` with RK4 until ``max|rhs(x)| < tol``.

    ``rhs`` takes and returns a sequence of floats. Raises NotConverged at
    ``t_max``.
    """
    x = [float(v) for v in np.atleast_1d(x0)]
    n = int(math.ceil(t_max / h))
    h2 = 0.5 * h
    for k in range(n + 1):
        a = rhs(x)
        if max(abs(v) for v in a) < tol:
            return np.array(x)
        if k == n:
            break
        b = rhs([xi + h2 * v for xi, v in zip(x, a)])
        c = rhs([xi + h2 * v for xi, v in zip(x, b)])
        d = rhs([xi + h * v for xi, v in zip(x, c)])
        x = [
            xi + h / 6.0 * (ai + 2.0 * bi + 2.0 * ci + di)
            for xi, ai, bi, ci, di in zip(x, a, b, c, d)
        ]
        if not math.isfinite(sum(x)):
            _nonfinite(x, (k + 1) * h)
    raise NotConverged(f"no steady state within t_max={t_max}", state=np.array(x), t=n * h)


def mrna_steady_state(u1: float, p: ModelParams, M0: float = 0.0, **kw) -> float:
    return float(steady_state([M0], lambda x: [rhs_mrna(x[0], u1, p)], **kw)[0])


def per_steady_state(c: float, p: ModelParams, x0=(1.0, 1.0, 1.0, 1.0), **kw) -> np.ndarray:
    return steady_state(x0, lambda x: _per_rhs(x[0], x[1], x[2], x[3], c, p), **kw)


@dataclass(frozen=True)
class OscillationMetrics:
    amplitude: dict[str, float]
    period: float
    period_std: float
    n_cycles: int
    transient_cut: float
    peak_times: tuple[float, ...] = ()


def amplitudes(traj: Trajectory, transient_cut: float = 0.0) -> dict[str, float]:
    mask = traj.times > transient_cut
    if not mask.any():
        raise UsageError(f"transient_cut={transient_cut} is past the end of the trajectory")
    window = traj.y[mask]
    amp = window.max(axis=0) - window.min(axis=0)
    return dict(zip(COMPONENTS, amp.tolist()))


def _peaks(t, v):
    lo, amp = v.min(), v.max() - v.min()
    if amp <= 0:
        return []
    thresh = lo + 0.25 * amp
    idx = np.nonzero((v[1:-1] > v[:-2]) & (v[1:-1] > v[2:]) & (v[1:-1] > thresh))[0] + 1
    out = []
    for i in idx:
        # vertex of the parabola through the three samples
        ym, y0, yp = v[i - 1], v[i], v[i + 1]
        denom = ym - 2 * y0 + yp
        shift = 0.5 * (ym - yp) / denom if denom != 0 else 0.0
        out.append(t[i] + shift * (t[i + 1] - t[i]))
    return out


def oscillation_metrics(traj: Trajectory, transient_cut: float = 0.0) -> OscillationMetrics:
    """Amplitudes after ``transient_cut`` and the period from successive maxima of M.

    Raises InsufficientData (carrying the amplitudes) when fewer than two
    maxima are found.
    """
    if transient_cut >= traj.times[-1]:
        raise UsageError(f"transient_cut={transient_cut} must be before the final time {traj.times[-1]}")
    amp = amplitudes(traj, transient_cut)
    mask = traj.times > transient_cut
    peaks = _peaks(traj.times[mask], traj.column("M")[mask])
    if len(peaks) < 2:
        raise InsufficientData(f"found {len(peaks)} peak(s) of M after t={transient_cut}", amplitude=amp, n_peaks=len(peaks))
    spacings = np.diff(peaks)
    return OscillationMetrics(
        amplitude=amp,
        period=float(spacings.mean()),
        period_std=float(spacings.std()),
        n_cycles=len(spacings),
        transient_cut=transient_cut,
        peak_times=tuple(float(x) for x in peaks),
    )
