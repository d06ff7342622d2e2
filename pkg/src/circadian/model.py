"""Goldbeter's five-state PER oscillator and its mRNA / PER subsystem split.

Units are hours and micromolar throughout. The closed loop is viewed as two
open-loop blocks in feedback:

    mRNA block:  input u1 (nuclear PER),  output y1 = ks * M
    PER block:   input u2 (= y1),         output y2 = PN (fed back to u1)

The fast path used by the integrators works on plain floats
(:func:`full_rhs_tuple`); the record-typed functions wrap it.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, fields

import numpy as np

from .errors import ConstraintViolation

# Numerical slack accepted for "nonnegative" states produced by the integrators.
NEG_TOL = 1e-9


@dataclass(frozen=True)
class ModelParams:
    vs: float = 0.76
    vm: float = 0.65
    km: float = 0.5
    ks: float = 0.38
    vd: float = 0.95
    kd: float = 0.2
    k1: float = 1.9
    k2: float = 1.3
    V1: float = 3.2
    V2: float = 1.58
    V3: float = 5.0
    V4: float = 2.5
    K1: float = 2.0
    K2: float = 2.0
    K3: float = 2.0
    K4: float = 2.0
    KI: float = 1.0
    n: int = 4

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == "n":
                if isinstance(value, bool) or int(value) != value or value < 1:
                    raise ConstraintViolation(f"n must be an integer >= 1, got {value!r}")
                object.__setattr__(self, "n", int(value))
                continue
            value = float(value)
            if not np.isfinite(value) or value <= 0.0:
                raise ConstraintViolation(f"{f.name} must be positive, got {value!r}")
            object.__setattr__(self, f.name, value)

    def replace(self, **changes) -> "ModelParams":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def field_names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))


def _check_nonneg(record):
    for f in fields(record):
        value = float(getattr(record, f.name))
        if not np.isfinite(value) or value < -NEG_TOL:
            raise ConstraintViolation(
                f"{type(record).__name__}.{f.name} must be nonnegative, got {value!r}"
            )
        object.__setattr__(record, f.name, value)


@dataclass(frozen=True)
class PerState:
    P0: float
    P1: float
    P2: float
    PN: float

    def __post_init__(self):
        _check_nonneg(self)

    def as_array(self) -> np.ndarray:
        return np.array([self.P0, self.P1, self.P2, self.PN])


@dataclass(frozen=True)
class FullState:
    M: float
    P0: float
    P1: float
    P2: float
    PN: float

    def __post_init__(self):
        _check_nonneg(self)

    @classmethod
    def from_sequence(cls, values) -> "FullState":
        values = [float(v) for v in values]
        if len(values) == 1:
            values = values * 5
        if len(values) != 5:
            raise ConstraintViolation(f"expected 1 or 5 values, got {len(values)}")
        return cls(*values)

    @classmethod
    def uniform(cls, value: float) -> "FullState":
        return cls(value, value, value, value, value)

    def as_array(self) -> np.ndarray:
        return np.array([self.M, self.P0, self.P1, self.P2, self.PN])

    def per(self) -> PerState:
        return PerState(self.P0, self.P1, self.P2, self.PN)


@dataclass(frozen=True)
class SubsystemIO:
    """Input/output values of both blocks for a given closed-loop state."""

    u1: float
    y1: float
    u2: float
    y2: float

    @classmethod
    def closed_loop(cls, s: FullState, p: ModelParams) -> "SubsystemIO":
        y1 = p.ks * s.M
        y2 = s.PN
        return cls(u1=y2, y1=y1, u2=y1, y2=y2)


def _ipow(x: float, n: int) -> float:
    r = 1.0
    for _ in range(n):
        r *= x
    return r


def hill_rate(u: float, p: ModelParams) -> float:
    """Transcription rate repressed by nuclear PER at level ``u``."""
    kin = _ipow(p.KI, p.n)
    return p.vs * kin / (kin + _ipow(u, p.n))


def mm_rate(V: float, K: float, x: float) -> float:
    return V * x / (K + x)


def rhs_mrna(M: float, u1: float, p: ModelParams) -> float:
    return hill_rate(u1, p) - mm_rate(p.vm, p.km, M)


def _per_rhs(P0, P1, P2, PN, u2, p):
    phos1 = p.V1 * P0 / (p.K1 + P0)
    dephos1 = p.V2 * P1 / (p.K2 + P1)
    phos2 = p.V3 * P1 / (p.K3 + P1)
    dephos2 = p.V4 * P2 / (p.K4 + P2)
    transport = p.k1 * P2 - p.k2 * PN
    degr = p.vd * P2 / (p.kd + P2)
    return (
        u2 - phos1 + dephos1,
        phos1 - dephos1 - phos2 + dephos2,
        phos2 - dephos2 - transport - degr,
        transport,
    )


def full_rhs_tuple(M, P0, P1, P2, PN, pn_feedback, p):
    """Closed-loop vector field on bare floats; feedback PN passed separately."""
    kin = _ipow(p.KI, p.n)
    dM = p.vs * kin / (kin + _ipow(pn_feedback, p.n)) - p.vm * M / (p.km + M)
    return (dM,) + _per_rhs(P0, P1, P2, PN, p.ks * M, p)


def rhs_per(s: PerState, u2: float, p: ModelParams) -> np.ndarray:
    return np.array(_per_rhs(s.P0, s.P1, s.P2, s.PN, u2, p))


def rhs_full(s: FullState, p: ModelParams, pn_feedback: float | None = None) -> np.ndarray:
    """Derivative of the closed loop at ``s``.

    ``pn_feedback`` is the nuclear PER level seen by transcription. It
    defaults to ``s.PN`` (no delay); the delay integrator passes the lagged
    value instead.
    """
    if pn_feedback is None:
        pn_feedback = s.PN
    return np.array(full_rhs_tuple(s.M, s.P0, s.P1, s.P2, s.PN, pn_feedback, p))


TABLE_PARAMS = ModelParams()
