"""Steady-state input/output maps of the two blocks and the checkable hypotheses.

The PER equilibrium under a constant input ``c`` is solved in closed form by
the cascade

    vd*P2/(kd+P2)        = c
    V3*P1/(K3+P1)        = c + V4*P2/(K4+P2)
    V1*P0/(K1+P0)        = c + V2*P1/(K2+P1)
    k2*PN                = k1*P2

each line inverting one saturating rate. Each stage can only fail if its
target reaches the corresponding maximum rate.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import ConstraintViolation, SaturationExceeded
from .model import ModelParams, PerState, _ipow, hill_rate, mm_rate

DEFAULT_MBAR = 2.45
VS_BOUND = 0.54


def char_mrna(u1: float, p: ModelParams) -> float:
    """Steady mRNA level for a constant nuclear-PER input ``u1``.

    Exists only while transcription at ``u1`` stays below the maximal
    degradation rate vm; always the case when vs < vm.
    """
    kin = _ipow(p.KI, p.n)
    denom = p.vm * kin + p.vm * _ipow(u1, p.n) - p.vs * kin
    if denom <= 0.0:
        raise ConstraintViolation(
            f"no mRNA steady state at u1={u1!r}: transcription {hill_rate(u1, p):.6g} >= vm={p.vm}"
        )
    return p.vs * kin * p.km / denom


def invert_mm(V: float, K: float, a: float) -> float:
    """Solve ``V*x/(K+x) = a`` for ``x >= 0``."""
    if a < 0:
        raise ValueError(f"rate target must be nonnegative, got {a}")
    if a >= V:
        raise SaturationExceeded(
            f"target rate {a!r} is not below the maximum rate {V!r}", target=a, limit=V
        )
    return K * a / (V - a)


def _stage(name, V, K, a):
    try:
        return invert_mm(V, K, a)
    except SaturationExceeded as exc:
        raise SaturationExceeded(
            f"PER equilibrium infeasible at stage {name}: target {a:.6g} >= limit {V:.6g}",
            stage=name,
            target=a,
            limit=V,
        ) from exc


def char_per(c: float, p: ModelParams) -> PerState:
    """Unique PER-block equilibrium for constant input ``c``."""
    P2 = _stage("P2", p.vd, p.kd, c)
    PN = p.k1 / p.k2 * P2
    P1 = _stage("P1", p.V3, p.K3, c + mm_rate(p.V4, p.K4, P2))
    P0 = _stage("P0", p.V1, p.K1, c + mm_rate(p.V2, p.K2, P1))
    return PerState(P0, P1, P2, PN)


@dataclass(frozen=True)
class Inequality:
    """``lhs < rhs`` (or ``<=`` when ``strict`` is False), with both sides kept."""

    label: str
    lhs: float
    rhs: float
    strict: bool = True

    @property
    def holds(self) -> bool:
        return self.lhs < self.rhs if self.strict else self.lhs <= self.rhs

    def __bool__(self):
        return self.holds

    def describe(self) -> str:
        op = "<" if self.strict else "<="
        mark = "ok" if self.holds else "FAIL"
        return f"{self.label}: {self.lhs:.6g} {op} {self.rhs:.6g}  [{mark}]"


@dataclass(frozen=True)
class ConditionReport:
    C1: Inequality
    C2: Inequality
    C3: Inequality
    C4: Inequality
    C1p: Inequality
    c_max: float

    @property
    def overall(self) -> bool:
        return bool(self.C1 and self.C2 and self.C3 and self.C4)

    def items(self):
        return [self.C1, self.C2, self.C3, self.C4, self.C1p]

    def to_dict(self) -> dict:
        out = {"c_max": self.c_max, "overall": self.overall}
        for name in ("C1", "C2", "C3", "C4", "C1p"):
            ineq = getattr(self, name)
            out[name] = {"lhs": ineq.lhs, "rhs": ineq.rhs, "holds": ineq.holds}
        return out


def check_proposition_conditions(p: ModelParams, c_max: float) -> ConditionReport:
    """Hypotheses under which the PER block has a globally attracting equilibrium
    for every constant input up to ``c_max``."""
    return ConditionReport(
        C1=Inequality("C1  vd+V2 < V1", p.vd + p.V2, p.V1),
        C2=Inequality("C2  V1+V4 < V2+V3", p.V1 + p.V4, p.V2 + p.V3),
        C3=Inequality("C3  c_max < vd", c_max, p.vd),
        C4=Inequality("C4  vd+V4 < V3", p.vd + p.V4, p.V3),
        C1p=Inequality("C1' c_max+V2 < V1", c_max + p.V2, p.V1),
        c_max=c_max,
    )


@dataclass(frozen=True)
class StateSpaceReport:
    vs_bound: Inequality
    vs_lt_vm: Inequality
    mbar_lower: Inequality
    mbar_upper: Inequality
    mbar: float

    @property
    def vs_bound_ok(self) -> bool:
        return self.vs_bound.holds

    @property
    def vs_lt_vm_ok(self) -> bool:
        return self.vs_lt_vm.holds

    @property
    def mbar_lower_ok(self) -> bool:
        return self.mbar_lower.holds

    @property
    def mbar_upper_ok(self) -> bool:
        return self.mbar_upper.holds

    @property
    def overall(self) -> bool:
        return self.vs_bound_ok and self.vs_lt_vm_ok and self.mbar_lower_ok and self.mbar_upper_ok

    def items(self):
        return [self.vs_bound, self.vs_lt_vm, self.mbar_lower, self.mbar_upper]

    def to_dict(self) -> dict:
        return {
            "mbar": self.mbar,
            "vs_bound_ok": self.vs_bound_ok,
            "vs_lt_vm": self.vs_lt_vm_ok,
            "mbar_lower_ok": self.mbar_lower_ok,
            "mbar_upper_ok": self.mbar_upper_ok,
            "overall": self.overall,
        }


def check_state_space(p: ModelParams, mbar: float = DEFAULT_MBAR) -> StateSpaceReport:
    """Whether ``[0, mbar]`` is a trapping interval for mRNA with output below vd."""
    if p.vs < p.vm:
        lower = p.vs * p.km / (p.vm - p.vs)
    else:
        lower = float("inf")
    return StateSpaceReport(
        vs_bound=Inequality("vs <= 0.54", p.vs, VS_BOUND, strict=False),
        vs_lt_vm=Inequality("vs < vm", p.vs, p.vm),
        mbar_lower=Inequality("vs*km/(vm-vs) <= mbar", lower, mbar, strict=False),
        mbar_upper=Inequality("mbar < vd/ks", mbar, p.vd / p.ks),
        mbar=mbar,
    )


def default_c_max(p: ModelParams, mbar: float = DEFAULT_MBAR) -> float:
    return p.ks * mbar
