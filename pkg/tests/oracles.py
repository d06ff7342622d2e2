"""Independent reference computations (scipy, raw equations) used only by tests."""
import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq, fsolve


def raw_rhs(x, p, fb=None):
    """The five equations written out directly from the parameter fields."""
    M, P0, P1, P2, PN = x
    u = PN if fb is None else fb
    mm = lambda V, K, y: V * y / (K + y)
    return np.array([
        p.vs * p.KI**p.n / (p.KI**p.n + u**p.n) - mm(p.vm, p.km, M),
        p.ks * M - mm(p.V1, p.K1, P0) + mm(p.V2, p.K2, P1),
        mm(p.V1, p.K1, P0) - mm(p.V2, p.K2, P1) - mm(p.V3, p.K3, P1) + mm(p.V4, p.K4, P2),
        mm(p.V3, p.K3, P1) - mm(p.V4, p.K4, P2) - p.k1 * P2 + p.k2 * PN - mm(p.vd, p.kd, P2),
        p.k1 * P2 - p.k2 * PN,
    ])


def per_equilibrium(c, p, guess=(1.0, 1.0, 1.0, 1.0)):
    x = fsolve(lambda s: raw_rhs([c / p.ks, *s], p)[1:], guess, xtol=1e-14)
    return x


def composed_map_numeric(u, p):
    M = brentq(lambda m: raw_rhs([m, 0, 0, 0, u], p)[0], 0.0, 50.0, xtol=1e-15)
    c = p.ks * M
    P2 = brentq(lambda y: c - p.vd * y / (p.kd + y), 0.0, 1e4, xtol=1e-15)
    return p.k1 / p.k2 * P2


def dde_reference(p, tau, t_end, init=0.2, rtol=1e-9, atol=1e-11):
    """Method of steps with scipy's adaptive solver and dense output per interval."""
    pieces = []

    def pn_lag(t):
        s = t - tau
        if s <= 0:
            return init
        for t0, t1, sol in pieces:
            if t0 <= s <= t1:
                return sol(s)[4]
        raise AssertionError("lag outside computed span")

    x = np.full(5, init)
    t0 = 0.0
    while t0 < t_end:
        t1 = min(t0 + tau, t_end)
        sol = solve_ivp(lambda t, y: raw_rhs(y, p, pn_lag(t)), (t0, t1), x,
                        method="DOP853", rtol=rtol, atol=atol, dense_output=True)
        pieces.append((t0, t1, sol.sol))
        x = sol.y[:, -1]
        t0 = t1

    def evaluate(t):
        for a, b, sol in pieces:
            if a <= t <= b:
                return sol(t)
        raise ValueError(t)

    return evaluate
