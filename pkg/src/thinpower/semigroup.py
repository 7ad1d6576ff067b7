"""Interpolation machinery: the thin-then-add-Poisson map, its evolution
equation as a verification target, the entropy-preserving path, and the
isoperimetric comparison it certifies."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericError, ParameterError, PreconditionError
from .entropy_functionals import (entropy, entropy_power, l_functional,
                                  poisson_entropy_derivative, u_functional)
from .inequality_verdict import InequalityVerdict, make_verdict
from .pmf_core import (DEFAULT_TOLERANCES, FamilySpec, FinitePmf,
                       ToleranceConfig, construct, is_ulc, mean)
from .transforms import convolve, thin


@dataclass(frozen=True)
class PathReport:
    """Sampled entropy-preserving interpolation between a pmf and a Poisson.

    Parallel arrays over t_grid: the Poisson rate f(t) solved to keep entropy
    constant, the drift r(t) = f(t)/t - f'(t) from differencing f, the
    entropy and the U functional along the path, plus the extrapolated f(0)
    and the entropy power it should match.
    """

    t_grid: np.ndarray
    f_vals: np.ndarray
    r_vals: np.ndarray
    h_vals: np.ndarray
    u_vals: np.ndarray
    f0_extrapolated: float
    v_target: float

    def to_json(self) -> dict:
        return {
            "t_grid": self.t_grid.tolist(),
            "f_vals": self.f_vals.tolist(),
            "r_vals": self.r_vals.tolist(),
            "h_vals": self.h_vals.tolist(),
            "u_vals": self.u_vals.tolist(),
            "f0_extrapolated": self.f0_extrapolated,
            "v_target": self.v_target,
        }


def default_t_grid(points: int = 40) -> np.ndarray:
    """Logarithmically spaced grid on [0.02, 1], dense near the extrapolation end."""
    if points < 2:
        raise ParameterError("t grid needs at least 2 points")
    return np.geomspace(0.02, 1.0, points)


def evolve(x: FinitePmf, t: float, f_val: float,
           cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> FinitePmf:
    """Thin x by t, then add an independent Poisson(f_val)."""
    if not 0.0 < t <= 1.0:
        raise ParameterError(f"evolution time {t!r} outside (0, 1]")
    if f_val < 0.0:
        raise ParameterError(f"added Poisson rate {f_val!r} must be >= 0")
    thinned = thin(x, t, cfg)
    if f_val == 0.0:
        return thinned
    return convolve(thinned, construct(FamilySpec.poisson(f_val), cfg), cfg)


def _padded(p: FinitePmf, width: int) -> np.ndarray:
    out = np.zeros(width)
    out[:len(p)] = p.probs
    return out


def pde_residual(x: FinitePmf, t: float, r_val: float, f_val: float,
                 fd_step: float,
                 cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> float:
    """Max deviation of the evolved pmf from its evolution equation at time t.

    Checks d/dt P_t(z) (by central differencing the actual thin+add map)
    against g(z-1) - g(z) with g(z) = (z+1) P_t(z+1)/t - r(t) P_t(z).  For
    the pure-thinning flow pass r_val = f_val = 0.  The equation is used as
    a verification target only; evolution itself is always computed directly.
    """
    if fd_step <= 0.0:
        raise ParameterError("fd_step must be positive")
    if not (0.0 < t - fd_step and t + fd_step < 1.0):
        raise ParameterError("need 0 < t - fd_step and t + fd_step < 1")
    if f_val == 0.0 and r_val == 0.0:
        f_lo = f_hi = 0.0
    else:
        # r = f/t - f', so f(t +- h) = f +- h*(f/t - r) to first order
        slope = f_val / t - r_val
        f_hi, f_lo = f_val + fd_step * slope, f_val - fd_step * slope
        if min(f_hi, f_lo) < 0.0:
            raise ParameterError("fd_step too large: perturbed rate went negative")
    p_mid = evolve(x, t, f_val, cfg)
    p_hi = evolve(x, t + fd_step, f_hi, cfg)
    p_lo = evolve(x, t - fd_step, f_lo, cfg)
    width = max(len(p_mid), len(p_hi), len(p_lo)) + 1
    mid = _padded(p_mid, width)
    dpdt = (_padded(p_hi, width) - _padded(p_lo, width)) / (2.0 * fd_step)
    z = np.arange(width)
    flux = np.zeros(width)
    flux[:-1] = (z[1:] * mid[1:]) / t
    flux -= r_val * mid
    rhs = np.concatenate(([0.0], flux[:-1])) - flux
    return float(np.max(np.abs(dpdt - rhs)))


def _solve_rate_for_entropy(base: FinitePmf, h_target: float, f_hi: float,
                            t: float,
                            cfg: ToleranceConfig) -> float:
    """Poisson rate f >= 0 with H(base + Poisson(f)) = h_target, by bisection.

    Adding independent Poisson mass strictly increases entropy, so the
    objective is increasing in f.
    """
    def gap(f):
        if f == 0.0:
            return entropy(base).nats - h_target
        noisy = convolve(base, construct(FamilySpec.poisson(f), cfg), cfg)
        return entropy(noisy).nats - h_target

    g_lo = gap(0.0)
    if g_lo > 0.0:
        if g_lo <= 10.0 * cfg.tol_root:
            return 0.0
        raise NumericError("entropy gap positive at f = 0; no bracket",
                           {"t": t, "gap_at_zero": g_lo})
    g_hi = gap(f_hi)
    if g_hi < 0.0:
        raise NumericError("entropy gap negative at upper rate; no bracket",
                           {"t": t, "f_hi": f_hi, "gap_at_f_hi": g_hi})
    lo, hi = 0.0, f_hi
    while hi - lo > cfg.tol_root:
        mid = 0.5 * (lo + hi)
        if gap(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _grid_derivative(t: np.ndarray, f: np.ndarray) -> np.ndarray:
    """Central differences of f on a non-uniform grid; one-sided at the ends."""
    d = np.empty_like(f)
    hm = t[1:-1] - t[:-2]
    hp = t[2:] - t[1:-1]
    d[1:-1] = (hm ** 2 * f[2:] - hp ** 2 * f[:-2]
               + (hp ** 2 - hm ** 2) * f[1:-1]) / (hm * hp * (hm + hp))
    d[0] = (f[1] - f[0]) / (t[1] - t[0])
    d[-1] = (f[-1] - f[-2]) / (t[-1] - t[-2])
    return d


def entropy_preserving_path(x: FinitePmf, t_grid=None,
                            cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> PathReport:
    """Solve the constant-entropy interpolation X_t = thin(x, t) + Poisson(f(t)).

    Defined for ultra-log-concave x with l_functional(x) > 0, the regime in
    which entropy strictly grows under thinning-with-replenishment and the
    path runs from x at t = 1 towards a Poisson of rate V(x) as t -> 0.
    The report records f, its extrapolation to t = 0, and the U functional,
    which should be non-increasing in t.
    """
    if t_grid is None:
        t_grid = default_t_grid()
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size < 2 or np.any(np.diff(t_grid) <= 0):
        raise ParameterError("t grid must be strictly increasing with >= 2 points")
    if not (0.0 < t_grid[0] and abs(t_grid[-1] - 1.0) < 1e-12):
        raise ParameterError("t grid must sit in (0, 1] and end at 1")
    if not is_ulc(x, cfg):
        raise PreconditionError("entropy-preserving path requires a ULC input")
    if not l_functional(x, cfg) > 0.0:
        raise DomainError("path undefined (L <= 0)")

    h_target = entropy(x).nats
    v_target = entropy_power(x, cfg)
    f_hi = v_target + mean(x) + 1.0

    f_vals = np.empty(t_grid.size)
    h_vals = np.empty(t_grid.size)
    u_vals = np.empty(t_grid.size)
    for i, t in enumerate(t_grid):
        if t == 1.0:
            f_vals[i] = 0.0
            state = x
        else:
            base = thin(x, float(t), cfg)
            f_vals[i] = _solve_rate_for_entropy(base, h_target, f_hi, float(t), cfg)
            state = (convolve(base,
                              construct(FamilySpec.poisson(f_vals[i]), cfg), cfg)
                     if f_vals[i] > 0.0 else base)
        h_vals[i] = entropy(state).nats
        u_vals[i] = u_functional(state, cfg)

    f_prime = _grid_derivative(t_grid, f_vals)
    r_vals = f_vals / t_grid - f_prime
    slope = (f_vals[1] - f_vals[0]) / (t_grid[1] - t_grid[0])
    f0 = f_vals[0] - slope * t_grid[0]
    return PathReport(t_grid=t_grid, f_vals=f_vals, r_vals=r_vals,
                      h_vals=h_vals, u_vals=u_vals,
                      f0_extrapolated=float(f0), v_target=v_target)


def isoperimetric_check(x: FinitePmf,
                        cfg: ToleranceConfig = DEFAULT_TOLERANCES,
                        allow_non_ulc: bool = False) -> InequalityVerdict:
    """Verdict for L(X) <= V(X) * J(V(X)); equality at Poisson inputs."""
    note = ""
    if not is_ulc(x, cfg):
        if not allow_non_ulc:
            raise PreconditionError("isoperimetric check requires a ULC pmf")
        note = "outside theorem hypotheses"
    lhs = l_functional(x, cfg)
    v = entropy_power(x, cfg)
    rhs = v * poisson_entropy_derivative(v, cfg) if v > 0.0 else 0.0
    return make_verdict("isop", lhs=lhs, rhs=rhs, margin=rhs - lhs, cfg=cfg,
                        inputs={"v": v}, units="nats", note=note)
