"""Hessian machinery behind entropy monotonicity: the cross-entropy
surface Phi over thinning parameters, its analytic Hessian on a dense joint
table, the positive splitting certificate, and the negativity of the
interpolation quadratic form."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import (CapacityError, ConsistencyError, ParameterError,
                     PreconditionError)
from .entropy_functionals import lambda_functional
from .inequality_verdict import make_verdict
from .pmf_core import DEFAULT_TOLERANCES, ToleranceConfig, is_ulc, mean
from .transforms import convolve, thin

DEFAULT_CELL_BUDGET = 10_000_000


@dataclass(frozen=True)
class JointTable:
    """Dense joint pmf of independently thinned variables.

    values[x_1, ..., x_m] = prod_i P(T_(alpha_i) X_i = x_i);  `means` holds
    the means of the unthinned inputs (the thinned means are alpha_i*means_i).
    """

    values: np.ndarray
    dims: tuple
    alphas: tuple
    means: tuple


@dataclass(frozen=True)
class SplittingWitness:
    """A positive splitting u of the coupling weights v.

    u has zero diagonal and nonnegative entries; u[i][j] + u[j][i]
    reproduces v_ij and every column sum scaled by beta_j*lambda_j equals
    the common value S.
    """

    u: np.ndarray
    S: float
    beta: np.ndarray
    mu: np.ndarray
    lambdas: np.ndarray

    def to_json(self) -> dict:
        return {"u": self.u.tolist(), "S": self.S,
                "beta": self.beta.tolist(), "mu": self.mu.tolist(),
                "lambdas": self.lambdas.tolist()}


def build_joint(xs, alphas, cfg: ToleranceConfig = DEFAULT_TOLERANCES,
                cell_budget: int = DEFAULT_CELL_BUDGET) -> JointTable:
    """Product table of the thinned inputs, within a dense cell budget."""
    alphas = np.asarray(alphas, dtype=float)
    if len(xs) != alphas.size or len(xs) < 2:
        raise ParameterError("need n+1 >= 2 pmfs with one alpha each")
    if np.any(alphas <= 0.0) or np.any(alphas > 1.0):
        raise ParameterError("every alpha_i must lie in (0, 1]")
    thinned = [thin(p, float(a), cfg) for p, a in zip(xs, alphas)]
    dims = tuple(len(t) for t in thinned)
    cells = math.prod(dims)
    if cells > cell_budget:
        raise CapacityError(
            f"joint table needs {cells} cells, over the budget {cell_budget}")
    values = reduce(np.multiply.outer, (t.probs for t in thinned))
    return JointTable(values=values, dims=dims,
                      alphas=tuple(float(a) for a in alphas),
                      means=tuple(mean(p) for p in xs))


def sum_distribution(table: JointTable) -> np.ndarray:
    """Pmf of x_1 + ... + x_m read off the joint table."""
    total = np.sum(np.indices(table.dims), axis=0)
    return np.bincount(total.ravel(), weights=table.values.ravel())


def phi(xs, alphas, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> float:
    """Cross-entropy functional of the thinned sum, via direct convolution."""
    alphas = np.asarray(alphas, dtype=float)
    if len(xs) != alphas.size or len(xs) < 1:
        raise ParameterError("need pmfs with one alpha each")
    if np.any(alphas < 0.0) or np.any(alphas > 1.0):
        raise ParameterError("every alpha_i must lie in [0, 1]")
    summed = reduce(lambda a, b: convolve(a, b, cfg),
                    (thin(p, float(a), cfg) for p, a in zip(xs, alphas)))
    return lambda_functional(summed, cfg)


def hessian_analytic(xs, alphas, cfg: ToleranceConfig = DEFAULT_TOLERANCES,
                     cell_budget: int = DEFAULT_CELL_BUDGET) -> np.ndarray:
    """Analytic Hessian of phi in the thinning parameters.

    The log-factorial part sums Pr(x) * c_ij(x) * log(s/(s-1)) over the
    joint table, with s the tuple total, c_ii = x_i(x_i - 1)/alpha_i^2 and
    c_ij = x_i x_j/(alpha_i alpha_j) off the diagonal.  Every tuple with a
    zero coefficient is skipped, so the log factor is only taken at s >= 2.
    The remaining part is the exact rank-one term -lambda_i lambda_j / sum_k
    alpha_k lambda_k from the mean functional.
    """
    alphas = np.asarray(alphas, dtype=float)
    if np.any(alphas >= 1.0):
        raise ParameterError("hessian needs every alpha_i in (0, 1)")
    table = build_joint(xs, alphas, cfg, cell_budget)
    m = len(table.dims)
    grids = np.indices(table.dims)
    total = grids.sum(axis=0)
    ratio = np.zeros(table.dims)
    big = total >= 2
    ratio[big] = np.log(total[big] / (total[big] - 1.0))
    base = table.values * ratio

    hess = np.empty((m, m))
    for i in range(m):
        gi = grids[i]
        hess[i, i] = float(np.sum(base * gi * (gi - 1))) / alphas[i] ** 2
        for j in range(i):
            cross = float(np.sum(base * gi * grids[j])) / (alphas[i] * alphas[j])
            hess[i, j] = hess[j, i] = cross
    lam = np.asarray(table.means)
    hess -= np.outer(lam, lam) / float(np.dot(alphas, lam))
    return hess


def hessian_fd(xs, alphas, cfg: ToleranceConfig = DEFAULT_TOLERANCES,
               step: float = 1e-4) -> np.ndarray:
    """Central finite-difference Hessian of phi; the independent cross-check.

    Perturbs the alphas freely inside (0, 1) with no simplex constraint,
    since phi is defined off the simplex.
    """
    alphas = np.asarray(alphas, dtype=float)
    if step <= 0.0:
        raise ParameterError("fd step must be positive")
    if np.any(alphas - 2 * step <= 0.0) or np.any(alphas + 2 * step >= 1.0):
        raise ParameterError("alphas too close to {0, 1} for the fd step")
    m = alphas.size

    def at(delta):
        return phi(xs, alphas + delta, cfg)

    centre = at(np.zeros(m))
    hess = np.empty((m, m))
    for i in range(m):
        ei = np.zeros(m)
        ei[i] = step
        hess[i, i] = (at(ei) - 2.0 * centre + at(-ei)) / step ** 2
        for j in range(i):
            ej = np.zeros(m)
            ej[j] = step
            mixed = (at(ei + ej) - at(ei - ej) - at(-ei + ej) + at(-ei - ej))
            hess[i, j] = hess[j, i] = mixed / (4.0 * step ** 2)
    return hess


def interpolation_point(alphas, leave_out: int, t: float):
    """The path A_l(t) = (1-t)*alpha^(l) + t*e_l and its direction mu_l.

    alpha^(l) is the renormalised vector with component `leave_out` removed;
    mu_l = e_l - alpha^(l) is the constant velocity of the path.
    """
    alphas = np.asarray(alphas, dtype=float)
    m = alphas.size
    if not 0 <= leave_out < m:
        raise ParameterError(f"leave_out index {leave_out} outside 0..{m - 1}")
    loo = alphas.copy()
    loo[leave_out] = 0.0
    comp = math.fsum(loo)
    if comp <= 0.0:
        raise ParameterError("leave-one-out weight vanished")
    loo /= comp
    unit = np.zeros(m)
    unit[leave_out] = 1.0
    return (1.0 - t) * loo + t * unit, unit - loo


def positive_splitting(beta, mu, t: float, lambdas,
                       cfg: ToleranceConfig = DEFAULT_TOLERANCES,
                       identity_tol: float = 1e-10) -> SplittingWitness:
    """Construct and verify the explicit splitting along an interpolation path.

    beta must be A_l(t) and mu the matching direction e_l - alpha^(l); the
    leave-out index is recovered as the positive component of mu.  The
    closed-form u is built from S = lambda^(l)(t) lambda_l / (t (1-t)^2
    lambda(t)) and both defining identities plus the quadratic-mean identity
    are re-verified numerically; any failure raises ConsistencyError naming
    the violated equation (these are algebraic identities, so a failure is
    an implementation bug, not an input problem).
    """
    beta = np.asarray(beta, dtype=float)
    mu = np.asarray(mu, dtype=float)
    lambdas = np.asarray(lambdas, dtype=float)
    m = beta.size
    if not (mu.size == m and lambdas.size == m and m >= 2):
        raise ParameterError("beta, mu, lambdas need a common length >= 2")
    if not 0.0 < t < 1.0:
        raise ParameterError(f"interpolation time {t!r} outside (0, 1)")
    if np.any(lambdas <= 0.0):
        raise ParameterError("every lambda_i must be strictly positive")
    if np.any(beta <= 0.0):
        raise ParameterError("every beta_i must be strictly positive")
    leave_out = int(np.argmax(mu))
    loo = -mu.copy()
    loo[leave_out] = 0.0
    if (abs(mu[leave_out] - 1.0) > 1e-9 or np.any(loo < -1e-9)
            or abs(math.fsum(loo) - 1.0) > 1e-9):
        raise ParameterError("mu is not of the form e_l - alpha^(l)")
    expected_beta = (1.0 - t) * loo
    expected_beta[leave_out] = t
    if np.max(np.abs(beta - expected_beta)) > 1e-9:
        raise ParameterError("beta is not the interpolation point A_l(t) for mu")

    lam_t = math.fsum(beta * lambdas)
    lam_loo_t = lam_t - t * lambdas[leave_out]
    scale = (lam_loo_t * lambdas[leave_out]) / (t * (1.0 - t) ** 2 * lam_t)

    u = np.zeros((m, m))
    for i in range(m):
        if i == leave_out:
            continue
        u[leave_out, i] = scale * beta[i] * lambdas[i]
        u[i, leave_out] = (lambdas[leave_out] ** 2 * beta[i] * lambdas[i]
                           / ((1.0 - t) ** 2 * lam_t))

    def coupling(i, j):
        diff = mu[i] / beta[i] - mu[j] / beta[j]
        return diff * diff * beta[i] * beta[j] * lambdas[i] * lambdas[j]

    tol = identity_tol * max(1.0, abs(scale), float(np.max(np.abs(u))))
    for i in range(m):
        for j in range(i):
            gap = abs(u[i, j] + u[j, i] - coupling(i, j))
            if gap > tol:
                raise ConsistencyError(
                    f"splitting part 1 failed at ({i},{j}): "
                    f"u_ij + u_ji deviates from v_ij by {gap:.3e}")
    for j in range(m):
        col = math.fsum(u[i, j] for i in range(m) if i != j)
        gap = abs(col / (beta[j] * lambdas[j]) - scale)
        if gap > tol:
            raise ConsistencyError(
                f"splitting part 2 failed at column {j}: "
                f"scaled column sum deviates from S by {gap:.3e}")
    lhs = math.fsum(mu * mu * lambdas / beta) - scale
    rhs = math.fsum(mu * lambdas) ** 2 / lam_t
    if abs(lhs - rhs) > tol:
        raise ConsistencyError(
            f"quadratic-mean identity failed: residual {abs(lhs - rhs):.3e}")

    return SplittingWitness(u=u, S=float(scale), beta=beta, mu=mu,
                            lambdas=lambdas)


def _leave_out_weights(alphas: np.ndarray) -> np.ndarray:
    return np.array([math.fsum(np.delete(alphas, l)) for l in range(alphas.size)])


def lambda_monotonicity_sides(xs, alphas,
                              cfg: ToleranceConfig = DEFAULT_TOLERANCES):
    """(n * Lambda(full thinned sum), sum_l a^(l) * Lambda(leave-one-out sum))."""
    alphas = np.asarray(alphas, dtype=float)
    n = len(xs) - 1
    full = reduce(lambda a, b: convolve(a, b, cfg),
                  (thin(p, float(a), cfg) for p, a in zip(xs, alphas)))
    lhs = n * lambda_functional(full, cfg)
    comp = _leave_out_weights(alphas)
    terms = []
    for l in range(len(xs)):
        rest = [p for i, p in enumerate(xs) if i != l]
        scaled = np.delete(alphas, l) / comp[l]
        loo = reduce(lambda a, b: convolve(a, b, cfg),
                     (thin(p, float(a), cfg) for p, a in zip(rest, scaled)))
        terms.append(comp[l] * lambda_functional(loo, cfg))
    return lhs, math.fsum(terms)


def check_quadratic_form(xs, alphas, leave_out: int, t_grid,
                         cfg: ToleranceConfig = DEFAULT_TOLERANCES,
                         cell_budget: int = DEFAULT_CELL_BUDGET):
    """Verdicts for mu_l' Phi''(A_l(t)) mu_l <= 0 over a grid of t.

    Appends one extra verdict evaluating the Lambda monotonicity inequality
    n Lambda(full) >= sum_l a^(l) Lambda(leave-one-out) directly, which is
    what the negative quadratic forms certify through the Taylor step.
    """
    alphas = np.asarray(alphas, dtype=float)
    if np.any(alphas <= 0.0) or abs(math.fsum(alphas) - 1.0) > 1e-12:
        raise PreconditionError("alphas must be a strictly positive simplex vector")
    for p in xs:
        if not is_ulc(p, cfg):
            raise PreconditionError("quadratic form check requires ULC inputs")
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(t_grid <= 0.0) or np.any(t_grid >= 1.0):
        raise ParameterError("t grid must sit strictly inside (0, 1)")

    verdicts = []
    for t in t_grid:
        beta, mu = interpolation_point(alphas, leave_out, float(t))
        hess = hessian_analytic(xs, beta, cfg, cell_budget)
        quad = float(mu @ hess @ mu)
        verdicts.append(make_verdict(
            "suff-quadratic-form", lhs=quad, rhs=0.0, margin=-quad, cfg=cfg,
            inputs={"t": float(t), "leave_out": leave_out,
                    "alphas": alphas.tolist()},
            units="nats"))
    lhs, rhs = lambda_monotonicity_sides(xs, alphas, cfg)
    verdicts.append(make_verdict(
        "lambda-monotonicity", lhs=lhs, rhs=rhs, margin=lhs - rhs, cfg=cfg,
        inputs={"alphas": alphas.tolist()}, units="nats"))
    return verdicts
