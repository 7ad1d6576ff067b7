"""Verdict-producing checkers for the proved thinning inequalities, the two
refuted entropy-power conjectures, and a seeded random-ULC search harness."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import (DomainError, NotThinnableError, ParameterError,
                     PreconditionError)
from .entropy_functionals import entropy, entropy_power, rel_entropy_poisson
from .inequality_verdict import InequalityVerdict, make_verdict
from .pmf_core import (DEFAULT_TOLERANCES, FamilySpec, FinitePmf,
                       ToleranceConfig, construct, is_ulc, mean,
                       total_variation)
from .semigroup import isoperimetric_check
from .transforms import convolve, inverse_thin, thin

NON_ULC_NOTE = "outside theorem hypotheses"

# alpha values used by the grid-sweeping searches
ALPHA_GRID = tuple(np.linspace(0.1, 0.9, 9))

CONJECTURES = ("firstepi", "tepi", "teci", "rtepi", "hmon", "dsub", "isop")
PROVED = frozenset({"teci", "rtepi", "hmon", "dsub", "isop", "epilike",
                    "discepilike", "tepis"})


@dataclass(frozen=True)
class SearchReport:
    """Outcome of a seeded randomized sweep of one inequality."""

    conjecture: str
    trials: int
    violations: list
    tightest_margin: float
    seed: int

    def to_json(self) -> dict:
        return {
            "conjecture": self.conjecture,
            "trials": self.trials,
            "violations": self.violations,
            "tightest_margin": self.tightest_margin,
            "seed": self.seed,
        }


def _ulc_note(cfg, allow_non_ulc, *pmfs) -> str:
    if all(is_ulc(p, cfg) for p in pmfs):
        return ""
    if not allow_non_ulc:
        raise PreconditionError(
            "input pmf is not ultra log-concave; pass allow_non_ulc=True "
            "to evaluate outside the theorem hypotheses")
    return NON_ULC_NOTE


def _check_alpha(alpha: float) -> None:
    if not 0.0 <= alpha <= 1.0:
        raise ParameterError(f"alpha = {alpha!r} outside [0, 1]")


def _echo(p: FinitePmf) -> list:
    return p.probs.tolist()


def check_teci(x: FinitePmf, y: FinitePmf, alpha: float,
               cfg: ToleranceConfig = DEFAULT_TOLERANCES,
               allow_non_ulc: bool = False) -> InequalityVerdict:
    """H(T_a X + T_(1-a) Y) >= a H(X) + (1-a) H(Y) for ULC X, Y."""
    _check_alpha(alpha)
    note = _ulc_note(cfg, allow_non_ulc, x, y)
    mixed = convolve(thin(x, alpha, cfg), thin(y, 1.0 - alpha, cfg), cfg)
    lhs = entropy(mixed).nats
    rhs = alpha * entropy(x).nats + (1.0 - alpha) * entropy(y).nats
    return make_verdict("teci", lhs, rhs, lhs - rhs, cfg,
                        inputs={"alpha": alpha, "x": _echo(x), "y": _echo(y)},
                        units="nats", note=note)


def check_rtepi(x: FinitePmf, alpha: float,
                cfg: ToleranceConfig = DEFAULT_TOLERANCES,
                allow_non_ulc: bool = False) -> InequalityVerdict:
    """V(T_a X) >= a V(X) for ULC X."""
    _check_alpha(alpha)
    note = _ulc_note(cfg, allow_non_ulc, x)
    lhs = entropy_power(thin(x, alpha, cfg), cfg)
    rhs = alpha * entropy_power(x, cfg)
    return make_verdict("rtepi", lhs, rhs, lhs - rhs, cfg,
                        inputs={"alpha": alpha, "x": _echo(x)},
                        units="poisson-rate", note=note)


def _entropy_of_preimages(x, y, alpha, cfg):
    xs = inverse_thin(x, alpha, cfg)
    ys = inverse_thin(y, 1.0 - alpha, cfg)
    return entropy(xs).nats, entropy(ys).nats


def check_epilike(x: FinitePmf, y: FinitePmf,
                  cfg: ToleranceConfig = DEFAULT_TOLERANCES,
                  allow_non_ulc: bool = False,
                  grid_step: float = 1e-3) -> InequalityVerdict:
    """H(X + Y) >= H(X*) where X = T_a X*, Y = T_(1-a) Y*, H(X*) = H(Y*).

    The feasible alpha set (both preimages exist) is scanned on a coarse
    grid; the entropy-matching alpha is then located by bisection on the
    difference H(X*_a) - H(Y*_a) inside a bracketing grid cell, preferring
    the cell nearest the heuristic alpha = V(X)/(V(X)+V(Y)).  When no
    feasible decomposition exists the check raises DomainError.
    """
    note = _ulc_note(cfg, allow_non_ulc, x, y)
    v_x, v_y = entropy_power(x, cfg), entropy_power(y, cfg)
    heuristic = v_x / (v_x + v_y) if v_x + v_y > 0.0 else 0.5

    grid = np.arange(grid_step, 1.0, grid_step)
    feasible = []
    for a in grid:
        try:
            hx, hy = _entropy_of_preimages(x, y, float(a), cfg)
        except NotThinnableError:
            continue
        feasible.append((float(a), hx - hy))
    if not feasible:
        raise DomainError("no admissible (X*, Y*) decomposition: "
                          "no alpha makes both preimages valid pmfs")

    exact = min(feasible, key=lambda ad: abs(ad[1]))
    brackets = []
    for (a0, d0), (a1, d1) in zip(feasible, feasible[1:]):
        if a1 - a0 <= 2.5 * grid_step and d0 * d1 < 0.0:
            brackets.append((a0, d0, a1, d1))
    if not brackets:
        # no strict sign change; accept a grid point that already matches
        if abs(exact[1]) <= cfg.tol_ineq:
            alpha = exact[0]
        else:
            raise DomainError("no admissible (X*, Y*) decomposition: "
                              "preimage entropies never cross on the feasible set")
    else:
        a0, d0, a1, d1 = min(
            brackets, key=lambda br: abs(0.5 * (br[0] + br[2]) - heuristic))
        while a1 - a0 > cfg.tol_root:
            am = 0.5 * (a0 + a1)
            try:
                hx, hy = _entropy_of_preimages(x, y, am, cfg)
            except NotThinnableError:
                # feasibility is an interval in exact arithmetic, so a ragged
                # midpoint only happens at the numeric edge; stop here
                break
            dm = hx - hy
            if dm == 0.0:
                a0 = a1 = am
                break
            if (dm > 0.0) == (d0 > 0.0):
                a0, d0 = am, dm
            else:
                a1, d1 = am, dm
        alpha = 0.5 * (a0 + a1)
        if abs(exact[1]) == 0.0 and abs(exact[0] - heuristic) <= abs(alpha - heuristic):
            alpha = exact[0]

    x_star = inverse_thin(x, alpha, cfg)
    y_star = inverse_thin(y, 1.0 - alpha, cfg)
    lhs = entropy(convolve(x, y, cfg)).nats
    rhs = entropy(x_star).nats
    return make_verdict(
        "epilike", lhs, rhs, lhs - rhs, cfg,
        inputs={"alpha": alpha, "alpha_heuristic": heuristic,
                "h_xstar": entropy(x_star).nats,
                "h_ystar": entropy(y_star).nats,
                "x": _echo(x), "y": _echo(y)},
        units="nats", note=note)


def _leave_out_weights(alphas: np.ndarray) -> np.ndarray:
    return np.array([math.fsum(np.delete(alphas, l)) for l in range(alphas.size)])


def _validate_simplex(xs, alphas) -> np.ndarray:
    alphas = np.asarray(alphas, dtype=float)
    if len(xs) != alphas.size or len(xs) < 2:
        raise PreconditionError("need n+1 >= 2 pmfs with one alpha each")
    if np.any(alphas <= 0.0):
        raise PreconditionError("every alpha_i must be strictly positive")
    if abs(math.fsum(alphas) - 1.0) > 1e-12:
        raise PreconditionError("alphas must sum to 1 within 1e-12")
    return alphas


def _thinned_sum(xs, alphas, cfg) -> FinitePmf:
    return reduce(lambda a, b: convolve(a, b, cfg),
                  (thin(p, float(a), cfg) for p, a in zip(xs, alphas)))


def check_hmon(xs, alphas, cfg: ToleranceConfig = DEFAULT_TOLERANCES,
               allow_non_ulc: bool = False) -> InequalityVerdict:
    """n H(sum_i T_(a_i) X_i) >= sum_l a^(l) H(leave-one-out sum), ULC X_i."""
    alphas = _validate_simplex(xs, alphas)
    note = _ulc_note(cfg, allow_non_ulc, *xs)
    n = len(xs) - 1
    lhs = n * entropy(_thinned_sum(xs, alphas, cfg)).nats
    comp = _leave_out_weights(alphas)
    terms = []
    for l in range(len(xs)):
        rest = [p for i, p in enumerate(xs) if i != l]
        scaled = np.delete(alphas, l) / comp[l]
        terms.append(comp[l] * entropy(_thinned_sum(rest, scaled, cfg)).nats)
    rhs = math.fsum(terms)
    return make_verdict("hmon", lhs, rhs, lhs - rhs, cfg,
                        inputs={"alphas": alphas.tolist(),
                                "xs": [_echo(p) for p in xs]},
                        units="nats", note=note)


def check_dsub(xs, alphas,
               cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> InequalityVerdict:
    """sum_l a^(l) D(leave-one-out sum) >= n D(full sum); no ULC needed."""
    alphas = _validate_simplex(xs, alphas)
    n = len(xs) - 1
    rhs = n * rel_entropy_poisson(_thinned_sum(xs, alphas, cfg), cfg)
    comp = _leave_out_weights(alphas)
    terms = []
    for l in range(len(xs)):
        rest = [p for i, p in enumerate(xs) if i != l]
        scaled = np.delete(alphas, l) / comp[l]
        terms.append(comp[l] * rel_entropy_poisson(_thinned_sum(rest, scaled, cfg), cfg))
    lhs = math.fsum(terms)
    return make_verdict("dsub", lhs, rhs, lhs - rhs, cfg,
                        inputs={"alphas": alphas.tolist(),
                                "xs": [_echo(p) for p in xs]},
                        units="nats")


def check_discepilike(ystars, alphas,
                      cfg: ToleranceConfig = DEFAULT_TOLERANCES,
                      allow_non_ulc: bool = False) -> InequalityVerdict:
    """H(sum_i T_(a_i) Y_i*) >= H*, the common leave-one-out entropy.

    Precondition: the n+1 leave-one-out entropies agree within tol_ineq;
    their mean is used as H*.
    """
    alphas = _validate_simplex(ystars, alphas)
    note = _ulc_note(cfg, allow_non_ulc, *ystars)
    comp = _leave_out_weights(alphas)
    h_loo = []
    for l in range(len(ystars)):
        rest = [p for i, p in enumerate(ystars) if i != l]
        scaled = np.delete(alphas, l) / comp[l]
        h_loo.append(entropy(_thinned_sum(rest, scaled, cfg)).nats)
    spread = max(h_loo) - min(h_loo)
    if spread > cfg.tol_ineq:
        raise PreconditionError(
            f"leave-one-out entropies disagree: spread = {spread:.3e} nats")
    h_star = math.fsum(h_loo) / len(h_loo)
    lhs = entropy(_thinned_sum(ystars, alphas, cfg)).nats
    return make_verdict("discepilike", lhs, h_star, lhs - h_star, cfg,
                        inputs={"alphas": alphas.tolist(),
                                "h_leave_one_out": h_loo,
                                "ystars": [_echo(p) for p in ystars]},
                        units="nats", note=note)


def check_conjecture_v_superadd(x: FinitePmf, y: FinitePmf,
                                cfg: ToleranceConfig = DEFAULT_TOLERANCES
                                ) -> InequalityVerdict:
    """V(X+Y) >= V(X) + V(Y); refuted in general, verdict reports either way."""
    lhs = entropy_power(convolve(x, y, cfg), cfg)
    rhs = entropy_power(x, cfg) + entropy_power(y, cfg)
    return make_verdict("firstepi", lhs, rhs, lhs - rhs, cfg,
                        inputs={"x": _echo(x), "y": _echo(y)},
                        units="poisson-rate")


def check_conjecture_tepi(x: FinitePmf, y: FinitePmf, alpha: float,
                          cfg: ToleranceConfig = DEFAULT_TOLERANCES,
                          allow_non_ulc: bool = False) -> InequalityVerdict:
    """V(T_a X + T_(1-a) Y) >= a V(X) + (1-a) V(Y); refuted in general."""
    _check_alpha(alpha)
    note = _ulc_note(cfg, allow_non_ulc, x, y)
    mixed = convolve(thin(x, alpha, cfg), thin(y, 1.0 - alpha, cfg), cfg)
    lhs = entropy_power(mixed, cfg)
    rhs = alpha * entropy_power(x, cfg) + (1.0 - alpha) * entropy_power(y, cfg)
    return make_verdict("tepi", lhs, rhs, lhs - rhs, cfg,
                        inputs={"alpha": alpha, "x": _echo(x), "y": _echo(y)},
                        units="poisson-rate", note=note)


def tepis_ratio_condition(v_x: float, v_y: float, beta: float, gamma: float,
                          tol: float = 0.0) -> bool:
    """beta/(1-gamma) <= V(Y)/V(X) <= (1-beta)/gamma, via cross products."""
    return (beta * v_x <= (1.0 - gamma) * v_y + tol
            and gamma * v_y <= (1.0 - beta) * v_x + tol)


def check_tepis(x: FinitePmf, y: FinitePmf, beta: float, gamma: float,
                cfg: ToleranceConfig = DEFAULT_TOLERANCES,
                allow_non_ulc: bool = False) -> InequalityVerdict:
    """V(T_b X + T_g Y) >= b V(X) + g V(Y) under either admissible condition.

    Condition `ratio`: beta/(1-gamma) <= V(Y)/V(X) <= (1-beta)/gamma, which
    is the same as beta V(X) + gamma V(Y) <= min(V(X), V(Y)).  Condition
    `poisson-leg`: beta + gamma = 1 and Y is Poisson with rate <= V(X).
    At least one must hold; the verdict records which.
    """
    _check_alpha(beta)
    _check_alpha(gamma)
    note = _ulc_note(cfg, allow_non_ulc, x, y)
    v_x, v_y = entropy_power(x, cfg), entropy_power(y, cfg)
    tol = cfg.tol_ineq * max(1.0, v_x, v_y)
    cond_ratio = tepis_ratio_condition(v_x, v_y, beta, gamma, tol)
    mu = mean(y)
    poisson_like = total_variation(
        y, construct(FamilySpec.poisson(mu), cfg)) <= 1e-9
    cond_poisson = (abs(beta + gamma - 1.0) <= 1e-9 and poisson_like
                    and mu <= v_x + tol)
    if not (cond_ratio or cond_poisson):
        raise PreconditionError(
            "neither admissibility condition holds: ratio window fails and "
            "Y is not a Poisson leg with rate <= V(X)")
    condition = ("both" if cond_ratio and cond_poisson
                 else "ratio" if cond_ratio else "poisson-leg")
    mixed = convolve(thin(x, beta, cfg), thin(y, gamma, cfg), cfg)
    lhs = entropy_power(mixed, cfg)
    rhs = beta * v_x + gamma * v_y
    return make_verdict("tepis", lhs, rhs, lhs - rhs, cfg,
                        inputs={"beta": beta, "gamma": gamma,
                                "condition": condition,
                                "v_x": v_x, "v_y": v_y,
                                "x": _echo(x), "y": _echo(y)},
                        units="poisson-rate", note=note)


def random_ulc(seed: int, max_bernoullis: int = 3, max_poisson_rate: float = 2.0,
               cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> FinitePmf:
    """Seeded random ULC pmf: a Bernoulli convolution, optionally with a
    Poisson factor.  Deterministic for a given seed."""
    if max_bernoullis < 1 or max_poisson_rate < 0.0:
        raise ParameterError("need max_bernoullis >= 1 and max_poisson_rate >= 0")
    rng = np.random.default_rng(seed)
    count = int(rng.integers(1, max_bernoullis + 1))
    vec = np.array([1.0])
    for p in rng.uniform(0.05, 0.95, size=count):
        vec = np.convolve(vec, [1.0 - p, p])
    pmf = FinitePmf(vec, cfg)
    if max_poisson_rate > 0.0:
        rate = float(rng.uniform(0.0, max_poisson_rate))
        if rate > 0.0:
            pmf = convolve(pmf, construct(FamilySpec.poisson(rate), cfg), cfg)
    if not is_ulc(pmf, cfg):
        raise RuntimeError("generator bug: produced a non-ULC pmf")
    return pmf


def _simplex(rng, size: int) -> np.ndarray:
    alphas = rng.dirichlet(np.full(size, 2.0))
    return alphas / math.fsum(alphas)


def search(conjecture: str, trials: int, seed: int,
           cfg: ToleranceConfig = DEFAULT_TOLERANCES,
           max_bernoullis: int = 3,
           max_poisson_rate: float = 2.0) -> SearchReport:
    """Sweep one inequality over seeded random ULC inputs.

    Trial seeds are pre-drawn from the master seed, so the report is
    identical however the trials are scheduled.  Violating verdicts are
    collected verbatim; for the proved statements any violation indicates
    an implementation bug rather than a counterexample.
    """
    if conjecture not in CONJECTURES:
        raise ParameterError(
            f"unknown conjecture {conjecture!r}; expected one of {CONJECTURES}")
    if trials < 1:
        raise ParameterError("trials must be >= 1")
    master = np.random.default_rng(seed)
    trial_seeds = master.integers(0, 2 ** 62, size=trials)
    violations = []
    tightest = math.inf

    def record(trial, trial_seed, verdict):
        nonlocal tightest
        tightest = min(tightest, verdict.margin)
        if not verdict.holds:
            violations.append({"trial": int(trial), "seed": int(trial_seed),
                               "verdict": verdict.to_json()})

    for trial in range(trials):
        t_seed = int(trial_seeds[trial])
        rng = np.random.default_rng(t_seed)
        draw = lambda: random_ulc(int(rng.integers(0, 2 ** 62)),
                                  max_bernoullis, max_poisson_rate, cfg)
        if conjecture in ("teci", "tepi"):
            x, y = draw(), draw()
            checker = check_teci if conjecture == "teci" else check_conjecture_tepi
            for a in ALPHA_GRID:
                record(trial, t_seed, checker(x, y, float(a), cfg))
        elif conjecture == "rtepi":
            x = draw()
            for a in ALPHA_GRID:
                record(trial, t_seed, check_rtepi(x, float(a), cfg))
        elif conjecture == "isop":
            record(trial, t_seed, isoperimetric_check(draw(), cfg))
        elif conjecture == "firstepi":
            record(trial, t_seed, check_conjecture_v_superadd(draw(), draw(), cfg))
        else:  # hmon / dsub
            size = int(rng.integers(2, 4))
            xs = [draw() for _ in range(size)]
            alphas = _simplex(rng, size)
            checker = check_hmon if conjecture == "hmon" else check_dsub
            record(trial, t_seed, checker(xs, alphas, cfg))

    return SearchReport(conjecture=conjecture, trials=trials,
                        violations=violations, tightest_margin=tightest,
                        seed=seed)
