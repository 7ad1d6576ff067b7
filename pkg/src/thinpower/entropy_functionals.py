"""Scalar functionals: H, the Poisson entropy curve and its inverse,
relative entropy to the matched Poisson, and the thinning-derivative
functionals L, Lambda, U."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericError, ParameterError
from .numerics import fsum, log_factorials, poisson_log_terms, poisson_support_top
from .pmf_core import DEFAULT_TOLERANCES, FinitePmf, ToleranceConfig, mean

LN2 = math.log(2.0)


@dataclass(frozen=True)
class EntropyValue:
    """Entropy in nats, with the base-2 reading derived on access."""

    nats: float

    @property
    def bits(self) -> float:
        return self.nats / LN2


def entropy(p: FinitePmf) -> EntropyValue:
    """Shannon entropy -sum p log p in nats; zero terms are skipped."""
    mass = p.probs[p.probs > 0.0]
    nats = -fsum(mass * np.log(mass))
    return EntropyValue(nats if nats > 0.0 else 0.0)


def poisson_entropy(t: float, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> float:
    """H(Poisson(t)) in nats, by direct truncated summation.

    The log pmf is evaluated once per support point and used both as weight
    exponent and as logarithm, which keeps this curve consistent with
    entropy(construct(poisson(t))) to ~1e-12 and the absolute error below
    1e-11 for t up to 2000.
    """
    if t < 0.0 or not math.isfinite(t):
        raise ParameterError(f"poisson entropy needs t >= 0, got {t!r}")
    if t == 0.0:
        return 0.0
    _, logp = poisson_log_terms(t, poisson_support_top(t, cfg.tail_eps))
    return -fsum(np.exp(logp) * logp)


def poisson_entropy_derivative(t: float,
                               cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> float:
    """d/dt H(Poisson(t)) = sum_z pmf(z) log((z+1)/t); strictly positive."""
    if t <= 0.0 or not math.isfinite(t):
        raise ParameterError(f"entropy derivative needs t > 0, got {t!r}")
    z, logp = poisson_log_terms(t, poisson_support_top(t, cfg.tail_eps))
    return fsum(np.exp(logp) * (np.log(z + 1.0) - math.log(t)))


def entropy_power(p: FinitePmf, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> float:
    """The Poisson rate t whose entropy equals H(p).

    The bracket starts at max(mean, 1) and doubles until it encloses the
    target (a pmf need not satisfy V <= mean outside the ultra-log-concave
    class), then a bisection-safeguarded Newton iteration using the entropy
    derivative runs the root down to cfg.tol_root.
    """
    target = entropy(p).nats
    if target <= 0.0:
        return 0.0
    lo, hi = 0.0, max(mean(p), 1.0)
    while poisson_entropy(hi, cfg) < target:
        lo, hi = hi, 2.0 * hi
        if hi > 1e15:
            raise NumericError("entropy power bracket expansion diverged",
                               {"target_nats": target})
    best_t, best_err = hi, math.inf
    t = 0.5 * (lo + hi)
    for step in range(200):
        err = poisson_entropy(t, cfg) - target
        if abs(err) < best_err:
            best_t, best_err = t, abs(err)
        if err >= 0.0:
            hi = t
        else:
            lo = t
        if hi - lo <= cfg.tol_root * max(1.0, lo):
            break
        if step % 2 == 0 and t > 0.0:
            proposal = t - err / poisson_entropy_derivative(t, cfg)
        else:
            proposal = 0.5 * (lo + hi)
        if not lo < proposal < hi:
            proposal = 0.5 * (lo + hi)
        t = proposal
    else:
        raise NumericError("entropy power iteration did not converge",
                           {"lo": lo, "hi": hi, "target_nats": target})
    return best_t


def rel_entropy_poisson(p: FinitePmf,
                        cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> float:
    """Relative entropy from p to the Poisson with the same mean."""
    lam = mean(p)
    if lam == 0.0:
        return 0.0
    k = np.arange(len(p))
    log_pi = k * math.log(lam) - lam - log_factorials(len(p) - 1)
    keep = p.probs > 0.0
    value = fsum(p.probs[keep] * (np.log(p.probs[keep]) - log_pi[keep]))
    # nonnegative up to rounding; swallow the rounding
    return 0.0 if -1e-12 < value < 0.0 else value


def l_functional(p: FinitePmf, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> float:
    """sum_z (z+1) p(z+1) log(p(z)/p(z+1)); the thinning derivative of H at 1.

    May be negative.  Needs a support contiguous from its minimum; a gap
    flanked by positive mass raises DomainError.  If the support starts above
    zero the leading log(0) term makes the value -inf.
    """
    probs = p.probs
    start = int(np.flatnonzero(probs)[0])
    if np.any(probs[start:] == 0.0):
        raise DomainError("L undefined (gapped support)")
    if start > 0:
        return -math.inf
    if len(p) == 1:
        return 0.0
    z1 = np.arange(1, len(p))
    return fsum(z1 * probs[1:] * (np.log(probs[:-1]) - np.log(probs[1:])))


def lambda_functional(p: FinitePmf,
                      cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> float:
    """Poisson cross-entropy: mean + E[log X!] - mean*log(mean)."""
    lam = mean(p)
    if lam == 0.0:
        return 0.0
    log_fact = log_factorials(len(p) - 1)
    return lam + fsum(p.probs * log_fact) - lam * math.log(lam)


def u_functional(p: FinitePmf, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> float:
    """H(p) - sum_z p(z+1) log (z+1)! - mean + sum_z (z+1) p(z+1) log(z+1)."""
    h = entropy(p).nats
    if len(p) == 1:
        return h - 0.0 - mean(p)
    z1 = np.arange(1, len(p))
    log_fact = log_factorials(len(p) - 1)
    s_fact = fsum(p.probs[1:] * log_fact[1:])
    s_lin = fsum(z1 * p.probs[1:] * np.log(z1))
    return h - s_fact - mean(p) + s_lin
