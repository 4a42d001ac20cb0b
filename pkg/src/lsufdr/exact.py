"""Exact finite-n identities for null p-values linear at zero.

When the null cdf satisfies F(t) = gamma*t on [0, alpha], the step-up
FDR equals (n0/n)*gamma*alpha exactly, for every n and regardless of
what the remaining p-values do.  When linearity only holds on a
shorter range [0, t*], the identity picks up the probability that the
leave-one-out order statistics stay above their critical values, which
this module evaluates exactly by a counting recursion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "LinearNullSpec",
    "BoundarySpec",
    "exact_fdr_linear",
    "boundary_noncrossing_prob",
    "restricted_fdr_check",
]

_EXACT_M_LIMIT = 200


@dataclass(frozen=True)
class LinearNullSpec:
    """Null p-value model with cdf gamma*t on [0, t_star]."""

    gamma: float
    n0: int
    n: int
    t_star: float

    def __post_init__(self):
        if self.gamma < 0.0:
            raise ValueError("gamma must be nonnegative")
        if not 0 <= self.n0 <= self.n or self.n < 1:
            raise ValueError("need 0 <= n0 <= n and n >= 1")
        if not 0.0 < self.t_star <= 1.0:
            raise ValueError("t_star must lie in (0, 1]")
        if self.gamma * self.t_star > 1.0 + 1e-12:
            raise ValueError("gamma * t_star exceeds one")


@dataclass(frozen=True)
class BoundarySpec:
    """Lower bounds b_k..b_m for the top order statistics of m draws."""

    m: int
    lower_bounds: Sequence[float]

    def __post_init__(self):
        bounds = tuple(float(b) for b in self.lower_bounds)
        if self.m < 1:
            raise ValueError("m must be at least 1")
        if len(bounds) > self.m:
            raise ValueError("more bounds than order statistics")
        if any(b < 0.0 or b > 1.0 for b in bounds):
            raise ValueError("bounds must lie in [0, 1]")
        if any(b2 < b1 for b1, b2 in zip(bounds, bounds[1:])):
            raise ValueError("bounds must be nondecreasing")
        object.__setattr__(self, "lower_bounds", bounds)


def exact_fdr_linear(spec: LinearNullSpec, alpha: float) -> float:
    """Step-up FDR under full-range linearity: (n0/n)*gamma*alpha."""
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie strictly between 0 and 1")
    if abs(spec.t_star - alpha) > 1e-12:
        raise ValueError("exact_fdr_linear needs linearity on all of "
                         "[0, alpha] (t_star = alpha)")
    if spec.gamma * alpha > 1.0 + 1e-12:
        raise ValueError("gamma * alpha exceeds one")
    return spec.n0 / spec.n * spec.gamma * alpha


def _kahan_add(total: float, comp: float, term: float):
    y = term - comp
    t = total + y
    comp = (t - total) - y
    return t, comp


def _log_choose(n: int, k: int) -> float:
    return (math.lgamma(n + 1.0) - math.lgamma(k + 1.0)
            - math.lgamma(n - k + 1.0))


def _binom_pmf(k: int, n: int, p: float) -> float:
    if p <= 0.0:
        return 1.0 if k == 0 else 0.0
    if p >= 1.0:
        return 1.0 if k == n else 0.0
    return math.exp(_log_choose(n, k) + k * math.log(p)
                    + (n - k) * math.log1p(-p))


def boundary_noncrossing_prob(spec: BoundarySpec,
                              null_cdf: Callable[[float], float]) -> float:
    """P(all constrained order statistics exceed their bounds).

    With m i.i.d. draws from null_cdf and bounds b_j attached to the
    order statistics j = m-len(bounds)+1, ..., m, the event is
    equivalent to N(b_j) < j for every constrained j, where N counts
    draws at or below a level.  The counting recursion walks the bound
    levels left to right, carrying the distribution of the running
    count, with compensated summation in the convolution.
    """
    m = spec.m
    if m > _EXACT_M_LIMIT:
        raise ValueError(f"exactness window is m <= {_EXACT_M_LIMIT}")
    bounds = spec.lower_bounds
    if not bounds:
        return 1.0
    j0 = m - len(bounds) + 1
    levels = [min(max(float(null_cdf(b)), 0.0), 1.0) for b in bounds]
    caps = [j - 1 for j in range(j0, m + 1)]  # N(level_k) <= caps[k]

    # distribution of N(level_0) restricted to the allowed counts
    beta_prev = levels[0]
    weights = [_binom_pmf(i, m, beta_prev) for i in range(caps[0] + 1)]
    for k in range(1, len(levels)):
        beta = levels[k]
        if beta < beta_prev:
            beta = beta_prev  # guard against cdf rounding
        cond = 0.0 if beta_prev >= 1.0 \
            else (beta - beta_prev) / (1.0 - beta_prev)
        cap = caps[k]
        new = [0.0] * (cap + 1)
        comp = [0.0] * (cap + 1)
        for i, wi in enumerate(weights):
            if wi == 0.0:
                continue
            for j in range(i, cap + 1):
                term = wi * _binom_pmf(j - i, m - i, cond)
                new[j], comp[j] = _kahan_add(new[j], comp[j], term)
        weights = new
        beta_prev = beta
    total, comp = 0.0, 0.0
    for w in weights:
        total, comp = _kahan_add(total, comp, w)
    return min(max(total, 0.0), 1.0)


def _linear_null_quantile(u: np.ndarray, gamma: float,
                          t_star: float) -> np.ndarray:
    """Inverse of the continued linear-at-zero cdf.

    Mass gamma*t_star is uniform on (0, t_star); the remainder is
    spread uniformly over (t_star, 1].
    """
    head = gamma * t_star
    if head >= 1.0:
        return u / gamma
    out = np.where(u <= head,
                   u / max(gamma, 1e-300),
                   t_star + (u - head) * (1.0 - t_star) / (1.0 - head))
    return out


def _linear_null_cdf(t: float, gamma: float, t_star: float) -> float:
    head = gamma * t_star
    if t <= t_star:
        return min(gamma * t, 1.0)
    if head >= 1.0:
        return 1.0
    return head + (t - t_star) * (1.0 - head) / (1.0 - t_star)


def restricted_fdr_check(spec: LinearNullSpec, alpha: float,
                         replicates: int = 10 ** 6,
                         seed: int = 20250808):
    """Monte Carlo and exact sides of the restricted FDR identity.

    Left side: E[(V'/(R' v 1)) * 1{no ecdf crossing beyond t_star}]
    estimated over `replicates` samples with n0 linear-at-zero nulls
    and n - n0 p-values pinned at zero.  Right side: (n0/n) * gamma *
    alpha times the boundary-noncrossing probability of the n-1
    leave-one-out order statistics.  Returns (lhs, rhs).
    """
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie strictly between 0 and 1")
    n, n0 = spec.n, spec.n0
    n1 = n - n0
    gamma, t_star = spec.gamma, min(spec.t_star, alpha)
    r = min(int(math.floor(n * t_star / alpha + 1e-12)), n)

    # Exact side.  The leave-one-out vector holds n0-1 nulls plus n1
    # exact zeros; the zeros occupy the bottom ranks, so a constraint at
    # rank j <= n1 fails outright and otherwise rank j maps to order
    # statistic j - n1 of the remaining nulls.  The bound list
    # c_{r+1}..c_n then attaches to the top n-r of those n0-1 order
    # statistics, which is exactly the BoundarySpec convention.
    if n0 == 0 or r == 0 or (n1 >= 1 and r <= n1):
        rhs = 0.0
    elif r == n:
        rhs = n0 / n * gamma * alpha
    else:
        bounds = [(j + 1) * alpha / n for j in range(r, n)]
        bspec = BoundarySpec(m=n0 - 1, lower_bounds=bounds)
        prob = boundary_noncrossing_prob(
            bspec, lambda t: _linear_null_cdf(t, gamma, t_star))
        rhs = n0 / n * gamma * alpha * prob

    # Monte Carlo side
    rng = np.random.Generator(np.random.Philox(
        np.random.SeedSequence(entropy=(int(seed), 811))))
    crit_all = alpha * np.arange(1, n + 1) / n
    total = 0.0
    comp = 0.0
    chunk = max(1, min(200_000 // max(n, 1), replicates))
    done = 0
    while done < replicates:
        b = min(chunk, replicates - done)
        u = rng.random((b, n0))
        nulls = _linear_null_quantile(u, gamma, t_star)
        if n1:
            mat = np.concatenate([nulls, np.zeros((b, n1))], axis=1)
        else:
            mat = nulls
        mat.sort(axis=1)
        ok = mat <= crit_all
        any_ok = ok.any(axis=1)
        last = n - 1 - np.argmax(ok[:, ::-1], axis=1)
        rn = np.where(any_ok, last + 1, 0)
        thr = np.where(rn > 0, rn * alpha / n, -1.0)
        v = (nulls <= thr[:, None]).sum(axis=1)
        fdp = np.where(rn > 0, v / np.maximum(rn, 1), 0.0)
        fdp = np.where(rn <= r, fdp, 0.0)
        total, comp = _kahan_add(total, comp, float(fdp.sum()))
        done += b
    lhs = total / replicates
    return lhs, rhs
