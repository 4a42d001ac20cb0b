"""Linear step-up and step-down procedures on realized p-value vectors.

The step-up procedure rejects the hypotheses belonging to the m smallest
p-values, where m is the largest index i with p_(i) <= i*alpha/n; the
step-down variant only keeps the longest prefix of ordered p-values that
all pass their critical values.  Inputs are never mutated and ties at a
critical value count as rejections.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["PValueSample", "RejectionResult", "lsu", "lsd", "ecdf"]


@dataclass(frozen=True)
class PValueSample:
    """A realized p-value vector with true/false-null labels."""

    pvalues: np.ndarray
    is_true_null: np.ndarray

    def __post_init__(self):
        pv = np.asarray(self.pvalues, dtype=np.float64)
        labels = np.asarray(self.is_true_null, dtype=bool)
        if pv.ndim != 1 or pv.size == 0:
            raise ValueError("pvalues must be a nonempty one-dimensional vector")
        if labels.shape != pv.shape:
            raise ValueError("is_true_null must match pvalues in length")
        if np.any(pv < 0.0) or np.any(pv > 1.0):
            raise ValueError("p-values must lie in [0, 1]")
        object.__setattr__(self, "pvalues", pv)
        object.__setattr__(self, "is_true_null", labels)

    @property
    def n(self) -> int:
        return self.pvalues.size

    @property
    def n0(self) -> int:
        return int(np.count_nonzero(self.is_true_null))

    @property
    def n1(self) -> int:
        return self.n - self.n0


@dataclass(frozen=True)
class RejectionResult:
    """Outcome of a step-up/step-down run on one sample."""

    m: int
    v: int
    threshold: float
    fdp: float


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie strictly between 0 and 1")
    return alpha


def _result(sample: PValueSample, m: int, alpha: float) -> RejectionResult:
    n = sample.n
    if m <= 0:
        return RejectionResult(m=0, v=0, threshold=0.0, fdp=0.0)
    threshold = m * alpha / n
    rejected = sample.pvalues <= threshold
    v = int(np.count_nonzero(rejected & sample.is_true_null))
    return RejectionResult(m=m, v=v, threshold=threshold, fdp=v / m)


def lsu(sample: PValueSample, alpha: float) -> RejectionResult:
    """Linear step-up procedure with critical values i*alpha/n."""
    alpha = _check_alpha(alpha)
    n = sample.n
    ps = np.sort(sample.pvalues, kind="stable")
    crit = alpha * np.arange(1, n + 1) / n
    passing = np.nonzero(ps <= crit)[0]
    m = int(passing[-1]) + 1 if passing.size else 0
    return _result(sample, m, alpha)


def lsd(sample: PValueSample, alpha: float) -> RejectionResult:
    """Linear step-down procedure; rejects no more than lsu."""
    alpha = _check_alpha(alpha)
    n = sample.n
    ps = np.sort(sample.pvalues, kind="stable")
    crit = alpha * np.arange(1, n + 1) / n
    ok = ps <= crit
    r = n if bool(ok.all()) else int(np.argmin(ok))
    return _result(sample, r, alpha)


def ecdf(pvalues: np.ndarray, t: float) -> float:
    """Empirical cdf of a p-value vector at t (right continuous)."""
    pv = np.asarray(pvalues, dtype=np.float64)
    if pv.size == 0:
        raise ValueError("ecdf needs at least one p-value")
    return float(np.count_nonzero(pv <= t)) / pv.size
