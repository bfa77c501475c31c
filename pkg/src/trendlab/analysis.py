"""Component-size statistics: Yule law, product-form bound, exponent fits."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Union

import numpy as np
from scipy import optimize, special, stats

from .histogram import SizeHistogram


class EstimationError(ValueError):
    """Raised when an exponent cannot be estimated from a sample."""


MIN_FIT_SAMPLES = 30


def predicted_exponent(lam, p):
    """Tail exponent ``1 + (lam + 1) / p`` of the limiting size law.

    At ``p == 1`` this is ``lam + 2``. Exact if given exact rationals.
    """
    if not lam > 0:
        raise ValueError(f"lambda must be > 0, got {lam!r}")
    if p == 0:
        raise ValueError("p = 0 has no finite exponent")
    if not 0 < p <= 1:
        raise ValueError(f"p must lie in (0, 1], got {p!r}")
    return 1 + (lam + 1) / p


@dataclass(frozen=True)
class YuleModel:
    """Yule distribution with shape ``rho`` on ``{1, 2, ...}``."""

    rho: float
    x_min: int = 1

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError(f"rho must be > 0, got {self.rho!r}")
        if self.x_min != 1:
            raise ValueError("only x_min = 1 is supported")

    @classmethod
    def from_params(cls, lam, p) -> "YuleModel":
        return cls(float(predicted_exponent(lam, p)) - 1)

    @property
    def alpha(self) -> float:
        return self.rho + 1


def _rho(model) -> float:
    return model.rho if isinstance(model, YuleModel) else YuleModel(float(model)).rho


def _support(i) -> np.ndarray:
    arr = np.asarray(i)
    if arr.dtype.kind not in "iu":
        if arr.dtype.kind != "f" or np.any(arr != np.floor(arr)):
            raise ValueError("yule_pdf is defined on integers")
    if np.any(arr < 1):
        raise ValueError("yule_pdf is defined for i >= 1")
    return arr.astype(np.float64)


# Stirling-series coefficients B_2k / (2k (2k - 1)) for k = 1..5
_STIRLING = (1 / 12, -1 / 360, 1 / 1260, -1 / 1680, 1 / 1188)
_ASYMPTOTIC_FROM = 30.0


def _stirling_tail(x: np.ndarray) -> np.ndarray:
    inv = 1.0 / x
    inv2 = inv * inv
    acc = np.zeros_like(x)
    for c in reversed(_STIRLING):
        acc = acc * inv2 + c
    return acc * inv


def log_gamma_ratio(x, s: float) -> np.ndarray:
    """``log(Gamma(x) / Gamma(x + s))`` for ``x > 0``, ``s >= 0``.

    Written out as a difference of Stirling series so the large ``log Gamma``
    terms cancel analytically; a plain ``gammaln(x) - gammaln(x + s)``
    loses about ``log10(x log x)`` digits. Arguments below 30 are first
    shifted up with ``Gamma(z + 1) = z Gamma(z)``.
    """
    x = np.asarray(x, dtype=np.float64)
    shift = np.zeros_like(x)
    y = x.copy()
    low = y < _ASYMPTOTIC_FROM
    while np.any(low):
        shift[low] += np.log(y[low] + s) - np.log(y[low])
        y[low] += 1.0
        low = y < _ASYMPTOTIC_FROM
    core = (-s * np.log(y) - (y + s - 0.5) * np.log1p(s / y) + s
            + _stirling_tail(y) - _stirling_tail(y + s))
    return core + shift


def yule_pdf(i, model: Union[YuleModel, float]):
    """``f(i) = rho * Gamma(rho + 1) * Gamma(i) / Gamma(i + rho + 1)``.

    Evaluated in log space through :func:`log_gamma_ratio`, so it neither
    overflows nor loses precision for large ``i``. Accepts a scalar or an
    array of sizes.
    """
    rho = _rho(model)
    x = _support(i)
    out = rho * special.gamma(rho + 1) * np.exp(log_gamma_ratio(x, rho + 1))
    return out if out.ndim else float(out)


def yule_tail(n: int, model: Union[YuleModel, float]) -> float:
    """``sum(f(i) for i > n)`` in closed form.

    With ``T(k) = k * B(k, rho + 1)`` one has ``T(k - 1) - T(k) = f(k)`` and
    ``T(k) -> 0``, so the tail telescopes to ``T(n)``.
    """
    rho = _rho(model)
    if n < 1:
        return 1.0
    return float(np.exp(np.log(n) + special.betaln(n, rho + 1)))


def fi_product_bound(lam, p, i_max: int) -> np.ndarray:
    """Normalised product form ``g(i) ∝ prod_{j=2..i} (j - 1) / (j + rho)``.

    ``rho = (lam + 1) / p``. Returns ``g(1), ..., g(i_max)`` scaled so that
    the sum over the whole support ``i >= 1`` is one; the part beyond
    ``i_max`` is ``i_max * g(i_max) / rho``, which follows from the same
    product recursion.
    """
    if i_max < 1:
        raise ValueError("i_max must be >= 1")
    rho = float(predicted_exponent(lam, p)) - 1
    j = np.arange(2, i_max + 1, dtype=np.float64)
    g = np.concatenate(([1.0], np.cumprod((j - 1) / (j + rho))))
    z = g.sum() + i_max * g[-1] / rho
    return g / z


def loglog_slope(values, i_lo: int, i_hi: int, sizes=None) -> float:
    """Least-squares slope of ``log(values)`` against ``log(size)``.

    ``values[k]`` belongs to size ``sizes[k]`` (default ``k + 1``); only
    sizes in ``[i_lo, i_hi]`` enter the fit.
    """
    values = np.asarray(values, dtype=np.float64)
    sizes = np.arange(1, len(values) + 1) if sizes is None else np.asarray(sizes)
    keep = (sizes >= i_lo) & (sizes <= i_hi) & (values > 0)
    if keep.sum() < 2:
        raise ValueError("need at least two positive points in the fit window")
    slope, _ = np.polyfit(np.log(sizes[keep]), np.log(values[keep]), 1)
    return float(slope)


@dataclass(frozen=True)
class FitResult:
    alpha_hat: float
    n_used: int
    lcc_excluded: bool
    method: str = "yule"


def _as_histogram(sizes) -> SizeHistogram:
    if isinstance(sizes, SizeHistogram):
        return sizes
    if isinstance(sizes, Mapping):
        return SizeHistogram(sizes)
    if isinstance(sizes, np.ndarray):
        values, counts = np.unique(sizes, return_counts=True)
        return SizeHistogram(dict(zip(values.tolist(), counts.tolist())))
    return SizeHistogram.from_sizes(sizes)


def _drop_largest(hist: SizeHistogram) -> SizeHistogram:
    counts = dict(hist.counts)
    top = max(counts)
    counts[top] -= 1
    return SizeHistogram(counts)


def _yule_mle(values: np.ndarray, counts: np.ndarray) -> float:
    n = counts.sum()

    # d/drho of the Yule log-likelihood; strictly positive near 0 and negative
    # for large rho unless every observation is 1
    def score(rho):
        return n / rho + n * special.digamma(rho + 1) - np.dot(counts, special.digamma(values + rho + 1))

    lo, hi = 1e-8, 1.0
    while score(hi) > 0:
        hi *= 2
        if hi > 1e8:
            raise EstimationError("likelihood has no interior maximum")
    return optimize.brentq(score, lo, hi, xtol=1e-12, rtol=1e-12)


def fit_exponent(sizes, exclude_lcc: bool = False, method: str = "yule",
                 min_samples: int = MIN_FIT_SAMPLES) -> FitResult:
    """Estimate the tail exponent ``alpha`` of a size sample with ``x_min = 1``.

    ``method="yule"`` maximises the Yule likelihood and returns
    ``rho_hat + 1``. ``method="continuous"`` is the closed form
    ``1 + n / sum(log(x / 0.5))``; it is strongly biased downwards when the
    sample has a Yule head (about 1.79 for a true exponent of 7/3) and is
    kept for comparison.

    ``sizes`` may be an iterable of sizes, a ``{size: count}`` mapping or a
    :class:`SizeHistogram`. With ``exclude_lcc`` the single largest
    observation is dropped first. Fewer than ``min_samples`` remaining
    observations is an error.
    """
    hist = _as_histogram(sizes)
    if hist.n == 0:
        raise EstimationError("empty sample")
    if exclude_lcc:
        hist = _drop_largest(hist)
    n = hist.n
    if n < min_samples:
        raise EstimationError(f"need at least {min_samples} observations, got {n}")
    if set(hist.counts) == {1}:
        raise EstimationError("all observations equal 1; the exponent is not identifiable")
    values = np.fromiter(hist.counts.keys(), dtype=np.float64)
    counts = np.fromiter(hist.counts.values(), dtype=np.float64)
    if method == "yule":
        alpha = _yule_mle(values, counts) + 1
    elif method == "continuous":
        alpha = 1 + n / np.dot(counts, np.log(values / 0.5))
    else:
        raise ValueError(f"unknown method {method!r}")
    return FitResult(float(alpha), int(n), bool(exclude_lcc), method)


def distribution_distance(a, b):
    """Distance between two size distributions.

    Two :class:`~trendlab.oracle.ExactDistribution` give the total-variation
    distance (exact when the probabilities are rationals). Two
    :class:`SizeHistogram` give the two-sample Kolmogorov-Smirnov statistic.
    """
    from .oracle import ExactDistribution

    if isinstance(a, ExactDistribution) and isinstance(b, ExactDistribution):
        if not a.support or not b.support:
            raise ValueError("empty distribution")
        keys = set(a.support) | set(b.support)
        zero = Fraction(0)
        return sum((abs(a.support.get(k, zero) - b.support.get(k, zero)) for k in keys), zero) / 2
    if isinstance(a, SizeHistogram) and isinstance(b, SizeHistogram):
        if not a.n or not b.n:
            raise ValueError("empty histogram")
        support = sorted(set(a.counts) | set(b.counts))
        ca = np.cumsum([a.counts.get(k, 0) for k in support]) / a.n
        cb = np.cumsum([b.counts.get(k, 0) for k in support]) / b.n
        return float(np.max(np.abs(ca - cb)))
    raise TypeError("both arguments must be ExactDistribution or both SizeHistogram")


def ks_test(a: SizeHistogram, b: SizeHistogram):
    """Two-sample KS test on histogram data; returns scipy's result."""
    return stats.ks_2samp(a.to_sizes(), b.to_sizes())
