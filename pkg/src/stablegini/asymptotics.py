"""Limit laws for the Gini estimators and the quantities built on them.

The nonparametric estimator has a right-skewed stable limit whose scale
shrinks like ``n ** (-(alpha - 1) / alpha)``; the Pareto maximum-likelihood
plug-in is asymptotically Gaussian.  This module constructs both laws,
compares their two-sided exceedance probabilities, and solves for the sample
size at which the nonparametric estimator catches up.

Two scale conventions
---------------------
For Pareto data the norming constant ``L0`` can be the nominal
``C_alpha ** (-1/alpha)`` (``tail_matched=False``, the default) or the one
obtained by matching the Pareto tail ``P(X > x) = (c/x)**alpha`` to the
generalized CLT, ``C_alpha ** (+1/alpha)`` (``tail_matched=True``).  For the
Gini ratio the matched constant carries an extra factor ``1 - g`` from the
random denominator.  Simulated deviations follow the matched scale; the
nominal one stays the default because the reference sample-size grid in
``montecarlo`` is built on it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np
from scipy import special

from . import stable
from .errors import DomainError, NumericalError
from .stable import StableParams

N_TILDE_MAX = 10**12
N_TILDE_START = 10


def _check_alpha_open(alpha):
    if not (isinstance(alpha, (int, float, np.floating, np.integer)) and 1.0 < alpha < 2.0):
        raise DomainError(f"alpha must lie in the open interval (1, 2), got {alpha!r}")
    return float(alpha)


def _check_positive(name, value):
    if not (math.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be positive and finite, got {value!r}")
    return float(value)


def _check_n(n, name="n"):
    if not (math.isfinite(n) and n >= 1):
        raise DomainError(f"{name} must be >= 1, got {n!r}")
    return n


# ---------------------------------------------------------------------------
# limit-law descriptors


@dataclass(frozen=True)
class StableLimit:
    """A stable law plus the normalization that produces it.

    ``rate_exponent`` and ``L0`` describe the factor ``n**rate_exponent / L0``
    that turns a raw deviation into a standardized one; they are ``None`` when
    the law is already on the raw scale.
    """

    params: StableParams
    rate_exponent: Optional[float] = None
    L0: Optional[float] = None
    kind: str = field(default="stable", init=False)

    def pdf(self, x):
        return stable.pdf(self.params, x)

    def cdf(self, x):
        return stable.cdf(self.params, x)

    def sf(self, x):
        return stable.sf(self.params, x)

    def exceedance(self, c):
        """P(|D| > c) for the centered deviation D following this law."""
        return float(stable.sf(self.params, c) + stable.cdf(self.params, -c))

    def mode(self):
        return stable.mode(self.params)

    def to_dict(self):
        out = {"kind": self.kind, **self.params.to_dict()}
        if self.rate_exponent is not None:
            out["rate_exponent"] = self.rate_exponent
            out["L0"] = self.L0
        return out


@dataclass(frozen=True)
class GaussianLimit:
    mean: float
    variance: float
    kind: str = field(default="gaussian", init=False)

    def __post_init__(self):
        if not (math.isfinite(self.variance) and self.variance >= 0):
            raise DomainError(f"variance must be finite and >= 0, got {self.variance!r}")

    @property
    def sd(self):
        return math.sqrt(self.variance)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.exp(-0.5 * ((x - self.mean) / self.sd) ** 2) / (self.sd * math.sqrt(2 * math.pi))
        return float(out) if out.ndim == 0 else out

    def cdf(self, x):
        z = (np.asarray(x, dtype=float) - self.mean) / (self.sd * math.sqrt(2.0))
        out = 0.5 * special.erfc(-z)
        return float(out) if out.ndim == 0 else out

    def sf(self, x):
        z = (np.asarray(x, dtype=float) - self.mean) / (self.sd * math.sqrt(2.0))
        out = 0.5 * special.erfc(z)
        return float(out) if out.ndim == 0 else out

    def exceedance(self, c):
        # erfc keeps full relative precision deep in the tail
        return float(self.sf(c) + self.cdf(-c))

    def mode(self):
        return self.mean

    def to_dict(self):
        return {"kind": self.kind, "mean": self.mean, "variance": self.variance}


LimitLaw = Union[StableLimit, GaussianLimit]


# ---------------------------------------------------------------------------
# constants


def c_alpha(alpha) -> float:
    """Gamma(2 - alpha) |cos(pi alpha / 2)| / (alpha - 1).

    Links a tail constant to the scale of the stable limit of centered sums.
    Equals sqrt(2 pi) at alpha = 1.5.
    """
    alpha = _check_alpha_open(alpha)
    return math.gamma(2.0 - alpha) * abs(math.cos(math.pi * alpha / 2.0)) / (alpha - 1.0)


def pareto_mean(alpha, c=1.0) -> float:
    if not alpha > 1:
        raise DomainError(f"the Pareto mean is finite only for alpha > 1, got {alpha!r}")
    return alpha * c / (alpha - 1.0)


def pareto_gini(alpha) -> float:
    if not alpha > 1:
        raise DomainError(f"alpha must exceed 1, got {alpha!r}")
    return 1.0 / (2.0 * alpha - 1.0)


def pareto_gmd_l0(alpha, c=1.0, tail_matched=False) -> float:
    """Norming constant L0 for sums of Pareto(alpha, c) variates."""
    ca = c_alpha(alpha)
    c = _check_positive("c", c)
    return c * ca ** (1.0 / alpha if tail_matched else -1.0 / alpha)


def pareto_l0(alpha, c=1.0, tail_matched=False) -> float:
    """L0 to feed into the Gini finite-sample law for Pareto(alpha, c) data.

    With ``tail_matched`` the GMD constant is multiplied by ``1 - g``: the
    largest observations inflate both the numerator and the mean in the
    denominator of the Gini ratio, and only the share ``1 - g`` survives.
    """
    l0 = pareto_gmd_l0(alpha, c, tail_matched)
    if tail_matched:
        l0 *= 1.0 - pareto_gini(alpha)
    return l0


# ---------------------------------------------------------------------------
# limit laws


def gmd_limit_scaling(alpha, L0, n) -> float:
    """n**((alpha-1)/alpha) / L0, the factor that standardizes the GMD deviation."""
    alpha = _check_alpha_open(alpha)
    L0 = _check_positive("L0", L0)
    n = _check_n(n)
    return n ** ((alpha - 1.0) / alpha) / L0


def gini_finite_sample_law(alpha, mu, L0, n, g) -> StableLimit:
    """Stable approximation S(alpha, 1, gamma(n), g) to the law of G^NP,
    with gamma(n) = L0 / (mu n^((alpha-1)/alpha))."""
    alpha = _check_alpha_open(alpha)
    mu = _check_positive("mu", mu)
    L0 = _check_positive("L0", L0)
    n = _check_n(n)
    if not math.isfinite(g):
        raise DomainError(f"g must be finite, got {g!r}")
    rate = (alpha - 1.0) / alpha
    gamma = L0 / (mu * n**rate)
    return StableLimit(StableParams(alpha, 1.0, gamma, float(g)), rate_exponent=rate, L0=L0)


def pareto_np_limit(alpha, n, *, tail_matched=False) -> StableLimit:
    """Law of G^NP - g for Pareto data of size n."""
    alpha = _check_alpha_open(alpha)
    return gini_finite_sample_law(alpha, pareto_mean(alpha), pareto_l0(alpha, 1.0, tail_matched), n, 0.0)


def pareto_ml_variance(alpha, n) -> float:
    if not alpha > 1:
        raise DomainError(f"alpha must exceed 1, got {alpha!r}")
    n = _check_n(n)
    return 4.0 * alpha**2 / (n * (2.0 * alpha - 1.0) ** 4)


def pareto_ml_limit(alpha, n) -> GaussianLimit:
    """Gaussian law N(0, 4 alpha^2 / (n (2 alpha - 1)^4)) of G^ML - g."""
    return GaussianLimit(0.0, pareto_ml_variance(alpha, n))


# ---------------------------------------------------------------------------
# tail comparison

ML_SPREAD_CHOICES = ("sd", "variance")


def _ml_law(alpha, n_ml, ml_spread):
    var = pareto_ml_variance(alpha, n_ml)
    if ml_spread == "variance":
        return GaussianLimit(0.0, var)
    if ml_spread == "sd":
        # the variance expression read as a standard deviation
        return GaussianLimit(0.0, var * var)
    raise DomainError(f"ml_spread must be one of {ML_SPREAD_CHOICES}, got {ml_spread!r}")


def error_ratio_r(c, n_np, alpha, n_ml=100, *, ml_spread="sd", tail_matched=False) -> float:
    """P(|D_NP| > c) / P(|D_ML| > c) for the nonparametric deviation at
    ``n_np`` against the ML deviation at ``n_ml``.

    ``ml_spread="sd"`` treats 4a^2/(n(2a-1)^4) as the standard deviation of
    the ML deviation, which is the reading under which the reference sample
    sizes come out; ``"variance"`` uses it as the variance.
    """
    c = _check_positive("c", c)
    alpha = _check_alpha_open(alpha)
    _check_n(n_ml, "n_ml")
    num = pareto_np_limit(alpha, n_np, tail_matched=tail_matched).exceedance(c)
    den = _ml_law(alpha, n_ml, ml_spread).exceedance(c)
    if not den > 0.0:
        raise NumericalError(
            f"Gaussian exceedance underflows to 0 at c={c:g}, alpha={alpha:g}, n_ml={n_ml}"
        )
    return num / den


def n_tilde(c, alpha, n_ml=100, *, ml_spread="sd", tail_matched=False) -> int:
    """Smallest integer n with r(c, n) <= 1."""

    def r(n):
        return error_ratio_r(c, n, alpha, n_ml, ml_spread=ml_spread, tail_matched=tail_matched)

    lo, hi = 1, N_TILDE_START
    if r(hi) > 1.0:
        lo = hi
        while True:
            hi = lo * 2
            if hi > N_TILDE_MAX:
                raise NumericalError(f"r(c, n) still exceeds 1 at n = {N_TILDE_MAX:.0e}")
            if r(hi) <= 1.0:
                break
            lo = hi
    elif r(1) <= 1.0:
        return 1
    # r(lo) > 1 >= r(hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if r(mid) <= 1.0:
            hi = mid
        else:
            lo = mid
    return hi


# ---------------------------------------------------------------------------
# remainder of the order-statistic representation


def remainder_rn(uniform_sample, quantile_fn: Callable) -> float:
    """(1/n) sum_i (i/n - U_(i)) Q(U_(i)) over the sorted uniforms.

    A uniform equal to 1 can only sit at rank n, where its weight is zero; that
    term is taken as 0 rather than evaluating Q(1).
    """
    u = np.sort(np.asarray(uniform_sample, dtype=float).ravel())
    if u.size == 0:
        raise DomainError("uniform_sample is empty")
    if not (np.all(u > 0.0) and np.all(u <= 1.0)):
        raise DomainError("uniforms must lie in (0, 1)")
    n = u.size
    weights = np.arange(1, n + 1) / n - u
    live = weights != 0.0
    q = np.zeros(n)
    q[live] = np.asarray(quantile_fn(u[live]), dtype=float)
    return float(np.sum(weights * q) / n)


def vc_bound(n, mu) -> float:
    n = _check_n(n)
    mu = _check_positive("mu", mu)
    return mu * math.sqrt((math.log(n + 1.0) + math.log(2.0)) / n)
