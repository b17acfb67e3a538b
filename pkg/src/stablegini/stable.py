"""Alpha-stable laws in the S1 parametrization for 1 < alpha <= 2.

Densities and distribution functions come from inverting the
characteristic function,

    phi(t) = exp(-gamma^a |t|^a (1 - i beta sign(t) tan(pi a / 2)) + i delta t),

reduced to a real integral over ``t > 0`` and handed to adaptive quadrature.
Far in the tails the oscillatory integral is replaced by the large-|x|
expansion of the same transform, which converges to machine precision there.
Where that expansion diverges and the mass is tiny (the short tail of a
strongly skewed law), Zolotarev's non-oscillatory integral over an angle is
used instead, since it keeps relative accuracy where Fourier inversion only
has absolute accuracy.
``alpha == 2`` is the Gaussian with variance ``2 gamma^2`` and is evaluated in
closed form.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, optimize, special

from . import _backend
from .errors import DomainError, NumericalError

EPSABS = 1e-12
EPSREL = 1e-12
QUAD_LIMIT = 5000

# exp(-t**alpha) < 4e-18 beyond t**alpha = 40
_T_EXPONENT = 40.0
# quad's error estimate bottoms out around here; tighter requests that only
# trip the roundoff flag are not failures
_ERR_FLOOR = 1e-12
# below this |z| the tail series is never accurate enough to bother
_SERIES_MIN_Z = 4.0
# below this, Fourier values are dominated by absolute quadrature noise
_LIGHT_TAIL = 1e-9
_MODE_XTOL = 1e-8
_MODE_HALF_WIDTH = 10.0
_MODE_SCAN_POINTS = 81
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class StableParams:
    """S(alpha, beta, gamma, delta) in the S1 parametrization.

    For ``1 < alpha <= 2`` the mean is ``delta``.
    """

    alpha: float
    beta: float = 0.0
    gamma: float = 1.0
    delta: float = 0.0

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "delta"):
            value = getattr(self, name)
            if not isinstance(value, (int, float, np.floating, np.integer)) or not math.isfinite(value):
                raise DomainError(f"{name} must be a finite real number, got {value!r}")
            object.__setattr__(self, name, float(value))
        if not 1.0 < self.alpha <= 2.0:
            raise DomainError(f"alpha must lie in (1, 2], got {self.alpha}")
        if not -1.0 <= self.beta <= 1.0:
            raise DomainError(f"beta must lie in [-1, 1], got {self.beta}")
        if not self.gamma > 0.0:
            raise DomainError(f"gamma must be positive, got {self.gamma}")

    @property
    def is_gaussian(self) -> bool:
        return self.alpha == 2.0

    @property
    def skew_factor(self) -> float:
        """``beta * tan(pi alpha / 2)``, zero on the Gaussian branch."""
        if self.is_gaussian:
            return 0.0
        return self.beta * math.tan(math.pi * self.alpha / 2.0)

    def standardize(self, x):
        return (np.asarray(x, dtype=float) - self.delta) / self.gamma

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "gamma": self.gamma, "delta": self.delta}


@lru_cache(maxsize=None)
def _kernels(backend):
    if backend is None:
        return _backend.kernels
    return _backend.load(backend)


def characteristic_function(params: StableParams, t):
    """E[exp(i t X)] for X ~ S(alpha, beta, gamma, delta)."""
    t = np.asarray(t, dtype=float)
    scaled = (params.gamma * np.abs(t)) ** params.alpha
    out = np.exp(-scaled * (1.0 - 1j * params.skew_factor * np.sign(t)) + 1j * params.delta * t)
    return out[()] if out.ndim == 0 else out


def _quad(integrand, z, alpha, k, epsabs, epsrel):
    upper = _T_EXPONENT ** (1.0 / alpha)
    value, abserr, info, *rest = integrate.quad(
        integrand,
        0.0,
        upper,
        args=(z, alpha, k),
        epsabs=epsabs,
        epsrel=epsrel,
        limit=QUAD_LIMIT,
        full_output=1,
    )
    if rest:
        ier_message = rest[0]
        if abserr > max(epsabs, epsrel * abs(value), _ERR_FLOOR):
            raise NumericalError(
                f"quadrature did not converge at z={z:g} (alpha={alpha:g}, k={k:g}): "
                f"estimated error {abserr:.3g}; {ier_message.strip().splitlines()[0]}"
            )
    return value


def _zolotarev(z, alpha, k):
    """(density at z, mass beyond z away from 0) from Zolotarev's integral.

    Non-oscillatory and accurate to relative precision in both tails, but
    meant for |z| well away from 0.
    """
    beta = k / math.tan(math.pi * alpha / 2.0)
    if z < 0:
        z, beta = -z, -beta
    theta0 = math.atan(beta * math.tan(math.pi * alpha / 2.0)) / alpha
    power = alpha / (alpha - 1.0)
    log_zp = power * math.log(z)
    c0 = math.cos(alpha * theta0) ** (1.0 / (alpha - 1.0))

    def log_g(th):
        # g -> inf at both ends of the interval; rounding there can flip the
        # sign of a factor that is really a vanishing positive number
        ct = math.cos(th)
        st = math.sin(alpha * (theta0 + th))
        cm = math.cos(alpha * theta0 + (alpha - 1.0) * th)
        if ct <= 0 or st <= 0 or cm <= 0:
            return math.inf
        return log_zp + math.log(c0 * (ct / st) ** power * cm / ct)

    def survival_part(th):
        lg = log_g(th)
        return 0.0 if lg > 700 else math.exp(-math.exp(lg))

    def density_part(th):
        lg = log_g(th)
        if lg > 700:
            return 0.0
        g = math.exp(lg)
        return g * math.exp(-g)

    lo, hi = -theta0, math.pi / 2.0
    # the density integrand peaks where g = 1; hand that point to quad
    points = None
    a, b = lo + 1e-12 * (hi - lo), hi - 1e-12 * (hi - lo)
    la, lb = log_g(a), log_g(b)
    if math.isfinite(la) and math.isfinite(lb) and la * lb < 0:
        points = [optimize.brentq(log_g, a, b, xtol=1e-15)]
    kw = dict(points=points, epsabs=0.0, epsrel=1e-12, limit=QUAD_LIMIT)
    # Deep in the light tail the integrands sit near the underflow threshold
    # and QUADPACK flags roundoff it cannot act on; the values stay accurate.
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        tail, _ = integrate.quad(survival_part, lo, hi, **kw)
        dens, _ = integrate.quad(density_part, lo, hi, **kw)
    return alpha / (math.pi * (alpha - 1.0) * z) * dens, tail / math.pi


def _short_side(z, alpha, k):
    # Beyond the body on the bounded-looking side of a totally skewed law the
    # density decays like exp(-|z|^(a/(a-1))): every series coefficient is
    # zero there and the Fourier integrals lose all relative accuracy.
    if abs(z) < _SERIES_MIN_Z:
        return False
    beta = k / math.tan(math.pi * alpha / 2.0)
    return abs(abs(beta) - 1.0) < 1e-12 and z * beta < 0


def _std_pdf(z, alpha, k, backend=None, epsabs=EPSABS, epsrel=EPSREL):
    kern = _kernels(backend)
    if _short_side(z, alpha, k):
        return _zolotarev(z, alpha, k)[0]
    if abs(z) >= _SERIES_MIN_Z:
        value, ok = kern.tail_series(z, alpha, k, 0)
        if ok:
            return max(value, 0.0)
    value = _quad(kern.pdf_integrand, z, alpha, k, epsabs * math.pi, epsrel) / math.pi
    if value < _LIGHT_TAIL:
        value = _zolotarev(z, alpha, k)[0]
    return max(value, 0.0)


def _std_cdf_pair(z, alpha, k, backend=None, epsabs=EPSABS, epsrel=EPSREL):
    """(P(X <= z), P(X > z)) for the standardized law, each computed without
    subtracting from one where the tail series applies."""
    kern = _kernels(backend)
    if _short_side(z, alpha, k):
        tail = _zolotarev(z, alpha, k)[1]
        return (1.0 - tail, tail) if z > 0 else (tail, 1.0 - tail)
    if abs(z) >= _SERIES_MIN_Z:
        tail, ok = kern.tail_series(z, alpha, k, 1)
        if ok:
            tail = min(max(tail, 0.0), 1.0)
            return (1.0 - tail, tail) if z > 0 else (tail, 1.0 - tail)
    half = _quad(kern.cdf_integrand, z, alpha, k, epsabs * math.pi, epsrel) / math.pi
    lower = min(max(0.5 + half, 0.0), 1.0)
    upper = min(max(0.5 - half, 0.0), 1.0)
    if z < 0 and lower < _LIGHT_TAIL:
        lower = _zolotarev(z, alpha, k)[1]
        upper = 1.0 - lower
    elif z > 0 and upper < _LIGHT_TAIL:
        upper = _zolotarev(z, alpha, k)[1]
        lower = 1.0 - upper
    return lower, upper


def _map(fn, z):
    z = np.asarray(z, dtype=float)
    if z.ndim == 0:
        return fn(float(z))
    out = np.empty(z.shape)
    flat = out.reshape(-1)
    for i, value in enumerate(z.reshape(-1)):
        flat[i] = fn(float(value))
    return out


def pdf(params: StableParams, x, *, backend=None):
    """Density at ``x`` (scalar or array)."""
    z = params.standardize(x)
    if params.is_gaussian:
        out = np.exp(-0.25 * z * z) / (2.0 * math.sqrt(math.pi)) / params.gamma
        return float(out) if out.ndim == 0 else out
    alpha, k = params.alpha, params.skew_factor
    return _map(lambda v: _std_pdf(v, alpha, k, backend) / params.gamma, z)


def cdf(params: StableParams, x, *, backend=None):
    """Distribution function at ``x`` (scalar or array)."""
    z = params.standardize(x)
    if params.is_gaussian:
        out = 0.5 * special.erfc(-z / 2.0)
        return float(out) if out.ndim == 0 else out
    alpha, k = params.alpha, params.skew_factor
    return _map(lambda v: _std_cdf_pair(v, alpha, k, backend)[0], z)


def sf(params: StableParams, x, *, backend=None):
    """Survival function P(X > x); accurate in the right tail where ``1 - cdf`` is not."""
    z = params.standardize(x)
    if params.is_gaussian:
        out = 0.5 * special.erfc(z / 2.0)
        return float(out) if out.ndim == 0 else out
    alpha, k = params.alpha, params.skew_factor
    return _map(lambda v: _std_cdf_pair(v, alpha, k, backend)[1], z)


def tail_first_moment(params: StableParams, x):
    """Contribution to the mean from beyond ``x``: the integral of u f(u)
    over (x, inf) when x > delta, over (-inf, x) otherwise.

    Only available far enough out for the tail expansion to converge.
    """
    if params.is_gaussian:
        raise DomainError("tail_first_moment covers the heavy-tailed branch only")
    z = float(params.standardize(x))
    kern = _kernels(None)
    mass, ok1 = kern.tail_series(z, params.alpha, params.skew_factor, 1)
    integrated, ok2 = kern.tail_series(z, params.alpha, params.skew_factor, 2)
    if not (abs(z) >= _SERIES_MIN_Z and ok1 and ok2):
        raise NumericalError(f"tail expansion does not converge at standardized x={z:g}")
    side = 1.0 if z > 0 else -1.0
    std_moment = z * mass + side * integrated
    return params.gamma * std_moment + params.delta * mass


def sample(params: StableParams, rng, n: int) -> np.ndarray:
    """Draw ``n`` variates with the Chambers-Mallows-Stuck transform.

    ``rng`` is a ``numpy.random.Generator`` or an integer seed.
    """
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    rng = np.random.default_rng(rng)
    v = rng.uniform(-math.pi / 2.0, math.pi / 2.0, size=n)
    w = rng.exponential(1.0, size=n)
    a = params.alpha
    if params.is_gaussian:
        x = 2.0 * np.sqrt(w) * np.sin(v)
    else:
        k = params.skew_factor
        shift = math.atan(k) / a
        scale = (1.0 + k * k) ** (1.0 / (2.0 * a))
        av = a * (v + shift)
        x = (
            scale
            * np.sin(av)
            / np.cos(v) ** (1.0 / a)
            * (np.cos(v - av) / w) ** ((1.0 - a) / a)
        )
    return params.gamma * x + params.delta


def _golden_section_max(f, a, b, xtol):
    """Maximize a unimodal ``f`` on [a, b] to absolute tolerance ``xtol``."""
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(200):
        if b - a <= xtol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    else:
        raise NumericalError("golden-section search did not reach its tolerance")
    return 0.5 * (a + b)


@lru_cache(maxsize=256)
def _std_mode(alpha, beta, backend=None):
    if alpha == 2.0:
        return 0.0
    k = beta * math.tan(math.pi * alpha / 2.0)

    # the peak sits near the S0 location, k to the left of the S1 one
    grid = np.linspace(k - _MODE_HALF_WIDTH, k + _MODE_HALF_WIDTH, _MODE_SCAN_POINTS)
    values = np.array([_std_pdf(z, alpha, k, backend) for z in grid])
    i = int(np.argmax(values))
    if i == 0 or i == len(grid) - 1:
        raise NumericalError(f"mode not bracketed for alpha={alpha:g}, beta={beta:g}")

    # the peak is flat, so the refinement needs far more digits than the scan
    def density(z):
        return _std_pdf(z, alpha, k, backend, epsabs=1e-15, epsrel=1e-14)

    return _golden_section_max(density, grid[i - 1], grid[i + 1], _MODE_XTOL)


def mode(params: StableParams, *, backend=None) -> float:
    """Location of the density maximum."""
    beta = params.beta
    if beta == 0.0:
        return params.delta
    # reflection x -> -x maps beta to -beta, so only beta > 0 is searched
    std = _std_mode(params.alpha, abs(beta), backend)
    return params.delta + params.gamma * (std if beta > 0 else -std)
