# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled integrands and tail series for the standardized stable law.

The integrands use the ``double f(int n, double *xx)`` signature so scipy's
``quad`` calls them through ``LowLevelCallable`` without re-entering the
interpreter.  ``xx`` holds ``(t, z, alpha, k)`` with ``k = beta*tan(pi*alpha/2)``.

Keep in sync with ``_pykernels.py``.
"""
from libc.math cimport exp, cos, sin, pow, log, log1p, lgamma, atan2, fabs, M_PI


cdef api double pdf_integrand(int n, double *xx) noexcept nogil:
    cdef double t = xx[0]
    cdef double z = xx[1]
    cdef double ta = pow(t, xx[2])
    return exp(-ta) * cos(z * t - xx[3] * ta)


cdef api double cdf_integrand(int n, double *xx) noexcept nogil:
    cdef double t = xx[0]
    cdef double z = xx[1]
    cdef double ta
    if t == 0.0:
        return z
    ta = pow(t, xx[2])
    return exp(-ta) * sin(z * t - xx[3] * ta) / t


def tail_series(double x, double alpha, double k, int order,
                double rtol=1e-15, double atol=0.0, int jmax=200):
    """Large-|x| expansion of the outward tail beyond ``x``.

    ``order`` 0 gives the density at ``x``, 1 the probability beyond ``x``,
    2 the integral of that probability from ``x`` outwards.  Returns
    ``(value, converged)``; the series is asymptotic, so summation stops as
    soon as the terms start growing.
    """
    cdef double ax = fabs(x)
    cdef double side = -1.0 if x > 0 else 1.0
    cdef double log_c = 0.5 * log1p(k * k)
    cdef double arg_c = atan2(k, -1.0)
    cdef double log_x = log(ax)
    cdef double total = 0.0
    cdef double prev = 1e308
    cdef double logmag, mag, phase, aj
    cdef int j
    if ax == 0.0:
        return 0.0, False
    for j in range(1, jmax + 1):
        aj = alpha * j
        logmag = j * log_c + lgamma(aj + 1.0) - lgamma(j + 1.0)
        if order == 0:
            logmag -= (aj + 1.0) * log_x
        elif order == 1:
            logmag -= log(aj) + aj * log_x
        else:
            logmag -= log(aj) + log(aj - 1.0) + (aj - 1.0) * log_x
        mag = exp(logmag)
        if mag > prev:
            return total / M_PI, False
        phase = j * arg_c + side * M_PI * (aj + 1.0) / 2.0
        total += mag * cos(phase)
        prev = mag
        if mag <= rtol * fabs(total) or mag / M_PI <= atol:
            return total / M_PI, True
    return total / M_PI, False
