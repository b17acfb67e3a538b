"""Pure-Python twin of ``_kernels.pyx``, used when the extension is not built."""

import math


def pdf_integrand(t, z, alpha, k):
    ta = t**alpha
    return math.exp(-ta) * math.cos(z * t - k * ta)


def cdf_integrand(t, z, alpha, k):
    if t == 0.0:
        return z
    ta = t**alpha
    return math.exp(-ta) * math.sin(z * t - k * ta) / t


def tail_series(x, alpha, k, order, rtol=1e-15, atol=0.0, jmax=200):
    ax = abs(x)
    if ax == 0.0:
        return 0.0, False
    side = -1.0 if x > 0 else 1.0
    log_c = 0.5 * math.log1p(k * k)
    arg_c = math.atan2(k, -1.0)
    log_x = math.log(ax)
    total = 0.0
    prev = math.inf
    for j in range(1, jmax + 1):
        aj = alpha * j
        logmag = j * log_c + math.lgamma(aj + 1.0) - math.lgamma(j + 1.0)
        if order == 0:
            logmag -= (aj + 1.0) * log_x
        elif order == 1:
            logmag -= math.log(aj) + aj * log_x
        else:
            logmag -= math.log(aj) + math.log(aj - 1.0) + (aj - 1.0) * log_x
        mag = math.exp(logmag)
        if mag > prev:
            return total / math.pi, False
        phase = j * arg_c + side * math.pi * (aj + 1.0) / 2.0
        total += mag * math.cos(phase)
        prev = mag
        if mag <= rtol * abs(total) or mag / math.pi <= atol:
            return total / math.pi, True
    return total / math.pi, False
