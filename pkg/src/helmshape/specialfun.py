"""Integer-order Bessel/Hankel functions of a real positive argument.

The only transcendental ingredient of the whole toolkit.  J_n is computed
by downward (Miller) recurrence, Y_0/Y_1 by ascending series below a
configurable seam and by the rotated (P,Q) asymptotic expansion beyond,
and Y_n for n >= 2 by the (stable) upward three-term recurrence.
H^1_n = J_n + i Y_n.

Everything is vectorized over the argument and safe to call from any
number of threads; there is no module state.
"""

from dataclasses import dataclass

import numpy as np

EULER_GAMMA = 0.57721566490153286060651209008240243

# Seam between ascending series and asymptotic expansion for Y_0, Y_1.
# Chosen so both branches agree to better than 1e-10 (tested).
SERIES_ASYMPTOTIC_SPLIT = 12.0

ORDER_MAX = 60


def _check_order(n):
    n = int(n)
    if n < 0:
        raise ValueError("order must be >= 0")
    if n > ORDER_MAX:
        raise ValueError(f"order {n} exceeds supported maximum {ORDER_MAX}")
    return n


def bessel_j_seq(nmax, x):
    """J_0(x), ..., J_nmax(x) by Miller's downward recurrence.

    Returns an array of shape (nmax+1,) + shape(x).  Exact limits are
    used at x = 0.  Negative arguments are rejected.
    """
    nmax = _check_order(nmax)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("argument must be >= 0")
    scalar = x.ndim == 0
    x = np.atleast_1d(x).astype(float)
    out = np.zeros((nmax + 1,) + x.shape)
    pos = x > 0
    if np.any(pos):
        xp = x[pos]
        top = float(max(nmax, np.ceil(xp.max())))
        # start high enough that the unwanted solution has decayed
        mstart = int(top + 15 + 10 * np.sqrt(top))
        if mstart % 2:
            mstart += 1
        fp = np.zeros_like(xp)          # f_{m+1}
        fc = np.full_like(xp, 1e-30)    # f_m
        norm = np.zeros_like(xp)        # J_0 + 2 sum J_{2m}
        vals = np.zeros((nmax + 1, xp.size))
        for m in range(mstart, 0, -1):
            fm = 2.0 * m / xp * fc - fp
            fp, fc = fc, fm
            if m - 1 <= nmax:
                vals[m - 1] = fc
            if (m - 1) % 2 == 0 and m - 1 > 0:
                norm += 2.0 * fc
            big = np.abs(fc) > 1e250
            if np.any(big):
                fc[big] *= 1e-250
                fp[big] *= 1e-250
                norm[big] *= 1e-250
                vals[:, big] *= 1e-250
        norm += fc  # the m-1 == 0 term
        vals /= norm
        out[:, pos] = vals
    out[0, ~pos] = 1.0
    return out[:, 0] if scalar else out


def bessel_j(n, x):
    """J_n(x) for integer n >= 0 and x >= 0."""
    n = _check_order(n)
    return bessel_j_seq(n, x)[n]


def bessel_j_deriv(n, x):
    """J_n'(x) via the recurrence J_n' = (J_{n-1} - J_{n+1}) / 2."""
    n = _check_order(n)
    seq = bessel_j_seq(n + 1, x)
    if n == 0:
        return -seq[1]
    return 0.5 * (seq[n - 1] - seq[n + 1])


def _harmonic(m):
    return sum(1.0 / j for j in range(1, m + 1))


def _y0_y1_series(x):
    """Ascending-series Y_0, Y_1 for 0 < x <= seam."""
    j = bessel_j_seq(1, x)
    lg = np.log(x / 2.0) + EULER_GAMMA
    # Y0 = (2/pi)[ (ln(x/2)+gamma) J0 + sum_{m>=1} (-1)^{m+1} H_m q^m / (m!)^2 ], q = x^2/4
    q = x * x / 4.0
    s0 = np.zeros_like(x)
    term = np.ones_like(x)
    for m in range(1, 40):
        term = term * q / (m * m)
        add = ((-1) ** (m + 1)) * _harmonic(m) * term
        s0 += add
        if np.all(np.abs(add) < 1e-18 * (1.0 + np.abs(s0))):
            break
    y0 = (2.0 / np.pi) * (lg * j[0] + s0)
    # Y1 = (2/pi) ln(x/2) J1 - 2/(pi x)
    #      - (1/pi) sum_{m>=0} (-1)^m (H_m + H_{m+1} - 2 gamma_E) (x/2)^{2m+1} / (m! (m+1)!)
    # with the -2 gamma_E part folded into the (2/pi)(ln(x/2)+gamma) J1 form:
    s1 = np.zeros_like(x)
    half = x / 2.0
    term = half.copy()  # (x/2)^{2m+1}/(m!(m+1)!) at m=0
    for m in range(0, 40):
        add = ((-1) ** m) * (_harmonic(m) + _harmonic(m + 1)) * term
        s1 += add
        term = term * q / ((m + 1) * (m + 2))
        if m > 2 and np.all(np.abs(add) < 1e-18 * (1.0 + np.abs(s1))):
            break
    y1 = (2.0 / np.pi) * lg * j[1] - 2.0 / (np.pi * x) - s1 / np.pi
    return y0, y1


def _pq_asymptotic(n, x):
    """Modulus/phase asymptotic series P_n, Q_n for large x (A&S 9.2)."""
    mu = 4.0 * n * n
    p = np.ones_like(x)
    q = np.zeros_like(x)
    term = np.ones_like(x)
    eightx = 8.0 * x
    prev = np.inf
    for j in range(1, 30):
        term = term * (mu - (2 * j - 1) ** 2) / (j * eightx)
        mx = np.max(np.abs(term))
        if mx > prev:  # series started diverging; stop at optimal truncation
            break
        prev = mx
        if j % 2 == 1:
            q += term * (-1) ** ((j - 1) // 2)
        else:
            p += term * (-1) ** (j // 2)
        if mx < 1e-18:
            break
    return p, q


def _jy_asymptotic(n, x):
    p, q = _pq_asymptotic(n, x)
    chi = x - (2 * n + 1) * np.pi / 4.0
    amp = np.sqrt(2.0 / (np.pi * x))
    jn = amp * (p * np.cos(chi) - q * np.sin(chi))
    yn = amp * (p * np.sin(chi) + q * np.cos(chi))
    return jn, yn


def bessel_y_seq(nmax, x):
    """Y_0(x), ..., Y_nmax(x); x must be strictly positive."""
    nmax = _check_order(nmax)
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("Y_n requires a strictly positive argument")
    scalar = x.ndim == 0
    x = np.atleast_1d(x).astype(float)
    y0 = np.empty_like(x)
    y1 = np.empty_like(x)
    small = x <= SERIES_ASYMPTOTIC_SPLIT
    if np.any(small):
        y0[small], y1[small] = _y0_y1_series(x[small])
    if np.any(~small):
        _, y0[~small] = _jy_asymptotic(0, x[~small])
        _, y1[~small] = _jy_asymptotic(1, x[~small])
    out = np.zeros((nmax + 1,) + x.shape)
    out[0] = y0
    if nmax >= 1:
        out[1] = y1
    for m in range(1, nmax):
        out[m + 1] = 2.0 * m / x * out[m] - out[m - 1]
    return out[:, 0] if scalar else out


def hankel1_seq(nmax, x):
    """H^1_0(x), ..., H^1_nmax(x) = J + iY; x strictly positive."""
    nmax = _check_order(nmax)
    return bessel_j_seq(nmax, x) + 1j * bessel_y_seq(nmax, x)


def hankel1(n, x):
    """Hankel function of the first kind H^1_n(x), x > 0."""
    n = _check_order(n)
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("H^1_n is singular at 0; argument must be > 0")
    return hankel1_seq(n, x)[n]


def hankel1_deriv(n, x):
    """(H^1_n)'(x) via the standard recurrences."""
    n = _check_order(n)
    seq = hankel1_seq(max(n, 1), x)
    if n == 0:
        return -seq[1]
    x = np.asarray(x, dtype=float)
    return seq[n - 1] - (n / x) * seq[n]


@dataclass(frozen=True)
class CylinderFunctionTable:
    """J_n and H^1_n at one argument for all orders 0..order_max."""

    order_max: int
    argument: float
    values_j: np.ndarray
    values_h1: np.ndarray


def cylinder_table(order_max, x):
    order_max = _check_order(order_max)
    x = float(x)
    if x <= 0:
        raise ValueError("argument must be > 0")
    return CylinderFunctionTable(
        order_max=order_max,
        argument=x,
        values_j=bessel_j_seq(order_max, x),
        values_h1=hankel1_seq(order_max, x),
    )


def hankel1_log_split(x, split_radius=SERIES_ASYMPTOTIC_SPLIT):
    """Split -(i/4) H^1_0(x) = log_coefficient * ln(x) + smooth_part.

    The log coefficient is J_0(x)/(2 pi); the smooth part is evaluated by
    its own ascending series so the split stays accurate arbitrarily
    close to the singularity.  Valid for 0 < x <= split_radius.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0) or np.any(x > split_radius):
        raise ValueError(f"argument must lie in (0, {split_radius}]")
    scalar = x.ndim == 0
    x = np.atleast_1d(x).astype(float)
    log_coefficient = bessel_j_seq(0, x)[0] / (2.0 * np.pi)
    # smooth = (1/2pi) sum (-1)^m (x/2)^{2m}/(m!)^2 (gamma_E - i pi/2 - ln 2 - H_m)
    q = x * x / 4.0
    const = EULER_GAMMA - 1j * np.pi / 2.0 - np.log(2.0)
    term = np.ones_like(x)
    smooth = np.full(x.shape, const, dtype=complex)
    for m in range(1, 60):
        term = term * q / (m * m)
        add = ((-1) ** m) * term * (const - _harmonic(m))
        smooth += add
        if np.all(np.abs(add) < 1e-18 * (1.0 + np.abs(smooth))):
            break
    smooth /= 2.0 * np.pi
    if scalar:
        return complex(smooth[0]), float(log_coefficient[0])
    return smooth, log_coefficient
