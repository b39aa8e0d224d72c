"""Pure-Python reference kernels.

Mirrors ``_kernels.pyx`` operation for operation; used when the compiled
extension is unavailable or ``PTQUARTIC_PURE_PYTHON`` is set.
"""

import cmath
import math

# Dormand-Prince 5(4) tableau.
_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = (
    9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656)
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)

_BIG = 2.0 ** 300
_SMALL = 2.0 ** -300
_LN2 = math.log(2.0)
MAX_STEPS = 2_000_000


class StepUnderflow(ArithmeticError):
    pass


def _q(c0, c1, c2, c3, c4, z):
    return (((c4 * z + c3) * z + c2) * z + c1) * z + c0


def integrate_segment(z0, z1, y, dy, logscale, coeffs, tol, hmax):
    """Integrate y'' = Q(z) y on the straight segment z0 -> z1.

    ``coeffs`` holds the five coefficients of Q in ascending order.  The
    true state is ``(y, dy) * exp(logscale)``; the mantissa is kept inside
    [2**-300, 2**300] by exact power-of-two rescaling.

    Returns ``(y, dy, logscale, accepted, rejected)``.
    """
    c0, c1, c2, c3, c4 = (complex(c) for c in coeffs)
    z0 = complex(z0)
    y = complex(y)
    dy = complex(dy)
    delta = complex(z1) - z0
    length = abs(delta)
    if length == 0.0:
        return y, dy, logscale, 0, 0
    u = delta / length
    qa = abs(_q(c0, c1, c2, c3, c4, z0))
    h = min(hmax, length, 0.5 * tol ** 0.2 / math.sqrt(max(1.0, qa)))
    s = 0.0
    acc = rej = 0
    # FSAL: derivative of the state at the current point
    k1y = u * dy
    k1d = u * _q(c0, c1, c2, c3, c4, z0) * y
    while s < length:
        if acc + rej > MAX_STEPS:
            raise StepUnderflow(f"step budget exhausted at s={s:.6g} of {length:.6g}")
        last = False
        if s + h >= length:
            h = length - s
            last = True
        z = z0 + s * u

        yy = y + h * _A21 * k1y
        dd = dy + h * _A21 * k1d
        k2y = u * dd
        k2d = u * _q(c0, c1, c2, c3, c4, z + _C2 * h * u) * yy

        yy = y + h * (_A31 * k1y + _A32 * k2y)
        dd = dy + h * (_A31 * k1d + _A32 * k2d)
        k3y = u * dd
        k3d = u * _q(c0, c1, c2, c3, c4, z + _C3 * h * u) * yy

        yy = y + h * (_A41 * k1y + _A42 * k2y + _A43 * k3y)
        dd = dy + h * (_A41 * k1d + _A42 * k2d + _A43 * k3d)
        k4y = u * dd
        k4d = u * _q(c0, c1, c2, c3, c4, z + _C4 * h * u) * yy

        yy = y + h * (_A51 * k1y + _A52 * k2y + _A53 * k3y + _A54 * k4y)
        dd = dy + h * (_A51 * k1d + _A52 * k2d + _A53 * k3d + _A54 * k4d)
        k5y = u * dd
        k5d = u * _q(c0, c1, c2, c3, c4, z + _C5 * h * u) * yy

        yy = y + h * (_A61 * k1y + _A62 * k2y + _A63 * k3y + _A64 * k4y + _A65 * k5y)
        dd = dy + h * (_A61 * k1d + _A62 * k2d + _A63 * k3d + _A64 * k4d + _A65 * k5d)
        k6y = u * dd
        k6d = u * _q(c0, c1, c2, c3, c4, z + h * u) * yy

        yn = y + h * (_B1 * k1y + _B3 * k3y + _B4 * k4y + _B5 * k5y + _B6 * k6y)
        dn = dy + h * (_B1 * k1d + _B3 * k3d + _B4 * k4d + _B5 * k5d + _B6 * k6d)
        zn = z + h * u
        qn = _q(c0, c1, c2, c3, c4, zn)
        k7y = u * dn
        k7d = u * qn * yn

        ey = h * (_E1 * k1y + _E3 * k3y + _E4 * k4y + _E5 * k5y + _E6 * k6y + _E7 * k7y)
        ed = h * (_E1 * k1d + _E3 * k3d + _E4 * k4d + _E5 * k5d + _E6 * k6d + _E7 * k7d)
        # dy/sqrt|Q| is commensurate with y in the WKB regime
        w = 1.0 / math.sqrt(max(1.0, abs(qn)))
        num = math.sqrt(abs(ey) ** 2 + (w * abs(ed)) ** 2)
        den = math.sqrt(max(abs(y) ** 2 + (w * abs(dy)) ** 2,
                            abs(yn) ** 2 + (w * abs(dn)) ** 2))
        if den == 0.0:
            raise StepUnderflow("state vanished identically")
        err = num / (tol * den)

        if err <= 1.0:
            s = length if last else s + h
            y, dy = yn, dn
            k1y, k1d = k7y, k7d
            acc += 1
            m = max(abs(y), abs(dy))
            if m > _BIG or m < _SMALL:
                e = math.frexp(m)[1]
                f = math.ldexp(1.0, -e)
                y *= f
                dy *= f
                k1y *= f
                k1d *= f
                logscale += e * _LN2
            fac = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
        else:
            rej += 1
            fac = max(0.2, 0.9 * err ** -0.2)
        h = min(hmax, h * fac)
        if h < 1e-14 * length and s < length:
            raise StepUnderflow(
                f"step size {h:.3e} underflowed at z={z0 + s * u!r} (err={err:.3e})")
    return y, dy, logscale, acc, rej


def riccati_series(sigma, b, J, lam, z, nmax):
    """Asymptotic log-derivative expansion at large |z|.

    Solves phi' + phi**2 = z**4 - 2 b z**2 + 2 J z - lam formally with
    phi = sum d_k z**(2 - k), d_0 = sigma.  Returns ``(Phi, phi, nterms)``
    where Phi = sigma z**3/3 + d_2 z + d_3 log z + sum_{k>=4} d_k z**(3-k)/(3-k)
    is the log of the normalized solution.  Summation stops once a block of
    four terms grows (onset of divergence) or falls below roundoff.
    """
    z = complex(z)
    lam = complex(lam)
    d = [0j] * (nmax + 1)
    d[0] = complex(sigma)
    two_s = 2.0 * sigma
    p = {2: -2.0 * b, 3: 2.0 * J, 4: -lam}
    logz = cmath.log(z)
    inv = 1.0 / z
    Phi = sigma * z ** 3 / 3.0
    phi = sigma * z * z
    mags = []
    used = 0
    zpow = z * z  # z**(2-k) for the current k
    for n in range(1, nmax + 1):
        acc = p.get(n, 0.0)
        for i in range(1, n):
            acc -= d[i] * d[n - i]
        if n >= 3:
            acc -= (5 - n) * d[n - 3]
        d[n] = acc / two_s
        zpow *= inv
        if n == 3:
            Phi += d[3] * logz
            phi += d[3] * zpow
            continue
        if n < 3:
            Phi += d[n] * zpow * z / (3 - n)
            phi += d[n] * zpow
            continue
        term = d[n] * zpow * z / (3 - n)
        mag = abs(term)
        mags.append(mag)
        # terms oscillate with period 4 in n; compare whole blocks
        if n >= 16 and max(mags[-4:]) > max(mags[-8:-4]):
            break
        Phi += term
        phi += d[n] * zpow
        used = n
        if n >= 12 and max(mags[-4:]) < 1e-18 * max(1.0, abs(Phi)):
            break
    return Phi, phi, used
