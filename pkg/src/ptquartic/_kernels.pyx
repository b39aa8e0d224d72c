# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: DOPRI5 segment integrator and the WKB log-series.

Same algorithms, same operation order, as ``_pykernels``.
"""

from libc.math cimport sqrt, fabs, frexp, ldexp, log, INFINITY, fmax, fmin
cimport cython

cdef extern from "complex.h" nogil:
    double cabs(double complex)
    double complex clog(double complex)

cdef double _C2 = 1.0 / 5, _C3 = 3.0 / 10, _C4 = 4.0 / 5, _C5 = 8.0 / 9
cdef double _A21 = 1.0 / 5
cdef double _A31 = 3.0 / 40, _A32 = 9.0 / 40
cdef double _A41 = 44.0 / 45, _A42 = -56.0 / 15, _A43 = 32.0 / 9
cdef double _A51 = 19372.0 / 6561, _A52 = -25360.0 / 2187
cdef double _A53 = 64448.0 / 6561, _A54 = -212.0 / 729
cdef double _A61 = 9017.0 / 3168, _A62 = -355.0 / 33, _A63 = 46732.0 / 5247
cdef double _A64 = 49.0 / 176, _A65 = -5103.0 / 18656
cdef double _B1 = 35.0 / 384, _B3 = 500.0 / 1113, _B4 = 125.0 / 192
cdef double _B5 = -2187.0 / 6784, _B6 = 11.0 / 84
cdef double _E1 = 71.0 / 57600, _E3 = -71.0 / 16695, _E4 = 71.0 / 1920
cdef double _E5 = -17253.0 / 339200, _E6 = 22.0 / 525, _E7 = -1.0 / 40

cdef double _BIG = 2.0 ** 300
cdef double _SMALL = 2.0 ** -300
cdef double _LN2 = 0.6931471805599453
cdef long MAX_STEPS = 2000000


class StepUnderflow(ArithmeticError):
    pass


cdef inline double complex _q(double complex c0, double complex c1,
                              double complex c2, double complex c3,
                              double complex c4, double complex z) nogil:
    return (((c4 * z + c3) * z + c2) * z + c1) * z + c0


def integrate_segment(z0, z1, y, dy, double logscale, coeffs,
                      double tol, double hmax):
    """Integrate y'' = Q(z) y on the straight segment z0 -> z1.

    Returns ``(y, dy, logscale, accepted, rejected)``.
    """
    cdef double complex c0 = coeffs[0], c1 = coeffs[1], c2 = coeffs[2]
    cdef double complex c3 = coeffs[3], c4 = coeffs[4]
    cdef double complex za = z0, zb = z1
    cdef double complex yc = y, dc = dy
    cdef double complex delta = zb - za
    cdef double length = cabs(delta)
    if length == 0.0:
        return complex(yc), complex(dc), logscale, 0, 0
    cdef double complex u = delta / length
    cdef double qa = cabs(_q(c0, c1, c2, c3, c4, za))
    cdef double h = fmin(fmin(hmax, length), 0.5 * tol ** 0.2 / sqrt(fmax(1.0, qa)))
    cdef double s = 0.0, err, fac, w, num, den, m, f
    cdef long acc = 0, rej = 0
    cdef int e
    cdef bint last
    cdef double complex z, zn, qn, yy, dd, yn, dn, ey, ed
    cdef double complex k1y, k1d, k2y, k2d, k3y, k3d, k4y, k4d
    cdef double complex k5y, k5d, k6y, k6d, k7y, k7d
    k1y = u * dc
    k1d = u * _q(c0, c1, c2, c3, c4, za) * yc
    while s < length:
        if acc + rej > MAX_STEPS:
            raise StepUnderflow(f"step budget exhausted at s={s:.6g} of {length:.6g}")
        last = False
        if s + h >= length:
            h = length - s
            last = True
        z = za + s * u

        yy = yc + h * _A21 * k1y
        dd = dc + h * _A21 * k1d
        k2y = u * dd
        k2d = u * _q(c0, c1, c2, c3, c4, z + _C2 * h * u) * yy

        yy = yc + h * (_A31 * k1y + _A32 * k2y)
        dd = dc + h * (_A31 * k1d + _A32 * k2d)
        k3y = u * dd
        k3d = u * _q(c0, c1, c2, c3, c4, z + _C3 * h * u) * yy

        yy = yc + h * (_A41 * k1y + _A42 * k2y + _A43 * k3y)
        dd = dc + h * (_A41 * k1d + _A42 * k2d + _A43 * k3d)
        k4y = u * dd
        k4d = u * _q(c0, c1, c2, c3, c4, z + _C4 * h * u) * yy

        yy = yc + h * (_A51 * k1y + _A52 * k2y + _A53 * k3y + _A54 * k4y)
        dd = dc + h * (_A51 * k1d + _A52 * k2d + _A53 * k3d + _A54 * k4d)
        k5y = u * dd
        k5d = u * _q(c0, c1, c2, c3, c4, z + _C5 * h * u) * yy

        yy = yc + h * (_A61 * k1y + _A62 * k2y + _A63 * k3y + _A64 * k4y + _A65 * k5y)
        dd = dc + h * (_A61 * k1d + _A62 * k2d + _A63 * k3d + _A64 * k4d + _A65 * k5d)
        k6y = u * dd
        k6d = u * _q(c0, c1, c2, c3, c4, z + h * u) * yy

        yn = yc + h * (_B1 * k1y + _B3 * k3y + _B4 * k4y + _B5 * k5y + _B6 * k6y)
        dn = dc + h * (_B1 * k1d + _B3 * k3d + _B4 * k4d + _B5 * k5d + _B6 * k6d)
        zn = z + h * u
        qn = _q(c0, c1, c2, c3, c4, zn)
        k7y = u * dn
        k7d = u * qn * yn

        ey = h * (_E1 * k1y + _E3 * k3y + _E4 * k4y + _E5 * k5y + _E6 * k6y + _E7 * k7y)
        ed = h * (_E1 * k1d + _E3 * k3d + _E4 * k4d + _E5 * k5d + _E6 * k6d + _E7 * k7d)
        w = 1.0 / sqrt(fmax(1.0, cabs(qn)))
        num = sqrt(cabs(ey) ** 2 + (w * cabs(ed)) ** 2)
        den = sqrt(fmax(cabs(yc) ** 2 + (w * cabs(dc)) ** 2,
                        cabs(yn) ** 2 + (w * cabs(dn)) ** 2))
        if den == 0.0:
            raise StepUnderflow("state vanished identically")
        err = num / (tol * den)

        if err <= 1.0:
            if last:
                s = length
            else:
                s = s + h
            yc = yn
            dc = dn
            k1y = k7y
            k1d = k7d
            acc += 1
            m = fmax(cabs(yc), cabs(dc))
            if m > _BIG or m < _SMALL:
                frexp(m, &e)
                f = ldexp(1.0, -e)
                yc = yc * f
                dc = dc * f
                k1y = k1y * f
                k1d = k1d * f
                logscale += e * _LN2
            if err == 0.0:
                fac = 5.0
            else:
                fac = fmin(5.0, fmax(0.2, 0.9 * err ** -0.2))
        else:
            rej += 1
            fac = fmax(0.2, 0.9 * err ** -0.2)
        h = fmin(hmax, h * fac)
        if h < 1e-14 * length and s < length:
            raise StepUnderflow(
                f"step size {h:.3e} underflowed at z={complex(za + s * u)!r} (err={err:.3e})")
    return complex(yc), complex(dc), logscale, acc, rej


cdef inline double _blockmax(double* mags, int n):
    return fmax(fmax(mags[n], mags[n - 1]), fmax(mags[n - 2], mags[n - 3]))


def riccati_series(double sigma, double b, double J, lam, z, int nmax):
    """Asymptotic log-derivative expansion; see ``_pykernels.riccati_series``."""
    cdef double complex zc = z, lc = lam
    cdef double complex[256] d
    if nmax > 255:
        nmax = 255
    cdef double two_s = 2.0 * sigma
    cdef double complex logz = clog(zc)
    cdef double complex inv = 1.0 / zc
    cdef double complex Phi = sigma * zc * zc * zc / 3.0
    cdef double complex phi = sigma * zc * zc
    cdef double complex zpow = zc * zc
    cdef double complex acc, term
    cdef double mag
    cdef double[256] mags
    cdef int n, i, used = 0
    d[0] = sigma
    for n in range(1, nmax + 1):
        if n == 2:
            acc = -2.0 * b
        elif n == 3:
            acc = 2.0 * J
        elif n == 4:
            acc = -lc
        else:
            acc = 0.0
        for i in range(1, n):
            acc = acc - d[i] * d[n - i]
        if n >= 3:
            acc = acc - (5 - n) * d[n - 3]
        d[n] = acc / two_s
        zpow = zpow * inv
        if n == 3:
            Phi = Phi + d[3] * logz
            phi = phi + d[3] * zpow
            continue
        if n < 3:
            Phi = Phi + d[n] * zpow * zc / (3 - n)
            phi = phi + d[n] * zpow
            continue
        term = d[n] * zpow * zc / (3 - n)
        mag = cabs(term)
        mags[n] = mag
        if n >= 16 and _blockmax(mags, n) > _blockmax(mags, n - 4):
            break
        Phi = Phi + term
        phi = phi + d[n] * zpow
        used = n
        if n >= 12 and _blockmax(mags, n) < 1e-18 * fmax(1.0, cabs(Phi)):
            break
    return complex(Phi), complex(phi), used
