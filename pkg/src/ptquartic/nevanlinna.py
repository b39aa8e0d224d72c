"""Asymptotic values of the Nevanlinna function f = y / y1.

y is the eigenfunction (subdominant in S_1 and S_-1), y1 the solution
subdominant in S_0, seeded real on the positive real axis.  f tends to 0 in
S_{+-1} and to infinity in S_0; its limits along the bisectors of S_2 and
S_3 are c and a.  At J = 0 the potential is even and the symmetric ratio
y(z)/y(-z) has the limit A in S_0.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .contour import (
    OdeState,
    ProblemPoint,
    RaySpec,
    default_radius,
    integrate,
    wkb_seed,
)
from .spectrum import Shooter, boundary_scale, Box

EPS_QES = 1e-4
REAL_TOL = 1e-4
RATIO_TOL = 1e-6
ODE_TOL = 1e-12
MAX_RADIUS_STEPS = 14

ANGLE_C = 2.0 * math.pi / 3.0   # bisector of S_2
ANGLE_A = math.pi               # bisector of S_3


class NevanlinnaError(RuntimeError):
    pass


class NotOnLocus(NevanlinnaError):
    pass


@dataclass(frozen=True)
class NevanlinnaValues:
    a: complex
    c: complex
    a_zero: bool
    c_infinite: bool
    normalization: str            # "a_set_to_1" or "c_unit_modulus"
    a_raw: complex
    c_raw: complex
    estimates_radius: float
    convergence_gap: float

    @property
    def t(self) -> complex:
        """c / a; infinite when a is flagged zero."""
        if self.a_zero:
            return complex(math.inf, 0.0)
        return self.c / self.a

    @property
    def a_ratio(self) -> float:
        return abs(self.a_raw) / max(abs(self.c_raw), 1e-300)

    @property
    def c_imag_ratio(self) -> float:
        c = self.c_raw / self.a_raw if self.a_raw else self.c_raw
        return abs(c.imag) / max(abs(c), 1e-300)


@dataclass(frozen=True)
class SymmetricValueA:
    A: float
    identity_residual: float
    A_imag: float = 0.0
    sign_flipped: bool = False
    test_points: tuple = field(default_factory=tuple)


def _origin_states(point: ProblemPoint, tol: float = ODE_TOL):
    """Eigenfunction y (from S_1) and y1 (from S_0) at z = 0.

    y is rotated so that it is real on the real axis when lambda is real.
    """
    R = default_radius(point)
    y = integrate(point, wkb_seed(point, RaySpec.sector(1, R)), 0j, tol)
    y1 = integrate(point, wkb_seed(point, RaySpec.sector(0, R)), 0j, tol)
    u = y.y if abs(y.y) >= abs(y.dy) else y.dy
    y = y.scaled(abs(u) / u).normalized()
    return y, y1.normalized()


def check_on_locus(point: ProblemPoint, tol: float = 1e-6) -> float:
    sh = Shooter.for_region(point.b, point.J, [point.lam], 1e-12)
    w = abs(sh.W(point.lam))
    lam = complex(point.lam)
    scale = boundary_scale(Shooter(point.b, point.J, sh.radius, 1e-8), Box.around(lam, 0.5), 16)
    ratio = w / scale
    if ratio > tol:
        raise NotOnLocus(f"lambda={lam} is not an eigenvalue at b={point.b}, J={point.J} "
                         f"(|W| ratio {ratio:.3e})")
    return ratio


def _ratio(s: OdeState, s1: OdeState) -> complex:
    return s.y / s1.y * math.exp(s.logscale - s1.logscale)


def _combine(s1: OdeState, s2: OdeState, mu: float) -> OdeState:
    """s1 + mu s2 for two states at the same point."""
    top = max(s1.logscale, s2.logscale)
    f1 = math.exp(s1.logscale - top)
    f2 = mu * math.exp(s2.logscale - top)
    return OdeState(s1.z, s1.y * f1 + s2.y * f2, s1.dy * f1 + s2.dy * f2, top).normalized()


def _ray_limit(point, y0, y10, angle, tol=ODE_TOL, rel=RATIO_TOL, ref=None):
    """Limit of y/y1 along the ray at ``angle``.

    Radii grow by 1.25 until two successive estimates differ by less than
    ``rel`` times ``ref`` (default: the size of the estimate).
    Returns (value, radius, gap).
    """
    R = max(2.0, 0.75 * default_radius(point))
    u = cmath.exp(1j * angle)
    s, s1 = y0, y10
    prev = None
    gaps = []
    for _ in range(MAX_RADIUS_STEPS):
        s = integrate(point, s, R * u, tol).normalized()
        s1 = integrate(point, s1, R * u, tol).normalized()
        est = _ratio(s, s1)
        if prev is not None:
            gap = abs(est - prev)
            gaps.append(gap)
            size = max(abs(est), abs(prev)) if ref is None else ref
            if gap <= rel * max(size, 1e-300):
                return est, R, gap
            if len(gaps) >= 3 and gaps[-1] > gaps[-3]:
                raise NevanlinnaError(
                    f"ratio along angle {angle:.4f} not converging: gaps {gaps}")
        prev = est
        R *= 1.25
    raise NevanlinnaError(f"ratio along angle {angle:.4f} not converged by R={R:.3g}: gaps {gaps}")


def raw_asymptotic_values(point: ProblemPoint, mu: float = 0.0, tol: float = ODE_TOL):
    """(a_raw, c_raw, radius, gap) for f = y / (y1 + mu y)."""
    y0, y10 = _origin_states(point, tol)
    if mu:
        y10 = _combine(y10, y0, mu)
    c_raw, Rc, gc = _ray_limit(point, y0, y10, ANGLE_C, tol)
    # a may vanish; its convergence is judged against |c|
    a_raw, Ra, ga = _ray_limit(point, y0, y10, ANGLE_A, tol, ref=abs(c_raw))
    return a_raw, c_raw, max(Ra, Rc), max(ga, gc)


def asymptotic_values(point: ProblemPoint, mu: float = 0.0, check: bool = True,
                      eps_qes: float = EPS_QES) -> NevanlinnaValues:
    """Normalized (a, c).

    a is set to 1 unless a is flagged zero; then c is scaled to unit
    modulus.  Replacing y1 by y1 + mu y (real mu)
    acts on (a, c) by a real fractional-linear map.
    """
    if complex(point.lam).imag != 0.0:
        raise NevanlinnaError("asymptotic values are computed for real lambda only")
    if check:
        check_on_locus(point)
    a_raw, c_raw, R, gap = raw_asymptotic_values(point, mu)
    big = max(abs(a_raw), abs(c_raw))
    # y and y1 have unit size at the origin; a small ratio |a|/|c| is a = 0
    # when a_raw itself is small, and c = infinity when c_raw is large
    small = abs(a_raw) < eps_qes * abs(c_raw)
    a_zero = small and abs(a_raw) <= eps_qes
    c_inf = small and not a_zero
    if a_zero:
        a, c, norm = a_raw / abs(c_raw), c_raw / abs(c_raw), "c_unit_modulus"
    else:
        a, c, norm = 1.0 + 0j, c_raw / a_raw, "a_set_to_1"
    return NevanlinnaValues(complex(a), complex(c), a_zero, c_inf, norm,
                            complex(a_raw), complex(c_raw), R, gap / max(big, 1e-300))


# -- J = 0: the symmetric value A --------------------------------------------

_TEST_POINTS = tuple(0.5 * (1 + k / 4) * cmath.exp(1j * (0.3 + 0.7 * k)) for k in range(8))


def _states_at(point, start: OdeState, zs, tol=ODE_TOL) -> list[OdeState]:
    return [integrate(point, start, z, tol) for z in zs]


def symmetric_value_A(b: float, lam: float, check: bool = True,
                      test_points=_TEST_POINTS) -> SymmetricValueA:
    """A = lim y(x)/y(-x) as x -> +infinity, for the even potential J = 0.

    The identity f(z) f(-z) = 1 is checked with y taken from S_1 in one
    factor and from S_-1 in the other, so it holds only at eigenvalues.
    """
    point = ProblemPoint(float(b), 0.0, complex(lam))
    if check:
        check_on_locus(point)
    R = default_radius(point)
    yp = integrate(point, wkb_seed(point, RaySpec.sector(1, R)), 0j, ODE_TOL).normalized()
    ym = integrate(point, wkb_seed(point, RaySpec.sector(-1, R)), 0j, ODE_TOL).normalized()

    # A from the real axis: y(x) and y(-x) are both dominant there
    x = max(2.0, 0.75 * R)
    s_pos, s_neg = yp, yp
    prev, A = None, None
    for _ in range(MAX_RADIUS_STEPS):
        s_pos = integrate(point, s_pos, complex(x), ODE_TOL).normalized()
        s_neg = integrate(point, s_neg, complex(-x), ODE_TOL).normalized()
        A = _ratio(s_pos, s_neg)
        if prev is not None and abs(A - prev) <= RATIO_TOL * abs(A):
            break
        prev = A
        x *= 1.25
    else:
        raise NevanlinnaError(f"symmetric ratio did not converge (last {A})")

    residual = 0.0
    for z in test_points:
        num = _states_at(point, yp, [z, -z])
        den = _states_at(point, ym, [-z, z])
        f_z = _ratio(num[0], num[1])          # y+(z) / y+(-z)
        f_mz = _ratio(den[0], den[1])         # y-(-z) / y-(z)
        residual = max(residual, abs(f_z * f_mz - 1.0))
    # f -> -f preserves f(-z) f(z) = 1; use it to make A positive
    flipped = A.real < 0
    if flipped:
        A = -A
    return SymmetricValueA(float(A.real), residual, float(A.imag), flipped, tuple(test_points))


def moebius_residual(b: float, lam: float) -> float:
    """|c/a - (1 - A^2)|.

    The real map g = A f / (f - c) sends f = y/y1 to y(z)/y(-z): it fixes 0,
    sends infinity to A and c to infinity, and a = c / (1 - A^2) to 1/A.
    """
    vals = asymptotic_values(ProblemPoint(float(b), 0.0, complex(lam)))
    A = symmetric_value_A(b, lam, check=False).A
    return abs(vals.t - (1.0 - A * A))


# -- verdict from the asymptotic values --------------------------------------

QES = "qes"
INTEGER_REAL_C = "integer_real_c"
NON_INTEGER = "non_integer"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Theorem2Verdict:
    classification: str
    a_ratio: float
    c_imag_ratio: float
    J_is_integer: bool
    consistent: bool
    values: NevanlinnaValues

    @property
    def conclusive(self) -> bool:
        return self.classification != INCONCLUSIVE


def _near(ratio: float, threshold: float) -> bool:
    return threshold / 10.0 <= ratio <= threshold * 10.0


def classify(a_ratio: float, c_imag_ratio: float, a_threshold: float = EPS_QES,
             real_threshold: float = REAL_TOL) -> str:
    """Verdict from the two ratios; a ratio within a factor 10 of the
    threshold that decides the verdict gives "inconclusive"."""
    if _near(a_ratio, a_threshold):
        return INCONCLUSIVE
    if a_ratio < a_threshold:
        return QES
    if _near(c_imag_ratio, real_threshold):
        return INCONCLUSIVE
    return INTEGER_REAL_C if c_imag_ratio < real_threshold else NON_INTEGER


def theorem2_check(point: ProblemPoint, mu: float = 0.0, a_threshold: float = EPS_QES,
                   real_threshold: float = REAL_TOL) -> Theorem2Verdict:
    vals = asymptotic_values(point, mu, eps_qes=a_threshold)
    a_ratio = vals.a_ratio
    c_ratio = vals.c_imag_ratio
    verdict = classify(a_ratio, c_ratio, a_threshold, real_threshold)
    J = point.J
    J_int = abs(J - round(J)) < 1e-9
    if verdict == QES:
        ok = J_int and round(J) >= 1
    elif verdict == INTEGER_REAL_C:
        ok = J_int
    elif verdict == NON_INTEGER:
        ok = not J_int
    else:
        ok = False
    return Theorem2Verdict(verdict, a_ratio, c_ratio, J_int, ok, vals)


# -- Schwarzian identity -----------------------------------------------------------

# 7-point central stencils (offsets -3..3)
_D1 = np.array([-1, 9, -45, 0, 45, -9, 1]) / 60.0
_D2 = np.array([2, -27, 270, -490, 270, -27, 2]) / 180.0
_D3 = np.array([1, -8, 13, 0, -13, 8, -1]) / 8.0


@dataclass(frozen=True)
class SchwarzianReport:
    residual: float
    per_point: tuple
    skipped: tuple


def _schwarzian_fd(values: np.ndarray, h: complex) -> complex:
    f1 = _D1 @ values / h
    f2 = _D2 @ values / h ** 2
    f3 = _D3 @ values / h ** 3
    return f3 / f1 - 1.5 * (f2 / f1) ** 2


def schwarzian_at(point: ProblemPoint, y0: OdeState, y10: OdeState, z0: complex):
    """S(f) at z0 by finite differences of f = y/y1 (or y1/y, whichever has
    the larger denominator; S is invariant under f -> 1/f).

    Returns (S, skipped_reason).
    """
    Q = point.potential(z0) - complex(point.lam)
    h0 = 0.01 * min(1.0, abs(Q) ** -0.5 if Q else 1.0)
    a = integrate(point, y0, z0, ODE_TOL)
    a1 = integrate(point, y10, z0, ODE_TOL)
    flip = abs(a.y) * math.exp(a.logscale - a1.logscale) > abs(a1.y)
    results = []
    for h in (h0, h0 / 2):
        nodes = [z0 + k * h for k in range(-3, 4)]
        st = [integrate(point, a, z, ODE_TOL) for z in nodes]
        st1 = [integrate(point, a1, z, ODE_TOL) for z in nodes]
        vals = np.array([(_ratio(s1, s) if flip else _ratio(s, s1)) for s, s1 in zip(st, st1)])
        if not np.all(np.isfinite(vals)):
            return None, "non-finite ratio near z0"
        results.append(_schwarzian_fd(vals, h))
    S = (16.0 * results[1] - results[0]) / 15.0
    return S, None


def schwarzian_residual(point: ProblemPoint, sample_points, lam_shift: float = 0.0,
                        check: bool = True) -> SchwarzianReport:
    """max |S(f) + 2(V - lambda)| over the sample points.

    For y'' = (V - lambda) y the Schwarzian of any ratio of solutions is
    -2(V - lambda).  ``lam_shift`` evaluates the target at lambda + shift
    while keeping f fixed.
    """
    if check:
        check_on_locus(point)
    y0, y10 = _origin_states(point)
    lam = complex(point.lam) + lam_shift
    per, skipped = [], []
    for z in sample_points:
        z = complex(z)
        S, why = schwarzian_at(point, y0, y10, z)
        if S is None:
            skipped.append((z, why))
            continue
        per.append((z, abs(S + 2.0 * (point.potential(z) - lam))))
    res = max((r for _, r in per), default=float("nan"))
    return SchwarzianReport(res, tuple(per), tuple(skipped))
