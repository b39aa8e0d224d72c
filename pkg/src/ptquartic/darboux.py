"""Darboux (Crum) transform with the full set of QES eigenfunctions.

With psi_i = p_i exp(z^3/3 - bz), i < J, the Wronskian is
W(psi_0..psi_{J-1}) = w(z) exp(J(z^3/3 - bz)), and the transformed operator
has potential V - 2 (log W)''.  When the QES eigenvalues are distinct the
polynomials p_i span all polynomials of degree < J, so w is a nonzero
constant and the new potential is z^4 - 2bz^2 - 2Jz, the potential of
L_{b,-J}.  The spectrum of L_{b,-J} is then that of L_{b,J} with the QES
eigenvalues removed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import sympy

from . import qes
from .spectrum import EIGEN_TOL, lowest_levels

EXACT_MAX_J = 2
MP_BITS = 200
MP_ZERO = mpmath.mpf(10) ** -40


class DarbouxError(RuntimeError):
    pass


class VerificationError(DarbouxError):
    """w turned out non-constant, or the transformed potential is wrong."""


@dataclass(frozen=True)
class WronskianResult:
    J: int
    b: Fraction
    poly_part: tuple          # coefficients of w, ascending in z
    exp_exponent_multiplier: int
    exact: bool
    residual: float = 0.0     # largest non-constant coefficient (numeric path)

    @property
    def is_constant(self) -> bool:
        return len(self.poly_part) == 1

    @property
    def constant(self):
        return self.poly_part[0]


def _rational(b) -> Fraction:
    if isinstance(b, float):
        return Fraction(b).limit_denominator(10 ** 12)
    return Fraction(b)


def _check_distinct(J: int, b: Fraction):
    if qes.has_collision(J, b):
        raise qes.QesCollision(
            f"QES eigenvalues collide at b={b} for J={J} (discriminant vanishes)")


def _exact_wronskian(J: int, b: Fraction) -> WronskianResult:
    z, lam = sympy.symbols("z lambda")
    bs = sympy.Rational(b.numerator, b.denominator)
    Q = qes.qes_polynomial(J).to_sympy(bs, lam)
    roots = sympy.roots(sympy.Poly(Q, lam))
    if sum(roots.values()) != J or len(roots) != J:
        raise DarbouxError(f"could not split Q_{J} exactly at b={b}")
    g = z ** 3 / 3 - bs * z
    psis = []
    for root in sorted(roots, key=sympy.default_sort_key):
        M = sympy.Matrix(qes.qes_recurrence_system(J).exact(bs, root)).applyfunc(sympy.nsimplify)
        null = M.nullspace(simplify=True)
        if len(null) != 1:
            raise qes.QesCollision(f"kernel of dimension {len(null)} at lambda={root}")
        p = sum(sympy.simplify(c) * z ** k for k, c in enumerate(null[0]))
        psis.append(p * sympy.exp(g))
    rows = [[sympy.diff(psi, z, r) for psi in psis] for r in range(J)]
    W = sympy.Matrix(rows).det()
    w = sympy.simplify(sympy.expand(W * sympy.exp(-J * g)))
    poly = sympy.Poly(w, z)
    coeffs = [sympy.nsimplify(sympy.simplify(c)) for c in reversed(poly.all_coeffs())]
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return WronskianResult(J, b, tuple(coeffs), J, True)


def _mp_wronskian(J: int, b: Fraction) -> WronskianResult:
    with mpmath.workprec(MP_BITS):
        bm = mpmath.mpf(b.numerator) / b.denominator
        desc = [mpmath.mpf(int(c)) if isinstance(c, int) else c
                for c in qes.qes_polynomial(J).lambda_coefficients(bm)]
        roots = mpmath.polyroots(desc, maxsteps=200, extraprec=2 * MP_BITS)
        system = qes.qes_recurrence_system(J)
        polys = []
        for r in roots:
            M = mpmath.matrix(system.exact(bm, r))
            # kernel vector: fix the top coefficient and solve the leading rows
            A = M[0:J - 1, 0:J - 1]
            rhs = -M[0:J - 1, J - 1]
            c = mpmath.lu_solve(A, rhs)
            vec = [c[i] for i in range(J - 1)] + [mpmath.mpf(1)]
            res = mpmath.norm(M * mpmath.matrix(vec))
            if res > MP_ZERO:
                raise DarbouxError(f"kernel residual {res} at lambda={r}")
            polys.append(vec)
        # Wronskian of the polynomial parts equals w
        def deriv(p, k):
            out = list(p)
            for _ in range(k):
                out = [i * out[i] for i in range(1, len(out))] or [mpmath.mpf(0)]
            return out

        def mul(p, q):
            out = [mpmath.mpc(0)] * (len(p) + len(q) - 1)
            for i, a in enumerate(p):
                for j, c in enumerate(q):
                    out[i + j] += a * c
            return out

        def add(p, q, s=1):
            n = max(len(p), len(q))
            p = list(p) + [0] * (n - len(p))
            q = list(q) + [0] * (n - len(q))
            return [a + s * c for a, c in zip(p, q)]

        def det(mat):
            if len(mat) == 1:
                return mat[0][0]
            total = [mpmath.mpc(0)]
            for j in range(len(mat)):
                minor = [row[:j] + row[j + 1:] for row in mat[1:]]
                total = add(total, mul(mat[0][j], det(minor)), 1 if j % 2 == 0 else -1)
            return total

        mat = [[deriv(p, r) for p in polys] for r in range(J)]
        w = det(mat)
        scale = max(abs(c) for c in w)
        tail = max((abs(c) for c in w[1:]), default=mpmath.mpf(0))
        rel = tail / scale if scale else mpmath.inf
        if rel < MP_ZERO:
            coeffs = (complex(w[0]),)
        else:
            coeffs = tuple(complex(c) for c in w)
        return WronskianResult(J, b, coeffs, J, False, float(rel))


def wronskian_of_qes(J: int, b) -> WronskianResult:
    """w(z) = W(psi_0..psi_{J-1}) exp(-J(z^3/3 - bz)) for rational b."""
    J = qes._check_J(J)
    b = _rational(b)
    _check_distinct(J, b)
    if J <= EXACT_MAX_J:
        return _exact_wronskian(J, b)
    return _mp_wronskian(J, b)


def _potential_from(res: WronskianResult) -> tuple[Fraction, ...]:
    z = sympy.Symbol("z")
    J = res.J
    bs = sympy.Rational(res.b.numerator, res.b.denominator)
    w = sum(sympy.nsimplify(c) * z ** k for k, c in enumerate(res.poly_part))
    W = w * sympy.exp(J * (z ** 3 / 3 - bs * z))
    V = z ** 4 - 2 * bs * z ** 2 + 2 * J * z
    new = sympy.simplify(V - 2 * sympy.diff(sympy.log(W), z, 2))
    poly = sympy.Poly(sympy.expand(new), z)
    return tuple(Fraction(int(c.p), int(c.q)) for c in reversed(poly.all_coeffs()))


def transformed_potential(J: int, b) -> tuple[Fraction, ...]:
    """Coefficients (ascending in z) of V - 2 (log W)''.

    Raises VerificationError unless the result is z^4 - 2bz^2 - 2Jz.
    """
    res = wronskian_of_qes(J, b)
    if not res.is_constant:
        raise VerificationError(
            f"Wronskian polynomial part is not constant for J={J}, b={res.b}: {res.poly_part}")
    if not res.exact:
        # numeric w is a constant to MP_BITS precision; only exp(J g) contributes
        res = WronskianResult(res.J, res.b, (1,), res.J, False, res.residual)
    out = _potential_from(res)
    expected = (Fraction(0), Fraction(-2 * res.J), -2 * res.b, Fraction(0), Fraction(1))
    if out != expected:
        raise VerificationError(f"transformed potential {out} != {expected}")
    return out


@dataclass
class DarbouxReport:
    J: int
    b: float
    qes_roots: list[complex]
    spectrum: list[complex]
    removed: list[complex]
    non_qes: list[complex]
    partner: list[complex]
    max_discrepancy: float
    tol: float
    near_intersections: list[tuple[complex, complex]] = field(default_factory=list)
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.max_discrepancy < self.tol and len(self.removed) == len(self.qes_roots)


def verify_spectral_shift(J: int, b: float, n_max: int = 5, tol: float = 1e-6,
                          eigen_tol: float = EIGEN_TOL) -> DarbouxReport:
    """Compare spec(L_{b,J}) minus the QES roots with spec(L_{b,-J})."""
    if J == 0:
        # the transform with no eigenfunctions is the identity
        levels = [e.lam for e in lowest_levels(b, 0.0, n_max, eigen_tol)[0]]
        return DarbouxReport(0, float(b), [], levels, [], levels, levels, 0.0, tol,
                             note="J=0: identity transform")
    J = qes._check_J(J)
    roots = qes.qes_eigenvalues(J, b)
    if len({(round(r.real, 8), round(r.imag, 8)) for r in roots}) < J:
        raise qes.QesCollision(f"QES eigenvalues collide at b={b} for J={J}")

    want = n_max + J
    while True:
        evs, complete, _ = lowest_levels(b, float(J), want, eigen_tol)
        spec = []
        for e in evs:
            spec.extend([e.lam] * e.multiplicity)
        removed, rest = [], list(spec)
        for r in roots:
            k = min(range(len(rest)), key=lambda i: abs(rest[i] - r), default=None)
            if k is not None and abs(rest[k] - r) < tol:
                removed.append(rest.pop(k))
        if len(removed) == J or not complete or want > n_max + 4 * J + 8:
            break
        want += J
    if len(removed) < J:
        missing = [r for r in roots if all(abs(r - x) >= tol for x in removed)]
        raise DarbouxError(f"QES eigenvalue(s) {missing} not found in the numerical spectrum")
    non_qes = rest[:n_max]
    partner_evs, _, _ = lowest_levels(b, float(-J), n_max, eigen_tol)
    partner = []
    for e in partner_evs:
        partner.extend([e.lam] * e.multiplicity)
    partner = partner[:n_max]
    if len(partner) != len(non_qes):
        raise DarbouxError("spectra of different lengths")
    disc = max((abs(x - y) for x, y in zip(non_qes, partner)), default=0.0)
    near = [(r, x) for r in roots for x in non_qes if abs(r - x) < 1e-2]
    return DarbouxReport(J, float(b), roots, spec, removed, non_qes, partner,
                         disc, tol, near)
