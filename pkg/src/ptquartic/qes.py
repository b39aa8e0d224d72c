"""Quasi-exactly solvable curves Q_J(b, lambda) = 0.

For a positive integer J, y = p(z) exp(z^3/3 - bz) solves the quartic
problem with deg p = J - 1 exactly when the coefficients c_0..c_{J-1} of p
satisfy, for 0 <= k <= J - 1,

    (lambda + b^2) c_k = -(k+2)(k+1) c_{k+2} + 2b(k+1) c_{k+1} + 2(J-k) c_{k-1}

with c_{-1} = c_J = c_{J+1} = 0.  Q_J is the determinant of this system,
computed exactly over Z[b, lambda].
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping

import numpy as np


class QesError(ValueError):
    pass


class QesCollision(QesError):
    """Q_J(b, .) has a repeated root, so the QES kernel is not one-dimensional."""


class BivarPoly:
    """Polynomial in (b, lambda) with integer coefficients, keyed (deg_b, deg_lambda)."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Mapping[tuple[int, int], int] | None = None):
        self._c: dict[tuple[int, int], int] = {}
        for key, v in (coeffs or {}).items():
            v = int(v)
            if v:
                self._c[(int(key[0]), int(key[1]))] = v

    @classmethod
    def const(cls, v: int) -> "BivarPoly":
        return cls({(0, 0): v})

    @classmethod
    def b(cls) -> "BivarPoly":
        return cls({(1, 0): 1})

    @classmethod
    def lam(cls) -> "BivarPoly":
        return cls({(0, 1): 1})

    @property
    def terms(self) -> dict[tuple[int, int], int]:
        return dict(self._c)

    def __iter__(self) -> Iterator[tuple[tuple[int, int], int]]:
        return iter(sorted(self._c.items(), key=lambda kv: (-kv[0][1], -kv[0][0])))

    def is_zero(self) -> bool:
        return not self._c

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = BivarPoly.const(other)
        return isinstance(other, BivarPoly) and self._c == other._c

    def __hash__(self):
        return hash(frozenset(self._c.items()))

    def __add__(self, other: "BivarPoly") -> "BivarPoly":
        if isinstance(other, int):
            other = BivarPoly.const(other)
        out = dict(self._c)
        for k, v in other._c.items():
            out[k] = out.get(k, 0) + v
        return BivarPoly(out)

    __radd__ = __add__

    def __neg__(self) -> "BivarPoly":
        return BivarPoly({k: -v for k, v in self._c.items()})

    def __sub__(self, other: "BivarPoly") -> "BivarPoly":
        if isinstance(other, int):
            other = BivarPoly.const(other)
        return self + (-other)

    def __mul__(self, other) -> "BivarPoly":
        if isinstance(other, int):
            return BivarPoly({k: v * other for k, v in self._c.items()})
        out: dict[tuple[int, int], int] = {}
        for (i1, j1), v1 in self._c.items():
            for (i2, j2), v2 in other._c.items():
                key = (i1 + i2, j1 + j2)
                out[key] = out.get(key, 0) + v1 * v2
        return BivarPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "BivarPoly":
        out = BivarPoly.const(1)
        for _ in range(n):
            out = out * self
        return out

    def _lead(self) -> tuple[tuple[int, int], int]:
        # lexicographic in (deg_lambda, deg_b)
        key = max(self._c, key=lambda k: (k[1], k[0]))
        return key, self._c[key]

    def exact_div(self, other: "BivarPoly") -> "BivarPoly":
        """Quotient of an exact division; raises if a remainder is left."""
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        rem = BivarPoly(self._c)
        quo: dict[tuple[int, int], int] = {}
        (ob, ol), ov = other._lead()
        while not rem.is_zero():
            (rb, rl), rv = rem._lead()
            if rb < ob or rl < ol or rv % ov:
                raise ArithmeticError("inexact polynomial division")
            t = BivarPoly({(rb - ob, rl - ol): rv // ov})
            quo[(rb - ob, rl - ol)] = rv // ov
            rem = rem - t * other
        return BivarPoly(quo)

    @property
    def degree_lambda(self) -> int:
        return max((k[1] for k in self._c), default=-1)

    @property
    def degree_b(self) -> int:
        return max((k[0] for k in self._c), default=-1)

    def coeff_in_lambda(self, j: int) -> dict[int, int]:
        return {k[0]: v for k, v in self._c.items() if k[1] == j}

    def __call__(self, b, lam):
        total = 0
        for (i, j), v in self._c.items():
            total += v * b ** i * lam ** j
        return total

    def lambda_coefficients(self, b) -> list:
        """Coefficients of Q(b, .) in descending powers of lambda."""
        n = self.degree_lambda
        out = [0] * (n + 1)
        for (i, j), v in self._c.items():
            out[n - j] += v * b ** i
        return out

    def derivative_lambda(self) -> "BivarPoly":
        return BivarPoly({(i, j - 1): v * j for (i, j), v in self._c.items() if j})

    def __repr__(self) -> str:
        return f"BivarPoly({self})"

    def __str__(self) -> str:
        if not self._c:
            return "0"
        parts = []
        for (i, j), v in self:
            mono = "*".join(s for s in (
                "" if i == 0 else ("b" if i == 1 else f"b^{i}"),
                "" if j == 0 else ("lambda" if j == 1 else f"lambda^{j}")) if s)
            mag = abs(v)
            if mono:
                body = mono if mag == 1 else f"{mag}*{mono}"
            else:
                body = str(mag)
            sign = "-" if v < 0 else "+"
            parts.append((sign, body))
        first_sign, first = parts[0]
        s = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            s += f" {sign} {body}"
        return s

    def to_sympy(self, b, lam):
        return sum(v * b ** i * lam ** j for (i, j), v in self._c.items())

    @classmethod
    def from_sympy(cls, expr, b, lam) -> "BivarPoly":
        import sympy

        poly = sympy.Poly(sympy.expand(expr), b, lam)
        out = {}
        for (i, j), v in poly.terms():
            if v != int(v):
                raise QesError(f"non-integer coefficient {v}")
            out[(i, j)] = int(v)
        return cls(out)


@dataclass(frozen=True)
class QesSystem:
    """Matrix of the QES linear system acting on (c_0, ..., c_{J-1})."""
    J: int
    matrix: tuple[tuple[BivarPoly, ...], ...]

    def numeric(self, b, lam) -> np.ndarray:
        n = self.J
        M = np.zeros((n, n), dtype=complex)
        for i in range(n):
            for j in range(n):
                M[i, j] = self.matrix[i][j](b, lam)
        return M

    def exact(self, b, lam) -> list[list]:
        return [[entry(b, lam) for entry in row] for row in self.matrix]


def _check_J(J) -> int:
    if isinstance(J, bool) or int(J) != J or J < 1:
        raise QesError(f"J must be a positive integer, got {J!r}")
    return int(J)


def qes_recurrence_system(J: int) -> QesSystem:
    """Row k collects the z^k coefficient of
    p'' + 2(z^2 - b) p' + (2(1 - J) z + lambda + b^2) p = 0."""
    J = _check_J(J)
    zero = BivarPoly()
    rows = []
    shift = BivarPoly.lam() + BivarPoly.b() ** 2
    for k in range(J):
        row = [zero] * J
        row[k] = shift
        if k + 1 < J:
            row[k + 1] = BivarPoly.b() * (-2 * (k + 1))
        if k + 2 < J:
            row[k + 2] = BivarPoly.const((k + 2) * (k + 1))
        if k >= 1:
            row[k - 1] = BivarPoly.const(-2 * (J - k))
        rows.append(tuple(row))
    return QesSystem(J, tuple(rows))


def bareiss_determinant(matrix) -> BivarPoly:
    """Fraction-free Gaussian elimination; all divisions are exact."""
    M = [list(r) for r in matrix]
    n = len(M)
    sign = 1
    prev = BivarPoly.const(1)
    for k in range(n - 1):
        if M[k][k].is_zero():
            swap = next((i for i in range(k + 1, n) if not M[i][k].is_zero()), None)
            if swap is None:
                return BivarPoly()
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[k][k] * M[i][j] - M[i][k] * M[k][j]).exact_div(prev)
            M[i][k] = BivarPoly()
        prev = M[k][k]
    return M[n - 1][n - 1] * sign


_POLY_CACHE: dict[int, BivarPoly] = {}


def qes_polynomial(J: int) -> BivarPoly:
    """Q_J(b, lambda), normalized so that the lambda^J coefficient is +1."""
    J = _check_J(J)
    if J not in _POLY_CACHE:
        Q = bareiss_determinant(qes_recurrence_system(J).matrix)
        lead = Q.coeff_in_lambda(J)
        if Q.degree_lambda != J or set(lead) != {0} or abs(lead[0]) != 1:
            raise QesError(f"unexpected leading term {lead} for J={J}")
        _POLY_CACHE[J] = Q * lead[0]
    return _POLY_CACHE[J]


def qes_to_json(J: int) -> dict:
    Q = qes_polynomial(J)
    return {"J": int(J),
            "terms": [{"db": i, "dl": j, "coeff": str(v)} for (i, j), v in Q]}


def qes_from_json(data: dict | str) -> tuple[int, BivarPoly]:
    if isinstance(data, str):
        data = json.loads(data)
    return int(data["J"]), BivarPoly({(t["db"], t["dl"]): int(t["coeff"]) for t in data["terms"]})


def _root_order(lam: complex):
    return (-round(lam.real, 10), -lam.imag)


def qes_eigenvalues(J: int, b: float) -> list[complex]:
    """The J roots of Q_J(b, .) from the top down; real roots have imag == 0.

    Companion-matrix roots, each polished by one Newton step.
    """
    Q = qes_polynomial(J)
    dQ = Q.derivative_lambda()
    b = float(b)
    coeffs = [float(c) for c in Q.lambda_coefficients(b)]
    roots = np.roots(coeffs) if len(coeffs) > 1 else np.array([])
    out = []
    for r in roots:
        r = complex(r)
        d = complex(np.polyval([float(c) for c in dQ.lambda_coefficients(b)], r)) if J > 1 else 1.0
        if d != 0:
            r -= complex(np.polyval(coeffs, r)) / d
        if abs(r.imag) < 1e-12 * (1.0 + abs(r)):
            r = complex(r.real, 0.0)
        out.append(r)
    return sorted(out, key=_root_order)


def qes_discriminant(J: int) -> dict[int, int]:
    """Discriminant of Q_J(b, .) in lambda, as {deg_b: coeff}."""
    import sympy

    b, lam = sympy.symbols("b lambda")
    Q = qes_polynomial(J).to_sympy(b, lam)
    if J == 1:
        return {0: 1}
    disc = sympy.Poly(sympy.discriminant(Q, lam), b)
    return {m[0]: int(v) for m, v in disc.terms()}


def has_collision(J: int, b) -> bool:
    """Exact test for a repeated root of Q_J(b, .) at rational b."""
    b = Fraction(b)
    return sum(v * b ** i for i, v in qes_discriminant(J).items()) == 0


@dataclass(frozen=True)
class QesEigenfunction:
    J: int
    b: float
    lam: complex
    coeffs: tuple[complex, ...]   # c_0 .. c_{J-1}, monic in the top nonzero one
    roots: tuple[complex, ...]

    def p(self, z):
        return sum(c * z ** k for k, c in enumerate(self.coeffs))

    def __call__(self, z):
        """y(z) = p(z) exp(z^3/3 - bz)."""
        return self.p(z) * np.exp(z ** 3 / 3.0 - self.b * z)

    @property
    def real_roots(self) -> tuple[float, ...]:
        return tuple(r.real for r in self.roots if r.imag == 0.0)


def _monic(vec):
    top = max(i for i, c in enumerate(vec) if c != 0)
    return [c / vec[top] for c in vec], top


def qes_eigenfunction(J: int, b: float, lam: complex, root_tol: float = 1e-8) -> QesEigenfunction:
    J = _check_J(J)
    Q = qes_polynomial(J)
    lam = complex(lam)
    scale = sum(abs(v) * abs(b) ** i * abs(lam) ** j for (i, j), v in Q) or 1.0
    if abs(Q(b, lam)) > root_tol * scale:
        raise QesError(f"lambda={lam} is not a root of Q_{J}(b={b}, .)")
    others = [r for r in qes_eigenvalues(J, b) if abs(r - lam) > 1e-6 * (1 + abs(lam))]
    if len(others) != J - 1:
        raise QesCollision(f"repeated QES eigenvalue at b={b}, J={J}; perturb b")
    M = qes_recurrence_system(J).numeric(b, lam)
    _, s, vh = np.linalg.svd(M)
    vec = vh[-1].conj()
    vec[np.abs(vec) < 1e-14 * np.max(np.abs(vec))] = 0.0
    coeffs, top = _monic(list(vec))
    if np.isreal(lam) and float(np.imag(b)) == 0.0:
        coeffs = [complex(c.real, 0.0) if abs(c.imag) < 1e-10 * (1 + abs(c)) else c
                  for c in coeffs]
    roots = np.roots(coeffs[:top + 1][::-1]) if top > 0 else np.array([])
    roots = [complex(r.real, 0.0) if abs(r.imag) < 1e-9 * (1 + abs(r)) else complex(r)
             for r in roots]
    return QesEigenfunction(J, float(b), lam, tuple(complex(c) for c in coeffs),
                            tuple(sorted(roots, key=lambda r: (r.real, r.imag))))


def qes_eigenfunction_exact(J: int, b, lam) -> list:
    """Kernel vector over the rationals, for exact rational (b, lambda)."""
    import sympy

    J = _check_J(J)
    b = sympy.Rational(str(Fraction(b)))
    lam = sympy.Rational(str(Fraction(lam)))
    M = sympy.Matrix(qes_recurrence_system(J).exact(b, lam))
    null = M.nullspace()
    if len(null) != 1:
        raise QesCollision(f"kernel dimension {len(null)} at b={b}, lambda={lam}")
    v = list(null[0])
    top = max(i for i, c in enumerate(v) if c != 0)
    return [c / v[top] for c in v]


def rederive_recurrence(J: int) -> bool:
    """Self-check: substitute p exp(z^3/3 - bz) symbolically and compare the
    collected equations with ``qes_recurrence_system``."""
    import sympy

    J = _check_J(J)
    z, b, lam = sympy.symbols("z b lambda")
    cs = sympy.symbols(f"c0:{J}")
    p = sum(c * z ** k for k, c in enumerate(cs))
    y = p * sympy.exp(z ** 3 / 3 - b * z)
    residual = -sympy.diff(y, z, 2) + (z ** 4 - 2 * b * z ** 2 + 2 * J * z - lam) * y
    residual = sympy.expand(sympy.simplify(residual * sympy.exp(-(z ** 3 / 3 - b * z))))
    poly = sympy.Poly(residual, z)
    system = qes_recurrence_system(J)
    for k in range(J + 2):
        row_expr = poly.coeff_monomial(z ** k)
        if k < J:
            expected = -sum(entry.to_sympy(b, lam) * cs[j]
                            for j, entry in enumerate(system.matrix[k]))
        else:
            expected = 0
        if sympy.expand(row_expr - expected) != 0:
            return False
    return poly.degree() <= J + 1
