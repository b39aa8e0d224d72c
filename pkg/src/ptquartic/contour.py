"""Complex-plane integration of y'' = (z^4 - 2b z^2 + 2J z - lambda) y.

Solutions are carried as a mantissa pair plus a real log-magnitude so that
dominant solutions can be transported across |z| ~ 10 without overflow.
Subdominant solutions are seeded at large radius from the asymptotic
expansion of the log-derivative.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from typing import Iterable, Literal

from scipy.optimize import brentq

from ._backend import STEP_ERRORS, kernels

SUBDOMINANT = "subdominant"
DOMINANT = "dominant"
SERIES_TERMS = 200


class IntegrationError(RuntimeError):
    """Raised when the step controller cannot make progress."""


class SeedRadiusError(ValueError):
    def __init__(self, radius: float, required: float):
        super().__init__(
            f"seeding radius {radius:.6g} violates the dominance condition; "
            f"need radius >= {required:.6g}")
        self.radius = radius
        self.required = required


@dataclass(frozen=True)
class ProblemPoint:
    b: float
    J: float
    lam: complex

    def __post_init__(self):
        for name in ("b", "J"):
            v = getattr(self, name)
            if isinstance(v, complex) or not math.isfinite(v):
                raise ValueError(f"{name} must be a finite real, got {v!r}")
        if not cmath.isfinite(complex(self.lam)):
            raise ValueError(f"lambda must be finite, got {self.lam!r}")

    @property
    def coeffs(self) -> tuple[complex, ...]:
        """Coefficients of V(z) - lambda in ascending powers of z."""
        return (-complex(self.lam), complex(2.0 * self.J), complex(-2.0 * self.b), 0j, 1 + 0j)

    def potential(self, z: complex) -> complex:
        return z ** 4 - 2.0 * self.b * z ** 2 + 2.0 * self.J * z

    def with_lambda(self, lam: complex) -> "ProblemPoint":
        return replace(self, lam=lam)

    @property
    def is_real(self) -> bool:
        return complex(self.lam).imag == 0.0


@dataclass(frozen=True)
class RaySpec:
    angle: float
    radius: float
    orientation: Literal["inward", "outward"] = "inward"

    def __post_init__(self):
        if not self.radius >= 1.0:
            raise ValueError(f"ray radius must be >= 1, got {self.radius}")

    @classmethod
    def sector(cls, j: int, radius: float, orientation="inward") -> "RaySpec":
        """Central ray of the Stokes sector S_j."""
        j = ((j + 2) % 6) - 2  # keep angles in (-pi, pi]
        return cls(j * math.pi / 3.0, radius, orientation)

    @property
    def endpoint(self) -> complex:
        return self.radius * cmath.exp(1j * self.angle)


@dataclass(frozen=True)
class OdeState:
    z: complex
    y: complex
    dy: complex
    logscale: float = 0.0

    def __post_init__(self):
        if self.y == 0 and self.dy == 0:
            raise ValueError("state y = dy = 0 is the trivial solution")
        if not (cmath.isfinite(self.y) and cmath.isfinite(self.dy)
                and math.isfinite(self.logscale)):
            raise ValueError("non-finite ODE state")

    @property
    def value(self) -> complex:
        return self.y * math.exp(self.logscale)

    @property
    def derivative(self) -> complex:
        return self.dy * math.exp(self.logscale)

    def scaled(self, c: complex) -> "OdeState":
        return replace(self, y=self.y * c, dy=self.dy * c)

    def normalized(self) -> "OdeState":
        """Move the magnitude of the mantissa into ``logscale``."""
        m = max(abs(self.y), abs(self.dy))
        return OdeState(self.z, self.y / m, self.dy / m, self.logscale + math.log(m))


def wronskian(s1: OdeState, s2: OdeState) -> complex:
    """y1 y2' - y1' y2 for two states at the same point."""
    if abs(s1.z - s2.z) > 1e-12 * max(1.0, abs(s1.z)):
        raise ValueError("states live at different points")
    return (s1.y * s2.dy - s1.dy * s2.y) * math.exp(s1.logscale + s2.logscale)


def _dominance_gap(R: float, b: float, J: float, lam: complex) -> float:
    return R ** 4 - 10.0 * (2.0 * abs(b) * R ** 2 + 2.0 * abs(J) * R + abs(lam))


def min_radius(point: ProblemPoint) -> float:
    """Smallest |z| with |z|^4 >= 10 (2|b||z|^2 + 2|J||z| + |lambda|)."""
    b, J, lam = point.b, point.J, point.lam
    if _dominance_gap(1e-9, b, J, lam) >= 0:
        return 0.0
    hi = 1.0
    while _dominance_gap(hi, b, J, lam) < 0:
        hi *= 2.0
    return brentq(_dominance_gap, 0.0, hi, args=(b, J, lam), xtol=1e-12)


def default_radius(point: ProblemPoint) -> float:
    b, J, lam = abs(point.b), abs(point.J), abs(point.lam)
    R = 4.0
    for _ in range(3):
        R = max(4.0, 1.2 * (10.0 * (2.0 * b * R * R + 2.0 * J * R + lam)) ** 0.25)
    # the three-step iteration may stop short of the fixed point
    while _dominance_gap(R, point.b, point.J, point.lam) < 0:
        R *= 1.1
    return R


def subdominant_sign(angle: float) -> int:
    """Sign s with exp(s z^3/3) decaying along the ray at ``angle``."""
    c = math.cos(3.0 * angle)
    if abs(c) < 1e-12:
        raise ValueError(f"angle {angle} lies on an anti-Stokes line")
    return -1 if c > 0 else 1


def wkb_seed(point: ProblemPoint, ray: RaySpec, branch: str = SUBDOMINANT) -> OdeState:
    """Asymptotically normalized solution at the outer end of ``ray``.

    The returned state is y ~ z^(sJ-1) exp(s(z^3/3 - bz)) (1 + O(1/z)) with
    s = +1 on the central rays of S_1, S_-1 and s = -1 on S_0 for the
    subdominant branch.
    """
    need = min_radius(point)
    if ray.radius < need:
        raise SeedRadiusError(ray.radius, need)
    s = subdominant_sign(ray.angle)
    if branch == DOMINANT:
        s = -s
    elif branch != SUBDOMINANT:
        raise ValueError(f"unknown branch {branch!r}")
    z = ray.endpoint
    Phi, phi, _ = kernels.riccati_series(float(s), float(point.b), float(point.J),
                                         complex(point.lam), z, SERIES_TERMS)
    phase = cmath.exp(1j * Phi.imag)
    return OdeState(z, phase, phi * phase, Phi.real)


def _hmax(z0: complex, z1: complex) -> float:
    return max(abs(z0), abs(z1), 1.0) / 50.0


def integrate(point: ProblemPoint, start: OdeState, target_z: complex,
              tol: float = 1e-10) -> OdeState:
    """Transport ``start`` along the straight segment to ``target_z``."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    target_z = complex(target_z)
    try:
        y, dy, ls, _, _ = kernels.integrate_segment(
            start.z, target_z, start.y, start.dy, start.logscale,
            point.coeffs, tol, _hmax(start.z, target_z))
    except STEP_ERRORS as exc:
        raise IntegrationError(
            f"{exc} (segment {start.z!r} -> {target_z!r}, point {point})") from exc
    return OdeState(target_z, y, dy, ls)


def integrate_path(point: ProblemPoint, start: OdeState, path: Iterable[complex],
                   tol: float = 1e-10) -> OdeState:
    state = start
    for z in path:
        state = integrate(point, state, z, tol)
    return state


def sample_segment(point: ProblemPoint, start: OdeState, target_z: complex,
                   n: int, tol: float = 1e-10) -> list[OdeState]:
    """States at n + 1 equally spaced points from start.z to target_z."""
    out = [start]
    z0 = start.z
    for k in range(1, n + 1):
        out.append(integrate(point, out[-1], z0 + (target_z - z0) * k / n, tol))
    return out


def subdominant_at(point: ProblemPoint, sector: int, target_z: complex = 0j,
                   radius: float | None = None, tol: float = 1e-10) -> OdeState:
    """Solution subdominant in S_sector, seeded on its central ray and
    transported straight to ``target_z`` (default: the origin)."""
    R = default_radius(point) if radius is None else radius
    seed = wkb_seed(point, RaySpec.sector(sector, R))
    return integrate(point, seed, target_z, tol)
