"""Eigenvalues of -y'' + (z^4 - 2b z^2 + 2J z) y = lambda y by shooting.

Eigenvalues are the zeros of the Wronskian W(lambda) of the solutions
subdominant on the central rays of S_1 and S_-1, matched at z = 0.  Zeros in
a box are counted by the argument principle on the boundary and located by
real-axis bracketing (real b, J) or Newton iteration after subdivision.

The spectrum is unbounded below and bounded above.  Levels are indexed from
the top: level 0 is the eigenvalue of largest real part (the state without
real zeros at J = 0), level k the (k+1)-th.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .contour import (
    OdeState,
    ProblemPoint,
    RaySpec,
    default_radius,
    integrate,
    wkb_seed,
    wronskian,
)

EIGEN_TOL = 1e-9
BOUNDARY_SAMPLES = 256
BOUNDARY_TOL = 1e-7
REFINE_TOL = 1e-12
MAX_DEPTH = 40
SMALL_BOX = 0.05
CLUSTER_BOX = 1e-3
CLUSTER_TOL = 1e-6


class SpectrumError(RuntimeError):
    pass


class WindingError(SpectrumError):
    def __init__(self, box, detail):
        super().__init__(f"winding number inconsistency in box {box}: {detail}")
        self.box = box


class NotAnEigenvalue(SpectrumError):
    def __init__(self, lam, residual):
        super().__init__(f"lambda={lam!r} is not an eigenvalue (|W| ratio {residual:.3e})")
        self.residual = residual


@dataclass(frozen=True)
class Box:
    re0: float
    re1: float
    im0: float
    im1: float

    def __post_init__(self):
        if not (self.re0 < self.re1 and self.im0 < self.im1):
            raise ValueError(f"degenerate box {self}")

    @classmethod
    def around(cls, center: complex, half: float) -> "Box":
        return cls(center.real - half, center.real + half, center.imag - half, center.imag + half)

    @property
    def corners(self) -> list[complex]:
        return [complex(self.re0, self.im0), complex(self.re1, self.im0),
                complex(self.re1, self.im1), complex(self.re0, self.im1)]

    @property
    def center(self) -> complex:
        return complex(0.5 * (self.re0 + self.re1), 0.5 * (self.im0 + self.im1))

    @property
    def width(self) -> float:
        return self.re1 - self.re0

    @property
    def height(self) -> float:
        return self.im1 - self.im0

    def contains(self, lam: complex, margin: float = 0.0) -> bool:
        return (self.re0 - margin <= lam.real <= self.re1 + margin
                and self.im0 - margin <= lam.imag <= self.im1 + margin)

    def straddles_real_axis(self) -> bool:
        return self.im0 < 0.0 < self.im1

    def expanded(self, eps: float) -> "Box":
        return Box(self.re0 - eps, self.re1 + eps, self.im0 - eps, self.im1 + eps)


@dataclass(frozen=True)
class Eigenvalue:
    lam: complex
    residual: float
    conjugate_pair: bool = False
    multiplicity: int = 1

    @property
    def is_real(self) -> bool:
        return not self.conjugate_pair


def _spec_order(ev: Eigenvalue):
    lam = ev.lam
    if not ev.conjugate_pair:
        return (0, lam.real, 0.0)
    return (1, lam.real, -lam.imag)


def _level_order(ev: Eigenvalue):
    # the two members of a conjugate pair differ in Re only by roundoff
    return (-round(ev.lam.real, 8), -ev.lam.imag)


@dataclass
class Spectrum:
    b: float
    J: float
    box: Box
    eigenvalues: list[Eigenvalue]
    tol: float
    scale: float
    winding: int

    def __post_init__(self):
        self.eigenvalues = sorted(self.eigenvalues, key=_spec_order)

    def levels(self) -> list[complex]:
        """Eigenvalues from the top of the spectrum down, with multiplicity."""
        out = []
        for ev in sorted(self.eigenvalues, key=_level_order):
            out.extend([ev.lam] * ev.multiplicity)
        return out

    @property
    def values(self) -> list[complex]:
        return [ev.lam for ev in self.eigenvalues]

    def real_values(self) -> list[float]:
        return [ev.lam.real for ev in self.eigenvalues if not ev.conjugate_pair]

    def complex_values(self) -> list[complex]:
        return [ev.lam for ev in self.eigenvalues if ev.conjugate_pair]


class Shooter:
    """Evaluates W(lambda) at fixed (b, J) with a fixed seeding radius.

    The seeds carry the asymptotic normalization, so W is analytic in lambda
    and does not depend on the radius beyond the truncation error of the
    asymptotic series.  Since b and J are real, the S_-1 solution follows
    from y_-(z; lam) = conj(y_+(conj z; conj lam)).

    W is the same at every point.  Once Re lambda is well below the top of
    the spectrum, forming it at z = 0 subtracts two nearly equal products.
    Worse, continuing from 0 along the real axis would follow y_+ in its
    decaying direction.  Each solution is therefore transported straight
    from its seed to x* = max(0, max Re t), with t the turning points, and
    the Wronskian is formed there.
    """

    def __init__(self, b: float, J: float, radius: float, tol: float = 1e-10):
        self.b = float(b)
        self.J = float(J)
        self.radius = float(radius)
        self.tol = tol
        self._plus: dict[complex, OdeState] = {}
        self._match: dict[complex, OdeState] = {}
        self.evaluations = 0

    @classmethod
    def for_region(cls, b, J, lams, tol=1e-10):
        lam_max = max((abs(complex(l)) for l in lams), default=0.0)
        R = default_radius(ProblemPoint(float(b), float(J), lam_max))
        return cls(b, J, R, tol)

    def point(self, lam) -> ProblemPoint:
        return ProblemPoint(self.b, self.J, complex(lam))

    def _seed(self, lam: complex) -> OdeState:
        return wkb_seed(self.point(lam), RaySpec.sector(1, self.radius))

    def plus(self, lam: complex) -> OdeState:
        """y_+ and y_+' at the origin."""
        lam = complex(lam)
        st = self._plus.get(lam)
        if st is None:
            st = integrate(self.point(lam), self._seed(lam), 0j, self.tol)
            self._plus[lam] = st
            self.evaluations += 1
        return st

    def minus(self, lam: complex) -> OdeState:
        """y_- and y_-' at the origin."""
        lam = complex(lam)
        c = self.plus(lam.conjugate())
        return OdeState(0j, c.y.conjugate(), c.dy.conjugate(), c.logscale)

    def match_point(self, lam: complex) -> float:
        roots = np.roots([1.0, 0.0, -2.0 * self.b, 2.0 * self.J, -complex(lam)])
        return max(0.0, float(np.max(roots.real)))

    def _at_match(self, lam: complex) -> OdeState:
        st = self._match.get(lam)
        if st is None:
            x = self.match_point(lam)
            st = integrate(self.point(lam), self._seed(lam), complex(x), self.tol)
            self._match[lam] = st
            self.evaluations += 1
        return st

    def W(self, lam: complex) -> complex:
        lam = complex(lam)
        sp = self._at_match(lam)
        sc = self._at_match(lam.conjugate())
        sm = OdeState(sp.z, sc.y.conjugate(), sc.dy.conjugate(), sc.logscale)
        return wronskian(sp, sm)

    def F(self, x: float) -> float:
        """i W on the real axis, which is real there."""
        return (1j * self.W(complex(float(x), 0.0))).real


def mismatch(point: ProblemPoint, radius: float | None = None, tol: float = 1e-10) -> complex:
    """W(lambda) = y_+ y_-' - y_+' y_-, the value it takes at z = 0.

    y_+ and y_- are subdominant on the central rays of S_1 and S_-1.  For
    real (b, J), W(conj lam) = -conj(W(lam)).
    """
    R = default_radius(point) if radius is None else radius
    return Shooter(point.b, point.J, R, tol).W(point.lam)


def boundary_scale(shooter: Shooter, box: Box, n_per_side: int = 64) -> float:
    vals = _boundary_values(shooter, box, [n_per_side] * 4)
    return float(np.median(np.abs(np.concatenate(vals))))


def mismatch_scale(b: float, J: float, center: complex, half: float = 1.0,
                   tol: float = 1e-10) -> float:
    """Median |W| on the boundary of the square of half-width ``half``."""
    box = Box.around(complex(center), half)
    sh = Shooter.for_region(b, J, box.corners, tol)
    return boundary_scale(sh, box)


# -- argument principle -------------------------------------------------------

def _side_points(z0: complex, z1: complex, n: int) -> np.ndarray:
    return z0 + (z1 - z0) * np.arange(n) / n


def _boundary_values(shooter, box, counts):
    cs = box.corners
    return [np.array([shooter.W(l) for l in _side_points(cs[i], cs[(i + 1) % 4], counts[i])])
            for i in range(4)]


def _winding(shooter: Shooter, box: Box, n0: int) -> tuple[int, float]:
    """Winding number of W around ``box`` and min|W|/median|W| on it."""
    cs = box.corners
    counts = [n0] * 4
    while True:
        vals = _boundary_values(shooter, box, counts)
        loop = np.concatenate(vals + [vals[0][:1]])
        steps = np.angle(loop[1:] / loop[:-1])
        # a side whose phase jumps by more than pi/2 between samples is
        # ambiguous: double its sampling
        ambiguous = False
        offset = 0
        for i in range(4):
            seg = steps[offset:offset + counts[i]]
            offset += counts[i]
            if np.max(np.abs(seg)) > 0.5 * math.pi:
                if counts[i] >= 1 << 15:
                    raise WindingError(box, "phase still ambiguous at 32768 samples per side")
                counts[i] *= 2
                ambiguous = True
        if ambiguous:
            continue
        total = steps.sum() / (2.0 * math.pi)
        w = int(round(total))
        if abs(total - w) > 1e-3:
            raise WindingError(box, f"non-integer winding {total:.6f}")
        mags = np.abs(loop)
        return w, float(mags.min() / np.median(mags))


# -- root refinement ----------------------------------------------------------

def _newton(shooter: Shooter, lam0: complex, tol: float, max_iter: int = 60,
            multiplicity: int = 1) -> complex | None:
    lam = complex(lam0)
    if multiplicity > 1:
        # a multiple zero is only determined to about the m-th root of the
        # precision of W
        tol = max(tol, CLUSTER_TOL)
    for _ in range(max_iter):
        d = 1e-5 * (1.0 + abs(lam))
        w = shooter.W(lam)
        dw = (shooter.W(lam + d) - shooter.W(lam - d)) / (2.0 * d)
        if dw == 0 or not cmath.isfinite(dw):
            return None
        step = multiplicity * w / dw
        lam -= step
        if not cmath.isfinite(lam):
            return None
        if abs(step) < tol:
            return lam
    return None


def _real_roots(shooter: Shooter, re0: float, re1: float, tol: float,
                fine: Shooter) -> list[float]:
    """Sign changes of i W on a grid anchored at multiples of the spacing."""
    ds = min(0.1, (re1 - re0) / 64.0)
    k0 = math.ceil(re0 / ds)
    k1 = math.floor(re1 / ds)
    xs = [k * ds for k in range(k0, k1 + 1)]
    if not xs or xs[0] > re0:
        xs.insert(0, re0)
    if xs[-1] < re1:
        xs.append(re1)
    fs = [shooter.F(x) for x in xs]
    roots = []
    for a, c, fa, fc in zip(xs, xs[1:], fs, fs[1:]):
        if fa == 0.0:
            roots.append(a)
        elif fa * fc < 0:
            fa2, fc2 = fine.F(a), fine.F(c)
            if fa2 * fc2 < 0:
                roots.append(brentq(fine.F, a, c, xtol=0.1 * tol, rtol=1e-15))
    return roots


@dataclass
class _Search:
    coarse: Shooter
    fine: Shooter
    tol: float
    real_params: bool
    top_width: float
    found: list = field(default_factory=list)

    def n_side(self, length: float) -> int:
        return max(32, int(math.ceil(BOUNDARY_SAMPLES * length / self.top_width)))

    def count(self, box: Box) -> int:
        size = max(box.width, box.height)
        # near a cluster |W| is small on the whole boundary, so small boxes
        # are counted with the accurate shooter
        shooter = self.fine if size < SMALL_BOX else self.coarse
        w, _ = _winding(shooter, box, self.n_side(size))
        return w

    def run(self, box: Box, count: int, depth: int = 0):
        if count == 0:
            return
        if count < 0:
            raise WindingError(box, f"negative winding {count}")
        if depth > MAX_DEPTH:
            raise WindingError(box, f"{count} zeros unresolved at depth {depth}")
        if self.real_params and box.straddles_real_axis():
            roots = _real_roots(self.coarse, box.re0, box.re1, self.tol, self.fine)
            if len(roots) == count:
                for r in roots:
                    self.found.append((complex(r, 0.0), 1))
                return
        if count == 1 and max(box.width, box.height) < 4.0:
            lam = _newton(self.fine, box.center, self.tol)
            if lam is not None and box.contains(lam, 1e-9):
                if self.real_params and abs(lam.imag) < 10 * self.tol and box.straddles_real_axis():
                    lam = complex(lam.real, 0.0)
                self.found.append((lam, 1))
                return
        if count >= 2 and max(box.width, box.height) < CLUSTER_BOX:
            lam = _newton(self.fine, box.center, self.tol, multiplicity=count)
            if lam is not None and box.contains(lam, 1e-9):
                if self.real_params and abs(lam.imag) < CLUSTER_BOX and box.straddles_real_axis():
                    lam = complex(lam.real, 0.0)
                self.found.append((lam, count))
                return
        if max(box.width, box.height) < 10 * self.tol:
            self.found.append((box.center, count))
            return
        for child in self._split(box):
            self.run(child, self.count(child), depth + 1)

    def _split(self, box: Box) -> list[Box]:
        # off-centre cuts keep new edges away from the real axis and from
        # symmetric configurations
        f = 0.5 + 0.0137
        if box.width >= box.height:
            cut = box.re0 + f * box.width
            kids = [Box(box.re0, cut, box.im0, box.im1), Box(cut, box.re1, box.im0, box.im1)]
        else:
            cut = box.im0 + f * box.height
            if self.real_params and abs(cut) < 0.05 * box.height:
                cut = box.im0 + 0.37 * box.height
            kids = [Box(box.re0, box.re1, box.im0, cut), Box(box.re0, box.re1, cut, box.im1)]
        return kids


def _symmetrize(found, tol):
    """Replace each lower member of a conjugate pair by conj(upper member)."""
    uppers = [lam for lam, _ in found if lam.imag > 10 * tol]
    out = []
    for lam, mult in found:
        if lam.imag < -10 * tol:
            near = [u for u in uppers if abs(u.conjugate() - lam) < 1e-6 * (1 + abs(lam))]
            if near:
                lam = near[0].conjugate()
        out.append((lam, mult))
    return out


def find_eigenvalues_in_box(b: float, J: float, box: Box, tol: float = EIGEN_TOL,
                            radius: float | None = None) -> Spectrum:
    """All eigenvalues of L_{b,J} inside ``box``, certified by the argument
    principle and refined to |delta lambda| < tol."""
    b = float(b)
    J = float(J)
    if radius is None:
        lam_max = max(abs(c) for c in box.corners)
        radius = default_radius(ProblemPoint(b, J, lam_max))
    coarse = Shooter(b, J, radius, BOUNDARY_TOL)
    fine = Shooter(b, J, radius, REFINE_TOL)
    for attempt in range(6):
        try:
            w, ratio = _winding(coarse, box, BOUNDARY_SAMPLES)
        except WindingError:
            if attempt == 5:
                raise
            ratio = 0.0
        if ratio > 1e-6:
            break
        # an eigenvalue sits on the boundary
        box = box.expanded(1e-3 * (1 + attempt) * max(box.width, box.height))
    scale = boundary_scale(coarse, box)
    search = _Search(coarse, fine, tol, True, max(box.width, box.height))
    search.run(box, w)
    evs = []
    for lam, mult in _symmetrize(search.found, tol):
        res = abs(fine.W(lam)) / scale
        pair = abs(lam.imag) > 10 * tol
        evs.append(Eigenvalue(lam, res, pair, mult))
    if sum(e.multiplicity for e in evs) != w:
        raise WindingError(box, f"found {len(evs)} zeros for winding {w}")
    return Spectrum(b, J, box, evs, tol, scale, w)


# -- eigenfunctions -----------------------------------------------------------

@dataclass
class EigenfunctionTrace:
    """Samples of an eigenfunction, each stored as (z, y, y', logscale)."""
    point: ProblemPoint
    X: float
    samples_real_axis: list[OdeState]
    samples_ray: dict[float, list[OdeState]]
    phase: complex
    phase_normalized: bool = True

    def real_axis_values(self) -> tuple[np.ndarray, np.ndarray]:
        """x and y(x) scaled by a common factor so that max |y| = 1."""
        xs = np.array([s.z.real for s in self.samples_real_axis])
        top = max(s.logscale + math.log(max(abs(s.y), 1e-300)) for s in self.samples_real_axis)
        ys = np.array([s.y * math.exp(s.logscale - top) for s in self.samples_real_axis])
        return xs, ys


def real_zero_window(point: ProblemPoint) -> float:
    """1.5 times the outermost real turning point of V(x) - Re lambda, or 3."""
    roots = np.roots([1.0, 0.0, -2.0 * point.b, 2.0 * point.J, -complex(point.lam).real])
    real = [abs(r.real) for r in roots if abs(r.imag) < 1e-9]
    return 1.5 * max(real) if real else 3.0


def _eigen_state(point: ProblemPoint, tol: float) -> tuple[OdeState, float]:
    sh = Shooter(point.b, point.J, default_radius(point), REFINE_TOL)
    lam = complex(point.lam)
    w = sh.W(lam)
    scale = boundary_scale(Shooter(point.b, point.J, sh.radius, BOUNDARY_TOL),
                           Box.around(lam, 0.5), 16)
    ratio = abs(w) / scale
    if ratio > tol:
        raise NotAnEigenvalue(lam, ratio)
    return sh.plus(lam), ratio


def eigenfunction(point: ProblemPoint, X: float | None = None, n: int = 400,
                  rays: tuple[float, ...] = (), ray_radius: float = 4.0,
                  eigen_tol: float = 1e-6) -> EigenfunctionTrace:
    """Sample the eigenfunction on [-X, X] (and optionally along rays from 0).

    The S_1-subdominant solution is used; the phase is fixed so that y is
    real at the first sample with |y| > 0.1 max|y|.
    """
    start, _ = _eigen_state(point, eigen_tol)
    if X is None:
        X = real_zero_window(point)
    tol = REFINE_TOL
    left = [start]
    right = [start]
    for k in range(1, n + 1):
        right.append(integrate(point, right[-1], X * k / n, tol))
        left.append(integrate(point, left[-1], -X * k / n, tol))
    samples = left[::-1] + right[1:]
    logs = [s.logscale + math.log(max(abs(s.y), 1e-300)) for s in samples]
    top = max(logs)
    anchor = next(s for s, lg in zip(samples, logs) if lg > top + math.log(0.1))
    phase = abs(anchor.y) / anchor.y
    samples = [s.scaled(phase) for s in samples]
    ray_samples = {}
    for ang in rays:
        st = start.scaled(phase)
        out = [st]
        for k in range(1, n + 1):
            out.append(integrate(point, out[-1], ray_radius * k / n * cmath.exp(1j * ang), tol))
        ray_samples[ang] = out
    return EigenfunctionTrace(point, X, samples, ray_samples, phase)


def _hermite_roots(fa, da, fb, db, h) -> int:
    """Number of roots in (0, 1) of the cubic Hermite interpolant."""
    # p(t) = fa h00 + h da h10 + fb h01 + h db h11
    c3 = 2 * fa + h * da - 2 * fb + h * db
    c2 = -3 * fa - 2 * h * da + 3 * fb - h * db
    c1 = h * da
    c0 = fa
    r = np.roots([c3, c2, c1, c0]) if abs(c3) > 1e-300 else np.roots([c2, c1, c0])
    return sum(1 for t in r if abs(t.imag) < 1e-12 and 0.0 < t.real < 1.0)


def _count_sign_changes(point: ProblemPoint, states: list[OdeState], depth: int = 0) -> list[float]:
    """Locations of sign changes of Re y, refining intervals whose Hermite
    interpolant suggests hidden root pairs."""
    zeros = []
    for sa, sb in zip(states, states[1:]):
        # common scaling for the two ends
        top = max(sa.logscale, sb.logscale)
        fa = (sa.y * math.exp(sa.logscale - top)).real
        fb = (sb.y * math.exp(sb.logscale - top)).real
        da = (sa.dy * math.exp(sa.logscale - top)).real
        db = (sb.dy * math.exp(sb.logscale - top)).real
        h = (sb.z - sa.z).real
        change = (fa < 0) != (fb < 0)
        hidden = _hermite_roots(fa, da, fb, db, h)
        if hidden != int(change) and depth < 8:
            mid = integrate(point, sa, 0.5 * (sa.z + sb.z), REFINE_TOL)
            zeros.extend(_count_sign_changes(point, [sa, mid, sb], depth + 1))
        elif change:
            zeros.append(0.5 * (sa.z + sb.z).real)
    return zeros


def real_zeros(trace: EigenfunctionTrace) -> list[float]:
    return _count_sign_changes(trace.point, trace.samples_real_axis)


def count_real_zeros(trace: EigenfunctionTrace, max_widen: int = 3) -> int:
    """Sign changes of Re y on [-X, X]; widens X when a zero is near the ends."""
    for _ in range(max_widen + 1):
        zs = real_zeros(trace)
        if all(abs(z) < 0.95 * trace.X for z in zs):
            return len(zs)
        trace = eigenfunction(trace.point, 1.5 * trace.X)
    raise SpectrumError(f"zero within 5% of the window edge after widening to X={trace.X}")


# -- lowest levels ------------------------------------------------------------

def spectral_top(b: float, J: float) -> float:
    """Heuristic upper bound for Re lambda used to start level searches.

    The offset keeps box edges off integers, where QES roots often sit."""
    return 4.0 + 2.0 * abs(J) + abs(b) + 0.0731


def search_half_height(b: float, J: float) -> float:
    return 4.0 + abs(J) + math.sqrt(abs(b))


@dataclass
class LevelReport:
    b: float
    J: float
    levels: list[complex]
    max_imag: float
    complex_pairs: list[complex]
    complete: bool
    searched_to: float
    half_height: float

    @property
    def all_real(self) -> bool:
        return self.complete and not self.complex_pairs


def lowest_levels(b: float, J: float, n_max: int, tol: float = EIGEN_TOL,
                  step: float = 16.0, floor: float = -400.0,
                  radius: float | None = None) -> tuple[list[Eigenvalue], bool, float]:
    """The n_max eigenvalues nearest the top of the spectrum.

    Boxes of width ``step`` are stacked downward from ``spectral_top`` until
    n_max levels are found or Re lambda reaches ``floor``.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    H = search_half_height(b, J)
    top = spectral_top(b, J)
    found: list[Eigenvalue] = []
    hi = top
    complete = True
    while sum(e.multiplicity for e in found) < n_max:
        lo = hi - step
        if lo < floor:
            complete = False
            break
        sp = find_eigenvalues_in_box(b, J, Box(lo, hi, -H, H), tol, radius)
        found.extend(sp.eigenvalues)
        hi = sp.box.re0
    # a conjugate pair straddling the cut is counted once per member
    found.sort(key=_level_order)
    out, total = [], 0
    for e in found:
        if total >= n_max:
            break
        out.append(e)
        total += e.multiplicity
    return out, complete, hi


def spectrum_is_real(b: float, J: float, n_max: int = 6, tol: float = EIGEN_TOL,
                     radius: float | None = None) -> LevelReport:
    evs, complete, searched = lowest_levels(b, J, n_max, tol, radius=radius)
    levels = []
    for e in evs:
        levels.extend([e.lam] * e.multiplicity)
    levels = levels[:n_max]
    pairs = [e.lam for e in evs if e.conjugate_pair]
    max_imag = max((abs(l.imag) for l in levels), default=0.0)
    return LevelReport(float(b), float(J), levels, max_imag, pairs, complete,
                       searched, search_half_height(b, J))
