"""Branches of the real spectral locus Z_J(R) = {(b, lambda) real : W = 0}.

For real (b, lambda), F = iW is real, so Z_J(R) is the zero set of a real
function of two variables.  Branches are followed by pseudo-arclength
continuation.  For a positive integer J the QES curve Q_J = 0 is a factor
of the locus; non-QES branches are traced on F / Q_J, which stays regular
where a branch crosses the QES curve.

Folds of the real locus in the b direction are where two real eigenvalues
meet and continue as a complex-conjugate pair.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from . import qes
from .contour import ProblemPoint, default_radius
from .spectrum import EIGEN_TOL, LevelReport, Shooter, lowest_levels, spectrum_is_real

TRACE_TOL = 1e-11
STEP0 = 0.05
STEP_MAX = 0.2
STEP_MIN = 1e-5
MAX_SAMPLES = 5000

QES_INTERSECTION = "qes_intersection"
TURNING_POINT = "turning_point"
PAIR_BIRTH = "pair_birth"
TRUNCATED = "truncated"


class LocusError(RuntimeError):
    pass


@dataclass(frozen=True)
class LocusEvent:
    type: str
    b: float
    lam: complex
    note: str = ""


@dataclass
class LocusCurve:
    J: float
    branch_id: str
    samples: list[tuple[float, complex]] = field(default_factory=list)
    events: list[LocusEvent] = field(default_factory=list)
    residuals: list[float] = field(default_factory=list)
    truncated: bool = False

    @property
    def bs(self) -> np.ndarray:
        return np.array([s[0] for s in self.samples])

    @property
    def lams(self) -> np.ndarray:
        return np.array([s[1] for s in self.samples])

    def is_graph(self) -> bool:
        """True when b increases strictly along the curve."""
        return bool(np.all(np.diff(self.bs) > 0))

    def value_at(self, b: float) -> float:
        """Linear interpolation of Re lambda; the curve must be a graph."""
        return float(np.interp(b, self.bs, self.lams.real))


def _radius(b: float, J: float, lam: float) -> float:
    # piecewise constant in (b, lambda) so that F is smooth under the small
    # perturbations used for derivatives
    return default_radius(ProblemPoint(float(math.ceil(abs(b))), float(J),
                                       4.0 * (math.ceil(abs(lam) / 4.0) + 1)))


class LocusFunction:
    """F(b, lambda) = i W(lambda; b, J), optionally divided by Q_J(b, lambda)."""

    def __init__(self, J: float, deflate: bool = False, tol: float = TRACE_TOL):
        self.J = float(J)
        self.tol = tol
        self.Q = None
        if deflate:
            if not (self.J >= 1 and self.J == round(self.J)):
                raise ValueError("deflation needs a positive integer J")
            self.Q = qes.qes_polynomial(int(round(self.J)))

    def raw(self, b: float, lam: float) -> float:
        return Shooter(b, self.J, _radius(b, self.J, lam), self.tol).F(lam)

    def __call__(self, b: float, lam: float) -> float:
        v = self.raw(b, lam)
        if self.Q is not None:
            v /= self.Q(b, lam)
        return v

    def gradient(self, b: float, lam: float) -> np.ndarray:
        db = 1e-5 * (1.0 + abs(b))
        dl = 1e-5 * (1.0 + abs(lam))
        return np.array([
            (self(b + db, lam) - self(b - db, lam)) / (2 * db),
            (self(b, lam + dl) - self(b, lam - dl)) / (2 * dl),
        ])

    def residual(self, b: float, lam: float) -> float:
        """Distance estimate |F| / |grad F| from (b, lambda) to the locus."""
        g = self.gradient(b, lam)
        return abs(self(b, lam)) / max(float(np.hypot(*g)), 1e-300)

    def solve_lambda(self, b: float, lam0: float, tol: float = 1e-11) -> float:
        """Newton in lambda at fixed b."""
        lam = lam0
        for _ in range(50):
            dl = 1e-5 * (1.0 + abs(lam))
            f = self(b, lam)
            d = (self(b, lam + dl) - self(b, lam - dl)) / (2 * dl)
            step = f / d
            lam -= step
            if abs(step) < tol * (1 + abs(lam)):
                return lam
        raise LocusError(f"no convergence in lambda at b={b} from {lam0}")


def _corrector(F: LocusFunction, P: np.ndarray, t: np.ndarray, max_iter: int = 10):
    """Newton on {F = 0, t . (Y - P) = 0}."""
    Y = P.copy()
    for _ in range(max_iter):
        f = F(*Y)
        g = F.gradient(*Y)
        A = np.array([g, t])
        r = np.array([f, t @ (Y - P)])
        try:
            dY = np.linalg.solve(A, -r)
        except np.linalg.LinAlgError:
            return None
        Y = Y + dY
        if not np.all(np.isfinite(Y)):
            return None
        if np.hypot(*dY) < 1e-10 * (1 + np.hypot(*Y)):
            return Y
    return None


def _tangent(F: LocusFunction, Y: np.ndarray, ref: np.ndarray | None) -> np.ndarray:
    g = F.gradient(*Y)
    t = np.array([g[1], -g[0]])
    t /= np.hypot(*t)
    if ref is not None and t @ ref < 0:
        t = -t
    return t


def _qes_value(Qp, b, lam):
    return None if Qp is None else Qp(b, lam)


def _locate_crossing(F: LocusFunction, Qp, Y0, Y1):
    """Point where the branch segment Y0 -> Y1 meets Q = 0.

    The crossing is located on the QES curve lambda_Q(b).  When the branch
    is traced on F / Q that quotient is 0/0 there; at a simple QES root it
    equals F_lambda / Q_lambda, so the crossing is where F_lambda changes
    sign.  Without deflation it is where F itself changes sign."""
    raw = LocusFunction(F.J, False, F.tol)
    guess = 0.5 * (Y0[1] + Y1[1])

    def lam_q(b):
        roots = [r.real for r in np.roots(Qp.lambda_coefficients(b)) if abs(r.imag) < 1e-9]
        return min(roots, key=lambda r: abs(r - guess))

    def h(b):
        lam = lam_q(b)
        if F.Q is None:
            return raw(b, lam)
        d = 1e-5 * (1.0 + abs(lam))
        return raw(b, lam + d) - raw(b, lam - d)

    try:
        lo, hi = sorted((Y0[0], Y1[0]))
        pad = 0.5 * (hi - lo)
        for _ in range(4):
            if h(lo) * h(hi) < 0:
                break
            lo, hi = lo - pad, hi + pad
        b = brentq(h, lo, hi, xtol=1e-12)
        return np.array([b, lam_q(b)])
    except (ValueError, ZeroDivisionError):
        q0, q1 = Qp(*Y0), Qp(*Y1)
        return Y0 + q0 / (q0 - q1) * (Y1 - Y0)


def _fold_is_pair_birth(J: float, b: float, lam: float, side: float) -> bool:
    """Whether a conjugate pair sits near lambda just beyond a fold at b."""
    from .spectrum import Box, find_eigenvalues_in_box
    db = 1e-2
    try:
        sp = find_eigenvalues_in_box(b + side * db, J, Box(lam - 0.5, lam + 0.5, 1e-4, 0.5))
    except Exception:
        return False
    return any(e.conjugate_pair for e in sp.eigenvalues)


def trace_branch(J: float, seed: tuple[float, float], b_range: tuple[float, float],
                 step: float = STEP0, branch_id: str = "0", deflate: bool | None = None,
                 overlay: int | None = None, tol: float = TRACE_TOL,
                 max_samples: int = MAX_SAMPLES, direction: int = 1) -> LocusCurve:
    """Follow the branch through ``seed``, initially in the direction of
    increasing b (``direction=1``) or decreasing b (``direction=-1``).

    ``overlay`` names a QES index K whose curve Q_K = 0 is checked for
    crossings (default: J itself for positive integer J).  A fold in b is
    reported as a turning point, and also as a pair birth when a conjugate
    pair is found just beyond it.
    """
    b0, b1 = map(float, b_range)
    if not b0 < b1:
        raise ValueError("empty b range")
    J = float(J)
    posint = J >= 1 and J == round(J)
    if deflate is None:
        deflate = posint
    F = LocusFunction(J, deflate, tol)
    if overlay is None and posint:
        overlay = int(round(J))
    Qp = qes.qes_polynomial(overlay) if overlay else None

    b, lam = float(seed[0]), float(np.real(seed[1]))
    lam = F.solve_lambda(b, lam)
    curve = LocusCurve(J, branch_id)
    Y = np.array([b, lam])
    t = _tangent(F, Y, np.array([1.0 if direction >= 0 else -1.0, 0.0]))
    curve.samples.append((Y[0], complex(Y[1])))
    curve.residuals.append(F.residual(*Y))
    h = step
    wins = 0
    while len(curve.samples) < max_samples:
        P = Y + h * t
        Ynew = _corrector(F, P, t)
        if Ynew is None or np.hypot(*(Ynew - Y)) > 2.0 * h:
            h *= 0.5
            wins = 0
            if h < STEP_MIN:
                curve.truncated = True
                curve.events.append(LocusEvent(TRUNCATED, float(Y[0]), complex(Y[1]),
                                               "corrector failed at minimum step"))
                break
            continue
        tnew = _tangent(F, Ynew, t)
        # clip the last point onto the boundary of the b range
        done = False
        if not (b0 <= Ynew[0] <= b1):
            edge = b1 if Ynew[0] > b1 else b0
            s = (edge - Y[0]) / (Ynew[0] - Y[0])
            guess = Y[1] + s * (Ynew[1] - Y[1])
            Ynew = np.array([edge, F.solve_lambda(edge, guess)])
            done = True
        if t[0] * tnew[0] < 0 and not done:
            # the fold lies between Y and Ynew; the extreme b of the two is
            # within one step of it
            Yf = Ynew if (Ynew[0] - Y[0]) * t[0] > 0 else Y
            curve.events.append(LocusEvent(TURNING_POINT, float(Yf[0]), complex(Yf[1])))
            if _fold_is_pair_birth(J, Yf[0], Yf[1], 1.0 if t[0] > 0 else -1.0):
                curve.events.append(LocusEvent(PAIR_BIRTH, float(Yf[0]), complex(Yf[1]),
                                               "conjugate pair beyond the fold"))
        if Qp is not None:
            q0, q1 = Qp(*Y), Qp(*Ynew)
            # a branch running along the QES curve has Q at roundoff level
            tiny = 1e-8 * (1.0 + abs(Y[0]) ** 2 + abs(Y[1])) ** Qp.degree_lambda
            if abs(q0) > tiny and abs(q1) > tiny and q0 * q1 < 0:
                Z = _locate_crossing(F, Qp, Y, Ynew)
                curve.events.append(LocusEvent(QES_INTERSECTION, float(Z[0]), complex(Z[1])))
        Y, t = Ynew, tnew
        curve.samples.append((float(Y[0]), complex(Y[1])))
        curve.residuals.append(F.residual(*Y))
        if done:
            break
        wins += 1
        if wins >= 5:
            h = min(2.0 * h, STEP_MAX)
            wins = 0
    return curve


def seed_levels(J: float, b: float, n: int, tol: float = EIGEN_TOL) -> list[float]:
    """The top n real non-QES eigenvalues at b, from the top down."""
    posint = J >= 1 and J == round(J)
    roots = qes.qes_eigenvalues(int(round(J)), b) if posint else []
    want = n + len(roots)
    while True:
        evs, complete, _ = lowest_levels(b, J, want, tol)
        out = []
        for e in evs:
            if e.conjugate_pair:
                continue
            if any(abs(e.lam - r) < 1e-6 for r in roots):
                continue
            out.append(e.lam.real)
        if len(out) >= n or not complete or want > n + len(roots) + 12:
            return out[:n]
        want += 2


def trace_branches(J: float, b_range: tuple[float, float], n_branches: int,
                   step: float = STEP0, overlay: int | None = None,
                   workers: int = 1) -> list[LocusCurve]:
    b0 = float(b_range[0])
    seeds = seed_levels(J, b0, n_branches)
    args = [(J, (b0, lam), tuple(b_range), step, str(k), None, overlay)
            for k, lam in enumerate(seeds)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            return list(ex.map(_trace_star, args))
    return [_trace_star(a) for a in args]


def _trace_star(a):
    return trace_branch(*a)


def min_gap(curves: list[LocusCurve], b_grid) -> float:
    """Smallest distance between graph-like branches on a common b grid."""
    vals = np.array([[c.value_at(b) for b in b_grid] for c in curves])
    vals.sort(axis=0)
    return float(np.min(np.diff(vals, axis=0))) if len(curves) > 1 else math.inf


# -- realness sweep -------------------------------------------------------------

@dataclass
class SweepPoint:
    b: float
    J: float
    report: LevelReport | None
    error: str = ""

    @property
    def ok(self) -> bool:
        return self.report is not None and self.report.complete


@dataclass
class SweepReport:
    points: list[SweepPoint]
    n_max: int

    @property
    def max_imag(self) -> float:
        return max((p.report.max_imag for p in self.points if p.report), default=0.0)

    @property
    def failures(self) -> list[SweepPoint]:
        return [p for p in self.points if not p.ok]

    @property
    def complex_points(self) -> list[SweepPoint]:
        return [p for p in self.points if p.report and p.report.complex_pairs]


def _sweep_one(args) -> SweepPoint:
    b, J, n_max, tol = args
    try:
        return SweepPoint(b, J, spectrum_is_real(b, J, n_max, tol))
    except Exception as exc:  # reported per point, the sweep continues
        return SweepPoint(b, J, None, f"{type(exc).__name__}: {exc}")


def theorem1_sweep(b_grid, J_grid, n_max: int = 6, tol: float = EIGEN_TOL,
                   workers: int = 1) -> SweepReport:
    bad = [J for J in J_grid if J > 1]
    if bad:
        raise ValueError(f"sweep is restricted to J <= 1, got {bad}")
    args = [(float(b), float(J), n_max, tol) for J in J_grid for b in b_grid]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            pts = list(ex.map(_sweep_one, args))
    else:
        pts = [_sweep_one(a) for a in args]
    return SweepReport(pts, n_max)


# -- pair births ----------------------------------------------------------------

@dataclass(frozen=True)
class PairEvent:
    type: str
    b: float
    lam: float
    b_interval: tuple[float, float]
    complex_side: str          # "left" or "right" of the event in b
    bracket: tuple[float, float] = (0.0, 0.0)   # lambda interval holding the pair
    resolved: bool = True
    note: str = ""


def _complex_members(levels: list[complex], n: int) -> int:
    return sum(1 for l in levels[:n] if abs(l.imag) > 1e-7)


def _levels(args):
    b, J, n, tol = args
    evs, _, _ = lowest_levels(b, J, n + 2, tol)
    out = []
    for e in evs:
        out.extend([e.lam] * e.multiplicity)
    return out


def pair_predicate(J: float, b: float, bracket: tuple[float, float],
                   tol: float = TRACE_TOL) -> tuple[bool, float]:
    """Whether F has two real zeros inside ``bracket`` at b, judged by the
    sign of the extremum of s F where s is the sign of F at the ends.

    Returns (two_real_roots, location_of_extremum)."""
    F = LocusFunction(J, False, tol)
    lo, hi = bracket
    fl, fh = F(b, lo), F(b, hi)
    if fl * fh <= 0:
        raise LocusError(f"bracket {bracket} at b={b} does not isolate a pair")
    s = 1.0 if fl > 0 else -1.0
    res = minimize_scalar(lambda x: s * F(b, x), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-10 * (1 + abs(lo) + abs(hi))})
    return bool(res.fun < 0), float(res.x)


def bisect_pair_birth(J: float, b_real: float, b_complex: float, bracket,
                      b_tol: float = 1e-6, tol: float = TRACE_TOL) -> tuple[float, float]:
    """Bisection between a b with two real roots in ``bracket`` and one
    without; returns (b*, lambda*)."""
    ok_r, _ = pair_predicate(J, b_real, bracket, tol)
    ok_c, _ = pair_predicate(J, b_complex, bracket, tol)
    if not ok_r or ok_c:
        raise LocusError("bisection interval does not straddle a pair event")
    lo, hi = b_real, b_complex
    x = None
    while abs(hi - lo) > b_tol:
        mid = 0.5 * (lo + hi)
        real, x = pair_predicate(J, mid, bracket, tol)
        if real:
            lo = mid
        else:
            hi = mid
    _, x = pair_predicate(J, lo, bracket, tol)
    return 0.5 * (lo + hi), x


def detect_pair_events(J: float, b_range=(-4.0, 4.0), n_track: int = 4,
                       grid_step: float = 0.5, b_tol: float = 1e-6,
                       tol: float = TRACE_TOL, workers: int = 1) -> list[PairEvent]:
    """Locate b where two of the top n_track levels meet and turn complex."""
    b0, b1 = map(float, b_range)
    n = int(round((b1 - b0) / grid_step))
    grid = [b0 + (b1 - b0) * k / n for k in range(n + 1)]
    args = [(b, float(J), n_track, EIGEN_TOL) for b in grid]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            levels = list(ex.map(_levels, args))
    else:
        levels = [_levels(a) for a in args]
    events = []
    for i in range(n):
        la, lb = levels[i], levels[i + 1]
        ca, cb = _complex_members(la, n_track), _complex_members(lb, n_track)
        if ca == cb:
            continue
        if ca > cb:
            comp_levels, real_levels, b_c, b_r, side = la, lb, grid[i], grid[i + 1], "left"
        else:
            comp_levels, real_levels, b_c, b_r, side = lb, la, grid[i + 1], grid[i], "right"
        pairs = [l for l in comp_levels[:n_track] if l.imag > 1e-7]
        for p in pairs:
            reals = sorted((l.real for l in real_levels if abs(l.imag) <= 1e-7),
                           key=lambda x: abs(x - p.real))
            if len(reals) < 2:
                continue
            r1, r2 = sorted(reals[:2])
            others = [l.real for l in real_levels if abs(l.imag) <= 1e-7 and l.real not in (r1, r2)]
            others += [l.real for l in comp_levels if abs(l.imag) <= 1e-7]
            lo_c, hi_c = min(r1, p.real), max(r2, p.real)
            margin = 0.5 * min([1.0] + [abs(o - lo_c) for o in others if o < lo_c]
                               + [abs(o - hi_c) for o in others if o > hi_c])
            bracket = (lo_c - margin, hi_c + margin)
            close = [o for o in others if bracket[0] <= o <= bracket[1]]
            try:
                if close:
                    raise LocusError("third eigenvalue inside the bracket")
                bstar, lstar = bisect_pair_birth(J, b_r, b_c, bracket, b_tol, tol)
                events.append(PairEvent(PAIR_BIRTH, bstar, lstar, (min(b_r, b_c), max(b_r, b_c)),
                                        side, bracket))
            except LocusError as exc:
                events.append(PairEvent(PAIR_BIRTH, 0.5 * (b_r + b_c), p.real,
                                        (min(b_r, b_c), max(b_r, b_c)), side, bracket, False,
                                        str(exc)))
    return events


# -- figure data ------------------------------------------------------------------

@dataclass
class FigureData:
    J: int
    b_range: tuple[float, float]
    solid: list[LocusCurve]
    dotted: list[LocusCurve]
    candidates: list[LocusEvent]
    overlay_J: int | None


def qes_curves(K: int, b_range, n: int = 601, J_label: float | None = None) -> list[LocusCurve]:
    """Real part of the QES locus Q_K(b, lambda) = 0 as sampled curves.

    Real roots are ranked from the top at each b; a curve ends where the
    number of real roots changes.
    """
    b0, b1 = map(float, b_range)
    curves: list[LocusCurve] = []
    open_: dict[int, LocusCurve] = {}
    prev_count = None
    for b in np.linspace(b0, b1, n):
        roots = [r.real for r in qes.qes_eigenvalues(K, float(b)) if r.imag == 0.0]
        roots.sort(reverse=True)
        if len(roots) != prev_count:
            open_ = {}
            prev_count = len(roots)
        for rank, lam in enumerate(roots):
            if rank not in open_:
                c = LocusCurve(K if J_label is None else J_label, f"qes{len(curves)}")
                curves.append(c)
                open_[rank] = c
            open_[rank].samples.append((float(b), complex(lam)))
    return [c for c in curves if len(c.samples) > 1]


def emit_figure_data(J: int, b_range=(-3.0, 3.0), n_branches: int = 4,
                     step: float = STEP0, workers: int = 1) -> FigureData:
    """Solid curves: non-QES branches.  Dotted curves: the QES locus Q_|J|,
    drawn for J != 0 (for negative J it is the overlay of the partner).
    Candidates: crossings of solid branches with the dotted curves."""
    J = int(J)
    if abs(J) > 3:
        raise ValueError("figure data is limited to |J| <= 3")
    overlay = abs(J) if J != 0 else None
    solid = trace_branches(J, b_range, n_branches, step, overlay, workers)
    dotted = qes_curves(overlay, b_range, J_label=J) if overlay else []
    cands = [e for c in solid for e in c.events if e.type == QES_INTERSECTION]
    cands.sort(key=lambda e: (e.b, e.lam.real))
    return FigureData(J, tuple(b_range), solid, dotted, cands, overlay)
