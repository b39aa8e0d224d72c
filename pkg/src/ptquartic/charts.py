"""Catalog of the line-complex charts L_{m,l}, R_{m,l}, E_{m,l}.

A chart is a symmetric tree X_{k,l} with k = 2m+1 edges between the two
ramified vertices and |l| further edges, admitted by one of three orderings
of the asymptotic values on the real line:

    L: c < 0 < a        R: 0 < a < c        E: 0 < c < a

Each admissible chart parametrizes a piece of the real spectral locus with
J = l, and its ends are degenerations to the QES locus, to a harmonic
oscillator, or to a point with an elementary second solution.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

CASES = ("L", "R", "E")

A_TO_0 = "a->0"
C_TO_0 = "c->0"
C_TO_INF = "c->inf"
C_TO_MINUS_INF = "c->-inf"
C_TO_A = "c->a"

QES = "qes"
HARMONIC = "harmonic"
SECOND_SOLUTION = "second-solution-elementary"


class ChartError(ValueError):
    pass


@dataclass(frozen=True)
class Endpoint:
    limit: str
    target: str
    zero_count: int | None = None
    real_zeros: int | None = None      # set only where the count of real zeros is stated
    t_limit: str = ""                  # behaviour of t = c/a in the limit
    ambiguous: bool = False
    note: str = ""


@dataclass(frozen=True)
class TreeChart:
    case: str
    m: int
    l: int
    tree_type: int
    J: int
    degenerations: tuple[Endpoint, ...] = ()
    darboux_partner: str = ""
    notes: tuple[str, ...] = field(default=())

    @property
    def k(self) -> int:
        return 2 * self.m + 1

    @property
    def symbol(self) -> str:
        return symbol(self.case, self.m, self.l)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["k"] = self.k
        d["symbol"] = self.symbol
        d["degenerations"] = [asdict(e) for e in self.degenerations]
        d["notes"] = list(self.notes)
        return d


def symbol(case: str, m: int, l: int) -> str:
    return f"{case}_{{{m},{l}}}"


def tree_type(l: int) -> int:
    return 0 if l == 0 else (1 if l > 0 else 2)


def admissible(case: str, k: int, l: int) -> tuple[bool, str]:
    """Whether the tree X_{k,l} gives a line complex in the given case."""
    if case not in CASES:
        raise ChartError(f"unknown case {case!r}")
    if k < 1:
        raise ChartError(f"k must be positive, got {k}")
    if k % 2 == 0:
        return False, f"k={k} is even; admissible trees have k=2m+1"
    if case in ("L", "R"):
        if l == 0:
            return False, f"type 0 trees (l=0) are impossible in case {case}"
        if l % 2 == 0:
            return False, f"l={l} is even; case {case} needs odd l"
        return True, f"k odd, l odd ({'type 1' if l > 0 else 'type 2'})"
    if l % 2 != 0:
        return False, f"l={l} is odd; case E needs even l"
    return True, f"k odd, l even (type {tree_type(l)})"


def _degenerations(case: str, m: int, l: int) -> tuple[tuple[Endpoint, ...], tuple[str, ...]]:
    J = l
    if case == "L" and l > 0:
        return (
            Endpoint(A_TO_0, QES, l - 1, 0, "t->-inf",
                     note="limit on the QES locus; l-1 zeros, none of them real"),
            Endpoint(C_TO_0, HARMONIC, m, None, "t->0-",
                     note="harmonic oscillator with m zeros"),
        ), ()
    if case == "L":
        return (
            Endpoint(C_TO_MINUS_INF, SECOND_SOLUTION, None, None, "t->-inf",
                     note="elementary second solution; Darboux image of L_{m,-l}"),
        ), ()
    if case == "R" and l > 0:
        return (
            Endpoint(A_TO_0, QES, l - 1, None, "t->+inf",
                     note="limit on the QES locus; l-1 zeros"),
            Endpoint(C_TO_INF, HARMONIC, J - 1 + m, None, "t->0+", ambiguous=True,
                     note="harmonic oscillator with J-1+m zeros; stated as t=c/a->0+ "
                          "although c->+inf with a fixed sends t to +inf"),
        ), ()
    if case == "R":
        return (
            Endpoint(C_TO_INF, SECOND_SOLUTION, None, None, "t->+inf",
                     note="c->inf on the spectral locus; Darboux image of R_{m,-l}"),
        ), ()
    # case E
    if l < 0:
        return (), ("no degeneration on the spectral locus is possible",)
    return (
        Endpoint(C_TO_0, HARMONIC, m, None, "t->0+", note="harmonic oscillator with m zeros"),
        Endpoint(C_TO_A, HARMONIC, m + l, None, "t->1-",
                 note="harmonic oscillator with m+l zeros"),
    ), ()


def make_chart(case: str, m: int, l: int) -> TreeChart:
    if m < 0:
        raise ChartError(f"m must be non-negative, got {m}")
    ok, reason = admissible(case, 2 * m + 1, l)
    if not ok:
        raise ChartError(f"{symbol(case, m, l)} is not admissible: {reason}")
    degs, notes = _degenerations(case, m, l)
    return TreeChart(case, m, l, tree_type(l), l, degs, symbol(case, m, -l), notes)


def chart_J(chart: TreeChart) -> int:
    ok, reason = admissible(chart.case, chart.k, chart.l)
    if not ok:
        raise ChartError(f"{chart.symbol} is not admissible: {reason}")
    return chart.l


def degenerations(chart: TreeChart) -> tuple[Endpoint, ...]:
    chart_J(chart)
    return _degenerations(chart.case, chart.m, chart.l)[0]


def darboux_partner(chart: TreeChart) -> TreeChart:
    """The chart of the Darboux-transformed operator, l -> -l."""
    return make_chart(chart.case, chart.m, -chart.l)


def enumerate_charts(J: int, m_max: int) -> list[TreeChart]:
    """All admissible charts with J = l and m <= m_max, ordered L, R, E then m."""
    if m_max < 0:
        raise ChartError("m_max must be non-negative")
    out = []
    for case in CASES:
        for m in range(m_max + 1):
            if admissible(case, 2 * m + 1, J)[0]:
                out.append(make_chart(case, m, J))
    return out


def harmonic_tree(n: int) -> tuple[int, int]:
    """(k, l) of the tree T_n of the J=0 Nevanlinna functions."""
    return 2 * n + 1, 0


def catalog(J: int, m_max: int) -> list[dict]:
    return [c.to_dict() for c in enumerate_charts(J, m_max)]
