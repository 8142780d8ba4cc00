"""Brute-force oracles over finite residue rings, plus plot sets.

Everything here is ground truth by exhaustion: reduced level maps with
their preimage censuses (the measure-preservation criterion), functional
graphs with full cycle decompositions (the ergodicity condition), orbits,
and the unit-square plot sets with exact-rational box counting.

Non-1-Lipschitz maps are reduced with the zero-padded lift convention:
the representative of a residue class is always its unique lift in
[0, p**k).  Point dumps are CSV with header ``xnum,xden,ynum,yden``;
rasters are plain PGM (P2) with 1 = covered and row 0 at the top.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from .errors import BudgetError
from .mapdsl import DEFAULT_BUDGET, MapExpr, eval_map, lookahead_bound
from .padic import PadicApprox

__all__ = [
    "BoxCount",
    "CensusResult",
    "CycleReport",
    "OrbitResult",
    "PlotSet",
    "ReducedLevelMap",
    "accumulate_plot",
    "box_count",
    "cycle_report",
    "level_map",
    "orbit",
    "padded_endomap",
    "plot_points",
    "preimage_census",
    "to_csv",
    "to_pgm",
]


def _check_budget(entries: int, budget: int | None) -> None:
    limit = DEFAULT_BUDGET if budget is None else budget
    if entries > limit:
        raise BudgetError(f"enumeration of {entries} entries exceeds budget {limit}")


@dataclass(frozen=True)
class ReducedLevelMap:
    """A finite reduction of the map: the full table of a function from
    Z/p**domain_digits to Z/p**codomain_digits."""

    p: int
    domain_digits: int
    codomain_digits: int
    table: tuple[int, ...]
    form: str  # "census" (codomain strictly smaller) or "endomap"

    def __post_init__(self) -> None:
        if len(self.table) != self.p ** self.domain_digits:
            raise ValueError("table length does not match the domain size")
        limit = self.p ** self.codomain_digits
        if any(not 0 <= v < limit for v in self.table):
            raise ValueError("table value out of codomain range")


def level_map(
    e: MapExpr, p: int, n: int, k: int, budget: int | None = None
) -> ReducedLevelMap:
    """The census-form reduction: Z/p**(n k) -> Z/p**(n (k-1))."""
    if n < 1:
        raise ValueError("level width n must be >= 1")
    if k < 2:
        raise ValueError("census form needs k >= 2")
    size = p ** (n * k)
    _check_budget(size, budget)
    bound = lookahead_bound(e, p)
    k_in = n * k + bound
    out_mod = p ** (n * (k - 1))
    table = tuple(
        eval_map(e, PadicApprox(p, k_in, i)).residue % out_mod for i in range(size)
    )
    return ReducedLevelMap(p, n * k, n * (k - 1), table, "census")


def padded_endomap(e: MapExpr, p: int, m: int, budget: int | None = None) -> ReducedLevelMap:
    """The map folded onto Z/p**m via the zero-padded lift."""
    if m < 1:
        raise ValueError("digit count must be >= 1")
    size = p ** m
    _check_budget(size, budget)
    bound = lookahead_bound(e, p)
    k_in = m + bound
    table = tuple(
        eval_map(e, PadicApprox(p, k_in, i)).residue % size for i in range(size)
    )
    return ReducedLevelMap(p, m, m, table, "endomap")


@dataclass(frozen=True)
class CensusResult:
    """Preimage counts of every codomain point, plus the uniformity verdict."""

    expected: int
    counts: tuple[int, ...]
    witness_point: int | None = None
    witness_pair: tuple[int, int] | None = None

    @property
    def uniform(self) -> bool:
        return self.witness_point is None

    def __str__(self) -> str:
        if self.uniform:
            return f"Uniform({self.expected})"
        if self.expected == 1 and self.witness_pair is not None:
            a, b = self.witness_pair
            return f"NotBijective(x={a} and x={b} collide)"
        return f"NotUniform(point {self.witness_point} has {self.counts[self.witness_point]} preimages)"


def preimage_census(m: ReducedLevelMap) -> CensusResult:
    """Count the preimages of every codomain point.

    The map preserves the uniform measure at this level iff every point
    has exactly domain/codomain preimages; for endomaps that expected
    count is 1, i.e. the census is a bijectivity check.
    """
    codomain = m.p ** m.codomain_digits
    expected = m.p ** m.domain_digits // codomain
    counts = [0] * codomain
    for value in m.table:
        counts[value] += 1
    witness_point = None
    for point, count in enumerate(counts):
        if count != expected:
            witness_point = point
            break
    witness_pair = None
    if witness_point is not None:
        first: dict[int, int] = {}
        for x, value in enumerate(m.table):
            if value in first:
                witness_pair = (first[value], x)
                break
            first[value] = x
    return CensusResult(expected, tuple(counts), witness_point, witness_pair)


@dataclass(frozen=True)
class CycleReport:
    """Full functional-graph decomposition of an endomap table."""

    cycles: tuple[tuple[int, ...], ...]
    distance_histogram: dict[int, int]  # distance-to-cycle -> node count

    @property
    def unique_cycle(self) -> bool:
        return len(self.cycles) == 1

    @property
    def cycle_lengths(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.cycles)


def cycle_report(m: ReducedLevelMap) -> CycleReport:
    """Find every cycle and the distance of every node to its cycle."""
    if m.form != "endomap":
        raise ValueError("cycle detection needs an endomap-form table")
    table = m.table
    size = len(table)
    UNSEEN, ON_PATH, DONE = 0, 1, 2
    state = [UNSEEN] * size
    dist = [0] * size
    cycles: list[tuple[int, ...]] = []
    for start in range(size):
        if state[start] != UNSEEN:
            continue
        path: list[int] = []
        node = start
        while state[node] == UNSEEN:
            state[node] = ON_PATH
            path.append(node)
            node = table[node]
        if state[node] == ON_PATH:
            at = path.index(node)
            cycle = tuple(path[at:])
            cycles.append(cycle)
            for u in cycle:
                state[u] = DONE
                dist[u] = 0
            tail = path[:at]
        else:
            tail = path
        base = dist[node] if state[node] == DONE else 0
        for offset, u in enumerate(reversed(tail), start=1):
            dist[u] = base + offset
            state[u] = DONE
    return CycleReport(tuple(cycles), dict(sorted(Counter(dist).items())))


@dataclass(frozen=True)
class OrbitResult:
    points: tuple[int, ...]
    cycle_start: int | None = None  # index of first point that repeats
    cycle_length: int | None = None


def orbit(e: MapExpr, p: int, x0: int, steps: int, m: int) -> OrbitResult:
    """Iterate the padded endomap from x0, re-padding after every step."""
    if m < 1:
        raise ValueError("digit count must be >= 1")
    if not 0 <= x0 < p ** m:
        raise ValueError(f"start point {x0} outside Z/{p}^{m}")
    bound = lookahead_bound(e, p)
    k_in = m + bound
    modulus = p ** m
    points = [x0]
    first_seen = {x0: 0}
    cycle_start = cycle_length = None
    current = x0
    for _ in range(steps):
        current = eval_map(e, PadicApprox(p, k_in, current)).residue % modulus
        points.append(current)
        if cycle_start is None:
            if current in first_seen:
                cycle_start = first_seen[current]
                cycle_length = len(points) - 1 - cycle_start
            else:
                first_seen[current] = len(points) - 1
    return OrbitResult(tuple(points), cycle_start, cycle_length)


@dataclass(frozen=True)
class PlotSet:
    """Exact rational points of the unit-square plot, grouped by level."""

    p: int
    n: int
    levels: dict[int, frozenset[tuple[Fraction, Fraction]]]

    @property
    def k_values(self) -> tuple[int, ...]:
        return tuple(sorted(self.levels))

    @property
    def points(self) -> frozenset[tuple[Fraction, Fraction]]:
        merged: set[tuple[Fraction, Fraction]] = set()
        for pts in self.levels.values():
            merged |= pts
        return frozenset(merged)

    def merged(self, other: PlotSet) -> PlotSet:
        if (self.p, self.n) != (other.p, other.n):
            raise ValueError("plot sets disagree on p or n")
        levels = dict(self.levels)
        for k, pts in other.levels.items():
            levels[k] = levels.get(k, frozenset()) | pts
        return PlotSet(self.p, self.n, levels)


def plot_points(
    e: MapExpr, p: int, n: int, k: int, budget: int | None = None
) -> PlotSet:
    """The level-k plot: (x / p**(n+k), f(x) mod p**k / p**k) over all
    residues x mod p**(n+k), duplicates collapsed."""
    if n < 1 or k < 1:
        raise ValueError("need n >= 1 and k >= 1")
    bound = lookahead_bound(e, p)
    size = p ** (n + k)
    _check_budget(p ** (n + k + bound), budget)
    k_in = n + k + bound
    y_mod = p ** k
    pts = set()
    for x in range(size):
        y = eval_map(e, PadicApprox(p, k_in, x)).residue % y_mod
        pts.add((Fraction(x, size), Fraction(y, y_mod)))
    return PlotSet(p, n, {k: frozenset(pts)})


def accumulate_plot(
    e: MapExpr, p: int, n: int, k_max: int, budget: int | None = None
) -> PlotSet:
    """Union of the plots for k = 1..k_max."""
    ps = plot_points(e, p, n, 1, budget)
    for k in range(2, k_max + 1):
        ps = ps.merged(plot_points(e, p, n, k, budget))
    return ps


@dataclass(frozen=True)
class BoxCount:
    grid: int
    covered_cells: frozenset[tuple[int, int]]

    @property
    def covered(self) -> int:
        return len(self.covered_cells)

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.covered, self.grid * self.grid)


def box_count(ps: PlotSet, grid: int) -> BoxCount:
    """Fraction of grid cells containing at least one plot point.

    Cell assignment is exact: a point lands in cell floor(coord * grid),
    computed on the rationals.
    """
    if grid < 1:
        raise ValueError("grid size must be >= 1")
    cells = set()
    for x, y in ps.points:
        cells.add((x.numerator * grid // x.denominator, y.numerator * grid // y.denominator))
    return BoxCount(grid, frozenset(cells))


def to_csv(ps: PlotSet) -> str:
    """Deterministic point dump of the accumulated plot set."""
    lines = ["xnum,xden,ynum,yden"]
    for x, y in sorted(ps.points):
        lines.append(f"{x.numerator},{x.denominator},{y.numerator},{y.denominator}")
    return "\n".join(lines) + "\n"


def to_pgm(bc: BoxCount) -> str:
    """Plain PGM (P2) raster of the covered cells; row 0 is the top."""
    g = bc.grid
    lines = ["P2", f"{g} {g}", "1"]
    for row in range(g):
        j = g - 1 - row
        lines.append(" ".join("1" if (i, j) in bc.covered_cells else "0" for i in range(g)))
    return "\n".join(lines) + "\n"
