"""Mahler coefficients and coefficient-based transformation tests.

Coefficients are the finite differences of the map at 0, 1, 2, ...; they
are computed exactly and stored as residues mod p**K.  The checkers turn
divisibility conditions on the coefficients into verdicts that are honest
about their bounds: every condition quantifies over all indices, so a
finite scan can only report "satisfied up to M" unless the map is a
polynomial, in which case the verdict is total.
"""
from __future__ import annotations

from dataclasses import dataclass

from .mapdsl import MapExpr, binomial_degree, eval_map, lookahead_bound
from .padic import PadicApprox, Valuation, binomial_eval, residue_valuation

__all__ = [
    "MahlerCoeffs",
    "Verdict",
    "check_bernoulli_properties",
    "check_complex_shift_bound",
    "check_cs_ergodic",
    "check_cs_mp",
    "check_lipschitz_ergodic",
    "check_lipschitz_mp",
    "eval_mahler",
    "mahler_coeffs",
]


@dataclass(frozen=True)
class MahlerCoeffs:
    """Coefficients a_0..a_M of a map in the binomial basis, mod p**K.

    ``degree_bound`` is set when the map is a polynomial of known degree,
    certifying that all coefficients beyond it vanish exactly.
    """

    p: int
    precision: int
    residues: tuple[int, ...]
    degree_bound: int | None = None

    @property
    def max_index(self) -> int:
        return len(self.residues) - 1

    def valuation(self, m: int) -> Valuation:
        return residue_valuation(self.residues[m], self.p, self.precision)

    def signed(self, m: int) -> int:
        """Balanced representative in (-p**K/2, p**K/2], nicer to read."""
        modulus = self.p ** self.precision
        r = self.residues[m]
        return r if 2 * r <= modulus else r - modulus

    @property
    def total(self) -> bool:
        """True when the listed coefficients provably include every nonzero one."""
        return self.degree_bound is not None and self.degree_bound <= self.max_index


@dataclass(frozen=True)
class Verdict:
    """Outcome of a bounded theorem-condition check.

    kind is one of "satisfied_up_to", "violated_at", "undecidable_at".
    Violations carry the index, the condition text and the observation;
    ``definitive`` marks cases where the condition is known necessary.
    """

    kind: str
    bound: int
    m: int | None = None
    condition: str = ""
    observed: str = ""
    definitive: bool = False
    total: bool = False
    note: str = ""

    @classmethod
    def satisfied(cls, bound: int, total: bool = False, note: str = "") -> Verdict:
        return cls("satisfied_up_to", bound, total=total, note=note)

    @classmethod
    def violated(
        cls,
        bound: int,
        m: int,
        condition: str,
        observed: str,
        definitive: bool = False,
        note: str = "",
    ) -> Verdict:
        return cls("violated_at", bound, m, condition, observed, definitive, note=note)

    @classmethod
    def undecidable(cls, bound: int, m: int, condition: str, note: str = "") -> Verdict:
        return cls("undecidable_at", bound, m, condition, note=note)

    @property
    def satisfied_up_to(self) -> bool:
        return self.kind == "satisfied_up_to"

    def __str__(self) -> str:
        if self.kind == "satisfied_up_to":
            text = f"SatisfiedUpTo({self.bound})"
            if self.total:
                text += " (total: finitely many nonzero coefficients)"
        elif self.kind == "violated_at":
            text = f"ViolatedAt({self.m}): {self.condition}; observed {self.observed}"
            if self.definitive:
                text += " [definitive: condition is necessary for p=2]"
        else:
            text = (
                f"UndecidableAt({self.m}): {self.condition}"
                " requires valuation beyond working precision"
            )
        if self.note:
            text += f" [{self.note}]"
        return text

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "bound": self.bound,
            "m": self.m,
            "condition": self.condition,
            "observed": self.observed,
            "definitive": self.definitive,
            "total": self.total,
            "note": self.note,
        }


def _digit_length(value: int, p: int) -> int:
    length = 1
    while p ** length <= value:
        length += 1
    return length


def mahler_coeffs(e: MapExpr, p: int, max_index: int, precision: int) -> MahlerCoeffs:
    """Coefficients a_0..a_max_index via the exact forward-difference table.

    The map is evaluated at the integer points 0..max_index with enough
    input digits that each value is certified mod p**precision.
    """
    if max_index < 0:
        raise ValueError("max_index must be >= 0")
    if precision < 1:
        raise ValueError("precision must be >= 1")
    bound = lookahead_bound(e, p)
    k_in = precision + bound + _digit_length(max(max_index, 1), p)
    modulus = p ** precision
    row = [
        eval_map(e, PadicApprox(p, k_in, i)).residue % modulus
        for i in range(max_index + 1)
    ]
    coeffs = [row[0]]
    for _ in range(max_index):
        row = [(row[i + 1] - row[i]) % modulus for i in range(len(row) - 1)]
        coeffs.append(row[0])
    return MahlerCoeffs(p, precision, tuple(coeffs), binomial_degree(e))


def eval_mahler(c: MahlerCoeffs, i: int) -> int:
    """Reconstruct the map at an integer point from its coefficients.

    Exact mod p**K for 0 <= i <= max_index, where the truncated series
    loses nothing because C(i, m) = 0 for m > i.
    """
    if not 0 <= i <= c.max_index:
        raise ValueError(f"point {i} outside tabulated range 0..{c.max_index}")
    total = sum(c.residues[m] * binomial_eval(i, m) for m in range(i + 1))
    return total % c.p ** c.precision


class _Scan:
    """Collects per-index clause results with violation-first priority."""

    def __init__(self, c: MahlerCoeffs):
        self.c = c
        self.violation: Verdict | None = None
        self.undecided: Verdict | None = None

    def require_valuation(self, m: int, required: int, condition: str, definitive=False):
        if required <= 0 or self.violation is not None:
            return
        met = self.c.valuation(m).meets(required)
        if met is False:
            self.violation = Verdict.violated(
                self.c.max_index, m, condition, f"valuation {self.c.valuation(m)}",
                definitive=definitive,
            )
        elif met is None and self.undecided is None:
            self.undecided = Verdict.undecidable(self.c.max_index, m, condition)

    def require(self, ok: bool, m: int, condition: str, observed: str, definitive=False):
        if self.violation is None and not ok:
            self.violation = Verdict.violated(
                self.c.max_index, m, condition, observed, definitive=definitive
            )

    def verdict(self, total: bool = False, note: str = "") -> Verdict:
        if self.violation is not None:
            return Verdict(
                "violated_at",
                self.violation.bound,
                self.violation.m,
                self.violation.condition,
                self.violation.observed,
                self.violation.definitive,
                note=note,
            )
        if self.undecided is not None:
            return Verdict.undecidable(
                self.undecided.bound, self.undecided.m, self.undecided.condition, note=note
            )
        return Verdict.satisfied(self.c.max_index, total=total, note=note)


def _ilog(m: int, base: int) -> int:
    """Largest e >= 0 with base**e <= m, by integer comparison only."""
    if m < 1:
        raise ValueError("logarithm argument must be >= 1")
    e = 0
    q = base
    while q <= m:
        e += 1
        q *= base
    return e


def check_bernoulli_properties(c: MahlerCoeffs, n: int) -> Verdict:
    """Structural properties of the n-fold digit shift's coefficients:
    zero below p**n, one at p**n, and p**j dividing a_m once
    m > j*p**n - j + 1."""
    if n < 1:
        raise ValueError("shift level must be >= 1")
    p, M = c.p, c.max_index
    block = p ** n
    scan = _Scan(c)
    for m in range(min(block, M + 1)):
        scan.require(
            c.residues[m] == 0, m, f"a_{m} = 0 for m < p^{n}", f"a_{m} = {c.signed(m)}"
        )
    if M < block:
        if scan.violation is None:
            return Verdict.undecidable(M, block, f"a_{{p^{n}}} = 1 needs M >= {block}")
        return scan.verdict()
    scan.require(
        c.residues[block] == 1, block, f"a_{{p^{n}}} = 1", f"a_{block} = {c.signed(block)}"
    )
    for m in range(2, M + 1):
        # largest j with m > j*(p^n - 1) + 1, restricted to j <= K
        j = min(-(-(m - 1) // (block - 1)) - 1, c.precision)
        scan.require_valuation(m, j, f"p^{j} | a_{m} (m > {j}*p^{n} - {j} + 1)")
    return scan.verdict()


def check_lipschitz_mp(c: MahlerCoeffs) -> Verdict:
    """Coefficient conditions for a 1-Lipschitz measure-preserving map:
    a_1 a unit, and a_m divisible by p**(floor(log_p m) + 1) for m >= 2."""
    p, M = c.p, c.max_index
    if M < 1:
        raise ValueError("need coefficients at least up to index 1")
    scan = _Scan(c)
    scan.require(
        c.residues[1] % p != 0, 1, "a_1 not = 0 (mod p)", f"a_1 = {c.signed(1)}"
    )
    for m in range(2, M + 1):
        req = _ilog(m, p) + 1
        scan.require_valuation(m, req, f"a_{m} = 0 (mod p^{req})")
    return scan.verdict(total=c.total, note="sufficient condition only")


def check_lipschitz_ergodic(c: MahlerCoeffs, strict_m1: bool = False) -> Verdict:
    """Coefficient conditions for a 1-Lipschitz ergodic map.

    a_0 a unit; a_1 = 1 mod p (mod 4 when p = 2); tail divisibility
    p**(floor(log_p(m+1)) + 1) | a_m.  The tail clause is applied from
    m = 2 because its m = 1 instance contradicts the unit condition on
    a_1; ``strict_m1`` applies it from m = 1 anyway, for comparison.
    For p = 2 the conditions are necessary, so violations are definitive.
    """
    p, M = c.p, c.max_index
    if M < 1:
        raise ValueError("need coefficients at least up to index 1")
    definitive = p == 2
    note = "necessary and sufficient for p=2" if definitive else "sufficient condition only"
    scan = _Scan(c)
    scan.require(
        c.residues[0] % p != 0,
        0,
        "a_0 not = 0 (mod p)",
        f"a_0 = {c.signed(0)}",
        definitive=definitive,
    )
    if p == 2:
        if c.precision < 2:
            if scan.violation is None:
                return Verdict.undecidable(M, 1, "a_1 = 1 (mod 4) needs K >= 2", note=note)
        else:
            scan.require(
                c.residues[1] % 4 == 1,
                1,
                "a_1 = 1 (mod 4)",
                f"a_1 = {c.signed(1) % 4} (mod 4)",
                definitive=True,
            )
    else:
        scan.require(
            c.residues[1] % p == 1,
            1,
            "a_1 = 1 (mod p)",
            f"a_1 = {c.signed(1) % p} (mod {p})",
        )
    start = 1 if strict_m1 else 2
    for m in range(start, M + 1):
        req = _ilog(m + 1, p) + 1
        scan.require_valuation(
            m, req, f"a_{m} = 0 (mod p^{req})", definitive=definitive
        )
    return scan.verdict(total=c.total, note=note)


def check_complex_shift_bound(c: MahlerCoeffs, n: int) -> Verdict:
    """Coefficient growth bound characterising complex shifts at level n:
    |a_m| <= p**(1 - floor(log_{p^n} m)) for every m >= 1."""
    if n < 1:
        raise ValueError("complex-shift level must be >= 1")
    p, M = c.p, c.max_index
    base = p ** n
    scan = _Scan(c)
    for m in range(1, M + 1):
        req = _ilog(m, base) - 1
        if req > 0:
            scan.require_valuation(m, req, f"|a_{m}| <= p^(1 - log_{{p^{n}}} {m})")
    return scan.verdict(total=c.total)


def _require_up_to(c: MahlerCoeffs, n: int) -> int:
    block = c.p ** n
    if c.max_index < block:
        raise ValueError(
            f"need coefficients up to index p^{n} = {block}, have {c.max_index}"
        )
    return block


def check_cs_mp(c: MahlerCoeffs, n: int) -> Verdict:
    """Sufficient conditions for a level-n complex shift to preserve the
    uniform measure: a unit at index p**n, then tail divisibility
    p**floor(log_{p^n} m) | a_m for m > p**n."""
    if n < 1:
        raise ValueError("complex-shift level must be >= 1")
    p, M = c.p, c.max_index
    block = _require_up_to(c, n)
    scan = _Scan(c)
    scan.require(
        c.residues[block] % p != 0,
        block,
        f"a_m not = 0 (mod p) for m = p^{n}",
        f"a_{block} = {c.signed(block)}",
    )
    for m in range(block + 1, M + 1):
        req = _ilog(m, block)
        scan.require_valuation(m, req, f"a_{m} = 0 (mod p^{req})")
    return scan.verdict(total=c.total, note="sufficient condition only")


def check_cs_ergodic(c: MahlerCoeffs, n: int) -> Verdict:
    """Sufficient conditions for a level-n complex shift to be ergodic:
    a_{p^n} = 1 mod p, the head sum a_1 + ... + a_{p^n - 1} divisible by
    p, and the same tail divisibility as the measure-preservation test."""
    if n < 1:
        raise ValueError("complex-shift level must be >= 1")
    p, M = c.p, c.max_index
    block = _require_up_to(c, n)
    scan = _Scan(c)
    scan.require(
        c.residues[block] % p == 1,
        block,
        f"a_m = 1 (mod p) for m = p^{n}",
        f"a_{block} = {c.signed(block) % p} (mod {p})",
    )
    head = sum(c.residues[m] for m in range(1, block)) % p
    scan.require(
        head == 0,
        block - 1,
        f"a_1 + ... + a_{{p^{n} - 1}} = 0 (mod p)",
        f"sum = {head} (mod {p})",
    )
    for m in range(block + 1, M + 1):
        req = _ilog(m, block)
        scan.require_valuation(m, req, f"a_{m} = 0 (mod p^{req})")
    return scan.verdict(total=c.total, note="sufficient condition only")
