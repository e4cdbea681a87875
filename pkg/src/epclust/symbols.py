"""Boxed diagonal labels and the combinatorics of their direct-sum splits.

A GAO Hamiltonian of dimension N is labelled by its diagonal
D(N) = {1-N, 3-N, ..., N-1}.  An admissible split partitions D(N) into
centred arithmetic progressions c*{1-n, 3-n, ..., n-1} with n >= 2; each
piece is the diagonal of a scaled TAO block.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import DomainError, StructuralError


def full_diagonal(N: int) -> list[int]:
    """D(N) in ascending order."""
    return list(range(1 - N, N, 2))


@dataclass(frozen=True)
class BoxedSymbol:
    length: int
    scale: Fraction = Fraction(1)
    shift: Fraction = Fraction(0)

    def __post_init__(self):
        if not isinstance(self.length, int) or self.length < 2:
            raise DomainError(f"boxed symbol needs length >= 2, got {self.length!r}")
        object.__setattr__(self, "scale", Fraction(self.scale))
        object.__setattr__(self, "shift", Fraction(self.shift))
        if self.scale <= 0:
            raise DomainError(f"boxed symbol needs a positive scale, got {self.scale}")

    def diagonal(self) -> list[Fraction]:
        n, c = self.length, self.scale
        return [self.shift + c * (2 * i - 1 - n) for i in range(1, n + 1)]

    @property
    def label(self) -> str:
        return f"{self.length}x{self.scale}"

    def boxed(self) -> str:
        return "[" + ",".join(str(v) for v in self.diagonal()) + "]"

    def sort_key(self):
        return (-self.length, self.scale)


@dataclass(frozen=True)
class Decomposition:
    total_dimension: int
    components: tuple[BoxedSymbol, ...]

    def __post_init__(self):
        comps = tuple(sorted(self.components, key=BoxedSymbol.sort_key))
        object.__setattr__(self, "components", comps)
        N = self.total_dimension
        if N < 2:
            raise DomainError(f"N must be >= 2, got {N}")
        if any(b.shift != 0 for b in comps):
            raise StructuralError("decomposition components must be centred (shift 0)")
        if sum(b.length for b in comps) != N:
            raise StructuralError(
                f"component lengths sum to {sum(b.length for b in comps)}, expected N={N}")
        seen: set[Fraction] = set()
        for b in comps:
            diag = b.diagonal()
            clash = seen.intersection(diag)
            if clash:
                at = ", ".join(map(str, sorted(clash)))
                raise StructuralError(f"component {b.label} overlaps earlier components at {{{at}}}")
            seen.update(diag)
        target = set(full_diagonal(N))
        if seen != target:
            missing = ", ".join(map(str, sorted(target - seen)))
            extra = ", ".join(map(str, sorted(seen - target)))
            raise StructuralError(f"union of components differs from D({N}): "
                                  f"missing {{{missing}}}, extra {{{extra}}}")
        if len(comps) > N // 2:
            raise StructuralError(f"K={len(comps)} exceeds N/2")

    @property
    def K(self) -> int:
        return len(self.components)

    @property
    def partition(self) -> tuple[int, ...]:
        return tuple(b.length for b in self.components)

    @property
    def partition_label(self) -> str:
        return "+".join(str(n) for n in self.partition)

    @property
    def label(self) -> str:
        return ",".join(b.label for b in self.components)

    def sort_key(self):
        return tuple(b.sort_key() for b in self.components)

    def positions(self) -> list[list[int]]:
        """Row indices (0-based) each component occupies in the sorted diagonal."""
        index = {v: i for i, v in enumerate(full_diagonal(self.total_dimension))}
        return [sorted(index[int(v)] for v in b.diagonal()) for b in self.components]

    @classmethod
    def from_label(cls, label: str, N: int) -> Decomposition:
        comps = []
        for token in label.split(","):
            token = token.strip()
            n_str, sep, c_str = token.partition("x")
            if not sep or not n_str.isdigit() or not c_str.isdigit():
                raise StructuralError(f"malformed component token {token!r}; expected 'nxc'")
            n, c = int(n_str), int(c_str)
            if n < 2 or c < 1:
                raise StructuralError(f"component {token!r} needs n >= 2 and c >= 1")
            comps.append(BoxedSymbol(n, Fraction(c)))
        return cls(N, tuple(comps))


def _check_n(N):
    if not isinstance(N, int) or N < 2:
        raise DomainError(f"N must be an integer >= 2, got {N!r}")


@lru_cache(maxsize=None)
def _enumerate(N: int) -> tuple[Decomposition, ...]:
    found: list[tuple[BoxedSymbol, ...]] = []

    def recurse(remaining: frozenset[int], acc: tuple[BoxedSymbol, ...]):
        if not remaining:
            found.append(acc)
            return
        top = max(remaining)
        for n in range(2, len(remaining) + 1):
            c = Fraction(top, n - 1)
            block = [c * (2 * i - 1 - n) for i in range(1, n + 1)]
            if any(v.denominator != 1 for v in block):
                continue
            ints = {int(v) for v in block}
            if ints <= remaining:
                recurse(remaining - ints, acc + (BoxedSymbol(n, c),))

    recurse(frozenset(full_diagonal(N)), ())
    decs = [Decomposition(N, comps) for comps in found]
    for d in decs:
        assert all(b.scale.denominator == 1 for b in d.components)
    decs.sort(key=Decomposition.sort_key)
    return tuple(decs)


def enumerate_decompositions(N: int, anomalous_only: bool = False) -> list[Decomposition]:
    """All admissible splits of D(N), trivial K=1 first, in canonical order."""
    _check_n(N)
    decs = _enumerate(N)
    if anomalous_only:
        return [d for d in decs if d.K > 1]
    return list(decs)


def count_scenarios(N: int) -> int:
    _check_n(N)
    return len(_enumerate(N))


# --- half-representation grammars --------------------------------------------
# Even N = 2J: blocks restricted to positive entries are B(j,k) = {(2i-1)(2k-1)}.
# Odd N = 2J+1: halved non-negative entries split into one C(j,k) = {0,k,..,jk}
# (the block through zero) plus any number of G(q,r) = {(2p-1)r}.

def _check_j(J):
    if not isinstance(J, int) or J < 1:
        raise DomainError(f"J must be an integer >= 1, got {J!r}")


def enumerate_even_half(J: int) -> list[list[tuple]]:
    """Splits of {1, 3, ..., 2J-1} into B(j,k) blocks, each as a list of ('B', j, k)."""
    _check_j(J)
    out = []

    def recurse(remaining: frozenset[int], acc):
        if not remaining:
            out.append(acc)
            return
        top = max(remaining)
        for odd in range(1, top + 1, 2):
            if top % odd:
                continue
            j, k = (odd + 1) // 2, (top // odd + 1) // 2
            block = {(2 * i - 1) * (2 * k - 1) for i in range(1, j + 1)}
            if block <= remaining:
                recurse(remaining - block, acc + [("B", j, k)])

    recurse(frozenset(range(1, 2 * J, 2)), [])
    return out


def enumerate_odd_half(J: int) -> list[list[tuple]]:
    """Splits of {0, 1, ..., J} into one C(j,k) and any G(q,r) blocks."""
    _check_j(J)
    out = []

    def recurse(remaining: frozenset[int], acc, have_c: bool):
        positive = remaining - {0}
        if not positive:
            if have_c and not remaining:
                out.append(acc)
            return
        top = max(positive)
        if not have_c and 0 in remaining:
            for j in range(1, top + 1):
                if top % j:
                    continue
                k = top // j
                block = {i * k for i in range(j + 1)}
                if block <= remaining:
                    recurse(remaining - block, acc + [("C", j, k)], True)
        for odd in range(1, top + 1, 2):
            if top % odd:
                continue
            q, r = (odd + 1) // 2, top // odd
            block = {(2 * p - 1) * r for p in range(1, q + 1)}
            if block <= remaining:
                recurse(remaining - block, acc + [("G", q, r)], have_c)

    recurse(frozenset(range(J + 1)), [], False)
    return out


def half_block_elements(block: tuple) -> set[int]:
    kind, a, b = block
    if kind == "B":
        return {(2 * i - 1) * (2 * b - 1) for i in range(1, a + 1)}
    if kind == "C":
        return {i * b for i in range(a + 1)}
    if kind == "G":
        return {(2 * p - 1) * b for p in range(1, a + 1)}
    raise ValueError(f"unknown block kind {kind!r}")


def half_to_decomposition(blocks: list[tuple], N: int) -> Decomposition:
    """Translate a half-representation split into boxed components of D(N)."""
    comps = []
    for kind, a, b in blocks:
        if kind == "B":
            comps.append(BoxedSymbol(2 * a, Fraction(2 * b - 1)))
        elif kind == "C":
            comps.append(BoxedSymbol(2 * a + 1, Fraction(b)))
        elif kind == "G":
            comps.append(BoxedSymbol(2 * a, Fraction(2 * b)))
        else:
            raise ValueError(f"unknown block kind {kind!r}")
    return Decomposition(N, tuple(comps))


def count_even(J: int) -> int:
    """b(J) = a(2J), counted with the B(j,k) grammar."""
    return len(enumerate_even_half(J))


def count_odd(J: int) -> int:
    """c(J) = a(2J+1), counted with the C(j,k)/G(q,r) grammar."""
    return len(enumerate_odd_half(J))


@dataclass(frozen=True)
class SequenceReport:
    values: tuple[tuple[int, int], ...]
    variant: str

    def as_dict(self) -> dict[int, int]:
        return dict(self.values)


def sequence_report(variant: str, max_index: int) -> SequenceReport:
    """Tabulate a(N) for N=2..max_index, or b(J)/c(J) for J=1..max_index."""
    if variant == "a":
        _check_n(max_index)
        vals = [(N, count_scenarios(N)) for N in range(2, max_index + 1)]
    elif variant in ("b", "c"):
        _check_j(max_index)
        f = count_even if variant == "b" else count_odd
        vals = [(J, f(J)) for J in range(1, max_index + 1)]
    else:
        raise DomainError(f"sequence variant must be a, b or c, got {variant!r}")
    return SequenceReport(tuple(vals), variant)


# --- classification table ------------------------------------------------------

TABLE_COLUMNS = ("N", "K", "partition", "j", "n_j", "c_j", "label")


@dataclass(frozen=True)
class TableRow:
    N: int
    K: int
    partition: str
    j: int
    n_j: int
    c_j: int
    label: str

    def as_tuple(self):
        return (self.N, self.K, self.partition, self.j, self.n_j, self.c_j, self.label)


def classification_table(N_max: int) -> list[TableRow]:
    """One row per component of every anomalous (K > 1) split, N = 2..N_max."""
    _check_n(N_max)
    rows = []
    for N in range(2, N_max + 1):
        for dec in enumerate_decompositions(N, anomalous_only=True):
            for j, b in enumerate(dec.components, start=1):
                rows.append(TableRow(N, dec.K, dec.partition_label, j, b.length,
                                     int(b.scale), b.boxed()))
    return rows


def table_to_csv(rows: list[TableRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TABLE_COLUMNS)
    for r in rows:
        w.writerow(r.as_tuple())
    return buf.getvalue()


def table_to_text(rows: list[TableRow]) -> str:
    cells = [list(TABLE_COLUMNS)] + [[str(x) for x in r.as_tuple()] for r in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(TABLE_COLUMNS))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(row, widths)).rstrip() for row in cells]
    return "\n".join(lines) + "\n"
