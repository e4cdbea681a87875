"""Builders for the TAO blocks, their direct sums and the related matrices.

Every Hamiltonian here is real with an antisymmetric off-diagonal part.
Entries live in Q(sqrt2, sqrt3) whenever the couplings allow it (backend
"exact") and are plain floats otherwise.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real
from typing import Any, Sequence

import mpmath
import numpy as np
from scipy.sparse.csgraph import connected_components

from . import linalg
from .errors import BackendError, DomainError, StructuralError
from .exact import ExactScalar, exact_sqrt, is_exact_number
from .symbols import BoxedSymbol, Decomposition, full_diagonal

BACKENDS = ("auto", "exact", "float")


@dataclass(frozen=True, eq=False)
class HamiltonianMatrix:
    entries: np.ndarray
    backend: str
    provenance: Any = field(default=None, compare=False)

    def __post_init__(self):
        if self.backend not in ("exact", "float"):
            raise BackendError(f"unknown backend {self.backend!r}")
        arr = np.array(self.entries, dtype=object if self.backend == "exact" else float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise StructuralError(f"Hamiltonian must be square, got shape {arr.shape}")
        if self.backend == "exact":
            arr = linalg.to_exact(arr)
        arr.flags.writeable = False
        object.__setattr__(self, "entries", arr)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def is_exact(self) -> bool:
        return self.backend == "exact"

    def to_float(self) -> np.ndarray:
        return linalg.to_float(self.entries)

    def as_float(self) -> HamiltonianMatrix:
        return HamiltonianMatrix(self.to_float(), "float", self.provenance)

    def __getitem__(self, idx):
        return self.entries[idx]

    def __eq__(self, other):
        if not isinstance(other, HamiltonianMatrix):
            return NotImplemented
        if self.n != other.n:
            return False
        if self.is_exact and other.is_exact:
            return all(a == b for a, b in zip(self.entries.flat, other.entries.flat))
        return bool(np.array_equal(self.to_float(), other.to_float()))

    __hash__ = None

    def antisymmetry_defect(self) -> float:
        """max |H + H^T - 2 diag(H)|, zero for every valid Hamiltonian."""
        M = self.entries
        D = M + M.T
        for i in range(self.n):
            D[i, i] = D[i, i] - 2 * M[i, i]
        return linalg.max_abs(D)

    def to_json(self) -> dict:
        if self.is_exact:
            rows = [[e.to_json() for e in row] for row in self.entries]
        else:
            rows = [[float(e) for e in row] for row in self.entries]
        return {"n": self.n, "backend": self.backend, "entries": rows}

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, obj) -> HamiltonianMatrix:
        if isinstance(obj, str):
            obj = json.loads(obj)
        backend = obj["backend"]
        n = obj["n"]
        if backend == "exact":
            rows = [[ExactScalar.from_json(e) for e in row] for row in obj["entries"]]
        elif backend == "float":
            rows = [[float(e) for e in row] for row in obj["entries"]]
        else:
            raise BackendError(f"unknown backend {backend!r}")
        if len(rows) != n or any(len(r) != n for r in rows):
            raise StructuralError(f"entries are not {n}x{n}")
        return cls(np.array(rows, dtype=object if backend == "exact" else float), backend)


# --- helpers -------------------------------------------------------------------

def _mpf(x):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(float(x)) if isinstance(x, ExactScalar) else mpmath.mpf(x)


def _as_number(x, name):
    if isinstance(x, bool) or not isinstance(x, (Real, ExactScalar)):
        raise DomainError(f"{name} must be a real number, got {x!r}")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    return x


def _coupling(scale, t, k: int, n: int, exact: bool):
    """scale * t * sqrt(k (n - k))."""
    if exact:
        return ExactScalar.coerce(scale) * ExactScalar.coerce(t) * exact_sqrt(k * (n - k))
    return float(scale) * float(t) * float(np.sqrt(k * (n - k)))


def _resolve_backend(backend: str, exact_ok: bool, why: str = "") -> bool:
    if backend not in BACKENDS:
        raise BackendError(f"backend must be one of {BACKENDS}, got {backend!r}")
    if backend == "exact":
        if not exact_ok:
            raise BackendError("exact backend unavailable" + (f": {why}" if why else ""))
        return True
    if backend == "float":
        return False
    return exact_ok


def _tao_exact_ok(n, *numbers) -> tuple[bool, str]:
    if not all(is_exact_number(x) for x in numbers):
        return False, "non-rational parameter"
    for k in range(1, n):
        try:
            exact_sqrt(k * (n - k))
        except BackendError as err:
            return False, str(err)
    return True, ""


# --- builders ------------------------------------------------------------------

def tao_entries(n: int, c, eta, t, exact: bool) -> np.ndarray:
    M = linalg.zeros((n, n), exact)
    for i in range(n):
        M[i, i] = (ExactScalar.coerce(eta) + ExactScalar.coerce(c) * (2 * i + 1 - n)
                   if exact else float(eta) + float(c) * (2 * i + 1 - n))
    for k in range(1, n):
        b = _coupling(c, t, k, n, exact)
        M[k - 1, k] = b
        M[k, k - 1] = -b
    return M


def build_tao(n: int, c=1, eta=0, t=1, backend: str = "auto",
              continuation: bool = False) -> HamiltonianMatrix:
    """Tridiagonal block with diagonal eta + c(2i-1-n) and couplings +-c t sqrt(k(n-k)).

    ``t`` runs over the unitarity interval [0, 1]; ``continuation=True``
    admits t > 1 (complex spectrum) for locating the exceptional point.
    """
    if isinstance(n, bool) or not isinstance(n, int) or n < 2:
        raise DomainError(f"block size must be an integer >= 2, got {n!r}")
    c = _as_number(c, "c")
    eta = _as_number(eta, "eta")
    t = _as_number(t, "t")
    if float(c) <= 0:
        raise DomainError(f"scale c must be positive, got {c}")
    if float(t) < 0 or (float(t) > 1 and not continuation):
        raise DomainError(f"coupling t must lie in [0, 1], got {t}")
    ok, why = _tao_exact_ok(n, c, eta, t)
    exact = _resolve_backend(backend, ok, why)
    return HamiltonianMatrix(tao_entries(n, c, eta, t, exact),
                             "exact" if exact else "float")


def build_tao_ep(n: int, c=1, eta=0, backend: str = "auto") -> HamiltonianMatrix:
    return build_tao(n, c, eta, 1, backend)


# multipliers of g on entries (i, i+2)
_TOY7_MULT = (ExactScalar(0, 0, 1), ExactScalar(0, 1), ExactScalar(2),
              ExactScalar(0, 1), ExactScalar(0, 0, 1))


def build_toy7(g, backend: str = "auto") -> HamiltonianMatrix:
    """The 7x7 pentadiagonal toy with diagonal 1, 3, ..., 13.

    Values g > 2 are accepted on purpose; the spectrum is then complex.
    """
    g = _as_number(g, "g")
    if float(g) < 0:
        raise DomainError(f"g must be non-negative, got {g}")
    exact = _resolve_backend(backend, is_exact_number(g), "non-rational g")
    M = linalg.zeros((7, 7), exact)
    for i in range(7):
        M[i, i] = ExactScalar(2 * i + 1) if exact else float(2 * i + 1)
    for i, mult in enumerate(_TOY7_MULT):
        v = mult * ExactScalar.coerce(g) if exact else float(mult) * float(g)
        M[i, i + 2] = v
        M[i + 2, i] = -v
    return HamiltonianMatrix(M, "exact" if exact else "float")


def toy7_energies(g) -> np.ndarray:
    """Closed-form toy energies 7 + m sqrt(4 - g^2), m = -3..3 (complex for g > 2)."""
    root = np.sqrt(complex(4.0 - float(g) ** 2))
    return np.array([7.0 + m * root for m in range(-3, 4)])


def g_from_kappa(kappa) -> float:
    return 2.0 * (1.0 - float(kappa) ** 2)


def toy7_energies_kappa(kappa) -> np.ndarray:
    """Same energies in the kappa form, 7 + 2m sqrt(2 kappa^2 - kappa^4)."""
    k2 = float(kappa) ** 2
    root = np.sqrt(complex(2.0 * k2 - k2 * k2))
    return np.array([7.0 + 2 * m * root for m in range(-3, 4)])


def _embed(N: int, blocks, positions, exact: bool) -> np.ndarray:
    M = linalg.zeros((N, N), exact)
    for block, pos in zip(blocks, positions):
        for a, i in enumerate(pos):
            for b, j in enumerate(pos):
                M[i, j] = block[a, b]
    return M


def build_from_decomposition(dec: Decomposition, eta=0, t=1, backend: str = "auto",
                             continuation: bool = False) -> HamiltonianMatrix:
    """Direct sum of c_j-scaled TAO blocks, rows placed by their diagonal value."""
    if not isinstance(dec, Decomposition):
        raise StructuralError(f"expected a Decomposition, got {type(dec).__name__}")
    eta = _as_number(eta, "eta")
    t = _as_number(t, "t")
    oks = [_tao_exact_ok(b.length, b.scale, eta, t) for b in dec.components]
    exact = _resolve_backend(backend, all(ok for ok, _ in oks),
                             next((why for ok, why in oks if not ok), ""))
    blocks = [build_tao(b.length, b.scale, eta, t, "exact" if exact else "float",
                        continuation).entries for b in dec.components]
    M = _embed(dec.total_dimension, blocks, dec.positions(), exact)
    return HamiltonianMatrix(M, "exact" if exact else "float", provenance=(dec, t))


def pentadiagonal_ep_couplings(N: int) -> list:
    """Couplings c_1..c_{N-2} putting both parity components at their EP.

    Entry (i, i+2) belongs to the component of parity i; each component has
    spacing 4, i.e. it is a TAO block with scale 2.
    """
    if N < 4:
        raise DomainError(f"N must be >= 4, got {N}")
    sizes = ((N + 1) // 2, N // 2)
    out = []
    for i in range(N - 2):
        n = sizes[i % 2]
        k = i // 2 + 1
        out.append(2 * exact_sqrt(k * (n - k)))
    return out


def build_pentadiagonal_special(N: int, couplings: Sequence, backend: str = "auto"
                                ) -> HamiltonianMatrix:
    """Diagonal 1-N..N-1 with coupling list entries on the second off-diagonals."""
    if isinstance(N, bool) or not isinstance(N, int) or N < 4:
        raise DomainError(f"N must be an integer >= 4, got {N!r}")
    couplings = list(couplings)
    if len(couplings) != N - 2:
        raise StructuralError(f"need {N - 2} couplings for N={N}, got {len(couplings)}")
    exact = _resolve_backend(backend, all(is_exact_number(c) for c in couplings),
                             "non-exact coupling")
    M = linalg.zeros((N, N), exact)
    for i, d in enumerate(full_diagonal(N)):
        M[i, i] = ExactScalar(d) if exact else float(d)
    for i, c in enumerate(couplings):
        v = ExactScalar.coerce(c) if exact else float(c)
        M[i, i + 2] = v
        M[i + 2, i] = -v
    return HamiltonianMatrix(M, "exact" if exact else "float")


def build_jordan(block_sizes: Sequence[int], eta=0, exact: bool | None = None) -> np.ndarray:
    """Block-diagonal sum of upper Jordan blocks J^(n)(eta)."""
    sizes = list(block_sizes)
    if not sizes or any(isinstance(s, bool) or not isinstance(s, int) or s < 1 for s in sizes):
        raise DomainError(f"block sizes must be positive integers, got {block_sizes!r}")
    if exact is None:
        exact = is_exact_number(eta)
    N = sum(sizes)
    J = linalg.zeros((N, N), exact)
    one = ExactScalar(1) if exact else 1.0
    e = ExactScalar.coerce(eta) if exact else float(eta)
    start = 0
    for s in sizes:
        for i in range(start, start + s):
            J[i, i] = e
            if i + 1 < start + s:
                J[i, i + 1] = one
        start += s
    return J


def split_by_coupling_graph(H) -> list[tuple[tuple[int, ...], HamiltonianMatrix]]:
    """Connected components of the graph of nonzero off-diagonal entries.

    Index sets are 0-based and sorted; components are ordered by their
    smallest index.
    """
    if not isinstance(H, HamiltonianMatrix):
        H = HamiltonianMatrix(H, "exact" if linalg.is_exact_array(np.asarray(H)) else "float")
    M = H.entries
    adj = np.array([[i != j and bool(M[i, j]) for j in range(H.n)] for i in range(H.n)])
    _, labels = connected_components(adj, directed=False)
    groups: dict[int, list[int]] = {}
    for i, lab in enumerate(labels):
        groups.setdefault(lab, []).append(i)
    out = []
    for idx in sorted(groups.values()):
        sub = M[np.ix_(idx, idx)]
        out.append((tuple(idx), HamiltonianMatrix(sub, H.backend)))
    return out


def add_antisymmetric_perturbation(H: HamiltonianMatrix, eps: float, seed: int
                                   ) -> HamiltonianMatrix:
    """H plus a seeded random antisymmetric matrix with entries in [-eps, eps]."""
    if H.is_exact:
        raise BackendError("perturbations are float-only; convert with as_float()")
    if eps < 0:
        raise DomainError(f"eps must be non-negative, got {eps}")
    rng = np.random.default_rng(seed)
    P = np.triu(rng.uniform(-eps, eps, size=(H.n, H.n)), k=1)
    return HamiltonianMatrix(H.to_float() + P - P.T, "float", H.provenance)


class ModelFamily:
    """H(t) = direct sum of c_j-scaled TAO blocks at coupling t, shifted by eta.

    At t = 0 the spectrum is eta + D(N); at t = 1 each block sits at its EP.
    The native coupling of this family is t itself.
    """

    native_name = "t"

    def __init__(self, decomposition: Decomposition, eta=0):
        self.decomposition = decomposition
        self.eta = _as_number(eta, "eta")

    @property
    def n(self) -> int:
        return self.decomposition.total_dimension

    def to_t(self, native):
        return native

    def to_native(self, t):
        return t

    def hamiltonian(self, t, backend: str = "auto", continuation: bool = False
                    ) -> HamiltonianMatrix:
        return build_from_decomposition(self.decomposition, self.eta, t, backend, continuation)

    def at_native(self, x, backend: str = "auto", continuation: bool = False):
        return self.hamiltonian(self.to_t(x), backend, continuation)

    def _blocks(self):
        dec = self.decomposition
        return [(b.length, b.scale, pos) for b, pos in zip(dec.components, dec.positions())]

    def hamiltonian_mp(self, t, dps: int):
        """H(t) as an mpmath matrix carried to ``dps`` digits (continuation allowed)."""
        with mpmath.workdps(dps):
            t = _mpf(t)
            M = mpmath.zeros(self.n, self.n)
            for n, c, pos in self._blocks():
                c = _mpf(c)
                for a, i in enumerate(pos):
                    M[i, i] = _mpf(self.eta) + c * (2 * a + 1 - n)
                for k in range(1, n):
                    b = c * t * mpmath.sqrt(k * (n - k))
                    M[pos[k - 1], pos[k]] = b
                    M[pos[k], pos[k - 1]] = -b
        return M

    def __repr__(self):
        return f"{type(self).__name__}({self.decomposition.label!r}, eta={self.eta})"


class TaoFamily(ModelFamily):
    """A single TAO block of size n and scale c; EP at t = 1."""

    def __init__(self, n: int, c=1, eta=0):
        super().__init__(Decomposition(n, (BoxedSymbol(n),)), eta)
        self.scale = _as_number(c, "c")

    def hamiltonian(self, t, backend: str = "auto", continuation: bool = False):
        return build_tao(self.n, self.scale, self.eta, t, backend, continuation)

    def _blocks(self):
        return [(self.n, self.scale, list(range(self.n)))]

    def __repr__(self):
        return f"TaoFamily({self.n}, c={self.scale}, eta={self.eta})"


def tao_family(n: int, c=1, eta=0) -> TaoFamily:
    return TaoFamily(n, c, eta)


class Toy7Family(ModelFamily):
    """The 7x7 toy, native coupling g = 2t, EP at g = 2 with eta = 7."""

    native_name = "g"

    def __init__(self):
        super().__init__(Decomposition.from_label("4x2,3x2", 7), 7)

    def to_t(self, g):
        return g / 2

    def to_native(self, t):
        return 2 * t

    def hamiltonian(self, t, backend: str = "auto", continuation: bool = True):
        # the toy is defined past its EP as well
        t = _as_number(t, "t")
        if float(t) > 1 and not continuation:
            raise DomainError(f"coupling t must lie in [0, 1], got {t}")
        return build_toy7(2 * t, backend)

    def __repr__(self):
        return "Toy7Family()"


__all__ = [
    "ModelFamily", "TaoFamily", "Toy7Family", "tao_family",
    "HamiltonianMatrix", "build_tao", "build_tao_ep", "build_toy7", "toy7_energies",
    "toy7_energies_kappa", "g_from_kappa", "build_from_decomposition",
    "build_pentadiagonal_special", "pentadiagonal_ep_couplings", "build_jordan",
    "split_by_coupling_graph", "add_antisymmetric_perturbation",
]
