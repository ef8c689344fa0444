"""Finite simplicial complexes and their homology over GF(2) or the rationals."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np
from scipy.cluster.hierarchy import DisjointSet

from .errors import DomainError, ResourceBudgetExceeded
from .geometry import Field

MAX_SIMPLICES = 2000


# --------------------------------------------------------------------------
# Linear algebra over a field
# --------------------------------------------------------------------------


def as_field_array(M, field: Field) -> np.ndarray:
    """Copy ``M`` into the array representation used for ``field``."""
    A = np.asarray(M)
    if field is Field.GF2:
        if A.dtype == object:
            A = np.vectorize(lambda x: int(x) % 2, otypes=[np.uint8])(A) if A.size else A.astype(np.uint8)
        return (np.asarray(A, dtype=np.int64) % 2).astype(np.uint8)
    out = np.empty(A.shape, dtype=object)
    flat = out.reshape(-1)
    for i, x in enumerate(A.reshape(-1)):
        flat[i] = x if isinstance(x, Fraction) else Fraction(int(x)) if float(x).is_integer() else Fraction(x)
    return out


def zeros(shape, field: Field) -> np.ndarray:
    if field is Field.GF2:
        return np.zeros(shape, dtype=np.uint8)
    out = np.empty(shape, dtype=object)
    out.fill(Fraction(0))
    return out


def identity(n: int, field: Field) -> np.ndarray:
    out = zeros((n, n), field)
    for i in range(n):
        out[i, i] = 1 if field is Field.GF2 else Fraction(1)
    return out


def matmul(A: np.ndarray, B: np.ndarray, field: Field) -> np.ndarray:
    if field is Field.GF2:
        return ((A.astype(np.int64) @ B.astype(np.int64)) % 2).astype(np.uint8)
    if A.shape[1] == 0:
        return zeros((A.shape[0], B.shape[1]), field)
    return A.dot(B)


def rref(M: np.ndarray, field: Field) -> tuple:
    """Reduced row echelon form and the list of pivot columns."""
    A = as_field_array(M, field).copy()
    rows, cols = A.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(A[r:, c] != 0)[0]
        if not len(nz):
            continue
        p = r + int(nz[0])
        if p != r:
            A[[r, p]] = A[[p, r]]
        if field is Field.RATIONAL:
            A[r] = A[r] / A[r, c]
        col = A[:, c].copy()
        col[r] = 0
        hit = np.nonzero(col != 0)[0]
        if len(hit):
            if field is Field.GF2:
                A[hit] ^= A[r]
            else:
                A[hit] = A[hit] - np.outer(col[hit], A[r])
        pivots.append(c)
        r += 1
    return A, pivots


def rank(M: np.ndarray, field: Field) -> int:
    M = np.asarray(M)
    if M.size == 0:
        return 0
    return len(rref(M, field)[1])


def kernel_basis(M: np.ndarray, field: Field) -> np.ndarray:
    """Columns spanning the null space, one per free column of the rref."""
    rows, cols = M.shape
    if rows == 0:
        return identity(cols, field)
    R, pivots = rref(M, field)
    free = [c for c in range(cols) if c not in set(pivots)]
    K = zeros((cols, len(free)), field)
    for j, f in enumerate(free):
        K[f, j] = 1 if field is Field.GF2 else Fraction(1)
        for i, p in enumerate(pivots):
            K[p, j] = R[i, f] if field is Field.GF2 else -R[i, f]
    return K


def solve(A: np.ndarray, b: np.ndarray, field: Field) -> np.ndarray | None:
    """A solution of A x = b (columns of b solved jointly), or None."""
    n = A.shape[1]
    aug = np.concatenate([as_field_array(A, field), as_field_array(b, field)], axis=1)
    R, pivots = rref(aug, field)
    if any(p >= n for p in pivots):
        return None
    x = zeros((n, b.shape[1]), field)
    for i, p in enumerate(pivots):
        x[p] = R[i, n:]
    return x


# --------------------------------------------------------------------------
# Complexes
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SimplicialComplex:
    """Downward-closed set of simplices stored per dimension in sorted order."""

    vertices: tuple
    simplices: tuple  # simplices[k] = sorted tuple of k-simplices (sorted vertex tuples)

    def __post_init__(self):
        object.__setattr__(self, "_index", [{s: i for i, s in enumerate(level)} for level in self.simplices])

    @property
    def dimension(self) -> int:
        return len(self.simplices) - 1

    def __len__(self) -> int:
        return sum(len(level) for level in self.simplices)

    def __contains__(self, simplex) -> bool:
        s = tuple(sorted(simplex))
        k = len(s) - 1
        return 0 <= k <= self.dimension and s in self._index[k]

    def __eq__(self, other) -> bool:
        return isinstance(other, SimplicialComplex) and self.simplices == other.simplices

    def __hash__(self) -> int:
        return hash(self.simplices)

    def __repr__(self) -> str:
        counts = ", ".join(str(len(level)) for level in self.simplices)
        return f"SimplicialComplex(f=({counts}))"

    def level(self, k: int) -> tuple:
        return self.simplices[k] if 0 <= k <= self.dimension else ()

    def index(self, k: int) -> dict:
        return self._index[k] if 0 <= k <= self.dimension else {}

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * len(level) for k, level in enumerate(self.simplices))

    def boundary_matrix(self, k: int, field: Field) -> np.ndarray:
        """Matrix of the boundary map from k-chains to (k-1)-chains."""
        rows, cols = self.level(k - 1), self.level(k)
        D = zeros((len(rows), len(cols)), field)
        if k <= 0:
            return D
        idx = self.index(k - 1)
        for j, s in enumerate(cols):
            for i in range(len(s)):
                face = s[:i] + s[i + 1:]
                if field is Field.GF2:
                    D[idx[face], j] = 1
                else:
                    D[idx[face], j] = Fraction((-1) ** i)
        return D

    def maximal_simplices(self) -> list:
        out = []
        for k in range(self.dimension, -1, -1):
            for s in self.simplices[k]:
                if not any(set(s) < set(t) for t in out):
                    out.append(s)
        return sorted(out)

    def is_subcomplex_of(self, other: "SimplicialComplex") -> bool:
        return all(s in other for level in self.simplices for s in level)

    def to_json(self) -> list:
        return [list(s) for s in self.maximal_simplices()]


def build_complex(maximal_simplices: Iterable, vertices: Iterable = ()) -> SimplicialComplex:
    """Downward closure of the given simplices (plus any extra isolated vertices)."""
    faces: set = set()
    for top in maximal_simplices:
        top = tuple(sorted(set(top)))
        for k in range(1, len(top) + 1):
            faces.update(itertools.combinations(top, k))
    faces.update((v,) for v in vertices)
    if not faces:
        return SimplicialComplex((), ())
    dim = max(len(s) for s in faces) - 1
    levels = tuple(tuple(sorted(s for s in faces if len(s) == k + 1)) for k in range(dim + 1))
    return SimplicialComplex(tuple(v for (v,) in levels[0]), levels)


@dataclass(frozen=True)
class Partition:
    """Blocks of a partition, each keyed by its minimal element."""

    representative: dict
    blocks: tuple

    def __len__(self) -> int:
        return len(self.blocks)


def components(K: SimplicialComplex) -> Partition:
    """Connected components of the 1-skeleton; representatives are minimal vertices."""
    ds = DisjointSet(K.vertices)
    for a, b in K.level(1):
        ds.merge(a, b)
    blocks = sorted((tuple(sorted(b)) for b in ds.subsets()), key=lambda b: b[0])
    rep = {v: b[0] for b in blocks for v in b}
    return Partition(rep, tuple(blocks))


# --------------------------------------------------------------------------
# Homology
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class HomologyResult:
    """Degree-k homology of a complex with an explicit basis of cycle representatives.

    ``cycle_basis`` holds one column per class, as coefficient vectors over
    the k-simplices of ``complex``.  ``boundary_basis`` spans the boundaries.
    """

    complex: SimplicialComplex
    degree: int
    field: Field
    betti: int
    cycle_basis: np.ndarray
    boundary_basis: np.ndarray

    def chains(self) -> list:
        return [self.cycle_basis[:, j] for j in range(self.betti)]


def betti(K: SimplicialComplex, k: int, field: Field = Field.GF2) -> HomologyResult:
    """Homology in degree k: betti number and deterministic cycle representatives.

    Boundary columns are placed before the kernel basis and the combined
    matrix is reduced left to right, so representatives are the earliest
    kernel vectors independent of the boundaries.
    """
    field = Field(field)
    if k < 0:
        raise DomainError(f"homology degree must be nonnegative, got {k}")
    if len(K) > MAX_SIMPLICES:
        raise ResourceBudgetExceeded(f"complex has {len(K)} simplices (limit {MAX_SIMPLICES})")
    n = len(K.level(k))
    if n == 0:
        return HomologyResult(K, k, field, 0, zeros((0, 0), field), zeros((0, 0), field))
    Z = kernel_basis(K.boundary_matrix(k, field), field)
    B = K.boundary_matrix(k + 1, field)
    if B.shape[1]:
        _, bpiv = rref(B, field)
        B = B[:, bpiv]
    stacked = np.concatenate([B, Z], axis=1)
    _, piv = rref(stacked, field)
    nb = B.shape[1]
    H = stacked[:, [p for p in piv if p >= nb]]
    return HomologyResult(K, k, field, H.shape[1], H, B)


@dataclass(frozen=True, eq=False)
class InducedMap:
    """Matrix of an inclusion-induced map, target basis by source basis."""

    source: HomologyResult
    target: HomologyResult
    matrix: np.ndarray

    def is_isomorphism(self) -> bool:
        m = self.matrix
        return m.shape[0] == m.shape[1] and rank(m, self.source.field) == m.shape[0]

    def apply(self, vector: np.ndarray) -> np.ndarray:
        return matmul(self.matrix, vector, self.source.field)


def chain_coordinates(target: HomologyResult, chains: np.ndarray) -> np.ndarray:
    """Homology-basis coordinates of cycles given as columns over target's k-simplices."""
    field = target.field
    A = np.concatenate([target.boundary_basis, target.cycle_basis], axis=1)
    if chains.shape[1] == 0:
        return zeros((target.betti, 0), field)
    if A.shape[1] == 0:
        if np.any(chains != 0):
            raise DomainError("chain is not a cycle of the target")
        return zeros((0, chains.shape[1]), field)
    x = solve(A, chains, field)
    if x is None:
        raise DomainError("chain is not a cycle of the target")
    return x[target.boundary_basis.shape[1]:]


def push_chains(source: SimplicialComplex, target: SimplicialComplex, k: int,
                chains: np.ndarray, field: Field) -> np.ndarray:
    """Re-index k-chains of ``source`` over the k-simplices of ``target``."""
    tidx = target.index(k)
    out = zeros((len(target.level(k)), chains.shape[1]), field)
    for i, s in enumerate(source.level(k)):
        if s not in tidx:
            raise DomainError(f"simplex {s} of the source is missing from the target")
        out[tidx[s]] = chains[i]
    return out


def induced_map(K: SimplicialComplex, L: SimplicialComplex, k: int, field: Field = Field.GF2,
                source: HomologyResult | None = None, target: HomologyResult | None = None) -> InducedMap:
    """Map on degree-k homology induced by the inclusion K ⊆ L."""
    field = Field(field)
    for level in K.simplices:
        for s in level:
            if s not in L:
                raise DomainError(f"simplex {s} is not in the target complex")
    hk = source if source is not None else betti(K, k, field)
    hl = target if target is not None else betti(L, k, field)
    pushed = push_chains(K, L, k, hk.cycle_basis, field) if hk.betti else zeros((len(L.level(k)), 0), field)
    return InducedMap(hk, hl, chain_coordinates(hl, pushed))


# --------------------------------------------------------------------------
# Smith normal form over the integers
# --------------------------------------------------------------------------


def smith_normal_form(M) -> tuple:
    """Nonzero elementary divisors d1 | d2 | ... of an integer matrix."""
    A = [[int(x) for x in row] for row in np.asarray(M, dtype=object).tolist()] if np.size(M) else []
    rows = len(A)
    cols = len(A[0]) if rows else 0
    divisors = []
    t = 0
    while t < min(rows, cols):
        entries = [(abs(A[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if A[i][j]]
        if not entries:
            break
        _, i, j = min(entries)
        A[t], A[i] = A[i], A[t]
        for row in A:
            row[t], row[j] = row[j], row[t]
        while True:
            done = True
            p = A[t][t]
            for i in range(t + 1, rows):
                q = A[i][t] // p
                if q:
                    A[i] = [a - q * b for a, b in zip(A[i], A[t])]
                if A[i][t]:
                    done = False
            for j in range(t + 1, cols):
                q = A[t][j] // p
                if q:
                    for row in A:
                        row[j] -= q * row[t]
                if A[t][j]:
                    done = False
            if not done:
                entries = [(abs(A[i][t]), i, t) for i in range(t, rows) if A[i][t]]
                entries += [(abs(A[t][j]), t, j) for j in range(t, cols) if A[t][j]]
                _, i, j = min(entries)
                A[t], A[i] = A[i], A[t]
                for row in A:
                    row[t], row[j] = row[j], row[t]
                continue
            bad = [(i, j) for i in range(t + 1, rows) for j in range(t + 1, cols) if A[i][j] % p]
            if bad:
                i, _ = bad[0]
                A[t] = [a + b for a, b in zip(A[t], A[i])]
                continue
            break
        divisors.append(abs(A[t][t]))
        t += 1
    return tuple(divisors)


def cokernel_invariants(M, n_rows: int | None = None) -> tuple:
    """(free rank, torsion divisors > 1) of Z^rows / image(M)."""
    M = np.asarray(M, dtype=object)
    rows = M.shape[0] if n_rows is None else n_rows
    divs = smith_normal_form(M) if M.size else ()
    return rows - len(divs), tuple(d for d in divs if d > 1)
