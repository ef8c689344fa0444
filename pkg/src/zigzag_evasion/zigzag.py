"""Limits and first derived limits of zigzag diagrams.

A zigzag of length n has fibers A_0, ..., A_n and spans B_0, ..., B_{n-1}
with legs

    A_i --alpha_i--> B_i <--beta_i-- A_{i+1}.

The limit is the set of tuples (a_0, ..., a_n) with alpha_i(a_i) =
beta_i(a_{i+1}) for every i.  For groups the first derived limit is the
quotient of prod B_j by the twisted action of prod A_i.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np
from scipy.cluster.hierarchy import DisjointSet

from .errors import DomainError, IsoAssumptionViolated, ResourceBudgetExceeded
from .simplicial import cokernel_invariants, smith_normal_form

FINITE_BUDGET = 10_000


# --------------------------------------------------------------------------
# Zigzags of finite sets
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ZigzagSets:
    fibers: tuple
    spans: tuple
    alpha: tuple
    beta: tuple

    def __post_init__(self):
        object.__setattr__(self, "fibers", tuple(tuple(a) for a in self.fibers))
        object.__setattr__(self, "spans", tuple(tuple(b) for b in self.spans))
        object.__setattr__(self, "alpha", tuple(dict(m) for m in self.alpha))
        object.__setattr__(self, "beta", tuple(dict(m) for m in self.beta))
        n = len(self.spans)
        if len(self.fibers) != n + 1 or len(self.alpha) != n or len(self.beta) != n:
            raise DomainError("a zigzag with n spans needs n+1 fibers and n maps per side")
        for i in range(n):
            B = set(self.spans[i])
            for name, src, m in (("alpha", self.fibers[i], self.alpha[i]),
                                 ("beta", self.fibers[i + 1], self.beta[i])):
                if set(m) != set(src):
                    raise DomainError(f"{name}_{i} is not defined on exactly its source fiber")
                if any(v not in B for v in m.values()):
                    raise DomainError(f"{name}_{i} leaves span {i}")

    @property
    def length(self) -> int:
        return len(self.spans)

    def to_json(self) -> dict:
        return {"type": "sets", "fibers": [list(a) for a in self.fibers],
                "spans": [list(b) for b in self.spans],
                "alpha": [[[k, v] for k, v in m.items()] for m in self.alpha],
                "beta": [[[k, v] for k, v in m.items()] for m in self.beta]}

    @classmethod
    def from_json(cls, obj: dict) -> "ZigzagSets":
        def conv(m):
            return {_key(k): _key(v) for k, v in (m.items() if isinstance(m, dict) else m)}
        return cls([[_key(x) for x in a] for a in obj["fibers"]], [[_key(x) for x in b] for b in obj["spans"]],
                   [conv(m) for m in obj["alpha"]], [conv(m) for m in obj["beta"]])


def _key(x):
    return tuple(x) if isinstance(x, list) else x


@dataclass(frozen=True)
class LimResult:
    elements: tuple

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __bool__(self) -> bool:
        return bool(self.elements)


def _canonical(tuples) -> tuple:
    try:
        return tuple(sorted(tuples))
    except TypeError:
        return tuple(sorted(tuples, key=repr))


def lim_sets(Z: ZigzagSets) -> LimResult:
    """All compatible tuples, found by propagating fibers of beta left to right."""
    if any(len(a) == 0 for a in Z.fibers):
        return LimResult(())
    partial = [(a,) for a in Z.fibers[0]]
    for i in range(Z.length):
        pre: dict = {}
        for a in Z.fibers[i + 1]:
            pre.setdefault(Z.beta[i][a], []).append(a)
        partial = [p + (a,) for p in partial for a in pre.get(Z.alpha[i][p[-1]], ())]
        if not partial:
            return LimResult(())
    return LimResult(_canonical(partial))


class IsoSide(str, Enum):
    LEFT = "LEFT"
    RIGHT = "RIGHT"


@dataclass(frozen=True)
class Arrow:
    """A map between consecutive fibers; ``forward`` means A_i -> A_{i+1}."""

    forward: bool
    mapping: dict


@dataclass(frozen=True)
class ReducedChain:
    fibers: tuple
    arrows: tuple


def _is_bijection(m: dict, target) -> bool:
    return len(set(m.values())) == len(m) == len(set(target))


def reduce_spans(Z: ZigzagSets, iso_sides: Sequence) -> ReducedChain:
    """Collapse each span along its bijective leg.

    LEFT (alpha bijective) gives the arrow alpha^-1 . beta : A_{i+1} -> A_i,
    RIGHT (beta bijective) gives beta^-1 . alpha : A_i -> A_{i+1}.
    """
    if len(iso_sides) != Z.length:
        raise DomainError("need one iso side per span")
    arrows = []
    for i, side in enumerate(iso_sides):
        side = IsoSide(side)
        iso, other = (Z.alpha[i], Z.beta[i]) if side is IsoSide.LEFT else (Z.beta[i], Z.alpha[i])
        if not _is_bijection(iso, Z.spans[i]):
            leg = "alpha" if side is IsoSide.LEFT else "beta"
            raise IsoAssumptionViolated(f"{leg}_{i} is not a bijection onto span {i}", span=i)
        inv = {v: k for k, v in iso.items()}
        arrows.append(Arrow(side is IsoSide.RIGHT, {a: inv[b] for a, b in other.items()}))
    return ReducedChain(Z.fibers, tuple(arrows))


def lim_chain(chain: ReducedChain) -> LimResult:
    """Limit of a chain of single arrows between consecutive fibers."""
    if any(len(a) == 0 for a in chain.fibers):
        return LimResult(())
    partial = [(a,) for a in chain.fibers[0]]
    for i, arrow in enumerate(chain.arrows):
        if arrow.forward:
            partial = [p + (arrow.mapping[p[-1]],) for p in partial]
        else:
            pre: dict = {}
            for a, b in arrow.mapping.items():
                pre.setdefault(b, []).append(a)
            partial = [p + (a,) for p in partial for a in pre.get(p[-1], ())]
        if not partial:
            return LimResult(())
    return LimResult(_canonical(partial))


def chain_to_zigzag(chain: ReducedChain) -> ZigzagSets:
    """Re-express a chain as a zigzag whose iso legs are identities."""
    spans, alpha, beta = [], [], []
    for i, arrow in enumerate(chain.arrows):
        A0, A1 = chain.fibers[i], chain.fibers[i + 1]
        if arrow.forward:
            spans.append(A1)
            alpha.append(dict(arrow.mapping))
            beta.append({a: a for a in A1})
        else:
            spans.append(A0)
            alpha.append({a: a for a in A0})
            beta.append(dict(arrow.mapping))
    return ZigzagSets(chain.fibers, spans, alpha, beta)


# --------------------------------------------------------------------------
# Finitely generated abelian groups
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class AbGroup:
    """Z^generators modulo the column span of ``relations``."""

    generators: int
    relations: tuple = ()

    def __post_init__(self):
        R = np.asarray(self.relations, dtype=object).reshape(self.generators, -1) if len(self.relations) \
            else np.zeros((self.generators, 0), dtype=object)
        object.__setattr__(self, "relations", tuple(tuple(int(x) for x in row) for row in R.tolist()))

    @property
    def relation_matrix(self) -> np.ndarray:
        if not self.relations or not self.relations[0]:
            return np.zeros((self.generators, 0), dtype=object)
        return np.array(self.relations, dtype=object)

    @classmethod
    def free(cls, rank: int) -> "AbGroup":
        return cls(rank)

    @classmethod
    def cyclic(cls, order: int) -> "AbGroup":
        return cls(1, ((order,),))


@dataclass(frozen=True)
class AbelianInvariants:
    rank: int
    torsion: tuple

    @property
    def trivial(self) -> bool:
        return self.rank == 0 and not self.torsion

    @property
    def order(self) -> float:
        if self.rank:
            return float("inf")
        out = 1
        for d in self.torsion:
            out *= d
        return out

    def __str__(self) -> str:
        parts = [f"Z^{self.rank}"] if self.rank else []
        parts += [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) if parts else "0"


def _lattice_contains(R: np.ndarray, v: np.ndarray) -> bool:
    """Whether every column of v lies in the integer column span of R."""
    aug = np.concatenate([R, v], axis=1)
    if aug.shape[1] == 0:
        return True
    d1 = smith_normal_form(R) if R.shape[1] else ()
    d2 = smith_normal_form(aug)
    if len(d1) != len(d2):
        return False
    p1 = p2 = 1
    for a in d1:
        p1 *= a
    for b in d2:
        p2 *= b
    return p1 == p2


@dataclass(frozen=True)
class ZigzagAb:
    fibers: tuple
    spans: tuple
    alpha: tuple
    beta: tuple

    def __post_init__(self):
        object.__setattr__(self, "fibers", tuple(self.fibers))
        object.__setattr__(self, "spans", tuple(self.spans))
        mats = lambda ms: tuple(np.array(m, dtype=object).reshape(len(m), -1) if len(m) else np.zeros((0, 0), dtype=object)
                                for m in ms)
        object.__setattr__(self, "alpha", mats(self.alpha))
        object.__setattr__(self, "beta", mats(self.beta))
        n = len(self.spans)
        if len(self.fibers) != n + 1 or len(self.alpha) != n or len(self.beta) != n:
            raise DomainError("a zigzag with n spans needs n+1 fibers and n maps per side")
        for i in range(n):
            B = self.spans[i]
            for name, A, M in (("alpha", self.fibers[i], self.alpha[i]), ("beta", self.fibers[i + 1], self.beta[i])):
                if M.size != B.generators * A.generators or (M.size and M.shape[0] != B.generators):
                    raise DomainError(f"{name}_{i} has shape {M.shape}, expected {(B.generators, A.generators)}")
                M = M.reshape(B.generators, A.generators)
                RA = A.relation_matrix
                if RA.shape[1] and not _lattice_contains(B.relation_matrix, M.dot(RA)):
                    raise DomainError(f"{name}_{i} does not send relations to relations")
        object.__setattr__(self, "alpha", tuple(M.reshape(B.generators, A.generators) for M, A, B in
                                                zip(self.alpha, self.fibers, self.spans)))
        object.__setattr__(self, "beta", tuple(M.reshape(B.generators, A.generators) for M, A, B in
                                               zip(self.beta, self.fibers[1:], self.spans)))

    @property
    def length(self) -> int:
        return len(self.spans)

    def difference_matrix(self) -> np.ndarray:
        """Matrix of (a_i) -> (alpha_j(a_j) - beta_j(a_{j+1}))_j on generators."""
        rows = sum(B.generators for B in self.spans)
        cols = sum(A.generators for A in self.fibers)
        D = np.zeros((rows, cols), dtype=object)
        r0 = 0
        coff = np.cumsum([0] + [A.generators for A in self.fibers])
        for j, B in enumerate(self.spans):
            D[r0:r0 + B.generators, coff[j]:coff[j + 1]] += self.alpha[j]
            D[r0:r0 + B.generators, coff[j + 1]:coff[j + 2]] -= self.beta[j]
            r0 += B.generators
        return D

    def to_json(self) -> dict:
        grp = lambda G: {"generators": G.generators, "relations": [list(r) for r in G.relations]}
        return {"type": "abelian", "fibers": [grp(A) for A in self.fibers], "spans": [grp(B) for B in self.spans],
                "alpha": [M.tolist() for M in self.alpha], "beta": [M.tolist() for M in self.beta]}

    @classmethod
    def from_json(cls, obj: dict) -> "ZigzagAb":
        grp = lambda g: AbGroup(int(g["generators"]), tuple(tuple(r) for r in g.get("relations", [])))
        return cls([grp(g) for g in obj["fibers"]], [grp(g) for g in obj["spans"]], obj["alpha"], obj["beta"])


def _block_diag(blocks, rows) -> np.ndarray:
    cols = sum(b.shape[1] for b in blocks)
    out = np.zeros((rows, cols), dtype=object)
    r = c = 0
    for b in blocks:
        out[r:r + b.shape[0], c:c + b.shape[1]] = b
        r += b.shape[0]
        c += b.shape[1]
    return out


def r1lim_ab(Z: ZigzagAb, gamma=None) -> AbelianInvariants:
    """First derived limit: cokernel of the difference map modulo span relations.

    ``gamma`` names the basepoint component the diagram was built over; it
    is carried for bookkeeping only.
    """
    rows = sum(B.generators for B in Z.spans)
    RB = _block_diag([B.relation_matrix for B in Z.spans], rows)
    M = np.concatenate([Z.difference_matrix(), RB], axis=1)
    free, torsion = cokernel_invariants(M, rows)
    return AbelianInvariants(free, torsion)


# --------------------------------------------------------------------------
# Finite groups
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class FiniteGroup:
    """Group on elements 0..n-1 given by its multiplication table; 0 need not be the identity."""

    table: tuple

    def __post_init__(self):
        T = tuple(tuple(int(x) for x in row) for row in self.table)
        object.__setattr__(self, "table", T)
        n = len(T)
        if n == 0 or any(len(row) != n for row in T):
            raise DomainError("multiplication table must be square and nonempty")
        if any(sorted(row) != list(range(n)) for row in T):
            raise DomainError("multiplication table rows must be permutations")
        ids = [e for e in range(n) if all(T[e][x] == x for x in range(n))]
        if not ids:
            raise DomainError("multiplication table has no identity")
        object.__setattr__(self, "_identity", ids[0])
        inv = [next(y for y in range(n) if T[x][y] == ids[0]) for x in range(n)]
        object.__setattr__(self, "_inverse", tuple(inv))

    @property
    def order(self) -> int:
        return len(self.table)

    @property
    def identity(self) -> int:
        return self._identity

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self._inverse[a]

    @classmethod
    def trivial(cls) -> "FiniteGroup":
        return cls(((0,),))

    @classmethod
    def cyclic(cls, n: int) -> "FiniteGroup":
        return cls(tuple(tuple((a + b) % n for b in range(n)) for a in range(n)))

    @classmethod
    def product(cls, G: "FiniteGroup", H: "FiniteGroup") -> "FiniteGroup":
        m = H.order
        return cls(tuple(tuple(G.mul(a // m, b // m) * m + H.mul(a % m, b % m)
                               for b in range(G.order * m)) for a in range(G.order * m)))

    @classmethod
    def symmetric3(cls) -> "FiniteGroup":
        perms = sorted(itertools.permutations(range(3)))
        index = {p: i for i, p in enumerate(perms)}
        return cls(tuple(tuple(index[tuple(p[q[k]] for k in range(3))] for q in perms) for p in perms))


def check_homomorphism(f: Sequence[int], G: FiniteGroup, H: FiniteGroup, name: str = "map") -> None:
    if len(f) != G.order or any(not 0 <= y < H.order for y in f):
        raise DomainError(f"{name} is not a function between the given groups")
    for a in range(G.order):
        for b in range(G.order):
            if f[G.mul(a, b)] != H.mul(f[a], f[b]):
                raise DomainError(f"{name} is not a homomorphism")


@dataclass(frozen=True)
class OrbitResult:
    count: int
    representatives: tuple


def r1lim_finite(fibers: Sequence[FiniteGroup], spans: Sequence[FiniteGroup], alpha: Sequence, beta: Sequence,
                 gamma=None, budget: int = FINITE_BUDGET) -> OrbitResult:
    """Orbits of prod A_i on prod B_j under (g).(h)_j = alpha_j(g_j) h_j beta_j(g_{j+1})^-1."""
    n = len(spans)
    if len(fibers) != n + 1 or len(alpha) != n or len(beta) != n:
        raise DomainError("a zigzag with n spans needs n+1 fibers and n maps per side")
    for j in range(n):
        check_homomorphism(alpha[j], fibers[j], spans[j], f"alpha_{j}")
        check_homomorphism(beta[j], fibers[j + 1], spans[j], f"beta_{j}")
    sizes = [B.order for B in spans]
    total = 1
    for s in sizes:
        total *= s
    if total > budget:
        raise ResourceBudgetExceeded(f"product of span groups has {total} elements (budget {budget})")
    shape = tuple(sizes)
    ds = DisjointSet(range(total))
    states = list(itertools.product(*[range(s) for s in sizes])) if n else [()]
    encode = (lambda h: int(np.ravel_multi_index(h, shape))) if n else (lambda h: 0)
    for i, A in enumerate(fibers):
        for g in range(A.order):
            if g == A.identity:
                continue
            left = alpha[i][g] if i < n else None
            right = spans[i - 1].inv(beta[i - 1][g]) if i > 0 else None
            for h in states:
                k = list(h)
                if left is not None:
                    k[i] = spans[i].mul(left, k[i])
                if right is not None:
                    k[i - 1] = spans[i - 1].mul(k[i - 1], right)
                ds.merge(encode(h), encode(tuple(k)))
    reps = sorted(min(s) for s in ds.subsets())
    return OrbitResult(len(reps), tuple(states[r] for r in reps))


def finite_zigzag_from_json(obj: dict) -> tuple:
    grp = lambda g: FiniteGroup(tuple(tuple(r) for r in g["table"]))
    return ([grp(g) for g in obj["fibers"]], [grp(g) for g in obj["spans"]],
            [list(m) for m in obj["alpha"]], [list(m) for m in obj["beta"]])
