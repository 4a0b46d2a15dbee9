"""Rings used by the Morita verifications.

Every ring here follows one small duck-typed protocol: ``zero``, ``add``,
``neg``, ``sub``, ``mul`` and ``sample(rng)``, with elements compared by
``==``.  Finite rings additionally expose ``elements()``.  ``Field`` from
:mod:`lpa.fields` already satisfies the protocol.

``FiniteRing`` is a finite-dimensional F_p-algebra stored by structure
constants, so all-pairs products vectorize through numpy.
"""

from __future__ import annotations

import itertools
import random
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .algebra import LeavittPathAlgebra, Monomial, basis, random_element
from .fields import Field
from .graph import Graph

MAX_ENUMERABLE = 2**16


class CarrierTooLarge(ValueError):
    pass


def sample(ring, rng: random.Random):
    """Random element of any ring in the protocol (fields included)."""
    if isinstance(ring, Field):
        if ring.p is None:
            return ring(rng.randint(-3, 3))
        return rng.randrange(ring.p)
    return ring.sample(rng)


# -- linear algebra over F_p -------------------------------------------------------

def rref(A, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form modulo p and the pivot columns."""
    R = np.array(A, dtype=np.int64) % p
    rows, cols = R.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(R[r:, c])[0]
        if not len(nz):
            continue
        k = r + nz[0]
        R[[r, k]] = R[[k, r]]
        R[r] = R[r] * pow(int(R[r, c]), -1, p) % p
        others = np.nonzero(R[:, c])[0]
        for i in others:
            if i != r:
                R[i] = (R[i] - R[i, c] * R[r]) % p
        pivots.append(c)
        r += 1
    return R, pivots


def rank(A, p: int) -> int:
    A = np.asarray(A)
    if A.size == 0:
        return 0
    return len(rref(A, p)[1])


def solve(A, b, p: int) -> np.ndarray | None:
    """Some x with A x = b (mod p), or None."""
    A = np.asarray(A, dtype=np.int64)
    aug = np.concatenate([A, np.asarray(b, dtype=np.int64).reshape(-1, 1)], axis=1)
    R, piv = rref(aug, p)
    if A.shape[1] in piv:
        return None
    x = np.zeros(A.shape[1], dtype=np.int64)
    for i, c in enumerate(piv):
        x[c] = R[i, -1]
    return x


def in_span(basis_rows, vectors, p: int) -> bool:
    """Whether every row of ``vectors`` lies in the row space of ``basis_rows``."""
    B = np.asarray(basis_rows, dtype=np.int64).reshape(-1, np.shape(vectors)[-1])
    V = np.asarray(vectors, dtype=np.int64)
    return rank(np.concatenate([B, V]), p) == rank(B, p)


# -- matrices over any ring ----------------------------------------------------------

def matmul(base, A, B):
    """Product of rectangular matrices (tuples of row tuples) over ``base``."""
    inner = len(B)
    cols = len(B[0]) if inner else 0
    out = []
    for row in A:
        new = []
        for j in range(cols):
            acc = base.zero
            for k in range(inner):
                acc = base.add(acc, base.mul(row[k], B[k][j]))
            new.append(acc)
        out.append(tuple(new))
    return tuple(out)


def matadd(base, A, B):
    return tuple(tuple(base.add(a, b) for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


class MatrixRing:
    """M_n(base) with elements stored as tuples of row tuples."""

    def __init__(self, base, n: int):
        self.base = base
        self.n = n

    def __repr__(self):
        return f"M_{self.n}({self.base})"

    @cached_property
    def zero(self):
        z = self.base.zero
        return tuple((z,) * self.n for _ in range(self.n))

    @cached_property
    def one(self):
        one = self.base.one if hasattr(self.base, "one") else self.base.unit()
        return self.diag([one] * self.n)

    def diag(self, values: Sequence):
        z = self.base.zero
        return tuple(tuple(values[i] if i == j else z for j in range(self.n))
                     for i in range(self.n))

    def unit(self, i: int, j: int, value=None):
        """Matrix unit E_ij (0-based), optionally scaled by ``value``."""
        if value is None:
            value = self.base.one if hasattr(self.base, "one") else self.base.unit()
        rows = [list(r) for r in self.zero]
        rows[i][j] = value
        return tuple(tuple(r) for r in rows)

    def add(self, A, B):
        return matadd(self.base, A, B)

    def neg(self, A):
        return tuple(tuple(self.base.neg(a) for a in row) for row in A)

    def sub(self, A, B):
        return self.add(A, self.neg(B))

    def mul(self, A, B):
        return matmul(self.base, A, B)

    def elements(self):
        vals = list(self.base.elements())
        for flat in itertools.product(vals, repeat=self.n * self.n):
            yield tuple(tuple(flat[i * self.n:(i + 1) * self.n]) for i in range(self.n))

    def sample(self, rng: random.Random):
        return tuple(tuple(sample(self.base, rng) for _ in range(self.n)) for _ in range(self.n))


class LeavittRing:
    """Ring-protocol adapter for a Leavitt path algebra."""

    def __init__(self, algebra: LeavittPathAlgebra, terms: int = 3, max_len: int = 2):
        self.algebra = algebra
        self.terms = terms
        self.max_len = max_len

    def __repr__(self):
        return f"LeavittRing({self.algebra!r})"

    @cached_property
    def zero(self):
        return self.algebra.zero()

    def unit(self):
        return self.algebra.unit()

    def add(self, x, y):
        return x + y

    def neg(self, x):
        return -x

    def sub(self, x, y):
        return x - y

    def mul(self, x, y):
        return x * y

    def sample(self, rng: random.Random):
        return random_element(self.algebra, rng, self.terms, self.max_len)


# -- finite F_p-algebras by structure constants -------------------------------------

class FiniteRing:
    """A finite-dimensional algebra over F_p given by structure constants.

    ``structure[a, b, c]`` is the coefficient of basis vector c in the
    product of basis vectors a and b.  ``make`` turns a coordinate vector
    into the user-facing element object and ``coords`` goes back.
    """

    def __init__(self, p: int, structure: np.ndarray, make: Callable, coords: Callable,
                 labels: Sequence[str], name: str = "R"):
        if p >= 2**20:
            raise ValueError("FiniteRing needs p < 2^20 for exact int64 arithmetic")
        self.p = p
        self.field = Field(p)
        self.structure = np.asarray(structure, dtype=np.int64) % p
        self.dim = self.structure.shape[0]
        self._make = make
        self._coords = coords
        self.labels = tuple(labels)
        self.name = name
        self.weights = p ** np.arange(self.dim - 1, -1, -1, dtype=np.int64)

    def __repr__(self):
        return f"FiniteRing({self.name}, p={self.p}, dim={self.dim})"

    @property
    def size(self) -> int:
        return self.p ** self.dim

    # constructors

    @classmethod
    def matrices(cls, n: int, p: int) -> "FiniteRing":
        d = n * n
        C = np.zeros((d, d, d), dtype=np.int64)
        for i, j, l in itertools.product(range(n), repeat=3):
            C[i * n + j, j * n + l, i * n + l] = 1

        def make(v):
            v = [int(x) for x in v]
            return tuple(tuple(v[i * n:(i + 1) * n]) for i in range(n))

        def coords(x):
            return np.array([a for row in x for a in row], dtype=np.int64)

        labels = [f"E{i + 1}{j + 1}" for i in range(n) for j in range(n)]
        ring = cls(p, C, make, coords, labels, f"M_{n}(F_{p})")
        ring.matrix_size = n
        return ring

    @classmethod
    def leavitt(cls, g: Graph, p: int) -> "FiniteRing":
        """L_{F_p}(E) for a finite acyclic graph, on its normal-form basis."""
        alg = LeavittPathAlgebra(g, Field(p))
        mons = basis(alg)
        index = {m: i for i, m in enumerate(mons)}
        d = len(mons)
        C = np.zeros((d, d, d), dtype=np.int64)
        for a, ma in enumerate(mons):
            for b, mb in enumerate(mons):
                prod = alg.multiply(alg.element({ma: 1}), alg.element({mb: 1}))
                for m, c in prod.terms.items():
                    C[a, b, index[m]] = c

        def make(v):
            return alg.element({mons[i]: int(c) for i, c in enumerate(v) if c})

        def coords(x):
            out = np.zeros(d, dtype=np.int64)
            for m, c in x.normal_form().terms.items():
                out[index[m]] = int(c) % p
            return out

        ring = cls(p, C, make, coords, [Monomial.text(m) for m in mons], f"L_F{p}({g.name or 'E'})")
        ring.algebra = alg
        return ring

    # vectors

    def vec(self, x) -> np.ndarray:
        return np.asarray(self._coords(x), dtype=np.int64) % self.p

    def elem(self, v):
        return self._make(np.asarray(v, dtype=np.int64) % self.p)

    def basis_vectors(self) -> np.ndarray:
        return np.eye(self.dim, dtype=np.int64)

    def mulv(self, X, Y) -> np.ndarray:
        """Products of matching rows of X and Y (broadcasting over leading axes)."""
        X = np.asarray(X, dtype=np.int64)
        Y = np.asarray(Y, dtype=np.int64)
        return np.einsum("...a,...b,abc->...c", X, Y, self.structure) % self.p

    def outer(self, X, Y) -> np.ndarray:
        """All pairwise products: result[i, j] = X[i] * Y[j]."""
        return np.einsum("ia,jb,abc->ijc", np.asarray(X), np.asarray(Y), self.structure) % self.p

    def encode(self, V) -> np.ndarray:
        return np.asarray(V, dtype=np.int64) @ self.weights

    def all_vectors(self) -> np.ndarray:
        if self.size > MAX_ENUMERABLE:
            raise CarrierTooLarge(f"{self.name} has {self.size} elements (limit {MAX_ENUMERABLE})")
        return span_vectors(np.eye(self.dim, dtype=np.int64), self.p)

    # ring protocol

    @cached_property
    def zero(self):
        return self.elem(np.zeros(self.dim, dtype=np.int64))

    @cached_property
    def one(self):
        """Multiplicative identity, or None if the algebra is not unital."""
        A = self.structure.transpose(2, 1, 0).reshape(self.dim * self.dim, self.dim)
        # solve sum_a x_a C[a, b, c] = delta_bc together with the right-hand version
        Bm = self.structure.transpose(2, 0, 1).reshape(self.dim * self.dim, self.dim)
        target = np.eye(self.dim, dtype=np.int64).reshape(-1)
        x = solve(np.concatenate([A, Bm]), np.concatenate([target, target]), self.p)
        return None if x is None else self.elem(x)

    def add(self, x, y):
        return self.elem(self.vec(x) + self.vec(y))

    def neg(self, x):
        return self.elem(-self.vec(x))

    def sub(self, x, y):
        return self.elem(self.vec(x) - self.vec(y))

    def mul(self, x, y):
        return self.elem(self.mulv(self.vec(x), self.vec(y)))

    def elements(self):
        for v in self.all_vectors():
            yield self.elem(v)

    def sample(self, rng: random.Random):
        return self.elem([rng.randrange(self.p) for _ in range(self.dim)])

    # structure

    def is_associative(self) -> bool:
        """Exact: associativity of a bilinear product holds iff it holds on basis triples."""
        C = self.structure
        left = np.einsum("abx,xcd->abcd", C, C) % self.p
        right = np.einsum("bcx,axd->abcd", C, C) % self.p
        return bool(np.array_equal(left, right))

    def idempotents(self) -> list:
        V = self.all_vectors()
        sq = self.mulv(V, V)
        return [self.elem(v) for v in V[np.all(sq == V, axis=1)]]


def span_vectors(rows, p: int) -> np.ndarray:
    """All F_p-combinations of the given rows, in lexicographic coefficient order."""
    rows = np.asarray(rows, dtype=np.int64)
    k = rows.shape[0]
    if p ** k > MAX_ENUMERABLE:
        raise CarrierTooLarge(f"span of {k} vectors over F_{p} is too large to enumerate")
    coeffs = np.array(list(itertools.product(range(p), repeat=k)), dtype=np.int64).reshape(p ** k, k)
    return coeffs @ rows % p
