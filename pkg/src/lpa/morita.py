"""Constructive checks of the ring-theoretic Morita machinery.

Local rings at elements, Morita contexts (corner and matrix realizations),
the explicit isomorphism between a corner eRe and a corner of a matrix ring
over S, its compatibility with the order e <= f, and the ladder of FM
windows for a sigma-unital ring.  Everything returns a :class:`Report`;
failures carry the offending elements verbatim.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .algebra import LeavittPathAlgebra, random_element
from .fields import QQ, Field
from .graph import Graph
from .report import Report
from .rings import (
    MAX_ENUMERABLE, CarrierTooLarge, FiniteRing, LeavittRing, MatrixRing,
    in_span, matmul, rank, rref, sample, solve, span_vectors,
)
from .tails import desingularize, truncate

__all__ = [
    "regular_elements", "LocalRing", "local_ring_at", "isolocales_iso", "RingIso",
    "MoritaContext", "corner_context", "matrix_context", "verify_context",
    "matrix_decomposition", "vertex_decomposition", "equivlocal_construct",
    "EquivLocal", "desigualdad_check", "SigmaUnitLadder", "FMTruncation",
    "escalera_window", "context_from_desingularization",
]


def _fmt(x) -> str:
    if isinstance(x, tuple):
        return "[" + "; ".join(" ".join(_fmt(a) for a in row) if isinstance(row, tuple) else _fmt(row)
                               for row in x) + "]"
    return str(x)


# -- regular elements and local rings ---------------------------------------------------

def regular_elements(r: FiniteRing) -> list[tuple]:
    """All von Neumann regular a with a witness b such that aba = a and bab = b."""
    if r.size > MAX_ENUMERABLE:
        raise CarrierTooLarge(f"{r.name} has {r.size} elements; regular search needs <= {MAX_ENUMERABLE}")
    V = r.all_vectors()
    out = []
    for a in V:
        aV = r.mulv(a, V)                      # a x for every x
        axa = r.mulv(aV, a)
        hits = np.nonzero(np.all(axa == a, axis=1))[0]
        if not len(hits):
            continue
        b0 = V[hits[0]]
        b = r.mulv(r.mulv(b0, a), b0)          # normalize so that bab = b as well
        out.append((r.elem(a), r.elem(b)))
    return out


class LocalRing:
    """The local ring R_a: carrier aRa with product axa * aya = axaya."""

    def __init__(self, ambient: FiniteRing, a):
        self.ambient = ambient
        self.a = a
        R, av = ambient, ambient.vec(a)
        images = R.mulv(R.mulv(av, R.basis_vectors()), av)
        # greedy basis of the carrier, remembering a preimage for each vector
        basis, pre = [], []
        for b in range(R.dim):
            cand = basis + [images[b]]
            if rank(np.array(cand), R.p) == len(cand):
                basis.append(images[b])
                pre.append(R.basis_vectors()[b])
        self.rank = len(basis)
        self._basis = np.array(basis, dtype=np.int64).reshape(-1, R.dim)
        self._pre = np.array(pre, dtype=np.int64).reshape(-1, R.dim)

    @property
    def size(self) -> int:
        return self.ambient.p ** self.rank

    def vectors(self) -> np.ndarray:
        """Carrier as coordinate vectors of the ambient ring."""
        return span_vectors(self._basis, self.ambient.p)

    def preimages(self) -> np.ndarray:
        """Row k is some x with a x a equal to row k of :meth:`vectors`."""
        return span_vectors(self._pre, self.ambient.p)

    def elements(self) -> list:
        return [self.ambient.elem(v) for v in self.vectors()]

    def preimage(self, q):
        """Some x in the ambient ring with a x a = q."""
        R = self.ambient
        lam = solve(self._basis.T, R.vec(q), R.p) if self.rank else None
        if lam is None:
            if not R.vec(q).any():
                return R.zero
            raise ValueError(f"{_fmt(q)} is not in the carrier of R_a")
        return R.elem(lam @ self._pre)

    def contains(self, q) -> bool:
        R = self.ambient
        return in_span(self._basis, R.vec(q)[None, :], R.p)

    def product(self, x, y):
        R = self.ambient
        return R.mul(R.mul(x, self.preimage(y)), self.a)

    def table(self) -> np.ndarray:
        """Product of every pair of carrier vectors, shape (K, K, dim)."""
        R = self.ambient
        P, Q = self.vectors(), self.preimages()
        return R.mulv(R.outer(P, Q), R.vec(self.a))

    def verify(self, exhaustive_limit: int = 2**7) -> Report:
        R = self.ambient
        rep = Report(f"local ring at {_fmt(self.a)}")
        P = self.vectors()
        codes = {int(c): i for i, c in enumerate(R.encode(P))}
        T = self.table()
        tc = R.encode(T)
        rep.check("closed under deformed product", all(int(c) in codes for c in tc.ravel()))
        sums = R.encode((P[:, None, :] + P[None, :, :]) % R.p)
        rep.check("additive subgroup", all(int(c) in codes for c in sums.ravel()))
        if len(P) <= exhaustive_limit:
            idx = np.vectorize(lambda c: codes[int(c)])(tc)
            left = idx[idx, :]                 # (x*y)*z indexed [x, y, z]
            right = idx[:, idx]                # x*(y*z)
            bad = np.argwhere(left != right)
            detail = ""
            if len(bad):
                i, j, k = bad[0]
                detail = f"x={_fmt(R.elem(P[i]))} y={_fmt(R.elem(P[j]))} z={_fmt(R.elem(P[k]))}"
            rep.check("associative (exhaustive)", not len(bad), detail)
        else:
            # the product is bilinear in the carrier, so basis triples suffice
            B = self._basis
            ok = True
            for i, j, k in itertools.product(range(self.rank), repeat=3):
                x, y, z = (R.elem(B[t]) for t in (i, j, k))
                if self.product(self.product(x, y), z) != self.product(x, self.product(y, z)):
                    ok = False
                    break
            rep.check("associative (basis triples)", ok)
        return rep


def local_ring_at(r: FiniteRing, a) -> LocalRing:
    return LocalRing(r, a)


@dataclass
class RingIso:
    source: LocalRing
    target: LocalRing
    mapping: list[tuple]
    report: Report

    @property
    def ok(self) -> bool:
        return self.report.ok


def isolocales_iso(r: FiniteRing, a, b) -> RingIso:
    """The isomorphism R_a -> R_ab given by ara -> arab, verified exhaustively."""
    if r.mul(r.mul(a, b), a) != a or r.mul(r.mul(b, a), b) != b:
        raise ValueError(f"({_fmt(a)}, {_fmt(b)}) is not a regular pair: need aba = a and bab = b")
    e = r.mul(a, b)
    Ra, Re = LocalRing(r, a), LocalRing(r, e)
    P, Q = Ra.vectors(), Re.vectors()
    bv = r.vec(b)
    img = r.mulv(P, bv)
    rep = Report(f"R_a -> R_e for a={_fmt(a)}, e={_fmt(e)}")
    tgt = {int(c): i for i, c in enumerate(r.encode(Q))}
    img_codes = [int(c) for c in r.encode(img)]
    rep.check("e idempotent", r.mul(e, e) == e)
    outside = [i for i, c in enumerate(img_codes) if c not in tgt]
    rep.check("image in R_e", not outside, outside and _fmt(r.elem(P[outside[0]])))
    rep.check("injective", len(set(img_codes)) == len(P))
    rep.check("surjective", set(img_codes) == set(tgt))
    sums = (P[:, None, :] + P[None, :, :]) % r.p
    lhs = r.mulv(sums, bv)
    rhs = (img[:, None, :] + img[None, :, :]) % r.p
    rep.check("additive", np.array_equal(lhs, rhs))
    # phi(x *_a y) against phi(x) *_e phi(y), all pairs
    lhs = r.mulv(Ra.table(), bv)
    ev = r.vec(e)
    pre_e = np.array([Re.preimages()[tgt[c]] if c in tgt else np.zeros(r.dim, np.int64)
                      for c in img_codes]).reshape(-1, r.dim)
    rhs = r.mulv(r.outer(img, pre_e), ev)
    bad = np.argwhere(np.any(lhs != rhs, axis=2))
    detail = ""
    if len(bad):
        i, j = bad[0]
        detail = f"x={_fmt(r.elem(P[i]))} y={_fmt(r.elem(P[j]))}"
    rep.check("multiplicative", not len(bad), detail)
    rep.note(f"|R_a| = {len(P)}, |R_e| = {len(Q)}")
    mapping = [(r.elem(P[i]), r.elem(img[i])) for i in range(len(P))]
    return RingIso(Ra, Re, mapping, rep)


# -- Morita contexts ----------------------------------------------------------------------

@dataclass
class MoritaContext:
    """A Morita context (R, S, N, M, (-,-), [-,-]) in corner or matrix form.

    Corner form: an idempotent p of S, R = pSp, N = pS, M = Sp, all maps
    by multiplication in S.  Matrix form: R = M_k(S), N = columns, M = rows.
    """

    S: object
    kind: str
    p: object = None
    k: int = 0
    witnesses: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("corner", "matrix"):
            raise ValueError(f"unknown context kind {self.kind!r}")
        self.R = self.S if self.kind == "corner" else MatrixRing(self.S, self.k)

    # the six structure maps
    def pair(self, n, m):
        """(n, m) in R."""
        return self.S.mul(n, m) if self.kind == "corner" else matmul(self.S, n, m)

    def bracket(self, m, n):
        """[m, n] in S."""
        return self.S.mul(m, n) if self.kind == "corner" else matmul(self.S, m, n)[0][0]

    def rn(self, r, n):
        return self.S.mul(r, n) if self.kind == "corner" else matmul(self.S, r, n)

    def ns(self, n, s):
        if self.kind == "corner":
            return self.S.mul(n, s)
        return tuple((self.S.mul(row[0], s),) for row in n)

    def sm(self, s, m):
        if self.kind == "corner":
            return self.S.mul(s, m)
        return (tuple(self.S.mul(s, a) for a in m[0]),)

    def mr(self, m, r):
        return self.S.mul(m, r) if self.kind == "corner" else matmul(self.S, m, r)

    # additive structure of N and M (R for matrices)
    def add(self, x, y):
        if self.kind == "corner":
            return self.S.add(x, y)
        return tuple(tuple(self.S.add(a, b) for a, b in zip(rx, ry)) for rx, ry in zip(x, y))

    # sampling
    def sample_S(self, rng):
        return sample(self.S, rng)

    def sample_R(self, rng):
        if self.kind == "corner":
            return self.S.mul(self.S.mul(self.p, self.sample_S(rng)), self.p)
        return self.R.sample(rng)

    def sample_corner(self, e, rng):
        """Random element of eRe; draws straight from eSe when e is a sum of vertices."""
        verts = _vertex_support(e) if isinstance(self.S, LeavittRing) else None
        if verts is not None:
            S = self.S
            return random_element(S.algebra, rng, S.terms, S.max_len, sources=verts)
        return self.R.mul(self.R.mul(e, self.sample_R(rng)), e)

    def sample_N(self, rng):
        if self.kind == "corner":
            return self.S.mul(self.p, self.sample_S(rng))
        return tuple((self.sample_S(rng),) for _ in range(self.k))

    def sample_M(self, rng):
        if self.kind == "corner":
            return self.S.mul(self.sample_S(rng), self.p)
        return (tuple(self.sample_S(rng) for _ in range(self.k)),)

    # the Morita ring [[R, N], [M, S]]
    def ring_mul(self, x, y):
        r1, n1, m1, s1 = x
        r2, n2, m2, s2 = y
        R, S = self.R, self.S
        return (
            R.add(R.mul(r1, r2), self.pair(n1, m2)),
            self.add(self.rn(r1, n2), self.ns(n1, s2)),
            self.add(self.mr(m1, r2), self.sm(s1, m2)),
            S.add(self.bracket(m1, n2), S.mul(s1, s2)),
        )

    def sample_ring(self, rng):
        return (self.sample_R(rng), self.sample_N(rng), self.sample_M(rng), self.sample_S(rng))


def _vertex_support(x):
    terms = getattr(x, "terms", None)
    if not terms or any(m.alpha or m.beta or c != 1 for m, c in terms.items()):
        return None
    return sorted(m.vertex for m in terms)


def corner_context(S, p, witnesses: dict | None = None) -> MoritaContext:
    if S.mul(p, p) != p:
        raise ValueError(f"{_fmt(p)} is not idempotent")
    return MoritaContext(S, "corner", p=p, witnesses=witnesses or {})


def matrix_context(S, k: int) -> MoritaContext:
    return MoritaContext(S, "matrix", k=k)


def verify_context(ctx: MoritaContext, samples: int = 500, rng: random.Random | None = None) -> Report:
    """Associativity conditions, balance and Morita-ring associativity on samples."""
    rng = rng or random.Random(0)
    rep = Report(f"{ctx.kind} Morita context")
    fails = {k: "" for k in ("nmn", "mnm", "balanced", "ring")}
    for _ in range(samples):
        n, m, n2, m2 = ctx.sample_N(rng), ctx.sample_M(rng), ctx.sample_N(rng), ctx.sample_M(rng)
        s = ctx.sample_S(rng)
        if not fails["nmn"] and ctx.rn(ctx.pair(n, m), n2) != ctx.ns(n, ctx.bracket(m, n2)):
            fails["nmn"] = f"n={_fmt(n)} m={_fmt(m)} n'={_fmt(n2)}"
        if not fails["mnm"] and ctx.sm(ctx.bracket(m, n), m2) != ctx.mr(m, ctx.pair(n, m2)):
            fails["mnm"] = f"m={_fmt(m)} n={_fmt(n)} m'={_fmt(m2)}"
        if not fails["balanced"] and ctx.pair(ctx.ns(n, s), m) != ctx.pair(n, ctx.sm(s, m)):
            fails["balanced"] = f"n={_fmt(n)} s={_fmt(s)} m={_fmt(m)}"
        if not fails["ring"]:
            x, y, z = ctx.sample_ring(rng), ctx.sample_ring(rng), ctx.sample_ring(rng)
            if ctx.ring_mul(ctx.ring_mul(x, y), z) != ctx.ring_mul(x, ctx.ring_mul(y, z)):
                fails["ring"] = f"x={x} y={y} z={z}"
    rep.check("(n,m)n' = n[m,n']", not fails["nmn"], fails["nmn"])
    rep.check("[m,n]m' = m(n,m')", not fails["mnm"], fails["mnm"])
    rep.check("(ns,m) = (n,sm)", not fails["balanced"], fails["balanced"])
    rep.check("Morita ring associative", not fails["ring"], fails["ring"])
    for name, (lhs, rhs) in ctx.witnesses.items():
        rep.check(f"fullness witness {name}", lhs == rhs, f"{lhs} != {rhs}")
    rep.note(f"{samples} sampled triples")
    return rep


# -- corners of R as corners of matrix rings over S ---------------------------------------

Decomposition = Sequence[tuple]


def matrix_decomposition(ctx: MoritaContext, e) -> list[tuple]:
    """e = sum of (column i of e)(1)(unit row i), skipping zero columns."""
    S, k = ctx.S, ctx.k
    one = S.one if hasattr(S, "one") else S.unit()
    out = []
    for i in range(k):
        col = tuple((e[r][i],) for r in range(k))
        if all(c[0] == S.zero for c in col):
            continue
        row = (tuple(one if j == i else S.zero for j in range(k)),)
        out.append((col, one, row))
    return out


def vertex_decomposition(ctx: MoritaContext, v: str) -> list[tuple]:
    """v = sum over edges f out of v of f r(f) f^* (needs v regular)."""
    alg = ctx.S.algebra
    out = alg.graph.out_edges[v]
    if not out:
        raise ValueError(f"vertex {v} emits no edges in the window")
    return [(alg.edge(f.id), alg.vertex(f.range), alg.ghost(f.id)) for f in out]


@dataclass
class EquivLocal:
    n: int
    u: object
    phi: Callable
    report: Report


def _context_iso(ctx: MoritaContext, e, xs, T, ys, carrier=None, samples=200,
                 rng=None, generators=None, title="") -> EquivLocal:
    """Shared engine: u = (yxT)^2 and phi(r) = (y r x) T on eRe."""
    S, R = ctx.S, ctx.R
    n = len(xs)
    Mn = MatrixRing(S, n)
    rep = Report(title)
    yx = tuple(tuple(ctx.bracket(ys[i], xs[j]) for j in range(n)) for i in range(n))
    yxT = Mn.mul(yx, T)
    u = Mn.mul(yxT, yxT)

    def phi(r):
        yrx = tuple(tuple(ctx.bracket(ctx.mr(ys[i], r), xs[j]) for j in range(n)) for i in range(n))
        return Mn.mul(yrx, T)

    def from_matrix(Z):
        """x Z y in R."""
        acc = R.zero
        for i in range(n):
            for j in range(n):
                acc = R.add(acc, ctx.pair(ctx.ns(xs[i], Z[i][j]), ys[j]))
        return acc

    def corner(r):
        return R.mul(R.mul(e, r), e)

    rep.check("u^2 = u", Mn.mul(u, u) == u, f"u={_fmt(u)}")
    xTy = from_matrix(T)
    rep.check("x T y = e", xTy == e, f"x T y = {_fmt(xTy)}")

    rng = rng or random.Random(0)
    if carrier is not None:
        elems = carrier
        pairs = itertools.product(elems, repeat=2)
    else:
        elems = [ctx.sample_corner(e, rng) for _ in range(samples)]
        pairs = [(ctx.sample_corner(e, rng), ctx.sample_corner(e, rng)) for _ in range(samples)]

    def first_failure(items, pred):
        for it in items:
            if not pred(*it):
                return " ".join(_fmt(z) for z in it)
        return ""

    images = {}
    for r in elems:
        if r not in images:
            images[r] = phi(r)
    bad = first_failure(((r,) for r in elems), lambda r: Mn.mul(Mn.mul(u, images[r]), u) == images[r])
    rep.check("phi lands in u M_n(S) u", not bad, bad)
    pairs = list(pairs)
    bad = first_failure(pairs, lambda a, b: phi(R.add(a, b)) == Mn.add(phi(a), phi(b)))
    rep.check("phi additive", not bad, bad)
    bad = first_failure(pairs, lambda a, b: phi(R.mul(a, b)) == Mn.mul(phi(a), phi(b)))
    rep.check("phi multiplicative", not bad, bad)
    # x T phi(r) y = e r e recovers r on eRe
    bad = first_failure(((r,) for r in elems), lambda r: corner(from_matrix(Mn.mul(T, images[r]))) == r)
    rep.check("phi injective (left inverse)", not bad, bad)
    if generators is None and carrier is not None:
        target = {Mn.mul(Mn.mul(u, z), u) for z in Mn.elements()}
        image = set(images.values())
        rep.check("phi surjective (exhaustive)", image == target,
                  f"missing {_fmt(next(iter(target - image)))}" if target - image else "")
        rep.note(f"|eRe| = {len(set(elems))}, |u M_{n}(S) u| = {len(target)}")
    else:
        gens = generators if generators is not None else []
        bad = first_failure(((z,) for z in gens),
                            lambda z: phi(corner(from_matrix(Mn.mul(T, z)))) == Mn.mul(Mn.mul(u, z), u))
        rep.check("phi surjective (generators)", not bad, bad)
        rep.note(f"{len(elems)} sampled elements, {len(gens)} generators of u M_{n}(S) u")
    return EquivLocal(n, u, phi, rep)


def _check_decomposition(ctx, target, decomposition):
    R = ctx.R
    acc = R.zero
    for x, s, y in decomposition:
        acc = R.add(acc, ctx.pair(ctx.ns(x, s), y))
    if acc != target:
        raise ValueError(f"decomposition sums to {_fmt(acc)}, not {_fmt(target)}")


def _generators(ctx: MoritaContext, n: int, max_len: int = 1, limit: int = 60) -> list:
    """Matrix units over a finite spanning set of S (monomials up to a length bound)."""
    S = ctx.S
    if isinstance(S, LeavittRing):
        alg = S.algebra
        spans = [alg.vertex(v) for v in alg.graph.vertices]
        spans += [alg.edge(f.id) for f in alg.graph.edges] + [alg.ghost(f.id) for f in alg.graph.edges]
        if max_len > 1:
            spans += [alg.edge(f.id) * alg.ghost(g.id) for f in alg.graph.edges for g in alg.graph.edges]
        spans = [s for s in spans if s][:limit]
    else:
        spans = [s for s in S.elements() if s != S.zero]
    Mn = MatrixRing(S, n)
    return [Mn.unit(i, j, s) for i in range(n) for j in range(n) for s in spans]


def equivlocal_construct(ctx: MoritaContext, e, decomposition: Decomposition,
                         samples: int = 200, rng: random.Random | None = None) -> EquivLocal:
    """eRe is isomorphic to u M_n(S) u via ere -> y(ere)xs.

    Finite contexts are checked exhaustively; otherwise on ``samples``
    sampled pairs plus a generating set of u M_n(S) u.
    """
    R, S = ctx.R, ctx.S
    if R.mul(e, e) != e:
        raise ValueError(f"{_fmt(e)} is not idempotent")
    _check_decomposition(ctx, e, decomposition)
    xs = [d[0] for d in decomposition]
    ys = [d[2] for d in decomposition]
    n = len(decomposition)
    T = MatrixRing(S, n).diag([d[1] for d in decomposition])
    carrier = _corner_carrier(ctx, e)
    return _context_iso(ctx, e, xs, T, ys, carrier=carrier, samples=samples, rng=rng,
                        generators=None if carrier is not None else _generators(ctx, n),
                        title=f"eRe ~ u M_{n}(S) u for e={_fmt(e)}")


def _corner_carrier(ctx, e):
    R = ctx.R
    if isinstance(R, MatrixRing) and isinstance(R.base, Field) and R.base.p is not None:
        return sorted({R.mul(R.mul(e, r), e) for r in R.elements()})
    if isinstance(R, FiniteRing):
        return sorted({R.mul(R.mul(e, r), e) for r in R.elements()}, key=repr)
    return None


def desigualdad_check(ctx: MoritaContext, e, f, decomposition: Decomposition,
                      samples: int = 200, rng: random.Random | None = None) -> Report:
    """For e <= f: u <= v and phi_f restricted to eRe equals phi_e."""
    R, S = ctx.R, ctx.S
    for name, x in (("e", e), ("f", f)):
        if R.mul(x, x) != x:
            raise ValueError(f"{name}={_fmt(x)} is not idempotent")
    if R.mul(R.mul(f, e), f) != e:
        raise ValueError(f"e={_fmt(e)} is not below f={_fmt(f)}: e != fef")
    _check_decomposition(ctx, f, decomposition)
    xs = [d[0] for d in decomposition]
    ys = [d[2] for d in decomposition]
    n = len(decomposition)
    Mn = MatrixRing(S, n)
    s = Mn.diag([d[1] for d in decomposition])
    yex = tuple(tuple(ctx.bracket(ctx.mr(ys[i], e), xs[j]) for j in range(n)) for i in range(n))
    t = Mn.mul(Mn.mul(s, yex), s)
    rng = rng or random.Random(0)
    carrier_e, carrier_f = _corner_carrier(ctx, e), _corner_carrier(ctx, f)
    gens = None if carrier_e is not None else _generators(ctx, n)
    big = _context_iso(ctx, f, xs, s, ys, carrier=carrier_f, samples=samples, rng=rng,
                       generators=gens, title="v from f")
    small = _context_iso(ctx, e, xs, t, ys, carrier=carrier_e, samples=samples, rng=rng,
                         generators=gens, title="u from e")
    rep = Report(f"e={_fmt(e)} <= f={_fmt(f)}")
    rep.extend(big.report, "v: ")
    rep.extend(small.report, "u: ")
    u, v = small.u, big.u
    rep.check("u = v u v", Mn.mul(Mn.mul(v, u), v) == u, f"u={_fmt(u)} v={_fmt(v)}")
    if carrier_e is not None:
        zs = list(Mn.elements())
        elems = carrier_e
    else:
        zs = [Mn.sample(rng) for _ in range(samples)]
        elems = [ctx.sample_corner(e, rng) for _ in range(samples)]
    bad = next((z for z in zs
                if (w := Mn.mul(Mn.mul(u, z), u)) != Mn.mul(Mn.mul(v, w), v)), None)
    rep.check("u M_n(S) u inside v M_n(S) v", bad is None, bad and _fmt(bad))
    bad = next((r for r in elems if big.phi(r) != small.phi(r)), None)
    rep.check("square commutes: phi_f(ere) = phi_e(ere)", bad is None, bad and _fmt(bad))
    return rep


# -- sigma-unital ladders and FM windows ---------------------------------------------------

class SigmaUnitLadder:
    """A finite prefix e_1 <= e_2 <= ... of idempotents of a matrix algebra."""

    def __init__(self, ring: FiniteRing, idempotents: Sequence):
        self.ring = ring
        self.units = list(idempotents)
        for k, x in enumerate(self.units, 1):
            if ring.mul(x, x) != x:
                raise ValueError(f"e_{k} = {_fmt(x)} is not idempotent")
        for k, (x, y) in enumerate(zip(self.units, self.units[1:]), 1):
            if ring.mul(x, y) != x or ring.mul(y, x) != x:
                raise ValueError(f"e_{k} is not below e_{k + 1}")

    def __getitem__(self, n: int):
        """1-based, the last entry repeating."""
        return self.units[min(n, len(self.units)) - 1]

    def covers(self) -> bool:
        """Whether the last corner is the whole ring."""
        R = self.ring
        last = R.vec(self.units[-1])
        E = R.basis_vectors()
        corner = R.mulv(R.mulv(last, E), last)
        return rank(corner, R.p) == R.dim


class FMTruncation:
    """Top-left W x W window of FM(R) for R = M_m(F_p), as M_{Wm}(F_p)."""

    def __init__(self, base: FiniteRing, size: int):
        self.base = base
        self.m = base.matrix_size
        self.size = size
        self.p = base.p
        self.N = size * self.m

    def block(self, x) -> np.ndarray:
        return np.array(x, dtype=np.int64).reshape(self.m, self.m)

    def repeat(self, x, times: int) -> np.ndarray:
        """diag(x, ..., x, 0, ...) with ``times`` copies."""
        out = np.zeros((self.N, self.N), dtype=np.int64)
        b = self.block(x)
        for i in range(times):
            out[i * self.m:(i + 1) * self.m, i * self.m:(i + 1) * self.m] = b
        return out

    def embed(self, X: np.ndarray) -> np.ndarray:
        out = np.zeros((self.N, self.N), dtype=np.int64)
        k = X.shape[0]
        out[:k, :k] = X
        return out

    def corner_basis(self, e: np.ndarray) -> np.ndarray:
        """A basis (as flattened matrices) of e M_{Wm}(F_p) e."""
        N, p = self.N, self.p
        rows = []
        for i in range(N):
            for j in range(N):
                if e[:, i].any() and e[j, :].any():
                    rows.append(np.outer(e[:, i], e[j, :]).reshape(-1) % p)
        if not rows:
            return np.zeros((0, N * N), dtype=np.int64)
        R, piv = rref(np.array(rows), p)
        return R[:len(piv)]


def _mm(A, B, p):
    return A @ B % p


def escalera_window(r: FiniteRing, ladder: SigmaUnitLadder, n: int,
                    max_dim: int = 64, exhaustive_limit: int = 2**8) -> Report:
    """The identifications FM(R)_{e_n^(2^n)} = M_{2^n}(R)_{e_n^(2^n)} = M_{2^n}(R_{e_n}).

    Products are bilinear, so multiplicativity on a basis of each corner is
    exact; when a corner has at most ``exhaustive_limit`` elements every
    pair is checked as well.
    """
    p, m = r.p, r.matrix_size
    k = 2 ** n
    if 2 * k * m > max_dim:
        raise CarrierTooLarge(f"FM window for n={n} needs {2 * k * m} > {max_dim} rows")
    fm = FMTruncation(r, 2 * k)             # room for the next rung and the tail of FM(R)
    rep = Report(f"FM window n={n}")
    en, en1 = ladder[n], ladder[n + 1]
    bar = fm.repeat(en, k)
    rep.check("e_n^(2^n) idempotent in FM window", np.array_equal(_mm(bar, bar, p), bar))

    # FM(R) corner lives inside the top-left M_{2^n}(R) block
    big = fm.corner_basis(bar)
    small_fm = FMTruncation(r, k)
    small = small_fm.corner_basis(small_fm.repeat(en, k))
    emb = np.array([fm.embed(b.reshape(k * m, k * m)).reshape(-1) for b in small]).reshape(-1, fm.N ** 2)
    same = len(big) == len(emb) and (len(big) == 0 or
                                      (in_span(big, emb, p) and in_span(emb, big, p)))
    rep.check("FM(R) corner = M_2^n(R) corner", same, f"dims {len(big)} vs {len(emb)}")

    # M_{2^n}(R) corner versus M_{2^n}(R_{e_n}) via blocks
    loc = LocalRing(r, en)
    lb = loc._basis                           # basis of R_e (flattened m x m)
    d = len(lb)
    # structure constants of R_e in its basis: x*_e y = x pre(y) e
    Cst = np.zeros((d, d, d), dtype=np.int64)
    for a in range(d):
        for b in range(d):
            prod = r.vec(loc.product(r.elem(lb[a]), r.elem(lb[b])))
            Cst[a, b] = solve(lb.T, prod, p)
    # iota sends the matrix unit E_ij (x) basis_a of M_{2^n}(R_e) to a block matrix
    def iota(coeffs: np.ndarray) -> np.ndarray:
        """coeffs has shape (k, k, d)."""
        blocks = np.einsum("ija,ax->ijx", coeffs, lb) % p
        blocks = blocks.reshape(k, k, m, m)
        return blocks.transpose(0, 2, 1, 3).reshape(k * m, k * m)

    def star(A, B):
        """Product in M_{2^n}(R_e)."""
        return np.einsum("ila,ljb,abc->ijc", A, B, Cst) % p

    units = []
    for i in range(k):
        for j in range(k):
            for a in range(d):
                c = np.zeros((k, k, d), dtype=np.int64)
                c[i, j, a] = 1
                units.append(c)
    images = np.array([iota(c).reshape(-1) for c in units]).reshape(-1, (k * m) ** 2)
    rep.check("iota bijective onto corner", rank(images, p) == len(units) == len(small)
              and (not len(small) or in_span(small, images, p)),
              f"rank {rank(images, p)} of {len(units)}, corner dim {len(small)}")
    bad = ""
    for A in units:
        for B in units:
            if not np.array_equal(iota(star(A, B)), _mm(iota(A), iota(B), p)):
                bad = f"{np.argwhere(A)[0]} * {np.argwhere(B)[0]}"
                break
        if bad:
            break
    rep.check("iota multiplicative (basis pairs)", not bad, bad)
    if p ** len(units) <= exhaustive_limit:
        coeff = span_vectors(np.eye(len(units), dtype=np.int64), p).reshape(-1, k, k, d)
        ok = all(np.array_equal(iota(star(A, B)), _mm(iota(A), iota(B), p))
                 for A in coeff for B in coeff)
        rep.check("iota multiplicative (all pairs)", ok)

    # transition monomorphism rho_n : M_{2^n}(R_{e_n}) -> M_{2^{n+1}}(R_{e_{n+1}})
    loc1 = LocalRing(r, en1)
    lb1 = loc1._basis
    d1 = len(lb1)
    k1 = 2 * k
    Cst1 = np.zeros((d1, d1, d1), dtype=np.int64)
    for a in range(d1):
        for b in range(d1):
            prod = r.vec(loc1.product(r.elem(lb1[a]), r.elem(lb1[b])))
            Cst1[a, b] = solve(lb1.T, prod, p)
    # R_{e_n} sits inside R_{e_{n+1}}
    inc = np.array([solve(lb1.T, lb[a], p) for a in range(d)]) if d else np.zeros((0, d1), np.int64)
    rep.check("R_{e_n} inside R_{e_n+1}", all(x is not None for x in inc))

    def rho(A):
        out = np.zeros((k1, k1, d1), dtype=np.int64)
        out[:k, :k] = np.einsum("ija,ab->ijb", A, inc) % p
        return out

    def star1(A, B):
        return np.einsum("ila,ljb,abc->ijc", A, B, Cst1) % p

    bad = ""
    for A in units:
        for B in units:
            if not np.array_equal(rho(star(A, B)), star1(rho(A), rho(B))):
                bad = f"{np.argwhere(A)[0]} * {np.argwhere(B)[0]}"
                break
        if bad:
            break
    rep.check("transition multiplicative (basis pairs)", not bad, bad)
    rho_img = np.array([rho(c).reshape(-1) for c in units]).reshape(len(units), -1)
    rep.check("transition injective", rank(rho_img, p) == len(units))
    if p ** len(units) <= exhaustive_limit:
        coeff = span_vectors(np.eye(len(units), dtype=np.int64), p).reshape(-1, k, k, d)
        ok = all(np.array_equal(rho(star(A, B)), star1(rho(A), rho(B))) for A in coeff for B in coeff)
        rep.check("transition multiplicative (all pairs)", ok)

    # the square with the inclusion of FM corners commutes: iota_{n+1} rho = diag(iota_n, 0)
    def iota1(coeffs):
        blocks = np.einsum("ija,ax->ijx", coeffs, lb1) % p
        return blocks.reshape(k1, k1, m, m).transpose(0, 2, 1, 3).reshape(k1 * m, k1 * m)

    ok = all(np.array_equal(iota1(rho(c)), fm.embed(iota(c))) for c in units)
    rep.check("transition matches FM inclusion", ok)
    rep.note(f"corner dimension {len(units)} over F_{p}; FM window {fm.N}x{fm.N}")
    return rep


# -- the desingularization context ----------------------------------------------------------

def context_from_desingularization(g: Graph, depth: int = 8, field: Field = QQ,
                                   terms: int = 3, max_len: int = 3) -> MoritaContext:
    """Corner context of L(F) at p = sum of the original vertices, F truncated at ``depth``.

    Fullness witnesses: every vertex w of the window equals mu^* p mu for
    the tail path mu that reaches it from its anchor.
    """
    tg = desingularize(g)
    window = truncate(tg, depth)
    alg = LeavittPathAlgebra(window, field)
    S = LeavittRing(alg, terms=terms, max_len=max_len)
    p = alg.vertex_sum(g.vertices)
    witnesses = {}
    for t in tg.tails:
        for j in range(1, depth + 1):
            mu = [f"{t.anchor}.f{i}" for i in range(1, j + 1)]
            path = alg.monomial(mu, (), vertex=t.vertex(j))
            lhs = _ghost_of(alg, mu) * p * path
            witnesses[t.vertex(j)] = (lhs, alg.vertex(t.vertex(j)))
    ctx = corner_context(S, p, witnesses)
    ctx.tailed = tg
    ctx.window = window
    return ctx


def _ghost_of(alg: LeavittPathAlgebra, path: Sequence[str]):
    acc = None
    for eid in reversed(path):
        acc = alg.ghost(eid) if acc is None else acc * alg.ghost(eid)
    return acc
