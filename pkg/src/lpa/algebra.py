"""Exact arithmetic in the Leavitt path algebra L_K(E).

Elements are finite combinations of monomials alpha beta^* with
r(alpha) = r(beta).  Products are computed with (V), (E1), (E2) and (CK1)
built into the monomial product; (CK2) is applied as a rewrite rule

    alpha' d d^* beta'^*  ->  alpha' beta'^*  -  sum_{f != d} alpha' f f^* beta'^*

where d is the *designated* edge (least edge id) at a regular vertex.
Monomials with no such tail form a basis, so two elements are equal iff
their normal forms coincide.

Text syntax: ``2*e.f^ + 3*v``, ``1/2*e``, ``3 mod 5 * v``; ``.`` is
concatenation, ``^`` the ghost edge, ``*`` any product.
"""

from __future__ import annotations

import math
import random
import re
import warnings
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple

from .fields import QQ, Field
from .graph import REGULAR, Graph, cycles


class AmbientMismatch(ValueError):
    """Operands live over different graphs or fields."""


class ExpressionError(ValueError):
    def __init__(self, message: str, column: int):
        super().__init__(f"column {column}: {message}")
        self.column = column


class NonComposableWarning(UserWarning):
    pass


class Monomial(NamedTuple):
    alpha: tuple[str, ...]
    beta: tuple[str, ...]
    vertex: str  # common range of alpha and beta

    @property
    def degree(self) -> int:
        return len(self.alpha) - len(self.beta)

    def text(self) -> str:
        parts = list(self.alpha) + [f"{e}^" for e in reversed(self.beta)]
        return ".".join(parts) if parts else self.vertex

    def sort_key(self):
        return (len(self.alpha) + len(self.beta), self.text())


class LeavittPathAlgebra:
    """L_K(E) for a finite graph E (infinite emitters keep only their prefix edges)."""

    def __init__(self, graph: Graph, field: Field = QQ):
        self.graph = graph
        self.field = field
        self.source = {e.id: e.source for e in graph.edges}
        self.range = {e.id: e.range for e in graph.edges}
        self.designated: dict[str, str] = {}
        self._others: dict[str, tuple[tuple[str, str], ...]] = {}
        for v in graph.regular_vertices():
            out = sorted(graph.out_edges[v], key=lambda e: e.id)
            d = out[0]
            self.designated[v] = d.id
            self._others[d.id] = tuple((e.id, e.range) for e in out[1:])
        self._memo: dict[Monomial, tuple[tuple[Monomial, int], ...]] = {}

    def __repr__(self):
        name = self.graph.name or f"{len(self.graph.vertices)} vertices"
        return f"LeavittPathAlgebra({name}, {self.field})"

    def compatible(self, other: "LeavittPathAlgebra") -> bool:
        return other is self or (other.graph == self.graph and other.field == self.field)

    # -- constructors --------------------------------------------------------

    def element(self, terms: Mapping[Monomial, object], normalized: bool = False) -> "Element":
        F = self.field
        clean = {}
        for m, c in terms.items():
            c = F(c)
            if c:
                clean[m] = c
        return Element(self, clean, normalized)

    def zero(self) -> "Element":
        return Element(self, {}, True)

    def vertex(self, v: str) -> "Element":
        if v not in self.graph.vertex_index:
            raise KeyError(f"unknown vertex {v!r}")
        return Element(self, {Monomial((), (), v): self.field.one}, True)

    def edge(self, e: str) -> "Element":
        return Element(self, {Monomial((e,), (), self.range[e]): self.field.one}, True)

    def ghost(self, e: str) -> "Element":
        return Element(self, {Monomial((), (e,), self.range[e]): self.field.one}, True)

    def monomial(self, alpha: Iterable[str], beta: Iterable[str] = (), vertex: str | None = None,
                 coeff=1) -> "Element":
        alpha, beta = tuple(alpha), tuple(beta)
        r = self.range[alpha[-1]] if alpha else (self.range[beta[-1]] if beta else vertex)
        m = Monomial(alpha, beta, r)
        if not self._valid(m):
            return self.zero()
        return self.element({m: coeff})

    def vertex_sum(self, vertices: Iterable[str]) -> "Element":
        return self.element({Monomial((), (), v): 1 for v in vertices})

    def unit(self) -> "Element":
        return self.vertex_sum(self.graph.vertices)

    def _valid(self, m: Monomial) -> bool:
        for path in (m.alpha, m.beta):
            for a, b in zip(path, path[1:]):
                if self.range[a] != self.source[b]:
                    return False
            if path and self.range[path[-1]] != m.vertex:
                return False
        return m.vertex in self.graph.vertex_index

    # -- core arithmetic ------------------------------------------------------

    def _start(self, path: tuple[str, ...], v: str) -> str:
        return self.source[path[0]] if path else v

    def mul_monomials(self, m1: Monomial, m2: Monomial) -> Monomial | None:
        """(a1 b1^*)(a2 b2^*) by (V), (E1), (E2), (CK1); None for zero."""
        b1, a2 = m1.beta, m2.alpha
        if self._start(b1, m1.vertex) != self._start(a2, m2.vertex):
            return None
        n = len(b1)
        if len(a2) >= n:
            if a2[:n] != b1:
                return None
            return Monomial(m1.alpha + a2[n:], m2.beta, m2.vertex)
        if b1[:len(a2)] != a2:
            return None
        return Monomial(m1.alpha, m2.beta + b1[len(a2):], m1.vertex)

    def reduce(self, m: Monomial) -> tuple[tuple[Monomial, int], ...]:
        """Normal form of one monomial as an integer combination."""
        hit = self._memo.get(m)
        if hit is not None:
            return hit
        a, b = m.alpha, m.beta
        if a and b and a[-1] == b[-1] and self.designated.get(self.source[a[-1]]) == a[-1]:
            d = a[-1]
            acc: dict[Monomial, int] = {}
            for mm, k in self.reduce(Monomial(a[:-1], b[:-1], self.source[d])):
                acc[mm] = acc.get(mm, 0) + k
            for f, r in self._others[d]:
                mm = Monomial(a[:-1] + (f,), b[:-1] + (f,), r)
                acc[mm] = acc.get(mm, 0) - 1
            out = tuple((mm, k) for mm, k in acc.items() if k)
        else:
            out = ((m, 1),)
        self._memo[m] = out
        return out

    def is_reduced(self, m: Monomial) -> bool:
        a, b = m.alpha, m.beta
        return not (a and b and a[-1] == b[-1]
                    and self.designated.get(self.source[a[-1]]) == a[-1])

    def _collect(self, pairs) -> "Element":
        F = self.field
        acc: dict[Monomial, object] = {}
        for m, c in pairs:
            for mm, k in self.reduce(m):
                acc[mm] = acc.get(mm, 0) + c * k
        if F.p is None:
            terms = {m: c for m, c in acc.items() if c}
        else:
            terms = {}
            for m, c in acc.items():
                c %= F.p
                if c:
                    terms[m] = c
        return Element(self, terms, True)

    def normal_form(self, x: "Element") -> "Element":
        if x.normalized:
            return x
        return self._collect(x.terms.items())

    def multiply(self, x: "Element", y: "Element") -> "Element":
        F = self.field
        mul = self.mul_monomials
        pairs = []
        for m1, c1 in x.terms.items():
            for m2, c2 in y.terms.items():
                m = mul(m1, m2)
                if m is not None:
                    pairs.append((m, F.mul(c1, c2)))
        return self._collect(pairs)

    # -- parsing -------------------------------------------------------------

    def parse(self, text: str) -> "Element":
        return _Parser(self, text).parse()


class Element:
    """An element of L_K(E); treat as immutable."""

    __slots__ = ("algebra", "terms", "normalized")

    def __init__(self, algebra: LeavittPathAlgebra, terms: dict, normalized: bool = False):
        self.algebra = algebra
        self.terms = terms
        self.normalized = normalized

    def _check(self, other: "Element"):
        if not self.algebra.compatible(other.algebra):
            raise AmbientMismatch(f"{self.algebra!r} vs {other.algebra!r}")

    def _lift(self, other):
        if isinstance(other, Element):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return self.algebra.unit() * other if other else self.algebra.zero()
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        F = self.algebra.field
        terms = dict(self.terms)
        for m, c in other.terms.items():
            s = F.add(terms.get(m, F.zero), c)
            if s:
                terms[m] = s
            else:
                terms.pop(m, None)
        return Element(self.algebra, terms, self.normalized and other.normalized)

    __radd__ = __add__

    def __neg__(self):
        F = self.algebra.field
        return Element(self.algebra, {m: F.neg(c) for m, c in self.terms.items()}, self.normalized)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "Element":
        F = self.algebra.field
        c = F(c)
        if not c:
            return self.algebra.zero()
        return Element(self.algebra, {m: F.mul(c, v) for m, v in self.terms.items()},
                       self.normalized)

    def __mul__(self, other):
        if isinstance(other, Element):
            self._check(other)
            return self.algebra.multiply(self, other)
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def normal_form(self) -> "Element":
        return self.algebra.normal_form(self)

    def is_zero(self) -> bool:
        return not self.normal_form().terms

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return self.is_zero()
        if not isinstance(other, Element):
            return NotImplemented
        return equal(self, other)

    def __hash__(self):
        return hash(frozenset(self.normal_form().terms.items()))

    def degrees(self) -> set[int]:
        return {m.degree for m in self.normal_form().terms}

    def __str__(self):
        return format_element(self)

    def __repr__(self):
        return f"Element({format_element(self)!r})"


def format_element(x: Element) -> str:
    """Canonical text: normal form, shortest monomials first, then by text."""
    nf = x.normal_form()
    if not nf.terms:
        return "0"
    F = x.algebra.field
    out = []
    for m in sorted(nf.terms, key=Monomial.sort_key):
        neg, mag = F.signed(nf.terms[m])
        body = m.text() if mag == "1" else f"{mag}*{m.text()}"
        if not out:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f"- {body}" if neg else f"+ {body}")
    return " ".join(out)


# -- module-level operations ----------------------------------------------------

def multiply(x: Element, y: Element) -> Element:
    x._check(y)
    return x.algebra.multiply(x, y)


def normal_form(x: Element) -> Element:
    return x.algebra.normal_form(x)


def equal(x: Element, y: Element) -> bool:
    x._check(y)
    return not (x - y).normal_form().terms


def grade(x: Element) -> dict[int, Element]:
    """Homogeneous components, keyed by len(alpha) - len(beta)."""
    parts: dict[int, dict] = {}
    for m, c in x.normal_form().terms.items():
        parts.setdefault(m.degree, {})[m] = c
    return {n: Element(x.algebra, parts[n], True) for n in sorted(parts)}


def corner_project(x: Element, vertices: Iterable[str]) -> Element:
    """p x p for the local unit p = sum of the given vertices."""
    p = x.algebra.vertex_sum(vertices)
    return p * x * p


def parse_element(graph: Graph, field: Field, text: str) -> Element:
    return LeavittPathAlgebra(graph, field).parse(text)


def _paths_ending(g: Graph) -> dict[str, list[tuple[str, ...]]]:
    # acyclic graphs only
    memo: dict[str, list[tuple[str, ...]]] = {}

    def ending(v):
        if v not in memo:
            acc = [()]
            for e in g.in_edges[v]:
                acc += [p + (e.id,) for p in ending(e.source)]
            memo[v] = acc
        return memo[v]

    return {v: ending(v) for v in g.vertices}


def _is_finite_dimensional(g: Graph) -> bool:
    return not g.emitters and not cycles(g)


def dimension(g: Graph, bound: int = 10**6) -> int | float:
    """Dimension of L_K(E); ``math.inf`` for cycles, infinite emitters or above ``bound``."""
    if not _is_finite_dimensional(g):
        return math.inf
    # path counts by dynamic programming so the bound check never enumerates
    order = _topological(g)
    count = {}
    for v in order:
        count[v] = 1 + sum(count[e.source] for e in g.in_edges[v])
    alg = LeavittPathAlgebra(g)
    total = sum(c * c for c in count.values())
    total -= sum(count[v] ** 2 for v in alg.designated)
    return total if total <= bound else math.inf


def _topological(g: Graph) -> list[str]:
    indeg = {v: len(g.in_edges[v]) for v in g.vertices}
    ready = [v for v in g.vertices if not indeg[v]]
    order = []
    while ready:
        v = ready.pop()
        order.append(v)
        for e in g.out_edges[v]:
            indeg[e.range] -= 1
            if not indeg[e.range]:
                ready.append(e.range)
    return order


def basis(alg: LeavittPathAlgebra) -> list[Monomial]:
    """Normal-form basis of a finite-dimensional L_K(E), in canonical order."""
    g = alg.graph
    if not _is_finite_dimensional(g):
        raise ValueError("basis enumeration needs a finite acyclic graph")
    ends = _paths_ending(g)
    out = []
    for v in g.vertices:
        for a in ends[v]:
            for b in ends[v]:
                m = Monomial(a, b, v)
                if alg.is_reduced(m):
                    out.append(m)
    return sorted(out, key=Monomial.sort_key)


# -- random sampling ---------------------------------------------------------------

def _walk_forward(alg, rng, v, n):
    path = []
    for _ in range(n):
        out = alg.graph.out_edges[v]
        if not out:
            break
        e = rng.choice(out)
        path.append(e.id)
        v = e.range
    return tuple(path), v


def _walk_backward(alg, rng, v, n):
    path = []
    for _ in range(n):
        inc = alg.graph.in_edges[v]
        if not inc:
            break
        e = rng.choice(inc)
        path.append(e.id)
        v = e.source
    return tuple(reversed(path))


def random_monomial(alg: LeavittPathAlgebra, rng: random.Random, max_len: int = 2,
                    degree: int | None = None, tries: int = 50,
                    sources: Iterable[str] | None = None) -> Monomial | None:
    """Random alpha beta^*; with ``sources`` both paths start in that vertex set."""
    vs = alg.graph.vertices if sources is None else tuple(sources)
    for _ in range(tries):
        la = rng.randint(0, max_len)
        lb = rng.randint(0, max_len) if degree is None else la - degree
        if lb < 0 or lb > max_len + abs(degree or 0):
            continue
        a, v = _walk_forward(alg, rng, rng.choice(vs), la)
        b = _walk_backward(alg, rng, v, lb)
        if sources is not None and _source(alg, b, v) not in vs:
            continue
        if degree is None or len(a) - len(b) == degree:
            return Monomial(a, b, v)
    return None


def _source(alg, path, v):
    return alg.graph.edge_map[path[0]].source if path else v


def random_element(alg: LeavittPathAlgebra, rng: random.Random, terms: int = 3,
                   max_len: int = 2, degree: int | None = None,
                   sources: Iterable[str] | None = None) -> Element:
    F = alg.field
    acc = {}
    for _ in range(rng.randint(1, terms)):
        m = random_monomial(alg, rng, max_len, degree, sources=sources)
        if m is None:
            continue
        if F.p is None:
            c = rng.choice([-3, -2, -1, 1, 2, 3, Fraction(1, 2), Fraction(-2, 3)])
        else:
            c = rng.randrange(1, F.p)
        acc[m] = F.add(acc.get(m, F.zero), F(c))
    return alg.element(acc)


# -- expression parser ---------------------------------------------------------------

_PUNCT = set("+-*/()^")


def _describe(tok) -> str:
    return "end of input" if tok[0] == "END" else repr(tok[1])


class _Parser:
    def __init__(self, alg: LeavittPathAlgebra, text: str):
        self.alg = alg
        self.text = text
        self.tokens = self._lex(text)
        self.i = 0

    def _lex(self, text):
        ids = set(self.alg.graph.vertices) | set(self.alg.range)
        toks = []
        i, n = 0, len(text)
        while i < n:
            ch = text[i]
            if ch.isspace():
                i += 1
            elif ch.isdigit():
                j = i
                while j < n and text[j].isdigit():
                    j += 1
                toks.append(("NUM", int(text[i:j]), i + 1))
                i = j
            elif ch in _PUNCT:
                toks.append((ch, ch, i + 1))
                i += 1
            elif ch == ".":
                toks.append((".", ".", i + 1))
                i += 1
            elif ch.isalpha() or ch == "_":
                m = re.compile(r"[A-Za-z0-9_.]+").match(text, i)
                word = m.group()
                if word == "mod":
                    toks.append(("MOD", word, i + 1))
                else:
                    self._split(word, ids, i, toks)
                i = m.end()
            else:
                raise ExpressionError(f"unexpected character {ch!r}", i + 1)
        toks.append(("END", None, n + 1))
        return toks

    @staticmethod
    def _split(word, ids, offset, toks):
        # ids may contain dots; take the longest known id at each step
        k = 0
        while k < len(word):
            if word[k] == ".":
                toks.append((".", ".", offset + k + 1))
                k += 1
                continue
            for j in range(len(word), k, -1):
                if word[k:j] in ids and (j == len(word) or word[j] == "."):
                    toks.append(("ID", word[k:j], offset + k + 1))
                    k = j
                    break
            else:
                end = word.find(".", k)
                bad = word[k:] if end < 0 else word[k:end]
                raise ExpressionError(f"unknown vertex or edge {bad!r}", offset + k + 1)

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind):
        tok = self.next()
        if tok[0] != kind:
            raise ExpressionError(f"expected {kind!r}, found {_describe(tok)}", tok[2])
        return tok

    def parse(self) -> Element:
        if self.peek()[0] == "END":
            raise ExpressionError("empty expression", 1)
        value = self._as_element(self.expr())
        tok = self.peek()
        if tok[0] != "END":
            raise ExpressionError(f"unexpected {_describe(tok)}", tok[2])
        return value

    # scalars stay python numbers until they meet an element
    def _as_element(self, v):
        return v if isinstance(v, Element) else self.alg.unit().scale(v)

    def _add(self, a, b):
        if not isinstance(a, Element) and not isinstance(b, Element):
            return self.alg.field.add(a, b)
        return self._as_element(a) + self._as_element(b)

    def _mul(self, a, b, op, col):
        F = self.alg.field
        if not isinstance(a, Element) and not isinstance(b, Element):
            return F.mul(a, b)
        if not isinstance(a, Element):
            return b.scale(a)
        if not isinstance(b, Element):
            return a.scale(b)
        prod = a * b
        if op == "." and a.terms and b.terms and not prod.terms:
            warnings.warn(f"column {col}: non-composable concatenation gives 0",
                          NonComposableWarning, stacklevel=4)
        return prod

    def expr(self):
        sign = None
        if self.peek()[0] in "+-":
            sign = self.next()[0]
        value = self.term()
        if sign == "-":
            value = self._neg(value)
        while self.peek()[0] in ("+", "-"):
            op = self.next()[0]
            rhs = self.term()
            value = self._add(value, rhs if op == "+" else self._neg(rhs))
        return value

    def _neg(self, v):
        return -v if isinstance(v, Element) else self.alg.field.neg(v)

    def term(self):
        value = self.factor()
        while self.peek()[0] in ("*", "."):
            op, _, col = self.next()
            value = self._mul(value, self.factor(), op, col)
        return value

    def factor(self):
        kind, val, col = self.next()
        F = self.alg.field
        if kind == "NUM":
            if self.peek()[0] == "/":
                self.next()
                den = self.expect("NUM")
                if den[1] == 0:
                    raise ExpressionError("division by zero", den[2])
                if F.p is not None and den[1] % F.p == 0:
                    raise ExpressionError(f"{den[1]} is not invertible in {F}", den[2])
                return F(Fraction(val, den[1]))
            if self.peek()[0] == "MOD":
                self.next()
                mod = self.expect("NUM")
                if F.p != mod[1]:
                    raise AmbientMismatch(f"scalar mod {mod[1]} used over {F}")
                return F(val)
            return F(val)
        if kind == "ID":
            alg = self.alg
            if self.peek()[0] == "^":
                self.next()
                if val not in alg.range:
                    raise ExpressionError(f"{val!r} is a vertex; only edges have ghosts", col)
                return alg.ghost(val)
            if val in alg.range:
                return alg.edge(val)
            return alg.vertex(val)
        if kind == "(":
            value = self.expr()
            self.expect(")")
            return value
        if kind == "-":
            return self._neg(self.factor())
        raise ExpressionError(f"unexpected {_describe((kind, val, col))}", col)
