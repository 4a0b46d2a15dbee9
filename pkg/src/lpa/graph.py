"""Directed multigraphs with sinks and infinite emitters.

A graph is a finite set of vertices, a finite list of materialized edges,
and optional emitter declarations.  A *countable* emitter enumerates its
edges e_1, e_2, ... as an explicit prefix followed by a range pattern that
repeats forever; an *uncountable* emitter carries no enumeration.  The
text format is line oriented::

    graph toeplitz
    vertex u
    vertex v
    edge c : u -> u
    edge f : u -> v
    emitter w countable prefix e1:w->u, e2:w->v pattern u v
    emitter z uncountable

All predicates below work on the infinite graph the file describes, not
only on the materialized edges.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

REGULAR = "regular"
SINK = "sink"
COUNTABLE = "countable"
UNCOUNTABLE = "uncountable"

ID_RE = r"[A-Za-z_][A-Za-z0-9_]*(?:\.[A-Za-z0-9_]+)*"


class GraphError(ValueError):
    """Malformed graph: dangling references, duplicate ids, bad emitters."""


class GraphSyntaxError(GraphError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class Edge(NamedTuple):
    id: str
    source: str
    range: str


@dataclass(frozen=True)
class Emitter:
    """Infinite emitter declaration at ``vertex``.

    For countable emitters, edge k (1-based) is ``prefix[k-1]`` when
    k <= len(prefix), otherwise it goes to
    ``pattern[(k - len(prefix) - 1) % len(pattern)]``.
    """

    vertex: str
    kind: str
    prefix: tuple[Edge, ...] = ()
    pattern: tuple[str, ...] = ()

    def target(self, k: int) -> str:
        if self.kind != COUNTABLE:
            raise GraphError(f"uncountable emitter {self.vertex} has no enumeration")
        if k < 1:
            raise ValueError("edges are numbered from 1")
        if k <= len(self.prefix):
            return self.prefix[k - 1].range
        return self.pattern[(k - len(self.prefix) - 1) % len(self.pattern)]


class Path(NamedTuple):
    """A path as a tuple of edge ids; length-0 paths carry their vertex."""

    edges: tuple[str, ...]
    source: str
    range: str

    def __len__(self) -> int:
        return len(self.edges)

    def __str__(self) -> str:
        return ".".join(self.edges) if self.edges else self.source


@dataclass(frozen=True)
class Graph:
    vertices: tuple[str, ...]
    edges: tuple[Edge, ...] = ()
    emitters: tuple[Emitter, ...] = ()
    name: str = ""

    def __post_init__(self):
        if not self.vertices:
            raise GraphError("a graph needs at least one vertex")
        seen = set()
        for v in self.vertices:
            if v in seen:
                raise GraphError(f"duplicate vertex id {v!r}")
            seen.add(v)
        ids = set()
        for e in self.edges:
            if e.id in ids or e.id in seen:
                raise GraphError(f"duplicate id {e.id!r}")
            ids.add(e.id)
            for end in (e.source, e.range):
                if end not in seen:
                    raise GraphError(f"edge {e.id} refers to undeclared vertex {end!r}")
        declared = set()
        for em in self.emitters:
            if em.vertex not in seen:
                raise GraphError(f"emitter refers to undeclared vertex {em.vertex!r}")
            if em.vertex in declared:
                raise GraphError(f"vertex {em.vertex!r} declared as emitter twice")
            declared.add(em.vertex)
            if em.kind == COUNTABLE:
                if not em.pattern:
                    raise GraphError(f"countable emitter {em.vertex} needs a nonempty pattern")
                for t in em.pattern:
                    if t not in seen:
                        raise GraphError(f"emitter {em.vertex} pattern names undeclared vertex {t!r}")
                for e in em.prefix:
                    if e.source != em.vertex:
                        raise GraphError(f"prefix edge {e.id} does not start at {em.vertex}")
                materialized = tuple(e for e in self.edges if e.source == em.vertex)
                if materialized != em.prefix:
                    raise GraphError(
                        f"edges out of countable emitter {em.vertex} must be listed in its prefix"
                    )
            elif em.kind == UNCOUNTABLE:
                if em.prefix or em.pattern:
                    raise GraphError(f"uncountable emitter {em.vertex} carries no enumeration")
            else:
                raise GraphError(f"unknown emitter kind {em.kind!r}")

    # -- lookups -----------------------------------------------------------

    @cached_property
    def edge_map(self) -> dict[str, Edge]:
        return {e.id: e for e in self.edges}

    @cached_property
    def out_edges(self) -> dict[str, tuple[Edge, ...]]:
        out: dict[str, list[Edge]] = {v: [] for v in self.vertices}
        for e in self.edges:
            out[e.source].append(e)
        return {v: tuple(es) for v, es in out.items()}

    @cached_property
    def in_edges(self) -> dict[str, tuple[Edge, ...]]:
        inc: dict[str, list[Edge]] = {v: [] for v in self.vertices}
        for e in self.edges:
            inc[e.range].append(e)
        return {v: tuple(es) for v, es in inc.items()}

    @cached_property
    def emitter_map(self) -> dict[str, Emitter]:
        return {em.vertex: em for em in self.emitters}

    @cached_property
    def vertex_index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    def emitter_class(self, v: str) -> str:
        em = self.emitter_map.get(v)
        if em is not None:
            return em.kind
        return REGULAR if self.out_edges[v] else SINK

    def sinks(self) -> list[str]:
        return [v for v in self.vertices if self.emitter_class(v) == SINK]

    def regular_vertices(self) -> list[str]:
        return [v for v in self.vertices if self.emitter_class(v) == REGULAR]

    def infinite_emitters(self) -> list[str]:
        return [em.vertex for em in self.emitters]

    def is_row_finite(self) -> bool:
        return not self.emitters

    def range_set(self, v: str) -> frozenset[str]:
        """Ranges of every edge out of ``v``, including non-materialized ones.

        For an uncountable emitter the declared edges are taken to represent
        all of its ranges.
        """
        ranges = {e.range for e in self.out_edges[v]}
        em = self.emitter_map.get(v)
        if em is not None and em.kind == COUNTABLE:
            ranges.update(em.pattern)
        return frozenset(ranges)

    def relabel(self, vertex_map: Mapping[str, str] | None = None,
                edge_map: Mapping[str, str] | None = None) -> "Graph":
        vm = dict(vertex_map or {})
        em_ = dict(edge_map or {})
        v = lambda x: vm.get(x, x)
        ed = lambda e: Edge(em_.get(e.id, e.id), v(e.source), v(e.range))
        return Graph(
            tuple(v(x) for x in self.vertices),
            tuple(ed(e) for e in self.edges),
            tuple(Emitter(v(m.vertex), m.kind, tuple(ed(e) for e in m.prefix),
                          tuple(v(t) for t in m.pattern)) for m in self.emitters),
            self.name,
        )


# -- parsing and printing ----------------------------------------------------

_TOKEN = re.compile(rf"\s*(?:(->)|([:,])|({ID_RE}))")


def _tokenize(line: str, lineno: int) -> list[tuple[str, int]]:
    tokens = []
    pos = 0
    stripped = len(line.rstrip())
    while pos < stripped:
        m = _TOKEN.match(line, pos)
        if not m or m.end() == pos:
            col = pos + 1 + (len(line[pos:]) - len(line[pos:].lstrip()))
            raise GraphSyntaxError(f"unexpected character {line[col - 1]!r}", lineno, col)
        text = m.group(m.lastindex)
        tokens.append((text, m.start(m.lastindex) + 1))
        pos = m.end()
    return tokens


class _Line:
    def __init__(self, tokens, lineno, raw):
        self.tokens = tokens
        self.i = 0
        self.lineno = lineno
        self.end_col = len(raw.rstrip()) + 1

    def peek(self):
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def take(self, what="identifier", literal=None):
        if self.i >= len(self.tokens):
            raise GraphSyntaxError(f"expected {literal or what}", self.lineno, self.end_col)
        text, col = self.tokens[self.i]
        if literal is not None and text != literal:
            raise GraphSyntaxError(f"expected {literal!r}, found {text!r}", self.lineno, col)
        if literal is None and not re.fullmatch(ID_RE, text):
            raise GraphSyntaxError(f"expected {what}, found {text!r}", self.lineno, col)
        self.i += 1
        return text, col

    def done(self):
        if self.i < len(self.tokens):
            text, col = self.tokens[self.i]
            raise GraphSyntaxError(f"unexpected {text!r}", self.lineno, col)


def _edge_triplet(ln: _Line, sep: str) -> tuple[Edge, int]:
    eid, col = ln.take("edge id")
    ln.take(literal=sep)
    src, _ = ln.take("vertex id")
    ln.take(literal="->")
    rng, _ = ln.take("vertex id")
    return Edge(eid, src, rng), col


def parse_graph(text: str) -> Graph:
    """Parse the graph-file format.  Raises GraphSyntaxError / GraphError."""
    name = ""
    vertices: list[str] = []
    edges: list[Edge] = []
    emitters: list[Emitter] = []
    where: dict[str, tuple[int, int]] = {}

    def declare(ident, lineno, col):
        if ident in where:
            raise GraphSyntaxError(f"duplicate id {ident!r}", lineno, col)
        where[ident] = (lineno, col)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        raw = raw.split("#", 1)[0]
        tokens = _tokenize(raw, lineno)
        if not tokens:
            continue
        ln = _Line(tokens, lineno, raw)
        kw, kw_col = ln.take("keyword")
        if kw == "graph":
            name, _ = ln.take("graph name")
        elif kw == "vertex":
            ident, col = ln.take("vertex id")
            declare(ident, lineno, col)
            vertices.append(ident)
            while ln.peek() is not None:
                ident, col = ln.take("vertex id")
                declare(ident, lineno, col)
                vertices.append(ident)
        elif kw == "edge":
            e, col = _edge_triplet(ln, ":")
            declare(e.id, lineno, col)
            edges.append(e)
        elif kw == "emitter":
            v, vcol = ln.take("vertex id")
            kind, kcol = ln.take("emitter kind")
            if kind == UNCOUNTABLE:
                emitters.append(Emitter(v, UNCOUNTABLE))
            elif kind == COUNTABLE:
                ln.take(literal="prefix")
                prefix = []
                while ln.peek() not in (None, "pattern"):
                    e, col = _edge_triplet(ln, ":")
                    if e.source != v:
                        raise GraphSyntaxError(f"prefix edge {e.id} must start at {v}", lineno, col)
                    declare(e.id, lineno, col)
                    prefix.append(e)
                    if ln.peek() == ",":
                        ln.take(literal=",")
                ln.take(literal="pattern")
                pattern = []
                while ln.peek() is not None:
                    pattern.append(ln.take("vertex id")[0])
                if not pattern:
                    raise GraphSyntaxError("pattern needs at least one vertex", lineno, ln.end_col)
                edges.extend(prefix)
                emitters.append(Emitter(v, COUNTABLE, tuple(prefix), tuple(pattern)))
            else:
                raise GraphSyntaxError(f"unknown emitter kind {kind!r}", lineno, kcol)
        else:
            raise GraphSyntaxError(f"unknown directive {kw!r}", lineno, kw_col)
        ln.done()

    if not vertices:
        raise GraphError("graph declares no vertices")
    known = set(vertices)
    for e in edges:
        for end in (e.source, e.range):
            if end not in known:
                line, col = where[e.id]
                raise GraphSyntaxError(f"edge {e.id} refers to undeclared vertex {end!r}", line, col)
    # edges declared with `edge` lines must precede nothing in particular; order
    # within a countable emitter is the prefix order
    prefix_ids = {e.id for em in emitters for e in em.prefix}
    plain = [e for e in edges if e.id not in prefix_ids]
    ordered = plain + [e for em in emitters for e in em.prefix]
    return Graph(tuple(vertices), tuple(ordered), tuple(emitters), name)


def load_graph(path) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read())


def format_graph(g: Graph) -> str:
    lines = []
    if g.name:
        lines.append(f"graph {g.name}")
    lines += [f"vertex {v}" for v in g.vertices]
    prefix_ids = {e.id for em in g.emitters for e in em.prefix}
    lines += [f"edge {e.id} : {e.source} -> {e.range}" for e in g.edges if e.id not in prefix_ids]
    for em in g.emitters:
        if em.kind == UNCOUNTABLE:
            lines.append(f"emitter {em.vertex} uncountable")
        else:
            pre = ", ".join(f"{e.id}:{e.source}->{e.range}" for e in em.prefix)
            pre = f" {pre}" if pre else ""
            lines.append(f"emitter {em.vertex} countable prefix{pre} pattern {' '.join(em.pattern)}")
    return "\n".join(lines) + "\n"


# -- paths and cycles (materialized edges) -----------------------------------

def make_path(g: Graph, edge_ids: Sequence[str], vertex: str | None = None) -> Path:
    if not edge_ids:
        if vertex not in g.vertex_index:
            raise GraphError(f"unknown vertex {vertex!r}")
        return Path((), vertex, vertex)
    es = [g.edge_map[e] for e in edge_ids]
    for a, b in zip(es, es[1:]):
        if a.range != b.source:
            raise GraphError(f"edges {a.id} and {b.id} do not compose")
    return Path(tuple(edge_ids), es[0].source, es[-1].range)


def _canonical_rotation(ids: tuple[str, ...]) -> tuple[str, ...]:
    return min(ids[i:] + ids[:i] for i in range(len(ids)))


def cycles(g: Graph) -> list[Path]:
    """All cycles over materialized edges, one per rotation class.

    A cycle is a closed path whose edges have pairwise distinct sources, so
    its length never exceeds the number of vertices.  Each class is
    reported by its lexicographically least rotation.
    """
    idx = g.vertex_index
    found: set[tuple[str, ...]] = set()

    def extend(start, v, used, trail):
        for e in g.out_edges[v]:
            if e.range == start:
                found.add(_canonical_rotation(tuple(trail + [e.id])))
            elif idx[e.range] > idx[start] and e.range not in used:
                used.add(e.range)
                extend(start, e.range, used, trail + [e.id])
                used.discard(e.range)

    for s in g.vertices:
        extend(s, s, {s}, [])
    return [make_path(g, c) for c in sorted(found, key=lambda c: (len(c), c))]


def _paths_avoiding(g: Graph, base: str) -> dict[str, tuple[Edge, ...]]:
    # out-edges with those of `base` removed: intermediate sources avoid it
    return {v: (() if v == base else es) for v, es in g.out_edges.items()}


def _count_paths(out: Mapping[str, Sequence], start: str, goal: str, cap: int) -> int:
    """Number of paths start -> goal in ``out`` (capped at ``cap``).

    ``out`` maps a vertex to its outgoing (id, target) arcs.  Returns ``cap``
    whenever there are at least that many, including infinitely many.
    """
    reach, stack = {start}, [start]
    while stack:
        v = stack.pop()
        for _, t in out.get(v, ()):
            if t not in reach:
                reach.add(t)
                stack.append(t)
    if goal not in reach:
        return 0
    back: dict[str, list[str]] = {}
    for v in reach:
        for _, t in out.get(v, ()):
            back.setdefault(t, []).append(v)
    coreach, stack = {goal}, [goal]
    while stack:
        v = stack.pop()
        for u in back.get(v, ()):
            if u not in coreach:
                coreach.add(u)
                stack.append(u)
    live = reach & coreach
    memo: dict[str, int] = {}
    on_stack: set[str] = set()

    def count(v):
        if v in memo:
            return memo[v]
        if v in on_stack:
            raise _Infinite
        on_stack.add(v)
        total = 1 if v == goal else 0
        for _, t in out.get(v, ()):
            if t in live:
                total += count(t)
        on_stack.discard(v)
        memo[v] = min(total, cap)
        return memo[v]

    try:
        return min(count(start), cap)
    except _Infinite:
        return cap


class _Infinite(Exception):
    pass


def closed_simple_paths(g: Graph, v: str, max_length: int | None = None) -> list[Path]:
    """Closed paths based at ``v`` that do not pass through ``v`` in between.

    Other vertices may repeat, so there can be infinitely many; in that case
    ``max_length`` must be given and only paths up to that length are listed.
    Only materialized edges are used.
    """
    if v not in g.vertex_index:
        raise GraphError(f"unknown vertex {v!r}")
    out = {u: tuple((e.id, e.range) for e in es) for u, es in g.out_edges.items()}
    if max_length is None and _closed_simple_count(out, v, cap=10**9) >= 10**9:
        raise ValueError(f"vertex {v} has infinitely many closed simple paths; pass max_length")
    found: list[tuple[str, ...]] = []
    # only wander through vertices that can still get back to v
    back, stack = {v}, [v]
    while stack:
        for e in g.in_edges[stack.pop()]:
            if e.source not in back:
                back.add(e.source)
                stack.append(e.source)

    def walk(u, trail):
        if max_length is not None and len(trail) >= max_length:
            return
        for e in g.out_edges[u]:
            if e.range == v:
                found.append(tuple(trail + [e.id]))
            elif e.range in back:
                walk(e.range, trail + [e.id])

    walk(v, [])
    return [make_path(g, p) for p in sorted(found, key=lambda p: (len(p), p))]


def _closed_simple_count(out: Mapping[str, Sequence], v: str, cap: int) -> int:
    avoid = {u: (() if u == v else arcs) for u, arcs in out.items()}
    total = 0
    for _, t in out.get(v, ()):
        if t == v:
            total += 1
        else:
            total += _count_paths(avoid, t, v, cap)
        if total >= cap:
            return cap
    return total


# -- predicates on the full (possibly infinite) graph -------------------------

def predicate_arcs(g: Graph) -> dict[str, tuple[tuple[str, str], ...]]:
    """A finite multigraph with the same cycle structure as ``g``.

    Each infinite emitter keeps its materialized edges and gets two parallel
    arcs to every range it hits infinitely often (every pattern range; every
    declared range of an uncountable emitter).  Two copies are enough
    because the predicates only ever ask whether something happens at least
    twice.
    """
    arcs: dict[str, list[tuple[str, str]]] = {v: [(e.id, e.range) for e in g.out_edges[v]]
                                              for v in g.vertices}
    for em in g.emitters:
        if em.kind == COUNTABLE:
            hits = sorted(set(em.pattern), key=g.vertex_index.get)
        else:
            hits = sorted({e.range for e in g.out_edges[em.vertex]}, key=g.vertex_index.get)
        for t in hits:
            arcs[em.vertex] += [(f"{em.vertex}~{t}~1", t), (f"{em.vertex}~{t}~2", t)]
    return {v: tuple(a) for v, a in arcs.items()}


def _strong_components(arcs: Mapping[str, Sequence]) -> list[set[str]]:
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    stack: list[str] = []
    on: set[str] = set()
    comps: list[set[str]] = []
    counter = [0]

    def visit(v):
        # iterative Tarjan to stay clear of recursion limits
        work = [(v, iter(arcs.get(v, ())))]
        index[v] = low[v] = counter[0]
        counter[0] += 1
        stack.append(v)
        on.add(v)
        while work:
            u, it = work[-1]
            for _, t in it:
                if t not in index:
                    index[t] = low[t] = counter[0]
                    counter[0] += 1
                    stack.append(t)
                    on.add(t)
                    work.append((t, iter(arcs.get(t, ()))))
                    break
                if t in on:
                    low[u] = min(low[u], index[t])
            else:
                work.pop()
                if work:
                    low[work[-1][0]] = min(low[work[-1][0]], low[u])
                if low[u] == index[u]:
                    comp = set()
                    while True:
                        w = stack.pop()
                        on.discard(w)
                        comp.add(w)
                        if w == u:
                            break
                    comps.append(comp)

    for v in arcs:
        if v not in index:
            visit(v)
    return comps


def vertices_on_closed_paths(arcs: Mapping[str, Sequence]) -> set[str]:
    on_cycle = set()
    for comp in _strong_components(arcs):
        if len(comp) > 1:
            on_cycle |= comp
        else:
            (v,) = comp
            if any(t == v for _, t in arcs.get(v, ())):
                on_cycle.add(v)
    return on_cycle


def exitless_cycle(arcs: Mapping[str, Sequence]) -> list[str] | None:
    """Vertices of a cycle without exit, or None.

    A cycle has no exit exactly when each of its vertices emits one arc, so
    it suffices to follow unique successors.
    """
    for start in arcs:
        seen = [start]
        v = start
        while len(arcs.get(v, ())) == 1:
            v = arcs[v][0][1]
            if v == start:
                return seen
            if v in seen:
                break
            seen.append(v)
    return None


def condition_L_arcs(arcs: Mapping[str, Sequence]) -> bool:
    return exitless_cycle(arcs) is None


def condition_K_arcs(arcs: Mapping[str, Sequence]) -> bool:
    return all(_closed_simple_count(arcs, v, cap=2) >= 2
               for v in vertices_on_closed_paths(arcs))


def condition_L(g: Graph) -> bool:
    """Every cycle has an exit.  Infinite emitters always provide one."""
    return condition_L_arcs(predicate_arcs(g))


def condition_K(g: Graph) -> bool:
    """Every vertex on a closed simple path is the base of at least two."""
    return condition_K_arcs(predicate_arcs(g))


# -- hereditary and saturated sets ------------------------------------------

def is_hereditary(g: Graph, X: Iterable[str]) -> bool:
    X = set(X)
    return all(g.range_set(v) <= X for v in X)


def is_saturated(g: Graph, X: Iterable[str]) -> bool:
    X = set(X)
    return all(v in X for v in g.regular_vertices() if g.range_set(v) <= X)


def hs_closure(g: Graph, X: Iterable[str]) -> frozenset[str]:
    """Smallest hereditary and saturated set containing ``X``.

    Saturation only ever adds regular vertices; sinks and infinite emitters
    are never forced in.
    """
    H = set(X)
    unknown = H - set(g.vertices)
    if unknown:
        raise GraphError(f"unknown vertices {sorted(unknown)}")
    regular = g.regular_vertices()
    changed = True
    while changed:
        changed = False
        stack = list(H)
        while stack:
            v = stack.pop()
            for t in g.range_set(v):
                if t not in H:
                    H.add(t)
                    stack.append(t)
                    changed = True
        for v in regular:
            if v not in H and g.range_set(v) <= H:
                H.add(v)
                changed = True
    return frozenset(H)


def _sort_key(g: Graph):
    idx = g.vertex_index
    return lambda S: (len(S), sorted(idx[v] for v in S))


@dataclass(frozen=True)
class HSLattice:
    """Hereditary saturated subsets ordered by inclusion.

    ``meet[i][j]`` and ``join[i][j]`` index into ``members``.
    """

    members: tuple[frozenset[str], ...]
    meet: tuple[tuple[int, ...], ...] = field(repr=False)
    join: tuple[tuple[int, ...], ...] = field(repr=False)

    def __len__(self):
        return len(self.members)

    def __iter__(self) -> Iterator[frozenset[str]]:
        return iter(self.members)

    def __contains__(self, X) -> bool:
        return frozenset(X) in self.members

    def index(self, X) -> int:
        return self.members.index(frozenset(X))

    def leq(self, i: int, j: int) -> bool:
        return self.members[i] <= self.members[j]


def hs_lattice(g: Graph) -> HSLattice:
    # every hereditary saturated set is the join of the closures of its points
    atoms = {hs_closure(g, {v}) for v in g.vertices}
    found = {hs_closure(g, ())}
    frontier = list(found)
    while frontier:
        nxt = []
        for H in frontier:
            for A in atoms:
                J = hs_closure(g, H | A)
                if J not in found:
                    found.add(J)
                    nxt.append(J)
        frontier = nxt
    members = tuple(sorted(found, key=_sort_key(g)))
    pos = {S: i for i, S in enumerate(members)}
    meet = tuple(tuple(pos[a & b] for b in members) for a in members)
    join = tuple(tuple(pos[hs_closure(g, a | b)] for b in members) for a in members)
    return HSLattice(members, meet, join)


def cofinal(g: Graph) -> bool:
    """Only the empty set and the full vertex set are hereditary saturated."""
    return len(hs_lattice(g)) == 2


def all_subsets(vertices: Sequence[str]) -> Iterator[frozenset[str]]:
    for k in range(len(vertices) + 1):
        for c in combinations(vertices, k):
            yield frozenset(c)
