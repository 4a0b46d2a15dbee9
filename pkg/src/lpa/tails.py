"""Desingularization: infinite tails at sinks and countable emitters.

The desingularized graph F is infinite, so it is kept intensionally as the
finite core plus one tail descriptor per anchor.  Tail vertex j of anchor
``w`` is named ``w.j`` (``w.0`` is ``w`` itself) and its edges are
``w.f<j>`` (along the tail) and ``w.g<j>`` (back into the graph, emitter
tails only).  ``truncate`` gives a finite window for algebra computations;
the graph predicates on F are computed exactly from the descriptors.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations
from typing import NamedTuple

from .graph import (
    COUNTABLE, ID_RE, SINK, UNCOUNTABLE, Edge, Graph, GraphError, GraphSyntaxError,
    condition_K_arcs, condition_L_arcs, format_graph, parse_graph,
)

SINK_TAIL = "sink"
EMITTER_TAIL = "emitter"


class UncountableEmitter(GraphError):
    """A graph with an uncountable emitter has no desingularization."""

    def __init__(self, vertex: str):
        super().__init__(
            f"vertex {vertex} is an uncountable emitter; "
            "the graph does not admit any desingularization"
        )
        self.vertex = vertex


@dataclass(frozen=True)
class Tail:
    anchor: str
    kind: str
    targets: tuple[str, ...] = ()
    pattern: tuple[str, ...] = ()

    def target(self, j: int) -> str:
        """Range of g_j, i.e. of the j-th edge of the original emitter."""
        if j <= len(self.targets):
            return self.targets[j - 1]
        return self.pattern[(j - len(self.targets) - 1) % len(self.pattern)]

    def vertex(self, j: int) -> str:
        return self.anchor if j == 0 else f"{self.anchor}.{j}"


@dataclass(frozen=True)
class TailedGraph:
    core: Graph
    tails: tuple[Tail, ...] = ()

    @property
    def tail_map(self) -> dict[str, Tail]:
        return {t.anchor: t for t in self.tails}


class TailPredicates(NamedTuple):
    L: bool
    K: bool
    cofinal: bool
    hs_count: int


def _check_fresh(core: Graph, anchors):
    ids = set(core.vertices) | set(core.edge_map)
    for a in anchors:
        pat = re.compile(rf"{re.escape(a)}\.(?:[fg])?[0-9]+")
        clash = sorted(i for i in ids if pat.fullmatch(i))
        if clash:
            raise GraphError(f"tail ids for {a} collide with existing ids {clash}")


def desingularize(g: Graph) -> TailedGraph:
    """Attach a tail to every sink and every countable emitter.

    Edges out of an emitter are enumerated in declaration order (prefix,
    then the repeating pattern); a different enumeration gives a different
    but Morita equivalent graph.
    """
    for em in g.emitters:
        if em.kind == UNCOUNTABLE:
            raise UncountableEmitter(em.vertex)
    emitter_edges = {e.id for em in g.emitters for e in em.prefix}
    core = Graph(g.vertices, tuple(e for e in g.edges if e.id not in emitter_edges), (), g.name)
    tails = []
    for v in g.vertices:
        cls = g.emitter_class(v)
        if cls == SINK:
            tails.append(Tail(v, SINK_TAIL))
        elif cls == COUNTABLE:
            em = g.emitter_map[v]
            tails.append(Tail(v, EMITTER_TAIL, tuple(e.range for e in em.prefix), em.pattern))
    _check_fresh(core, [t.anchor for t in tails])
    return TailedGraph(core, tuple(tails))


def truncate(tg: TailedGraph, depth: int) -> Graph:
    """Finite window of F: tail vertices up to index ``depth``.

    The last tail vertex becomes an artificial sink, so graph predicates of
    the window are NOT those of F.
    """
    if depth < 1:
        raise ValueError("truncation depth must be at least 1")
    vertices = list(tg.core.vertices)
    edges = list(tg.core.edges)
    for t in tg.tails:
        for j in range(1, depth + 1):
            vertices.append(t.vertex(j))
            edges.append(Edge(f"{t.anchor}.f{j}", t.vertex(j - 1), t.vertex(j)))
            if t.kind == EMITTER_TAIL:
                edges.append(Edge(f"{t.anchor}.g{j}", t.vertex(j - 1), t.target(j)))
    return Graph(tuple(vertices), tuple(edges), (), tg.core.name)


# -- exact predicates on the infinite graph ---------------------------------

def tailed_arcs(tg: TailedGraph) -> dict[str, tuple[tuple[str, str], ...]]:
    """Finite multigraph with the cycle structure of F.

    Tail vertices past the explicit prefix of an emitter tail are merged
    into one vertex ``<anchor>.*`` with two arcs to every pattern range; a
    sink tail contributes a single arc into a dead end.
    """
    arcs = {v: [(e.id, e.range) for e in tg.core.out_edges[v]] for v in tg.core.vertices}
    for t in tg.tails:
        if t.kind == SINK_TAIL:
            arcs[t.anchor].append((f"{t.anchor}.f1", f"{t.anchor}.*"))
            arcs[f"{t.anchor}.*"] = []
            continue
        m = len(t.targets)
        for j in range(1, m + 1):
            arcs.setdefault(t.vertex(j - 1), [])
            arcs[t.vertex(j - 1)] += [(f"{t.anchor}.f{j}", t.vertex(j)),
                                     (f"{t.anchor}.g{j}", t.target(j))]
        rest = f"{t.anchor}.*"
        arcs.setdefault(t.vertex(m), [])
        arcs[t.vertex(m)] += [(f"{t.anchor}.f{m + 1}", rest),
                             (f"{t.anchor}.g{m + 1}", t.target(m + 1))]
        hits = []
        for q in t.pattern:
            if q not in hits:
                hits.append(q)
        arcs[rest] = [(f"{rest}~{q}~{k}", q) for q in hits for k in (1, 2)]
    return {v: tuple(a) for v, a in arcs.items()}


def _tail_options(t: Tail, anchor_in: bool, C: frozenset[str]) -> int:
    """Number of admissible memberships of the tail vertices.

    A hereditary saturated set meets a tail in an up-set {j >= j0}
    (j0 = None for the empty trace); each candidate is checked against
    heredity and saturation at every tail vertex of a window long enough to
    cover one full period of the pattern.
    """
    m, P = len(t.targets), max(len(t.pattern), 1)
    count = 0
    for j0 in list(range(0, m + 2 * P + 3)) + [None]:
        member = (lambda j: False) if j0 is None else (lambda j, j0=j0: j >= j0)
        if member(0) != anchor_in:
            continue
        window = (m if j0 is None else max(j0, m)) + P + 1
        ok = True
        for j in range(window + 1):
            nxt = member(j + 1)
            if t.kind == SINK_TAIL:
                out_in = nxt
            else:
                out_in = nxt and t.target(j + 1) in C
            if member(j) and not out_in:
                ok = False  # heredity
                break
            if out_in and not member(j):
                ok = False  # saturation: v_j is regular
                break
        count += ok
    return count


def tailed_hs_count(tg: TailedGraph) -> int:
    core = tg.core
    anchors = tg.tail_map
    regular = [v for v in core.vertices if v not in anchors]
    verts = core.vertices
    total = 0
    for k in range(len(verts) + 1):
        for combo in combinations(verts, k):
            C = frozenset(combo)
            ok = True
            for v in regular:
                inside = all(e.range in C for e in core.out_edges[v])
                if (v in C) != inside:
                    ok = False
                    break
            if not ok:
                continue
            prod = 1
            for a, t in anchors.items():
                prod *= _tail_options(t, a in C, C)
                if not prod:
                    break
            total += prod
    return total


def predicates_on_tailed(tg: TailedGraph) -> TailPredicates:
    arcs = tailed_arcs(tg)
    n = tailed_hs_count(tg)
    return TailPredicates(condition_L_arcs(arcs), condition_K_arcs(arcs), n == 2, n)


# -- text format ------------------------------------------------------------

def format_tailed(tg: TailedGraph) -> str:
    lines = [format_graph(tg.core).rstrip("\n")]
    for t in tg.tails:
        if t.kind == SINK_TAIL:
            lines.append(f"tail {t.anchor} sink")
        else:
            targets = " ".join(t.targets)
            lines.append(f"tail {t.anchor} emitter targets{' ' if targets else ''}{targets}"
                         f" pattern {' '.join(t.pattern)}")
    return "\n".join(lines) + "\n"


_TAIL_RE = re.compile(
    rf"tail\s+({ID_RE})\s+(?:(sink)|emitter\s+targets((?:\s+{ID_RE})*?)\s+pattern((?:\s+{ID_RE})+))\s*$"
)


def parse_tailed(text: str) -> TailedGraph:
    body, tails = [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line.startswith("tail"):
            m = _TAIL_RE.match(line)
            if not m:
                raise GraphSyntaxError("malformed tail line", lineno, 1)
            anchor = m.group(1)
            if m.group(2):
                tails.append(Tail(anchor, SINK_TAIL))
            else:
                tails.append(Tail(anchor, EMITTER_TAIL, tuple(m.group(3).split()),
                                  tuple(m.group(4).split())))
            body.append("")
        else:
            body.append(raw)
    core = parse_graph("\n".join(body))
    for t in tails:
        for v in (t.anchor,) + t.targets + t.pattern:
            if v not in core.vertex_index:
                raise GraphError(f"tail at {t.anchor} names unknown vertex {v!r}")
    return TailedGraph(core, tuple(tails))
