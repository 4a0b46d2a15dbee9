"""Hypothesis strategies for small graph files."""

from hypothesis import strategies as st

from lpa.graph import parse_graph


@st.composite
def graph_texts(draw, max_vertices=4, max_edges=6, emitters=True):
    n = draw(st.integers(1, max_vertices))
    vs = [f"v{i}" for i in range(n)]
    edges = draw(st.lists(st.tuples(st.sampled_from(vs), st.sampled_from(vs)), max_size=max_edges))
    lines = ["vertex " + " ".join(vs)]
    fans = {}
    if emitters and draw(st.booleans()):
        u = draw(st.sampled_from(vs))
        fans[u] = draw(st.lists(st.sampled_from(vs), min_size=1, max_size=2))
    prefix = {u: [] for u in fans}
    for k, (s, r) in enumerate(edges):
        if s in fans:
            prefix[s].append(f"x{k}:{s}->{r}")
        else:
            lines.append(f"edge x{k} : {s} -> {r}")
    for u, pattern in fans.items():
        pre = ", ".join(prefix[u])
        lines.append(f"emitter {u} countable prefix {pre} pattern {' '.join(pattern)}".replace("  ", " "))
    return "\n".join(lines) + "\n"


def graphs(**kw):
    return graph_texts(**kw).map(parse_graph)


def acyclic_graphs(max_vertices=4, max_edges=5):
    """Edges only go from lower to higher index, so no cycles."""

    @st.composite
    def build(draw):
        n = draw(st.integers(1, max_vertices))
        vs = [f"v{i}" for i in range(n)]
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        chosen = draw(st.lists(st.sampled_from(pairs), max_size=max_edges)) if pairs else []
        lines = ["vertex " + " ".join(vs)]
        lines += [f"edge x{k} : v{i} -> v{j}" for k, (i, j) in enumerate(chosen)]
        return parse_graph("\n".join(lines) + "\n")

    return build()
