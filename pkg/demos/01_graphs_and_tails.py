"""Graph predicates, the HS lattice, and what desingularization does to them."""

from lpa import graph as gr
from lpa.cli import CORPUS
from lpa.tails import desingularize, format_tailed, predicates_on_tailed, truncate

# Toeplitz graph: a loop c at u plus an edge f out to a sink v
g = gr.load_graph(CORPUS / "toeplitz.graph")
print(gr.format_graph(g))

print("cycles:", [str(c) for c in gr.cycles(g)])
print("L:", gr.condition_L(g), " K:", gr.condition_K(g))   # f is an exit; u has only one closed path

lat = gr.hs_lattice(g)
print("hereditary saturated sets:", [sorted(X) for X in lat])
print("cofinal:", gr.cofinal(g))

# the sink v gets an infinite tail; the predicates do not move
tg = desingularize(g)
print(format_tailed(tg))
print(predicates_on_tailed(tg))

# a finite window of the (infinite) desingularized graph
print(gr.format_graph(truncate(tg, 3)))

# countable emitter: u sends infinitely many edges to w
mixed = gr.load_graph(CORPUS / "mixed.graph")
print(gr.format_graph(truncate(desingularize(mixed), 2)))

# an uncountable emitter has no desingularization at all
try:
    desingularize(gr.load_graph(CORPUS / "uncountable.graph"))
except Exception as exc:
    print(type(exc).__name__, "->", exc)
