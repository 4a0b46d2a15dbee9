"""Arithmetic in L_K(E): relations, normal forms, grading, dimension."""

import random

from lpa import graph as gr
from lpa.algebra import LeavittPathAlgebra, basis, dimension, grade, random_element
from lpa.cli import CORPUS
from lpa.fields import GF

rose = gr.load_graph(CORPUS / "rose2.graph")       # one vertex v, loops e and f
A = LeavittPathAlgebra(rose)
v, e, f = A.vertex("v"), A.edge("e"), A.edge("f")
es, fs = A.ghost("e"), A.ghost("f")

es * e          # v
es * f          # 0
e * es          # rewritten: e is the designated edge at v, so e e^ = v - f f^
print(e * es, "|", e * es + f * fs)

x = A.parse("2*e.f^ + 3*v - 1/2*f")
print(x, "  degrees:", sorted(x.degrees()))
print({d: str(c) for d, c in grade(x).items()})

# same graph, coefficients mod 5
A5 = LeavittPathAlgebra(rose, GF(5))
print(A5.parse("7*e + 1/2*v"))

# A_n is M_n(K): dimension n^2, and the basis lists the monomials
for n in (2, 3, 4):
    g = gr.load_graph(CORPUS / f"line_a{n}.graph")
    print(f"A{n}", dimension(g), [m.text() for m in basis(LeavittPathAlgebra(g))][:5], "...")
print("loop:", dimension(gr.load_graph(CORPUS / "loop.graph")))

# random spot check of associativity
rng = random.Random(0)
xs = [random_element(A, rng) for _ in range(3)]
print((xs[0] * xs[1]) * xs[2] == xs[0] * (xs[1] * xs[2]))
