"""Local rings, corner isomorphisms and FM windows over M_2(F_p)."""

import random

import numpy as np

from lpa.cli import CORPUS
from lpa.fields import GF
from lpa.graph import load_graph
from lpa.morita import (
    SigmaUnitLadder, context_from_desingularization, desigualdad_check, equivlocal_construct,
    escalera_window, isolocales_iso, local_ring_at, matrix_context, matrix_decomposition,
    regular_elements, verify_context, vertex_decomposition,
)
from lpa.rings import FiniteRing

R = FiniteRing.matrices(2, 2)
print(R.name, R.size, "elements;", "associative:", R.is_associative())
print("structure constants:", R.structure.shape, "nonzero:", np.count_nonzero(R.structure))

# every element of M_2(F_2) is regular (it is a matrix ring over a field)
regs = regular_elements(R)
print(len(regs), "regular elements")

# the local ring at the nilpotent E12 is a copy of F_2
E12, E21 = ((0, 1), (0, 0)), ((0, 0), (1, 0))
L = local_ring_at(R, E12)
print(L.elements(), L.product(E12, E12))
print(isolocales_iso(R, E12, E21).report.format())

# matrix context over F_2: the corner at each idempotent is a corner of M_n(F_2)
ctx = matrix_context(GF(2), 2)
for e in R.idempotents():
    res = equivlocal_construct(ctx, e, matrix_decomposition(ctx, e))
    print(e, "n =", res.n, "u =", res.u, res.report.ok)

I2, E11 = ((1, 0), (0, 1)), ((1, 0), (0, 0))
print(desigualdad_check(ctx, E11, I2, matrix_decomposition(ctx, I2)).format())

# FM(R) seen through finite windows
ladder = SigmaUnitLadder(R, [E11, I2])
print(escalera_window(R, ladder, 1).format())

# the corner context coming from a desingularized graph
g = load_graph(CORPUS / "mixed.graph")
dctx = context_from_desingularization(g, depth=8)
rng = random.Random(0)
print(verify_context(dctx, 200, rng).format())
A = dctx.S.algebra
res = equivlocal_construct(dctx, A.vertex("u"), vertex_decomposition(dctx, "u"), samples=200, rng=rng)
print(res.report.format())
