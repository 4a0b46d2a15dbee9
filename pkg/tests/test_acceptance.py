"""Acceptance criteria, one PASS/FAIL line each.

Every criterion pins its runtime limit; the lines are echoed in the pytest
terminal summary (see conftest).
"""

import io
import os
import random
import subprocess
import sys
import time

from lpa import graph as gr
from lpa.algebra import LeavittPathAlgebra, dimension, random_element
from lpa.cli import main
from lpa.fields import GF, QQ
from lpa.morita import (
    SigmaUnitLadder, context_from_desingularization, desigualdad_check, equivlocal_construct,
    escalera_window, isolocales_iso, matrix_context, matrix_decomposition, regular_elements,
    verify_context, vertex_decomposition,
)
from lpa.rings import FiniteRing, matmul
from conftest import ACCEPTANCE_LINES, CORPUS
from oracles import brute_dimension, brute_regular

SEED = 20240601

# hand-derived: (L, K, cofinal, |HS|)
EXPECTED_TABLE = {
    "breaking": ("true", "false", "false", 3),
    "countable_clock": ("true", "true", "false", 5),
    "diamond": ("true", "true", "true", 2),
    "emitter_loop": ("true", "true", "true", 2),
    "line_a2": ("true", "true", "true", 2),
    "line_a3": ("true", "true", "true", 2),
    "line_a4": ("true", "true", "true", 2),
    "loop": ("false", "false", "true", 2),
    "mixed": ("true", "true", "false", 3),
    "rose2": ("true", "true", "true", 2),
    "rose3": ("true", "true", "true", 2),
    "toeplitz": ("true", "false", "false", 3),
    "two_component": ("false", "false", "false", 4),
    "two_cycle": ("false", "false", "true", 2),
    "uncountable": ("true", "true", "false", 3),
}

UNCOUNTABLE_MESSAGE = ("lpa: vertex u is an uncountable emitter; "
                       "the graph does not admit any desingularization\n")

E11, I2 = ((1, 0), (0, 0)), ((1, 0), (0, 1))


def record(number, title, passed, elapsed, limit, detail=""):
    ok = passed and elapsed < limit
    timing = f"{elapsed:.2f}s < {limit:g}s" if elapsed < limit else f"{elapsed:.2f}s exceeds {limit:g}s"
    line = f"{'PASS' if ok else 'FAIL'}  [{number:>2}] {title} ({timing})"
    if detail:
        line += f"  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def finite_graphs():
    graphs = {p.stem: gr.load_graph(p) for p in sorted(CORPUS.glob("*.graph"))}
    return {k: g for k, g in graphs.items() if g.is_row_finite()}


def test_criterion_01_predicate_corpus():
    t0 = time.perf_counter()
    files = sorted(CORPUS.glob("*.graph"))
    mismatches = []
    for f in files:
        code, out, _ = cli("analyze", str(f), "--machine")
        kv = dict(line.split("=", 1) for line in out.splitlines())
        got = (kv["L"], kv["K"], kv["cofinal"], int(kv["hs"]))
        if code != 0 or got != EXPECTED_TABLE[f.stem]:
            mismatches.append(f"{f.stem}: {got}")
    elapsed = time.perf_counter() - t0
    record(1, f"analyze matches the hand-derived table on {len(files)} corpus graphs",
           len(files) >= 12 and not mismatches, elapsed, 1.0, "; ".join(mismatches))


def test_criterion_02_invariance_suite():
    t0 = time.perf_counter()
    code, out, _ = cli("invariance-suite")
    elapsed = time.perf_counter() - t0
    rows = out.splitlines()[:-1]
    bad = [r for r in rows if not r.startswith(("PASS", "SKIPPED(uncountable)"))]
    record(2, "invariance suite passes on every countable corpus graph",
           code == 0 and not bad and len(rows) == 15, elapsed, 5.0, out.splitlines()[-1])


def test_criterion_03_uncountable_rejection():
    t0 = time.perf_counter()
    code, out, err = cli("desingularize", str(CORPUS / "uncountable.graph"))
    elapsed = time.perf_counter() - t0
    record(3, "uncountable emitter exits 3 with the exact message",
           code == 3 and out == "" and err == UNCOUNTABLE_MESSAGE, elapsed, 1.0)


def _relation_failures(A):
    g, failures = A.graph, []
    V = {v: A.vertex(v) for v in g.vertices}
    for v in g.vertices:
        for w in g.vertices:
            if V[v] * V[w] != (V[v] if v == w else A.zero()):
                failures.append(f"V {v}{w}")
    for e in g.edges:
        x, xs = A.edge(e.id), A.ghost(e.id)
        if not (V[e.source] * x == x * V[e.range] == x):
            failures.append(f"E1 {e.id}")
        if not (V[e.range] * xs == xs * V[e.source] == xs):
            failures.append(f"E2 {e.id}")
        for f in g.edges:
            want = V[e.range] if e.id == f.id else A.zero()
            if xs * A.edge(f.id) != want:
                failures.append(f"CK1 {e.id}{f.id}")
    for v in g.regular_vertices():
        total = A.zero()
        for e in g.out_edges[v]:
            total = total + A.edge(e.id) * A.ghost(e.id)
        if total != V[v]:
            failures.append(f"CK2 {v}")
    return failures


def test_criterion_04_algebra_soundness():
    t0 = time.perf_counter()
    failures = []
    triples = pairs = 0
    for name, g in finite_graphs().items():
        for field in (QQ, GF(5)):
            A = LeavittPathAlgebra(g, field)
            failures += [f"{name}/{field}: {f}" for f in _relation_failures(A)]
            rng = random.Random(f"{SEED}/{name}/{field}")
            for _ in range(1000):
                x, y, z = (random_element(A, rng) for _ in range(3))
                triples += 1
                if (x * y) * z != x * (y * z) or x * (y + z) != x * y + x * z \
                        or (x + y) * z != x * z + y * z:
                    failures.append(f"{name}/{field}: ring axioms at {x} | {y} | {z}")
        rng = random.Random(f"{SEED}/{name}/graded")
        A = LeavittPathAlgebra(g)
        for _ in range(1000):
            d1, d2 = rng.randint(-2, 2), rng.randint(-2, 2)
            x = random_element(A, rng, degree=d1)
            y = random_element(A, rng, degree=d2)
            pairs += 1
            if not (x * y).degrees() <= {d1 + d2}:
                failures.append(f"{name}: grading at {x} | {y}")
    elapsed = time.perf_counter() - t0
    record(4, f"relations, {triples} random triples and {pairs} graded pairs",
           not failures, elapsed, 60.0, "; ".join(failures[:3]))


def test_criterion_05_dimension_oracle():
    t0 = time.perf_counter()
    lines = {n: gr.load_graph(CORPUS / f"line_a{n}.graph") for n in (2, 3, 4)}
    got = {n: (dimension(g), brute_dimension(g)) for n, g in lines.items()}
    elapsed = time.perf_counter() - t0
    record(5, "dimension(A_n) = n^2 = brute-force count for n = 2, 3, 4",
           all(d == b == n * n for n, (d, b) in got.items()), elapsed, 5.0, str(got))


def test_criterion_06_isolocales():
    t0 = time.perf_counter()
    detail, ok = [], True
    for p in (2, 3):
        R = FiniteRing.matrices(2, p)
        regs = regular_elements(R)
        good = sum(isolocales_iso(R, a, b).ok for a, b in regs)
        oracle = brute_regular(2, p)
        ok &= {a for a, _ in regs} == oracle and good == len(regs)
        detail.append(f"p={p}: {good}/{len(regs)} (oracle {len(oracle)})")
    elapsed = time.perf_counter() - t0
    record(6, "every regular element of M_2(F_2), M_2(F_3) gives R_a ~ R_ab",
           ok, elapsed, 30.0, ", ".join(detail))


def test_criterion_07_equivlocal():
    t0 = time.perf_counter()
    failures = []
    ctx = matrix_context(GF(2), 2)
    idem = FiniteRing.matrices(2, 2).idempotents()
    for e in idem:
        res = equivlocal_construct(ctx, e, matrix_decomposition(ctx, e), rng=random.Random(SEED))
        if not (res.report.ok and matmul(ctx.S, res.u, res.u) == res.u):
            failures.append(f"matrix e={e}")
    for name in ("line_a2", "mixed"):
        g = gr.load_graph(CORPUS / f"{name}.graph")
        dctx = context_from_desingularization(g, 8)
        rng = random.Random(f"{SEED}/{name}")
        if not verify_context(dctx, 200, rng).ok:
            failures.append(f"{name} context")
        A = dctx.S.algebra
        for v in g.vertices:
            res = equivlocal_construct(dctx, A.vertex(v), vertex_decomposition(dctx, v),
                                       samples=200, rng=rng)
            if not res.report.ok:
                failures.append(f"{name} e={v}: {res.report.failures()[0]}")
    elapsed = time.perf_counter() - t0
    record(7, f"phi iso for {len(idem)} idempotents; A2 and G5 corners at depth 8",
           not failures, elapsed, 60.0, "; ".join(failures))


def test_criterion_08_desigualdad():
    t0 = time.perf_counter()
    ctx = matrix_context(GF(2), 2)
    R = ctx.R
    idem = FiniteRing.matrices(2, 2).idempotents()
    nested = [(e, f) for f in idem for e in idem if R.mul(R.mul(f, e), f) == e]
    bad = [(e, f) for e, f in nested
           if not desigualdad_check(ctx, e, f, matrix_decomposition(ctx, f),
                                    rng=random.Random(SEED)).ok]
    elapsed = time.perf_counter() - t0
    record(8, f"commuting square for {len(nested)} nested pairs in M_2(F_2)",
           not bad and len(nested) == 21, elapsed, 30.0, str(bad) if bad else "")


def test_criterion_09_escalera():
    t0 = time.perf_counter()
    R = FiniteRing.matrices(2, 2)
    ladder = SigmaUnitLadder(R, [E11, I2])
    reps = {n: escalera_window(R, ladder, n) for n in (1, 2)}
    elapsed = time.perf_counter() - t0
    failed = [f"n={n}: {c.name}" for n, r in reps.items() for c in r.failures()]
    record(9, "FM windows and transitions for M_2(F_2), n = 1, 2",
           not failed, elapsed, 30.0, "; ".join(failed))


DETERMINISM_COMMANDS = [
    ["analyze", str(CORPUS / "countable_clock.graph")],
    ["desingularize", str(CORPUS / "mixed.graph"), "--depth", "3"],
    ["eval", str(CORPUS / "rose2.graph"), "--nf", "e.e^ + f.e.e^.f^"],
    ["invariance-suite"],
    ["morita-verify", "desing-context", "--samples", "50", "--seed", "11"],
]


def _subprocess_run(argv, hashseed):
    env = dict(os.environ, PYTHONHASHSEED=str(hashseed))
    env.pop("LPA_SEED", None)
    return subprocess.run([sys.executable, "-m", "lpa.cli", *argv], capture_output=True, env=env)


def test_criterion_10_determinism():
    t0 = time.perf_counter()
    differing = []
    for argv in DETERMINISM_COMMANDS:
        a, b = _subprocess_run(argv, 1), _subprocess_run(argv, 2)
        if (a.returncode, a.stdout, a.stderr) != (b.returncode, b.stdout, b.stderr):
            differing.append(argv[0])
    elapsed = time.perf_counter() - t0
    record(10, f"{len(DETERMINISM_COMMANDS)} commands byte-identical across processes",
           not differing, elapsed, 60.0, ", ".join(differing))
