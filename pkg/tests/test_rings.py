import random

import numpy as np
import pytest

from lpa.algebra import LeavittPathAlgebra
from lpa.fields import GF
from lpa.rings import CarrierTooLarge, FiniteRing, LeavittRing, MatrixRing, in_span, matmul, rank, rref, solve
from oracles import all_matrices, brute_idempotents, mat_mul


def test_rref_and_rank():
    A = np.array([[1, 2, 3], [2, 4, 6], [0, 1, 1]])
    R, piv = rref(A, 7)
    assert piv == [0, 1]
    assert rank(A, 7) == 2
    assert rank(np.array([[1, 1], [1, 1]]), 2) == 1


def test_solve_mod_p():
    A = np.array([[1, 1], [0, 1]])
    x = solve(A, [3, 1], 5)
    assert list(A @ x % 5) == [3, 1]
    assert solve(np.array([[1, 0], [1, 0]]), [0, 1], 5) is None


def test_in_span():
    assert in_span([[1, 0, 1]], [[2, 0, 2]], 3)
    assert not in_span([[1, 0, 1]], [[0, 1, 0]], 3)


def test_matrix_ring_matches_oracle():
    R = MatrixRing(GF(3), 2)
    mats = list(R.elements())
    assert len(mats) == 81
    for A in mats[::7]:
        for B in mats[::5]:
            assert R.mul(A, B) == mat_mul(A, B, 3)


def test_rectangular_products():
    F = GF(2)
    col, row = ((1,), (0,)), ((1, 1),)
    assert matmul(F, col, row) == ((1, 1), (0, 0))
    assert matmul(F, row, col) == ((1,),)


def test_finite_matrix_ring():
    R = FiniteRing.matrices(2, 2)
    assert R.size == 16 and R.is_associative()
    assert R.one == ((1, 0), (0, 1))
    assert sorted(R.elements()) == sorted(all_matrices(2, 2))
    for A in list(all_matrices(2, 2))[::3]:
        for B in all_matrices(2, 2):
            assert R.mul(A, B) == mat_mul(A, B, 2)


@pytest.mark.parametrize("p", [2, 3])
def test_idempotents_match_oracle(p):
    R = FiniteRing.matrices(2, p)
    assert sorted(R.idempotents()) == sorted(brute_idempotents(2, p))


def test_non_associative_structure_detected():
    C = np.zeros((2, 2, 2), dtype=np.int64)
    C[0, 0, 1] = 1
    C[1, 0, 0] = 1        # e0 e0 = e1, e1 e0 = e0, e0 e1 = 0
    R = FiniteRing(2, C, lambda v: tuple(int(a) for a in v), np.array, ["a", "b"])
    assert not R.is_associative()


def test_leavitt_finite_ring(G):
    R = FiniteRing.leavitt(G["A2"], 2)
    assert R.dim == 4 and R.is_associative()
    A = R.algebra
    assert R.one == A.unit()
    e, es = A.edge("e"), A.ghost("e")
    assert R.mul(e, es) == e * es
    # L(A2) is M_2(K): 16 elements over F_2, 8 idempotents
    assert len(R.idempotents()) == 8


def test_unit_is_none_for_non_unital():
    C = np.zeros((1, 1, 1), dtype=np.int64)  # the zero product
    R = FiniteRing(3, C, lambda v: int(v[0]), lambda x: np.array([x]), ["a"])
    assert R.one is None


def test_enumeration_limit():
    R = FiniteRing.matrices(3, 5)
    with pytest.raises(CarrierTooLarge):
        R.all_vectors()


def test_leavitt_ring_needs_acyclic(G):
    with pytest.raises(ValueError):
        FiniteRing.leavitt(G["G1"], 2)


def test_sampling_stays_in_ring(G):
    rng = random.Random(0)
    R = MatrixRing(GF(5), 2)
    assert all(0 <= a < 5 for row in R.sample(rng) for a in row)
    A = LeavittPathAlgebra(G["G2"])
    S = LeavittRing(A)
    x = S.sample(rng)
    assert x.algebra is A
