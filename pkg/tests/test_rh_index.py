import numpy as np
import pytest
from hypothesis import given, strategies as st

from fredpair.corpus import perturb, symbol_corpus, symbol_pairs
from fredpair.errors import ArgumentError, NoTransitionError, WindowError
from fredpair.rh_index import (almost_homomorphism_defect, homomorphism_residual, kappa,
                               kappa_via_subspace, kappa_via_trace, lphi_operator,
                               transition_automorphism)
from fredpair.split_space import FourierWindow, SplitSpace, flat_basis
from fredpair.subspace import span
from fredpair.symbols import LaurentSymbol, winding_number

z = LaurentSymbol.monomial
CORPUS = symbol_corpus()


def test_lphi_examples():
    s = SplitSpace(FourierWindow(-2, 2), 0)
    assert np.array_equal(lphi_operator(LaurentSymbol.scalar({0: 1}), s), np.eye(4))
    expect = np.zeros((4, 4))
    expect[1, 0] = expect[2, 1] = expect[2, 2] = expect[3, 3] = 1
    assert np.array_equal(lphi_operator(z(1), s), expect)
    c = np.array([[2.0, 1.0], [0.0, 1.0]])
    s2 = SplitSpace(FourierWindow(-1, 1, 2), 0)
    got = lphi_operator(LaurentSymbol({0: c}), s2)
    assert np.array_equal(got[:2, :2], c) and np.array_equal(got[2:, 2:], np.eye(2))
    assert not np.any(got[:2, 2:]) and not np.any(got[2:, :2])


@pytest.mark.parametrize("k,want", [(0, 0), (1, 1), (-1, -1)])
def test_subspace_route_examples(k, want):
    assert kappa_via_subspace(z(k), 16).index == want


def test_subspace_route_on_symbol_without_winding():
    # 2 + z has its zero outside the disk; raw generator projection gives 1 here
    assert kappa_via_subspace(LaurentSymbol.scalar({0: 2, 1: 1}), 16).index == 0
    assert kappa_via_subspace(LaurentSymbol.scalar({0: 1, 1: 2}), 16).index == 1


@pytest.mark.parametrize("n", [2, 5, 16])
def test_trace_route_of_shift_is_exact(n):
    assert kappa_via_trace(z(1), n).raw == 1.0
    assert kappa_via_trace(LaurentSymbol.scalar({0: 1}), n).raw == 0.0


@pytest.mark.parametrize("k", [-4, -2, 3])
def test_trace_route_of_monomials(k):
    assert kappa_via_trace(z(k), 8).raw == k


@pytest.mark.parametrize("k", range(-8, 9))
def test_kappa_of_monomials(k):
    rep = kappa(z(k), 16)
    assert rep.value == k and rep.stabilized and rep.agree


def test_kappa_of_diagonal_symbol():
    assert kappa(LaurentSymbol.diag_monomial([2, -1]), 16).value == 1


def test_window_too_small():
    with pytest.raises(WindowError):
        kappa_via_subspace(z(5), 3)


UNIMODULAR = np.array([[1.0, 0.0], [0.0, 1.0]]), np.array([[0.0, 1.0], [0.0, 0.0]])


@pytest.mark.parametrize("phi", [z(3), z(-2), LaurentSymbol.diag_monomial([1, -2]),
                                 LaurentSymbol.scalar({-2: 5}),
                                 LaurentSymbol({0: UNIMODULAR[0], 1: UNIMODULAR[1]})])
def test_rational_backend_agrees(phi):
    exact = kappa_via_subspace(phi, 6, backend="rational").index
    assert exact == kappa_via_subspace(phi, 6).index == winding_number(phi)


def test_rational_backend_rejects_infinite_inverse():
    with pytest.raises(ArgumentError):
        kappa_via_subspace(LaurentSymbol.scalar({0: 2, 1: 1}), 6, backend="rational")


def test_corpus_routes_agree():
    for _, phi in CORPUS:
        rep = kappa(phi, 32)
        assert rep.value == winding_number(phi)
        assert abs(rep.trace_route - rep.value) < 0.05


def test_reversal_negates_subspace_route():
    for _, phi in CORPUS[::3]:
        assert kappa_via_subspace(phi.reversed(), 24).index == -kappa_via_subspace(phi, 24).index


def test_homomorphism_on_pairs():
    for (_, a), (_, b) in symbol_pairs(count=12):
        assert kappa(a * b, 24).value == kappa(a, 24).value + kappa(b, 24).value


def test_defect_vanishing_cases():
    s = SplitSpace.symmetric(8)
    assert not np.any(almost_homomorphism_defect(z(2), LaurentSymbol.scalar({0: 3}), s))
    assert not np.any(almost_homomorphism_defect(LaurentSymbol.scalar({0: 1}), z(1), s))


def test_defect_of_shift_is_one_column():
    s = SplitSpace.symmetric(6)
    t = almost_homomorphism_defect(z(1), z(1), s)
    assert np.linalg.matrix_rank(t) <= 1
    assert set(np.flatnonzero(np.any(t, axis=0))) <= {s.window.index(-1)}


def test_defect_identity_with_negated_term():
    # the product defect comes out as minus the stated correction term
    for (_, a), (_, b) in symbol_pairs(count=20):
        s = SplitSpace.symmetric(32, a.channels)
        assert homomorphism_residual(a, b, s, sign=-1.0) < 1e-10


def test_defect_identity_as_stated_fails_on_shift():
    s = SplitSpace.symmetric(8)
    assert homomorphism_residual(z(1), z(1), s) > 1.0
    assert homomorphism_residual(z(1), z(1), s, sign=-1.0) == 0.0


def test_transition_of_flat_part_is_identity():
    s = SplitSpace.symmetric(5)
    res = transition_automorphism(span(flat_basis(s), s.dim), s)
    assert res.shift == 0 and np.allclose(res.matrix, np.eye(s.dim))


def test_transition_of_shifted_flat_part():
    s = SplitSpace.symmetric(5)
    m = span(np.eye(s.dim)[:, :6], s.dim)   # modes < 1
    res = transition_automorphism(m, s)
    assert res.shift == 1 and np.allclose(res.core, np.eye(s.dim))


def test_transition_of_tilted_flat_part():
    s = SplitSpace.symmetric(5)
    basis = flat_basis(s).astype(complex)
    i = s.window.index(-1)
    basis[:, -1] = 0
    basis[i, -1], basis[i + 1, -1] = 1, 0.1
    m = span(basis, s.dim)
    res = transition_automorphism(m, s)
    assert res.shift == 0 and res.residual < 1e-12
    img = span(res.matrix @ flat_basis(s), s.dim)
    assert np.allclose(img.projector(), m.projector())


def test_transition_fails_for_orthogonal_swap():
    s = SplitSpace.symmetric(3)
    basis = flat_basis(s).astype(complex)
    basis[:, -1] = np.eye(s.dim)[:, s.window.index(0)]
    with pytest.raises(NoTransitionError):
        transition_automorphism(span(basis, s.dim), s)


@given(st.integers(0, len(CORPUS) - 1), st.integers(0, 2 ** 16))
def test_small_perturbations_keep_index(i, seed):
    _, phi = CORPUS[i]
    q = perturb(phi, np.random.default_rng(seed))
    assert kappa(q, 24).value == winding_number(phi)
