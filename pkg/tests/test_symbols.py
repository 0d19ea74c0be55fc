import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st

from fredpair.corpus import symbol_corpus
from fredpair.errors import SymbolNotInvertibleError, WindowError
from fredpair.split_space import FourierWindow, SplitSpace
from fredpair.symbols import (LaurentSymbol, block_decompose, commutator_rank, evaluate,
                              multiplication_matrix, winding_curve, winding_number)

z = LaurentSymbol.monomial


def test_evaluate():
    assert np.allclose(evaluate(z(1), 0.0), 1)
    assert np.allclose(evaluate(z(1), np.pi), -1)
    d = LaurentSymbol.diag_monomial([1, 0])
    assert np.allclose(evaluate(d, np.pi / 2), np.diag([1j, 1]))


@pytest.mark.parametrize("k", range(-8, 9))
def test_winding_of_monomials(k):
    assert winding_number(z(k)) == k


def test_winding_examples():
    assert winding_number(LaurentSymbol.scalar({0: 2, 1: 1})) == 0
    assert winding_number(LaurentSymbol.diag_monomial([2, -1])) == 1


def test_zero_on_circle_is_rejected():
    with pytest.raises(SymbolNotInvertibleError):
        winding_number(LaurentSymbol.scalar({0: 1, 1: 1}))


def test_literal_round_trip():
    phi = LaurentSymbol.from_literal([{"degree": -1, "matrix": [[1, 0], [0, 2], [0, 0], [1, 0]]},
                                      {"degree": 0, "matrix": [[3, 0], [0, 0], [0, 0], [3, 0]]}])
    again = LaurentSymbol.from_literal(phi.to_literal())
    assert phi.channels == 2 and again.coeffs.keys() == phi.coeffs.keys()
    for k in phi.coeffs:
        assert np.array_equal(phi.coeffs[k], again.coeffs[k])


def test_winding_curve_columns():
    c = winding_curve(z(2), 64)
    assert c.shape == (65, 4)
    assert np.isclose(c[-1, 3] - c[0, 3], 4 * np.pi)


def test_multiplication_matrix_examples():
    w = FourierWindow(-2, 3)
    assert np.array_equal(multiplication_matrix(LaurentSymbol.scalar({0: 1}), w, w), np.eye(5))
    m = multiplication_matrix(z(1), FourierWindow(0, 2), FourierWindow(0, 3))
    assert np.array_equal(m, np.array([[0, 0], [1, 0], [0, 1]]))
    w = FourierWindow(-1, 2)
    m = multiplication_matrix(LaurentSymbol.scalar({-1: 1, 1: 1}), w, w)
    assert np.array_equal(m, np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]]))


def test_block_decomposition():
    s = SplitSpace.symmetric(3)
    b = block_decompose(LaurentSymbol.scalar({0: 1}), s)
    assert not np.any(b.beta_block) and not np.any(b.gamma_block)
    b = block_decompose(z(1), s)
    assert not np.any(b.beta_block)
    assert np.count_nonzero(b.gamma_block) == 1
    # e_-1 goes to e_0: last flat column, first sharp row
    assert b.gamma_block[0, -1] == 1
    b = block_decompose(LaurentSymbol.scalar({0: 5}), s)
    assert not np.any(b.beta_block) and not np.any(b.gamma_block)
    assert np.array_equal(b.reassemble(), multiplication_matrix(LaurentSymbol.scalar({0: 5}),
                                                                s.window, s.window))


def _commutator_rank_oracle(coeffs, n_half, cut):
    """Exact rank of the windowed commutator, built entry by entry."""
    modes = range(-n_half, n_half)
    sign = {m: (1 if m >= cut else -1) for m in modes}
    rows = [[(sign[j] - sign[i]) * coeffs.get(i - j, 0) for j in modes] for i in modes]
    return sympy.Matrix(rows).rank()


@pytest.mark.parametrize("k", [-3, -1, 0, 1, 2, 4])
def test_commutator_rank_of_monomials(k):
    s = SplitSpace.symmetric(8)
    r = commutator_rank(z(k), s)
    assert r == _commutator_rank_oracle({k: 1}, 8, 0)
    assert r == abs(k)


def test_commutator_rank_needs_margin():
    with pytest.raises(WindowError):
        commutator_rank(z(3), SplitSpace.symmetric(2))


@given(st.dictionaries(st.integers(-3, 3), st.integers(-3, 3), min_size=1, max_size=4),
       st.integers(-2, 2))
def test_commutator_rank_matches_exact_oracle(coeffs, cut):
    coeffs = {k: v for k, v in coeffs.items() if v}
    if not coeffs:
        return
    phi = LaurentSymbol.scalar(coeffs)
    s = SplitSpace(FourierWindow.symmetric(7), cut)
    r = commutator_rank(phi, s)
    assert r == _commutator_rank_oracle(coeffs, 7, cut)
    assert r <= 2 * phi.bandwidth


def test_commutator_rank_bound_on_corpus():
    for _, phi in symbol_corpus():
        s = SplitSpace.symmetric(12, phi.channels, 1)
        assert commutator_rank(phi, s) <= 2 * phi.channels * phi.bandwidth


def test_winding_is_additive_on_corpus():
    corpus = symbol_corpus()
    by_n = {}
    for _, phi in corpus:
        by_n.setdefault(phi.channels, []).append(phi)
    rng = np.random.default_rng(7)
    for group in by_n.values():
        for _ in range(5):
            a, b = (group[int(i)] for i in rng.integers(len(group), size=2))
            assert winding_number(a * b) == winding_number(a) + winding_number(b)


def test_reversal_negates_winding():
    for _, phi in symbol_corpus()[::5]:
        assert winding_number(phi.reversed()) == -winding_number(phi)


def test_windowed_products_agree_in_the_interior():
    a = LaurentSymbol.scalar({-1: 1, 0: 3, 2: 0.5})
    b = LaurentSymbol.scalar({-2: 0.25, 1: 2})
    w = FourierWindow.symmetric(10)
    lhs = multiplication_matrix(a, w, w) @ multiplication_matrix(b, w, w)
    rhs = multiplication_matrix(a * b, w, w)
    margin = a.bandwidth + b.bandwidth
    cols = [i for i, m in enumerate(w.modes) if m - w.lo >= margin and w.hi - 1 - m >= margin]
    assert np.allclose(lhs[:, cols], rhs[:, cols], atol=1e-14)


def test_inverse_symbol():
    phi = LaurentSymbol.scalar({0: 3, 1: 1})
    inv, degree = phi.inverse()
    prod = phi * inv
    assert np.isclose(prod.coeff(0)[0, 0], 1)
    others = [abs(prod.coeff(k)[0, 0]) for k in prod.coeffs if k != 0]
    assert max(others) < 1e-12
    assert degree > 0
