import numpy as np
import pytest
from hypothesis import given, strategies as st

from fredpair.errors import ArgumentError, RangeError
from fredpair.split_space import (FourierWindow, SplitSpace, flat_projector, sharp_projector,
                                  symmetry, twist_cut)


def test_flat_projector_cut_zero():
    s = SplitSpace(FourierWindow(-2, 2), 0)
    assert np.array_equal(flat_projector(s), np.diag([1, 1, 0, 0]))


def test_flat_projector_shifted_cut():
    s = SplitSpace(FourierWindow(-2, 2), 1)
    assert np.array_equal(flat_projector(s), np.diag([1, 1, 1, 0]))


def test_symmetry_small_window():
    assert np.array_equal(symmetry(SplitSpace(FourierWindow(-1, 1), 0)), np.diag([-1, 1]))


def test_symmetry_all_sharp_at_lower_edge():
    s = SplitSpace(FourierWindow(-3, 2), -3)
    assert np.array_equal(symmetry(s), np.eye(5))


def test_balanced_window_has_traceless_symmetry():
    assert np.trace(symmetry(SplitSpace(FourierWindow(-2, 2), 0))) == 0


def test_twist_cut():
    s = SplitSpace.symmetric(3)
    assert twist_cut(s, 1).cut == 1
    assert twist_cut(s, 0) == s
    assert twist_cut(twist_cut(s, 2), -2) == s
    with pytest.raises(RangeError):
        twist_cut(s, 5)


def test_basis_order_is_mode_then_channel():
    w = FourierWindow(-1, 1, channels=2)
    assert list(w.mode_of_index()) == [-1, -1, 0, 0]
    assert w.index(0, 1) == 3
    assert FourierWindow(-1, 1, 2) == w


def test_bad_windows_rejected():
    with pytest.raises(ArgumentError):
        FourierWindow(2, 2)
    with pytest.raises(ArgumentError):
        FourierWindow(0, 2, channels=0)
    with pytest.raises(RangeError):
        SplitSpace(FourierWindow(0, 2), 3)


@given(lo=st.integers(-6, 0), width=st.integers(1, 8), n=st.integers(1, 3), data=st.data())
def test_splitting_identities(lo, width, n, data):
    w = FourierWindow(lo, lo + width, n)
    cut = data.draw(st.integers(lo, lo + width))
    s = SplitSpace(w, cut)
    pf, ps, sym = flat_projector(s), sharp_projector(s), symmetry(s)
    eye = np.eye(w.dim)
    assert np.array_equal(pf + ps, eye)
    assert not np.any(pf @ ps)
    assert np.array_equal(sym @ sym, eye)
    assert np.array_equal(sym, eye - 2 * pf)
    assert s.flat_dim + s.sharp_dim == w.dim
    if lo <= 0 <= lo + width:
        assert s.flat_dim - SplitSpace(w, 0).flat_dim == cut * n
