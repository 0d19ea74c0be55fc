import numpy as np
import pytest

from fredpair.bordism import (Correspondence, bordism_index, chain_index, compose,
                              compose_with_defect, direct_sum, domain, flat_image_check,
                              from_generators, graph_correspondence, graph_pair_index,
                              identity, image_of_subspace, restricted_bordism_report)
from fredpair.corpus import symbol_corpus
from fredpair.errors import ArgumentError
from fredpair.planar import (annulus, build_correspondence, calibrate_conventions,
                             cp1_chain, disk_cap, exterior_cap)
from fredpair.split_space import SplitSpace
from fredpair.subspace import Subspace, coordinate, pair_index, span
from fredpair.symbols import LaurentSymbol, winding_number

z = LaurentSymbol.monomial


def spaces(n=3, cut=0, channels=1):
    return (SplitSpace.symmetric(n, channels, cut),)


def test_complementary_coordinate_correspondence():
    src, tgt = spaces(), spaces()
    c = Correspondence(src, tgt, coordinate(12, range(12)))
    c = Correspondence(src, tgt, coordinate(12, np.flatnonzero(~c.reference_mask())))
    r = bordism_index(c)
    assert (r.alpha, r.beta, r.index) == (0, 0, 0)


def test_annulus_index_and_twist_law():
    a = build_correspondence(annulus(2.0, 1.0, 12))
    assert bordism_index(a).index == 0
    for k in range(-2, 3):
        assert bordism_index(a.with_cuts(source_cuts=[k])).index == k


@pytest.mark.parametrize("k,want", [(0, 0), (1, 1), (-1, -1)])
def test_graph_pair_index_examples(k, want):
    assert graph_pair_index(z(k), 16) == want


def test_graph_pair_index_rational():
    assert graph_pair_index(z(-2), 6, backend="rational") == -2
    assert graph_pair_index(LaurentSymbol.diag_monomial([1, -3]), 6, backend="rational") == -2
    with pytest.raises(ArgumentError):
        graph_pair_index(LaurentSymbol.scalar({0: 1, 1: 3}), 6, backend="rational")


def test_graph_pair_index_on_corpus():
    for _, phi in symbol_corpus()[::2]:
        assert graph_pair_index(phi, 24) == winding_number(phi)


def test_compose_graphs_is_graph_of_product():
    rng = np.random.default_rng(0)
    a, b = rng.normal(size=(6, 6)), rng.normal(size=(6, 6))
    s = spaces()
    g1, g2 = graph_correspondence(a, s, s), graph_correspondence(b, s, s)
    comp = compose(g1, g2)
    want = graph_correspondence(b @ a, s, s)
    assert comp.l.dim == 6
    assert pair_index(comp.l, want.l).alpha == 6
    assert compose_with_defect(g1, g2).defect == 0


def test_compose_with_identity():
    c = build_correspondence(annulus(2.0, 1.0, 8))
    left = compose(identity(c.source), c)
    assert pair_index(left.l, c.l).alpha == c.l.dim


def test_compose_mismatch():
    c = build_correspondence(annulus(2.0, 1.0, 8))
    with pytest.raises(ArgumentError):
        compose(c, c.with_cuts(source_cuts=[1]))


def test_direct_sum_dimensions():
    a = build_correspondence(annulus(2.0, 1.0, 6))
    s = direct_sum(a, identity(spaces(4)))
    assert len(s.source) == 2 and s.l.dim == a.l.dim + 8
    assert bordism_index(s).index == bordism_index(a).index


def test_image_of_subspace_examples():
    s = spaces()
    a = np.zeros((6, 6))
    a[0, 1] = a[2, 3] = 1
    g = graph_correspondence(a, s, s)
    assert image_of_subspace(g, Subspace.full(6)).dim == 2
    ann = build_correspondence(annulus(2.0, 1.0, 8))
    flat1 = coordinate(16, range(8))
    img = image_of_subspace(ann, flat1)
    assert pair_index(img, coordinate(16, range(8))).alpha == img.dim == 8
    # L(0) is the slice {y : (0, y) in L}; the annulus has none
    assert image_of_subspace(ann, Subspace.zero(16)).dim == 0


def test_domain_of_graph_is_everything():
    g = graph_correspondence(np.ones((6, 6)), spaces(), spaces())
    assert domain(g).dim == 6


def test_flat_image_check_examples():
    got = flat_image_check(build_correspondence(annulus(2.0, 1.0, 8)))
    assert (got.injective_on_flat, got.domain_condition, got.indices_equal) == (True,) * 3
    assert got.pair_index == got.image_index == 0
    zero = flat_image_check(graph_correspondence(np.zeros((6, 6)), spaces(), spaces()))
    assert zero.injective_on_flat is False
    rng = np.random.default_rng(2)
    iso = flat_image_check(graph_correspondence(rng.normal(size=(6, 6)), spaces(), spaces()))
    assert (iso.injective_on_flat, iso.domain_condition, iso.indices_equal) == (True,) * 3


def test_relation_with_flat_kernel_is_not_injective():
    # L contains (e_-1, 0): a flat source vector with nothing attached
    src, tgt = spaces(2), spaces(2)
    gens = np.zeros((8, 1))
    gens[1, 0] = 1
    got = flat_image_check(from_generators(gens, src, tgt))
    assert got.injective_on_flat is False


def test_restricted_report_for_annulus():
    rep = restricted_bordism_report(build_correspondence(annulus(2.0, 1.0, 8)))
    assert rep.defect_dim == 0
    rep2 = restricted_bordism_report(build_correspondence(annulus(2.0, 1.0, 16)))
    # the compact part has the same numerical rank once the window is large
    assert rep.complementary_rank <= rep2.complementary_rank


def test_cp1_chain_with_calibrated_cuts():
    cal = calibrate_conventions()
    for cuts in [(0, 0), (1, -1), (2, 2)]:
        assert chain_index(cp1_chain(2.0, 1.0, 12, cuts, cal)).total == 1


def test_chain_of_two_annuli_between_caps():
    n = 12
    chain = [build_correspondence(exterior_cap(3.0, n)),
             build_correspondence(annulus(3.0, 2.0, n)),
             build_correspondence(annulus(2.0, 1.0, n)),
             build_correspondence(disk_cap(1.0, n))]
    rep = chain_index(chain)
    assert rep.total == 1 and rep.defect == 1


def test_chain_twist_on_one_interior_circle():
    base = cp1_chain(2.0, 1.0, 12)
    for k in range(-2, 3):
        twisted = [base[0].with_cuts(target_cuts=[k]), base[1].with_cuts(source_cuts=[k]),
                   base[2]]
        assert chain_index(twisted).total == 1


def test_chain_validation():
    ann = build_correspondence(annulus(2.0, 1.0, 8))
    with pytest.raises(ArgumentError):
        chain_index([ann])
    with pytest.raises(ArgumentError):
        chain_index([])
    ext = build_correspondence(exterior_cap(2.0, 8))
    with pytest.raises(ArgumentError):
        chain_index([ext, ann.with_cuts(source_cuts=[1]),
                     build_correspondence(disk_cap(1.0, 8))])


def test_caps_sew_to_sphere_with_defect_one():
    rep = compose_with_defect(build_correspondence(exterior_cap(2.0, 10)),
                              build_correspondence(disk_cap(2.0, 10)))
    assert (rep.kappa_left, rep.kappa_right, rep.kappa_composed, rep.defect) == (1, 0, 0, 1)


def test_annuli_sew_without_defect():
    a1 = build_correspondence(annulus(3.0, 2.0, 10))
    a2 = build_correspondence(annulus(2.0, 1.0, 10))
    assert compose_with_defect(a1, a2).defect == 0
