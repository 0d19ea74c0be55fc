"""Linear correspondences between split spaces: Fredholm bordisms.

A correspondence ``H1 ~> H2`` is a subspace of ``H1 + H2``.  Both sides are
tuples of :class:`SplitSpace` (one per boundary circle, possibly empty), and
the ambient coordinates are the source circles followed by the target circles.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import reduce
from typing import List, Sequence, Tuple

import numpy as np

from .errors import ArgumentError
from .rh_index import _band_matrices, _check_window, _restricted_image, truncation_depth
from .split_space import FourierWindow, SplitSpace
from .subspace import (DEFAULT_TOL, PairIndexResult, Subspace, coordinate,
                       intersect, kernel, pair_index, span)
from .symbols import LaurentSymbol

Spaces = Tuple[SplitSpace, ...]


def _as_spaces(x) -> Spaces:
    if x is None:
        return ()
    if isinstance(x, SplitSpace):
        return (x,)
    return tuple(x)


def _dim(spaces):
    return sum(s.dim for s in spaces)


def _flat_mask(spaces):
    if not spaces:
        return np.zeros(0, dtype=bool)
    return np.concatenate([s.flat_mask() for s in spaces])


@dataclass(frozen=True, eq=False)
class Correspondence:
    source: Spaces
    target: Spaces
    l: Subspace

    def __post_init__(self):
        object.__setattr__(self, "source", _as_spaces(self.source))
        object.__setattr__(self, "target", _as_spaces(self.target))
        if self.l.ambient_dim != self.source_dim + self.target_dim:
            raise ArgumentError(
                f"subspace ambient {self.l.ambient_dim} != "
                f"{self.source_dim} + {self.target_dim}")

    @property
    def source_dim(self):
        return _dim(self.source)

    @property
    def target_dim(self):
        return _dim(self.target)

    def blocks(self):
        """Source and target rows of the orthonormal frame of ``l``."""
        f = self.l.orthonormal_frame()
        return f[: self.source_dim], f[self.source_dim:]

    def reference_mask(self):
        """Coordinates of ``H_flat(source) + H_sharp(target)``."""
        return np.concatenate([_flat_mask(self.source), ~_flat_mask(self.target)])

    def reference(self):
        idx = np.flatnonzero(self.reference_mask())
        return coordinate(self.l.ambient_dim, idx, self.l.backend, self.l.tol)

    def with_cuts(self, source_cuts=None, target_cuts=None):
        """Same subspace, new cuts on the circles."""
        src = self.source if source_cuts is None else tuple(
            SplitSpace(s.window, c) for s, c in zip(self.source, source_cuts))
        tgt = self.target if target_cuts is None else tuple(
            SplitSpace(s.window, c) for s, c in zip(self.target, target_cuts))
        return Correspondence(src, tgt, self.l)


def bordism_index(c: Correspondence) -> PairIndexResult:
    """Index of the pair ``(L, H_flat(source) + H_sharp(target))``."""
    return pair_index(c.l, c.reference())


def from_generators(gens, source, target, tol=DEFAULT_TOL) -> Correspondence:
    source, target = _as_spaces(source), _as_spaces(target)
    amb = _dim(source) + _dim(target)
    return Correspondence(source, target, span(gens, amb, tol))


def graph_correspondence(a, source, target, tol=DEFAULT_TOL) -> Correspondence:
    """Graph of a matrix ``a`` from ``source`` to ``target``."""
    source, target = _as_spaces(source), _as_spaces(target)
    a = np.asarray(a, dtype=complex)
    if a.shape != (_dim(target), _dim(source)):
        raise ArgumentError(f"matrix shape {a.shape} does not fit the spaces")
    return from_generators(np.vstack([np.eye(a.shape[1]), a]), source, target, tol)


def identity(spaces, tol=DEFAULT_TOL) -> Correspondence:
    spaces = _as_spaces(spaces)
    return graph_correspondence(np.eye(_dim(spaces)), spaces, spaces, tol)


def direct_sum(c1: Correspondence, c2: Correspondence) -> Correspondence:
    """``c1 + c2`` acting on the concatenated source and target tuples."""
    x1, y1 = c1.blocks()
    x2, y2 = c2.blocks()
    d1, d2 = c1.l.dim, c2.l.dim
    z = lambda r, c: np.zeros((r, c), dtype=complex)  # noqa: E731
    gens = np.vstack([
        np.hstack([x1, z(x1.shape[0], d2)]),
        np.hstack([z(x2.shape[0], d1), x2]),
        np.hstack([y1, z(y1.shape[0], d2)]),
        np.hstack([z(y2.shape[0], d1), y2]),
    ])
    tol = max(c1.l.tol, c2.l.tol)
    amb = gens.shape[0]
    l = span(gens, amb, tol) if amb else Subspace.zero(0, tol=tol)
    return Correspondence(c1.source + c2.source, c1.target + c2.target, l)


def compose(c1: Correspondence, c2: Correspondence) -> Correspondence:
    """Relation composite ``{(x, z) : (x, y) in c1, (y, z) in c2}``.

    Computed as the image under (first, last) of the kernel of the mismatch
    map ``((x, y), (y', z)) -> y - y'``.
    """
    if c1.target != c2.source:
        raise ArgumentError("middle spaces of the composition do not match")
    x1, y1 = c1.blocks()
    y2, z2 = c2.blocks()
    tol = max(c1.l.tol, c2.l.tol)
    d1 = c1.l.dim
    ker = kernel(np.hstack([y1, -y2]), tol)
    kf = ker.frame
    img = np.vstack([x1 @ kf[:d1], z2 @ kf[d1:]])
    amb = c1.source_dim + c2.target_dim
    if amb == 0:
        l = Subspace.zero(0, tol=tol)
    else:
        l = span(img, amb, tol)
        l = Subspace(amb, l.frame, tol, min(l.rank_gap, ker.rank_gap))
    return Correspondence(c1.source, c2.target, l)


@dataclass(frozen=True)
class CompositionReport:
    composed: Correspondence
    kappa_left: int
    kappa_right: int
    kappa_composed: int

    @property
    def defect(self):
        return self.kappa_left + self.kappa_right - self.kappa_composed

    def as_dict(self):
        return {"kappa_left": self.kappa_left, "kappa_right": self.kappa_right,
                "kappa_composed": self.kappa_composed, "defect": self.defect}


def _quiet_index(c):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return bordism_index(c)


def compose_with_defect(c1, c2) -> CompositionReport:
    comp = compose(c1, c2)
    return CompositionReport(comp, _quiet_index(c1).index, _quiet_index(c2).index,
                             _quiet_index(comp).index)


def image_of_subspace(c: Correspondence, u: Subspace) -> Subspace:
    """``{y : exists x in u with (x, y) in L}``."""
    if u.ambient_dim != c.source_dim:
        raise ArgumentError("subspace is not in the source space")
    x, y = c.blocks()
    tol = max(c.l.tol, u.tol)
    if c.target_dim == 0:
        return Subspace.zero(0, tol=tol)
    if c.source_dim == 0:
        return span(y, c.target_dim, tol)
    ker = kernel(np.hstack([x, -u.orthonormal_frame()]), tol)
    if c.target_dim == 0:
        return Subspace.zero(0, tol=tol)
    return span(y @ ker.frame[: c.l.dim], c.target_dim, tol)


def domain(c: Correspondence) -> Subspace:
    if c.source_dim == 0:
        return Subspace.zero(0, tol=c.l.tol)
    x, _ = c.blocks()
    return span(x, c.source_dim, c.l.tol)


def _coord(ambient_dim, indices, tol):
    if ambient_dim == 0:
        return Subspace.zero(0, tol=tol)
    return coordinate(ambient_dim, indices, tol=tol)


@dataclass(frozen=True)
class FlatImageCheck:
    injective_on_flat: bool
    domain_condition: bool
    indices_equal: bool
    pair_index: int
    image_index: int

    def as_dict(self):
        return dict(self.__dict__)


def flat_image_check(c: Correspondence) -> FlatImageCheck:
    """Hypotheses and conclusion of the flat-image index comparison."""
    src_flat = np.flatnonzero(_flat_mask(c.source))
    tgt_sharp = np.flatnonzero(~_flat_mask(c.target))
    tol = c.l.tol
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        flat_in_total = _coord(c.l.ambient_dim, src_flat, tol=tol)
        injective = intersect(c.l, flat_in_total).dim == 0
        flat1 = _coord(c.source_dim, src_flat, tol=tol)
        dom_ok = pair_index(flat1, domain(c)).beta == 0
        k = bordism_index(c).index
        img = image_of_subspace(c, flat1)
        k_img = pair_index(img, _coord(c.target_dim, tgt_sharp, tol=tol)).index
    return FlatImageCheck(injective, dom_ok, k == k_img, k, k_img)


@dataclass(frozen=True)
class RestrictedBordismReport:
    """Projection of ``L`` onto ``H_sharp(source) + H_flat(target)``: rank
    deficiency (finite defect) and the numerical rank of the complementary
    projection onto ``H_flat(source) + H_sharp(target)``."""

    defect_dim: int
    complementary_rank: int
    rank_gap: float


def restricted_bordism_report(c: Correspondence, tol=None) -> RestrictedBordismReport:
    from .subspace import tolerance_rank
    tol = c.l.tol if tol is None else tol
    f = c.l.orthonormal_frame()
    ref = c.reference_mask()
    main = f[~ref]
    comp = f[ref]
    s_main = np.linalg.svd(main, compute_uv=False) if main.size else np.zeros(0)
    # absolute threshold: frames are orthonormal so singular values lie in [0, 1]
    r_main = int(np.sum(s_main > tol))
    s_comp = np.linalg.svd(comp, compute_uv=False) if comp.size else np.zeros(0)
    r_comp = int(np.sum(s_comp > tol))
    _, gap = tolerance_rank(s_main, tol)
    return RestrictedBordismReport(c.l.dim - r_main, r_comp, gap)


def graph_pair_index(phi: LaurentSymbol, n_half: int, tol=DEFAULT_TOL,
                     backend="float", depth=None) -> int:
    """Index of ``(graph phi, H_flat_1 + H_sharp_2)``.

    Slot 1 carries modes ``[-N, N-d)`` and slot 2 modes ``[-N, N)``.  Graph
    vectors ``(f, phi f)`` use ``f`` on ``[-N-K, N-d)`` whose image has no
    component below slot 2 (same depth rule as the subspace route); the part of
    ``f`` below slot 1 lies in the flat reference space and is dropped.
    """
    _check_window(phi, n_half)
    d, n = phi.bandwidth, phi.channels
    k = truncation_depth(phi, backend) if depth is None else depth
    gen_lo, gen_hi = -n_half - k, n_half - d
    b, w = _band_matrices(phi, gen_lo, gen_hi, -n_half, n_half)
    gen_dim = (gen_hi - gen_lo) * n
    p1 = np.eye(gen_dim)[k * n:]
    l, _ = _restricted_image(b, np.vstack([p1, w]), tol, backend)
    src = SplitSpace(FourierWindow(-n_half, n_half - d, n), 0)
    tgt = SplitSpace(FourierWindow(-n_half, n_half, n), 0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return bordism_index(Correspondence((src,), (tgt,), l)).index


@dataclass(frozen=True)
class ChainReport:
    terms: List[PairIndexResult]
    composed_index: int
    composed_alpha: int

    @property
    def total(self):
        return sum(t.index for t in self.terms)

    @property
    def defect(self):
        return self.total - self.composed_index

    def as_dict(self):
        return {"terms": [t.as_dict() for t in self.terms], "total": self.total,
                "composed_index": self.composed_index, "defect": self.defect}


def chain_index(chain: Sequence[Correspondence]) -> ChainReport:
    """Sum of the bordism indices along ``0 ~> H1 ~> ... ~> Hn ~> 0``."""
    if not chain:
        raise ArgumentError("empty chain")
    if chain[0].source or chain[-1].target:
        raise ArgumentError("a chain must start and end at the zero space")
    for a, b in zip(chain, chain[1:]):
        if a.target != b.source:
            raise ArgumentError("consecutive spaces of the chain do not match")
    terms = [_quiet_index(c) for c in chain]
    comp = reduce(compose, chain)
    ci = _quiet_index(comp)
    return ChainReport(terms, ci.index, ci.alpha)
