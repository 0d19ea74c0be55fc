"""Genus-0 boundary value models of the Cauchy-Riemann operator.

A :class:`PlanarDomain` is the sphere with disks removed.  Its correspondence
is spanned by the boundary expansions of a holomorphic basis: Taylor powers
about the outer centre (bounded kind) or the constant (exterior kind), plus
principal parts at the centres of the inner disks.  Expansions are closed-form
binomial series; no quadrature is involved.

Orientation.  Every circle carries the local coordinate ``w = (z - c)/rho``,
reversed (``w -> 1/w``) when the domain lies outside an incoming circle or
inside an outgoing one.  With this rule the domain is on the ``|w| < 1`` side
of its incoming circles and on the ``|w| > 1`` side of its outgoing circles, so
a circle shared by two sewn pieces has the same coordinate on both sides.
Generators are kept exactly when their leading mode falls in the circle
window, which keeps the truncated dimension count consistent with the window.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
import warnings
from functools import lru_cache
from typing import Optional, Sequence, Tuple

import numpy as np

from .bordism import (Correspondence, bordism_index, compose, direct_sum, identity,
                      intersect)
from .errors import ArgumentError, CalibrationError, GeometryError
from .split_space import FourierWindow, SplitSpace
from .subspace import DEFAULT_TOL, PairIndexResult, Subspace, span

INCOMING, OUTGOING = "incoming", "outgoing"
BOUNDED, EXTERIOR = "bounded", "exterior"
_ON_CIRCLE_RTOL = 1e-9


@dataclass(frozen=True)
class BoundaryCircle:
    """A boundary circle; ``cut`` is the lambda (incoming) or mu (outgoing)
    parameter of the index formula, mapped to a mode cut by a calibration."""

    center: complex
    radius: float
    role: str = INCOMING
    cut: int = 0

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        if self.radius <= 0:
            raise GeometryError("radius must be positive")
        if self.role not in (INCOMING, OUTGOING):
            raise ArgumentError(f"unknown role {self.role!r}")


# basis functions -----------------------------------------------------------

@dataclass(frozen=True)
class Taylor:
    """``(z - center)**power``."""
    center: complex
    power: int


@dataclass(frozen=True)
class Pole:
    """``(z - center)**(-order)``."""
    center: complex
    order: int


@dataclass(frozen=True)
class Constant:
    pass


def _lbinom(n, k):
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def _series(lead_log, lead_phase, ratio, count, rising):
    """Terms ``lead * c_k * ratio**k`` for ``k < count`` where ``c_k`` is
    ``binom(rising+k-1, k) (-1)^k`` (rising > 0) or ``binom(-rising, k)``
    (``rising <= 0``, a finite binomial of degree ``-rising``)."""
    k = np.arange(count)
    if rising > 0:
        lb = np.array([_lbinom(rising + j - 1, j) for j in k])
        sign = (-1.0) ** k
    else:
        m = -rising
        lb = np.array([_lbinom(m, j) if j <= m else -np.inf for j in k])
        sign = np.ones(count)
    with np.errstate(divide="ignore"):
        lr = np.log(abs(ratio)) if ratio != 0 else -np.inf
        mag = lead_log + lb + np.where(k > 0, k * lr, 0.0)
    phase = lead_phase * np.exp(1j * k * np.angle(ratio)) * sign
    out = np.where(np.isfinite(mag), np.exp(np.minimum(mag, 700.0)), 0.0) * phase
    return out


def expand_on_circle(f, center, radius, modes, scale=1.0) -> np.ndarray:
    """Coefficients of ``f / scale**e`` in ``w = (z - center)/radius`` at ``modes``.

    ``e`` is the power of ``f`` (``-order`` for poles), so that with ``scale``
    equal to the radius of the basis function's own circle the leading
    coefficient there is one.  ``modes`` are counterclockwise mode numbers.
    """
    modes = np.asarray(modes, dtype=int)
    center = complex(center)
    out = np.zeros(modes.shape, dtype=complex)
    if isinstance(f, Constant):
        out[modes == 0] = 1.0
        return out
    if isinstance(f, Taylor):
        m = f.power
        a = center - complex(f.center)
        # (a + rho w)^m / s^m = sum_k binom(m,k) (a/s)^(m-k) (rho/s)^k w^k
        for idx, k in enumerate(modes):
            if k < 0 or k > m:
                continue
            if a == 0:
                out[idx] = (radius / scale) ** m if k == m else 0.0
                continue
            lmag = (_lbinom(m, k) + (m - k) * math.log(abs(a) / scale)
                    + k * math.log(radius / scale))
            out[idx] = math.exp(min(lmag, 700.0)) * np.exp(1j * (m - k) * np.angle(a))
        return out
    if isinstance(f, Pole):
        n = f.order
        a = center - complex(f.center)
        dist = abs(a)
        if a == 0:
            out[modes == -n] = (scale / radius) ** n
            return out
        if abs(dist - radius) <= _ON_CIRCLE_RTOL * radius:
            raise GeometryError("pole lies on the expansion circle")
        if dist > radius:
            # (a + rho w)^-n = a^-n sum_k binom(-n,k) (rho w / a)^k
            lead_log = n * math.log(scale / dist)
            lead_phase = np.exp(-1j * n * np.angle(a))
            kmax = int(modes.max()) + 1 if modes.size else 0
            if kmax <= 0:
                return out
            terms = _series(lead_log, lead_phase, radius / a, kmax, n)
            sel = modes >= 0
            out[sel] = terms[modes[sel]]
            return out
        # circle encloses the pole: (rho w)^-n sum_k binom(-n,k) (a / (rho w))^k
        lead_log = n * math.log(scale / radius)
        kmax = -int(modes.min()) - n + 1 if modes.size else 0
        if kmax <= 0:
            return out
        terms = _series(lead_log, 1.0, a / radius, kmax, n)
        sel = modes <= -n
        out[sel] = terms[-modes[sel] - n]
        return out
    raise ArgumentError(f"unknown basis function {f!r}")


# domains -----------------------------------------------------------------

@dataclass(frozen=True)
class Calibration:
    """Mode cut = ``sign * parameter + offset`` (``a`` incoming, ``b`` outgoing)."""

    sign: int = 1
    a: int = 0
    b: int = 0

    def local_cut(self, circle: BoundaryCircle) -> int:
        off = self.a if circle.role == INCOMING else self.b
        return self.sign * circle.cut + off

    def as_dict(self):
        return {"sign": self.sign, "a": self.a, "b": self.b}


RAW = Calibration(1, 0, 0)


@dataclass(frozen=True)
class PlanarDomain:
    """Sphere minus disks.  ``bounded``: inside ``outer`` minus ``inner`` disks;
    ``exterior``: the complement of the ``inner`` disks (contains infinity)."""

    kind: str
    inner: Tuple[BoundaryCircle, ...] = ()
    outer: Optional[BoundaryCircle] = None
    n_half: int = 32

    def __post_init__(self):
        object.__setattr__(self, "inner", tuple(self.inner))
        if self.kind not in (BOUNDED, EXTERIOR):
            raise ArgumentError(f"unknown domain kind {self.kind!r}")
        if (self.kind == BOUNDED) != (self.outer is not None):
            raise ArgumentError("a bounded domain needs exactly one outer circle")
        if not self.inner and self.outer is None:
            raise ArgumentError("a domain needs at least one boundary circle")
        for i, ci in enumerate(self.inner):
            for cj in self.inner[i + 1:]:
                if abs(ci.center - cj.center) <= ci.radius + cj.radius:
                    raise GeometryError("removed disks overlap")
            if self.outer is not None and (abs(ci.center - self.outer.center) + ci.radius
                                           >= self.outer.radius):
                raise GeometryError("inner disk is not strictly inside the outer circle")

    # circle bookkeeping ------------------------------------------------
    def circles(self):
        """``(circle, is_outer)`` in slot order: incoming then outgoing."""
        allc = ([(self.outer, True)] if self.outer is not None else []) + \
            [(c, False) for c in self.inner]
        return ([x for x in allc if x[0].role == INCOMING]
                + [x for x in allc if x[0].role == OUTGOING])

    @property
    def k(self):
        return sum(c.role == INCOMING for c, _ in self.circles())

    @property
    def l(self):
        return sum(c.role == OUTGOING for c, _ in self.circles())

    def surface_spec(self, g=0):
        cs = [c for c, _ in self.circles()]
        return SurfaceSpec(g, tuple(c.cut for c in cs if c.role == INCOMING),
                           tuple(c.cut for c in cs if c.role == OUTGOING))

    def with_window(self, n_half):
        return replace(self, n_half=n_half)


def is_reversed(circle: BoundaryCircle, is_outer: bool) -> bool:
    return (circle.role == INCOMING) != is_outer


def _std_modes(n_half, reversed_):
    local = np.arange(-n_half, n_half)
    return -local if reversed_ else local


def basis_functions(dom: PlanarDomain):
    """Holomorphic basis truncated to the leading modes inside the windows,
    each with its own-circle scale."""
    n = dom.n_half
    out = []
    if dom.kind == BOUNDED:
        std = _std_modes(n, is_reversed(dom.outer, True))
        for m in sorted(int(x) for x in std if x >= 0):
            out.append((Taylor(dom.outer.center, m), dom.outer.radius))
    else:
        out.append((Constant(), 1.0))
    for c in dom.inner:
        std = _std_modes(n, is_reversed(c, False))
        for mode in sorted((int(x) for x in std if x < 0), reverse=True):
            out.append((Pole(c.center, -mode), c.radius))
    return out


@lru_cache(maxsize=256)
def _generator_subspace(dom: PlanarDomain, tol: float) -> Subspace:
    cols = []
    circles = dom.circles()
    for f, scale in basis_functions(dom):
        parts = [expand_on_circle(f, c.center, c.radius,
                                  _std_modes(dom.n_half, is_reversed(c, outer)), scale)
                 for c, outer in circles]
        v = np.concatenate(parts)
        cols.append(v / np.linalg.norm(v))
    amb = 2 * dom.n_half * len(circles)
    return span(np.stack(cols, axis=1), amb, tol)


def clear_cache():
    _generator_subspace.cache_clear()


def build_correspondence(dom: PlanarDomain, calibration: Calibration = RAW,
                         tol=DEFAULT_TOL) -> Correspondence:
    """Boundary values of holomorphic functions on ``dom`` as a correspondence
    from its incoming circles to its outgoing circles."""
    win = FourierWindow(-dom.n_half, dom.n_half)
    src, tgt = [], []
    for c, _ in dom.circles():
        s = SplitSpace(win, calibration.local_cut(c))
        (src if c.role == INCOMING else tgt).append(s)
    return Correspondence(tuple(src), tuple(tgt), _generator_subspace(dom, tol))


# the index formula -----------------------------------------------------------

@dataclass(frozen=True)
class SurfaceSpec:
    g: int
    lambdas: Tuple[int, ...]
    mus: Tuple[int, ...]

    @property
    def l(self):
        return len(self.mus)


def formula_index(spec: SurfaceSpec) -> int:
    return 1 - spec.g - sum(spec.lambdas) + sum(spec.mus) - spec.l


# standard pieces -----------------------------------------------------------------

def annulus(r_out=2.0, r_in=1.0, n_half=32, lam=0, mu=0, center=0j, inner_center=None):
    """Ring ``r_in <= |z - c| <= r_out``: outer circle incoming, inner outgoing."""
    ic = center if inner_center is None else inner_center
    return PlanarDomain(BOUNDED, (BoundaryCircle(ic, r_in, OUTGOING, mu),),
                        BoundaryCircle(center, r_out, INCOMING, lam), n_half)


def disk_cap(radius=1.0, n_half=32, lam=0, center=0j):
    """Closed disk; its circle is incoming."""
    return PlanarDomain(BOUNDED, (), BoundaryCircle(center, radius, INCOMING, lam), n_half)


def exterior_cap(radius=2.0, n_half=32, mu=0, center=0j):
    """Complement of a disk (contains infinity); its circle is outgoing."""
    return PlanarDomain(EXTERIOR, (BoundaryCircle(center, radius, OUTGOING, mu),),
                        None, n_half)


def cp1_chain(r_out=2.0, r_in=1.0, n_half=32, cuts=(0, 0), calibration=RAW,
              tol=DEFAULT_TOL):
    """Exterior cap, annulus and disk cap covering the sphere."""
    c1, c2 = cuts
    return [build_correspondence(exterior_cap(r_out, n_half, c1), calibration, tol),
            build_correspondence(annulus(r_out, r_in, n_half, c1, c2), calibration, tol),
            build_correspondence(disk_cap(r_in, n_half, c2), calibration, tol)]


def sharp_factor_singular_values(c: Correspondence) -> np.ndarray:
    """Singular values of the map ``H_sharp_1 -> H_sharp_2`` whose graph is
    ``L`` intersected with the sharp parts (single-circle correspondences)."""
    src_sharp = ~c.source[0].flat_mask()
    tgt_sharp = ~c.target[0].flat_mask()
    mask = np.concatenate([src_sharp, tgt_sharp])
    v = Subspace(c.l.ambient_dim, np.eye(c.l.ambient_dim, dtype=complex)[:, mask], c.l.tol)
    g = intersect(c.l, v).orthonormal_frame()
    x = g[: c.source_dim][src_sharp]
    y = g[c.source_dim:][tgt_sharp]
    return np.linalg.svd(y @ np.linalg.pinv(x), compute_uv=False)


# calibration -------------------------------------------------------------------

def anchor_models(n_half=16, values=(-1, 0, 1)):
    """Annulus and both caps at several cut parameters."""
    out = []
    for lam in values:
        for mu in values:
            out.append(annulus(2.0, 1.0, n_half, lam, mu))
    out += [disk_cap(1.0, n_half, v) for v in values]
    out += [exterior_cap(2.0, n_half, v) for v in values]
    return out


def calibrate_conventions(n_half=16, max_offset=2) -> Calibration:
    """The unique ``(sign, a, b)`` with ``|a|, |b| <= max_offset`` matching the
    index formula on every anchor model."""
    anchors = anchor_models(n_half)
    found = []
    for sign in (1, -1):
        for a in range(-max_offset, max_offset + 1):
            for b in range(-max_offset, max_offset + 1):
                cal = Calibration(sign, a, b)
                if all(bordism_index(build_correspondence(d, cal)).index
                       == formula_index(d.surface_spec()) for d in anchors):
                    found.append(cal)
    if len(found) != 1:
        raise CalibrationError(f"expected one calibration, found {found}")
    return found[0]


@dataclass(frozen=True)
class SurfaceCheck:
    computed: int
    predicted: int
    pair: PairIndexResult
    generator_rank_gap: float

    @property
    def match(self):
        return self.computed == self.predicted

    def as_dict(self):
        gap = self.generator_rank_gap
        return {"computed": self.computed, "predicted": self.predicted,
                "match": self.match, "pair": self.pair.as_dict(),
                "generator_rank_gap": None if not np.isfinite(gap) else gap}


def verify_surface_formula(dom: PlanarDomain, calibration: Calibration,
                           tol=DEFAULT_TOL) -> SurfaceCheck:
    c = build_correspondence(dom, calibration, tol)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        res = bordism_index(c)
    return SurfaceCheck(res.index, formula_index(dom.surface_spec()), res, c.l.rank_gap)


# random configurations -----------------------------------------------------------

def random_domain(rng, n_circles, n_half=32, cut_range=2, margin=0.3, max_tries=10000):
    """Random disjoint genus-0 domain with ``n_circles`` boundary circles."""
    bounded = bool(rng.integers(2)) if n_circles > 1 else bool(rng.integers(2))
    n_inner = n_circles - 1 if bounded else n_circles
    roles = [INCOMING if rng.integers(2) else OUTGOING for _ in range(n_circles)]
    cuts = [int(x) for x in rng.integers(-cut_range, cut_range + 1, size=n_circles)]
    for _ in range(max_tries):
        inner = []
        ok = True
        for i in range(n_inner):
            rad = float(rng.uniform(0.15, 0.35))
            c = complex(*rng.uniform(-1.3, 1.3, size=2))
            if bounded and abs(c) + rad >= 2.0 - margin:
                ok = False
                break
            if any(abs(c - o.center) <= rad + o.radius + margin for o in inner):
                ok = False
                break
            inner.append(BoundaryCircle(c, rad, roles[i], cuts[i]))
        if ok:
            outer = BoundaryCircle(0j, 2.0, roles[-1], cuts[-1]) if bounded else None
            return PlanarDomain(BOUNDED if bounded else EXTERIOR, tuple(inner), outer, n_half)
    raise GeometryError("could not place disjoint disks")


def surface_corpus(seed=0, count=32, n_half=48):
    rng = np.random.default_rng(seed)
    return [random_domain(rng, 1 + i % 4, n_half) for i in range(count)]


# sewing -------------------------------------------------------------------

def _attached(dom, slot, piece, calibration, tol):
    """Correspondence of ``piece`` with its shared circle matched to ``slot``."""
    circle, _ = dom.circles()[slot]
    c = build_correspondence(piece, calibration, tol)
    own = build_correspondence(dom, calibration, tol)
    space = (own.source + own.target)[slot]
    if circle.role == INCOMING:
        cuts = [t.cut for t in c.target]
        cuts[0] = space.cut
        return c.with_cuts(target_cuts=cuts)
    cuts = [t.cut for t in c.source]
    cuts[0] = space.cut
    return c.with_cuts(source_cuts=cuts)


def filler(dom: PlanarDomain, slot: int, calibration: Calibration = RAW,
           tol=DEFAULT_TOL) -> Correspondence:
    """Cap closing the boundary circle in ``slot`` (slot order of ``dom``)."""
    circle, is_outer = dom.circles()[slot]
    flip = OUTGOING if circle.role == INCOMING else INCOMING
    cap_circle = replace(circle, role=flip)
    if is_outer:
        cap = PlanarDomain(EXTERIOR, (cap_circle,), None, dom.n_half)
    else:
        cap = PlanarDomain(BOUNDED, (), cap_circle, dom.n_half)
    return _attached(dom, slot, cap, calibration, tol)


def collar(dom: PlanarDomain, slot: int, calibration: Calibration = RAW,
           tol=DEFAULT_TOL) -> Correspondence:
    """Thin annulus glued to ``dom`` along the circle in ``slot``; its shared
    circle comes first in its own slot order."""
    circle, is_outer = dom.circles()[slot]
    flip = OUTGOING if circle.role == INCOMING else INCOMING
    shared = replace(circle, role=flip)
    if is_outer:
        far = BoundaryCircle(circle.center, 1.5 * circle.radius, circle.role, circle.cut)
        piece = PlanarDomain(BOUNDED, (shared,), far, dom.n_half)
    else:
        far = BoundaryCircle(circle.center, 0.5 * circle.radius, circle.role, circle.cut)
        piece = PlanarDomain(BOUNDED, (far,), shared, dom.n_half)
    return _attached(dom, slot, piece, calibration, tol)


def sew_circle(dom: PlanarDomain, calibration: Calibration = RAW, piece="cap",
               side=None, tol=DEFAULT_TOL):
    """Sew a cap (or a collar annulus) onto one boundary circle of ``dom``.

    ``side`` picks the first incoming (``"source"``) or first outgoing
    (``"target"``) circle; by default the first incoming one if any.
    Returns ``(left, right)`` ready for composition in that order.
    """
    c = build_correspondence(dom, calibration, tol)
    if side is None:
        side = "source" if c.source else "target"
    if side == "source" and c.source:
        glued = (filler if piece == "cap" else collar)(dom, 0, calibration, tol)
        rest = c.source[1:]
        return (direct_sum(glued, identity(rest)) if rest else glued), c
    if side == "target" and c.target:
        glued = (filler if piece == "cap" else collar)(dom, len(c.source), calibration, tol)
        rest = c.target[1:]
        return c, (direct_sum(glued, identity(rest)) if rest else glued)
    raise ArgumentError(f"domain has no circle on the {side} side")


def closes_surface(dom: PlanarDomain, piece="cap") -> bool:
    return piece == "cap" and len(dom.circles()) == 1


# config records ------------------------------------------------------------------

_CIRCLE_KEYS = {"center", "radius", "role", "cut", "outer"}
_DOMAIN_KEYS = {"kind", "circles", "depths"}


def _circle_from_record(rec):
    if not isinstance(rec, dict):
        raise ArgumentError("circle record must be an object")
    extra = set(rec) - _CIRCLE_KEYS
    if extra:
        raise ArgumentError(f"unknown circle fields {sorted(extra)}")
    try:
        re_, im = rec["center"]
        circle = BoundaryCircle(complex(float(re_), float(im)), float(rec["radius"]),
                                rec.get("role", INCOMING), int(rec.get("cut", 0)))
    except (KeyError, TypeError, ValueError) as exc:
        raise ArgumentError(f"bad circle record {rec!r}: {exc}") from None
    return circle, bool(rec.get("outer", False))


def domain_from_record(rec, n_half=32) -> PlanarDomain:
    """Parse ``{kind, circles: [{center: [re, im], radius, role, cut}], depths}``.

    In a bounded domain the outer circle is the one flagged ``"outer": true``,
    or failing that the one with the largest radius.  Truncation always uses
    the window half-size; ``depths`` may only restate it or lie below it.
    """
    if not isinstance(rec, dict):
        raise ArgumentError("domain record must be an object")
    extra = set(rec) - _DOMAIN_KEYS
    if extra:
        raise ArgumentError(f"unknown domain fields {sorted(extra)}")
    kind = rec.get("kind")
    parsed = [_circle_from_record(c) for c in rec.get("circles", [])]
    if not parsed:
        raise ArgumentError("domain needs circles")
    depths = rec.get("depths") or {}
    if set(depths) - {"taylor", "principal"}:
        raise ArgumentError("depths take only 'taylor' and 'principal'")
    for v in depths.values():
        if not isinstance(v, int) or v < 0 or v > n_half:
            raise ArgumentError("truncation depth must lie in [0, window]")
    if kind == EXTERIOR:
        if any(flag for _, flag in parsed):
            raise ArgumentError("an exterior domain has no outer circle")
        return PlanarDomain(EXTERIOR, tuple(c for c, _ in parsed), None, n_half)
    if kind != BOUNDED:
        raise ArgumentError(f"unknown domain kind {kind!r}")
    flagged = [i for i, (_, f) in enumerate(parsed) if f]
    if len(flagged) > 1:
        raise ArgumentError("more than one outer circle")
    io = flagged[0] if flagged else max(range(len(parsed)), key=lambda i: parsed[i][0].radius)
    inner = tuple(c for i, (c, _) in enumerate(parsed) if i != io)
    return PlanarDomain(BOUNDED, inner, parsed[io][0], n_half)


def domain_to_record(dom: PlanarDomain) -> dict:
    def rec(c, outer=False):
        out = {"center": [c.center.real, c.center.imag], "radius": c.radius,
               "role": c.role, "cut": c.cut}
        if outer:
            out["outer"] = True
        return out
    circles = ([rec(dom.outer, True)] if dom.outer is not None else []) + \
        [rec(c) for c in dom.inner]
    return {"kind": dom.kind, "circles": circles}
