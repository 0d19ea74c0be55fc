"""Index of L_phi = phi P_flat + P_sharp computed three independent ways.

* winding route: phase unwrapping of ``det phi`` on the circle;
* subspace route: the pair (phi H_flat, H_sharp) on a window ``[-N, N)``;
* trace route: the relative trace of ``phi P_flat phi^-1`` and ``P_flat``.

Subspace truncation.  ``phi H_flat`` is represented by the vectors ``phi f``
with ``f`` supported on modes ``[-N-K, 0)`` whose part below the window is
numerically zero, i.e. ``M = W ker(B)`` where ``B`` and ``W`` are the rows of
the multiplication matrix below and inside the window.  The depth ``K`` is
chosen from the decay of ``phi^-1`` so that the exponentially small near-kernel
vectors of ``B`` fall under the rank tolerance.  Projecting the raw generators
into the window instead would count the truncated tail of every generator
and returns the wrong answer for symbols such as ``2 + z``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ArgumentError, InconsistencyError, NoTransitionError, WindowError
from .split_space import (FourierWindow, SplitSpace, flat_projector,
                          sharp_projector, symmetry)
from .subspace import (DEFAULT_TOL, PairIndexResult, Subspace, coordinate,
                       kernel, pair_index, span, tolerance_rank)
from .symbols import (LaurentSymbol, check_margins, multiplication_matrix,
                      winding_number)

DEFAULT_N = 64
TRACE_WARN = 0.1


class TraceConvergenceWarning(UserWarning):
    """The trace route is further than 0.1 from an integer."""


def lphi_operator(phi: LaurentSymbol, s: SplitSpace) -> np.ndarray:
    m = multiplication_matrix(phi, s.window, s.window)
    return m @ flat_projector(s) + sharp_projector(s)


def truncation_depth(phi: LaurentSymbol, backend="float") -> int:
    """Number of generator modes placed below the window."""
    d = phi.bandwidth
    _, inv_degree = phi.inverse()
    if backend == "rational":
        # an exact kernel cannot follow an infinite tail of the inverse
        if inv_degree > phi.channels * d:
            raise ArgumentError(
                "rational backend needs a symbol whose inverse is a Laurent polynomial")
        return 2 * inv_degree + 2 * d + 2
    return 2 * inv_degree + 2 * d + 8


def _band_matrices(phi, gen_lo, gen_hi, amb_lo, amb_hi):
    """Rows below ``amb_lo`` (B) and inside ``[amb_lo, amb_hi)`` (W) of the
    multiplication by ``phi`` on generators ``[gen_lo, gen_hi)``."""
    n = phi.channels
    gen = FourierWindow(gen_lo, gen_hi, n)
    below_lo = gen_lo + phi.deg_min
    if below_lo < amb_lo:
        b = multiplication_matrix(phi, gen, FourierWindow(below_lo, amb_lo, n))
    else:
        b = np.zeros((0, gen.dim), dtype=complex)
    w = multiplication_matrix(phi, gen, FourierWindow(amb_lo, amb_hi, n))
    return b, w


def _exact_symbol_matrix(mat):
    rounded = np.round(mat.real) + 1j * np.round(mat.imag)
    if not np.allclose(rounded, mat, atol=0, rtol=0):
        raise ValueError("rational backend needs Gaussian-integer coefficients")
    return [[(int(x.real), int(x.imag)) for x in row] for row in rounded]


def _restricted_image(b, w, tol, backend):
    """``W ker(B)`` and the rank gap of the kernel decision."""
    amb = w.shape[0]
    if backend == "rational":
        from .subspace import image
        ker = kernel(_exact_symbol_matrix(b) if b.shape[0] else np.zeros((0, b.shape[1])),
                     tol, "rational") if b.shape[0] else Subspace.full(b.shape[1], "rational", tol)
        return image(_exact_symbol_matrix(w), ker), np.inf
    ker = kernel(b, tol) if b.shape[0] else Subspace.full(b.shape[1], tol=tol)
    sub = span(w @ ker.frame, amb, tol)
    return sub, min(ker.rank_gap, sub.rank_gap)


def _check_window(phi, n_half):
    if n_half <= phi.bandwidth:
        raise WindowError(f"window half-size {n_half} must exceed bandwidth {phi.bandwidth}")


def kappa_via_subspace(phi: LaurentSymbol, n_half: int, tol=DEFAULT_TOL,
                       backend="float", depth: Optional[int] = None) -> PairIndexResult:
    """Pair index of (phi H_flat, H_sharp) on the window ``[-N, N)``."""
    _check_window(phi, n_half)
    k = truncation_depth(phi, backend) if depth is None else depth
    b, w = _band_matrices(phi, -n_half - k, 0, -n_half, n_half)
    m, gap = _restricted_image(b, w, tol, backend)
    n = phi.channels
    sharp = coordinate(2 * n_half * n, range(n_half * n, 2 * n_half * n), backend, tol)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        res = pair_index(m, sharp)
    return PairIndexResult(res.alpha, res.beta, res.index, min(gap, res.rank_gap))


@dataclass(frozen=True)
class TraceResult:
    raw: float
    rounded: int
    inverse_degree: int

    @property
    def converged(self):
        return abs(self.raw - self.rounded) <= TRACE_WARN


def kappa_via_trace(phi: LaurentSymbol, n_half: int) -> TraceResult:
    """Trace of ``phi P_flat phi^-1 - P_flat`` summed over window modes.

    The inner sum over flat modes is carried out with exact band arithmetic,
    so only the window rows are truncated.  Row ``m`` contributes
    ``tr sum_{k > m} phi_k psi_{-k} - n [m < 0]`` with ``psi = phi^-1``.
    """
    _check_window(phi, n_half)
    psi, inv_degree = phi.inverse()
    n = phi.channels
    total = 0.0 + 0.0j
    for mode in range(-n_half, n_half):
        acc = sum((np.trace(c @ psi.coeff(-k)) for k, c in phi.coeffs.items() if k > mode),
                  0.0 + 0.0j)
        total += acc - (n if mode < 0 else 0)
    res = TraceResult(float(total.real), int(round(total.real)), inv_degree)
    if not res.converged:
        warnings.warn(f"trace route {res.raw:.4f} is not near an integer",
                      TraceConvergenceWarning, stacklevel=2)
    return res


@dataclass(frozen=True)
class IndexReport:
    winding_route: int
    subspace_route: int
    subspace_detail: PairIndexResult
    subspace_route_doubled: int
    trace_route: float
    trace_rounded: int
    trace_route_doubled: float
    stabilized: bool
    window_used: int

    @property
    def value(self):
        return self.subspace_route

    @property
    def agree(self):
        return (self.winding_route == self.subspace_route == self.trace_rounded
                == self.subspace_route_doubled == int(round(self.trace_route_doubled)))

    def as_dict(self):
        return {
            "winding_route": self.winding_route,
            "subspace_route": self.subspace_route,
            "subspace_pair": self.subspace_detail.as_dict(),
            "subspace_route_doubled": self.subspace_route_doubled,
            "trace_route": self.trace_route,
            "trace_rounded": self.trace_rounded,
            "trace_route_doubled": self.trace_route_doubled,
            "stabilized": self.stabilized,
            "window_used": self.window_used,
            "index": self.value,
        }


def kappa(phi: LaurentSymbol, n_half: int = DEFAULT_N, tol=DEFAULT_TOL,
          backend="float") -> IndexReport:
    """Run all three routes at ``N`` and ``2N``; raise if they disagree."""
    phi.require_certificate()
    wind = winding_number(phi)
    sub = kappa_via_subspace(phi, n_half, tol, backend)
    sub2 = kappa_via_subspace(phi, 2 * n_half, tol, backend)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TraceConvergenceWarning)
        tr = kappa_via_trace(phi, n_half)
        tr2 = kappa_via_trace(phi, 2 * n_half)
    stable = sub.index == sub2.index
    report = IndexReport(wind, sub.index, sub, sub2.index, tr.raw, tr.rounded, tr2.raw,
                         False, n_half)
    ok = stable and report.agree and tr.converged and tr2.converged
    report = IndexReport(wind, sub.index, sub, sub2.index, tr.raw, tr.rounded, tr2.raw,
                         ok, n_half)
    if not ok:
        raise InconsistencyError(
            f"index routes disagree: winding {wind}, subspace {sub.index}/{sub2.index}, "
            f"trace {tr.raw:.4f}/{tr2.raw:.4f}", report)
    return report


def interior_columns(s: SplitSpace, margin: int) -> np.ndarray:
    """Basis indices whose mode is at least ``margin`` away from both edges."""
    modes = s.window.mode_of_index()
    return np.flatnonzero((modes - s.window.lo >= margin) & (s.window.hi - 1 - modes >= margin))


def almost_homomorphism_defect(phi: LaurentSymbol, psi: LaurentSymbol,
                               s: SplitSpace) -> np.ndarray:
    """Windowed ``(1/4)(1 - phi)[S, psi](1 - S)``."""
    check_margins(s, phi.bandwidth + psi.bandwidth)
    eye = np.eye(s.dim)
    sym = symmetry(s)
    mphi = multiplication_matrix(phi, s.window, s.window)
    mpsi = multiplication_matrix(psi, s.window, s.window)
    return 0.25 * (eye - mphi) @ (sym @ mpsi - mpsi @ sym) @ (eye - sym)


def homomorphism_residual(phi, psi, s, sign=1.0):
    """Max column norm of ``L_{phi psi} - L_phi L_psi - sign*T`` on interior columns."""
    t = almost_homomorphism_defect(phi, psi, s)
    r = lphi_operator(phi * psi, s) - lphi_operator(phi, s) @ lphi_operator(psi, s) - sign * t
    cols = interior_columns(s, phi.bandwidth + psi.bandwidth)
    return float(np.linalg.norm(r[:, cols], axis=0).max()) if cols.size else 0.0


@dataclass(frozen=True)
class TransitionResult:
    """``phi = z^shift . core`` with ``core(H_flat) = shifted`` on the window."""

    shift: int
    core: np.ndarray
    matrix: np.ndarray
    shifted: Subspace
    residual: float
    smallest_singular_value: float


def transition_automorphism(m: Subspace, s: SplitSpace, tol=DEFAULT_TOL) -> TransitionResult:
    """Automorphism carrying the flat part onto ``m`` up to a mode shift.

    On a finite window an invertible map cannot change dimensions, so the
    result keeps the shift ``z^w`` separate from the invertible core.
    """
    if m.ambient_dim != s.dim:
        raise WindowError("subspace does not live on the split space window")
    pf = flat_projector(s)
    w = int(round(np.trace(m.projector()).real - np.trace(pf)))
    n = s.channels
    shift = multiplication_matrix(LaurentSymbol.monomial(-w, n), s.window, s.window)
    cols = [shift @ m.orthonormal_frame()]
    if w < 0:
        cols.append(np.eye(s.dim)[:, : -w * n])
    shifted = span(np.hstack(cols), s.dim, tol)
    if shifted.dim != s.flat_dim:
        raise NoTransitionError(
            f"shifted subspace has dim {shifted.dim}, flat part has {s.flat_dim}")
    pm = shifted.projector()
    eye = np.eye(s.dim)
    core = pm @ pf + (eye - pm) @ (eye - pf)
    sv = np.linalg.svd(core, compute_uv=False)
    if sv[-1] <= tol:
        raise NoTransitionError(
            f"projector formula is singular (smallest singular value {sv[-1]:.3g})")
    img = span(core @ pf[:, s.flat_mask()], s.dim, tol)
    residual = float(np.linalg.norm(img.projector() - pm, 2))
    full = multiplication_matrix(LaurentSymbol.monomial(w, n), s.window, s.window) @ core
    return TransitionResult(w, core, full, shifted, residual, float(sv[-1]))
