"""Matrix Laurent polynomials phi: S^1 -> GL(C^n) and their window matrices."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from .errors import (ArgumentError, ConvergenceError, SymbolNotInvertibleError,
                     WindowError)
from .split_space import FourierWindow, SplitSpace, symmetry
from .subspace import DEFAULT_TOL, tolerance_rank

CERT_POINTS = 4096
CERT_DELTA = 1e-6
MAX_WINDING_POINTS = 2 ** 20
INVERSE_TOL = 1e-13


@dataclass(frozen=True, eq=False)
class LaurentSymbol:
    """``phi(z) = sum_k coeffs[k] z^k`` with n x n complex coefficients.

    The invertibility certificate (minimum of ``|det phi|`` on a uniform grid of
    ``CERT_POINTS`` angles) is computed once at construction.
    """

    coeffs: Dict[int, np.ndarray]
    delta: float = CERT_DELTA
    min_abs_det: float = field(init=False)

    def __post_init__(self):
        clean = {}
        n = None
        for k, c in self.coeffs.items():
            c = np.atleast_2d(np.asarray(c, dtype=complex))
            if c.shape[0] != c.shape[1]:
                raise ArgumentError(f"coefficient of degree {k} is not square")
            if n is None:
                n = c.shape[0]
            elif c.shape[0] != n:
                raise ArgumentError("coefficients have inconsistent sizes")
            if np.any(c != 0):
                clean[int(k)] = c
        if n is None:
            raise ArgumentError("a symbol needs at least one coefficient")
        if not clean:
            clean = {0: np.zeros((n, n), dtype=complex)}
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))
        object.__setattr__(self, "_n", n)
        dets = self.det_on_grid(CERT_POINTS)
        object.__setattr__(self, "min_abs_det", float(np.min(np.abs(dets))))

    # constructors -------------------------------------------------------
    @classmethod
    def monomial(cls, k, channels=1):
        return cls({k: np.eye(channels)})

    @classmethod
    def diag_monomial(cls, degrees):
        n = len(degrees)
        coeffs = {}
        for i, k in enumerate(degrees):
            coeffs.setdefault(k, np.zeros((n, n), dtype=complex))[i, i] = 1.0
        return cls(coeffs)

    @classmethod
    def scalar(cls, coeffs):
        """Scalar symbol from ``{degree: complex}``."""
        return cls({k: np.array([[v]]) for k, v in coeffs.items()})

    @classmethod
    def from_literal(cls, records, delta=CERT_DELTA):
        """Parse ``[{"degree": k, "matrix": [[re, im], ...]}, ...]`` (row-major)."""
        coeffs = {}
        for rec in records:
            entries = [complex(*e) if isinstance(e, (list, tuple)) else complex(e)
                       for e in rec["matrix"]]
            n = int(round(np.sqrt(len(entries))))
            if n * n != len(entries):
                raise ArgumentError("matrix literal is not square")
            k = int(rec["degree"])
            coeffs[k] = coeffs.get(k, 0) + np.array(entries).reshape(n, n)
        if not coeffs:
            raise ArgumentError("empty symbol literal")
        return cls(coeffs, delta)

    def to_literal(self):
        return [{"degree": k,
                 "matrix": [[float(e.real), float(e.imag)] for e in c.ravel()]}
                for k, c in self.coeffs.items()]

    # structure ----------------------------------------------------------
    @property
    def channels(self):
        return self._n

    @property
    def deg_min(self):
        return min(self.coeffs)

    @property
    def deg_max(self):
        return max(self.coeffs)

    @property
    def bandwidth(self):
        return max(abs(self.deg_min), abs(self.deg_max))

    @property
    def certified(self):
        return self.min_abs_det >= self.delta

    def coeff(self, k):
        c = self.coeffs.get(k)
        return np.zeros((self._n, self._n), dtype=complex) if c is None else c

    def norm(self):
        return max(np.linalg.norm(c, 2) for c in self.coeffs.values())

    def __mul__(self, other):
        if not isinstance(other, LaurentSymbol):
            return LaurentSymbol({k: c * other for k, c in self.coeffs.items()}, self.delta)
        if other.channels != self.channels:
            raise ArgumentError("channel counts differ")
        out = {}
        for a, ca in self.coeffs.items():
            for b, cb in other.coeffs.items():
                out[a + b] = out.get(a + b, 0) + ca @ cb
        return LaurentSymbol(out, self.delta)

    def __add__(self, other):
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, 0) + c
        return LaurentSymbol(out, self.delta)

    def reversed(self):
        """``phi(1/z)``: swaps the roles of nonnegative and negative modes."""
        return LaurentSymbol({-k: c for k, c in self.coeffs.items()}, self.delta)

    def __repr__(self):
        return (f"LaurentSymbol(n={self.channels}, degrees=[{self.deg_min}, "
                f"{self.deg_max}], min|det|={self.min_abs_det:.3g})")

    # evaluation ---------------------------------------------------------
    def evaluate(self, theta):
        theta = np.asarray(theta, dtype=float)
        out = np.zeros(theta.shape + (self._n, self._n), dtype=complex)
        for k, c in self.coeffs.items():
            out += np.exp(1j * k * theta)[..., None, None] * c
        return out

    def det_on_grid(self, points):
        theta = 2 * np.pi * np.arange(points) / points
        vals = self.evaluate(theta)
        return vals[:, 0, 0] if self._n == 1 else np.linalg.det(vals)

    def require_certificate(self):
        if not self.certified:
            raise SymbolNotInvertibleError(
                f"min |det| = {self.min_abs_det:.3g} below delta = {self.delta:g}")

    def inverse(self, tol=INVERSE_TOL, max_points=2 ** 16):
        """Pointwise inverse on a grid, Fourier coefficients truncated below ``tol``.

        Returns ``(symbol, truncation_degree)``.
        """
        self.require_certificate()
        points = 64
        while points < 8 * (self.deg_max - self.deg_min + 1):
            points *= 2
        while True:
            theta = 2 * np.pi * np.arange(points) / points
            vals = np.linalg.inv(self.evaluate(theta))
            c = np.fft.fft(vals, axis=0) / points
            mags = np.abs(c).max(axis=(1, 2))
            freqs = np.fft.fftfreq(points, 1.0 / points).astype(int)
            ref = mags.max()
            tail = mags[np.abs(freqs) >= points // 4].max()
            if tail <= tol * ref:
                break
            if points >= max_points:
                raise ConvergenceError(
                    f"inverse coefficients not below {tol:g} on {points} points")
            points *= 2
        keep = mags > tol * ref
        degree = int(np.abs(freqs[keep]).max())
        coeffs = {int(f): c[i] for i, f in enumerate(freqs) if keep[i]}
        return LaurentSymbol(coeffs, self.delta), degree


def evaluate(phi: LaurentSymbol, theta: float) -> np.ndarray:
    return phi.evaluate(theta)


def winding_curve(phi: LaurentSymbol, points: int) -> np.ndarray:
    """Rows ``(theta, re det, im det, unwrapped phase)`` on a closed grid."""
    theta = 2 * np.pi * np.arange(points + 1) / points
    det = phi.det_on_grid(points)
    det = np.append(det, det[0])
    return np.column_stack([theta, det.real, det.imag, np.unwrap(np.angle(det))])


def _winding_on_grid(phi, points):
    curve = winding_curve(phi, points)
    return int(round((curve[-1, 3] - curve[0, 3]) / (2 * np.pi)))


def winding_number(phi: LaurentSymbol, max_points=MAX_WINDING_POINTS) -> int:
    """Winding of ``det phi`` around 0, refined by grid doubling until stable."""
    phi.require_certificate()
    points = 64
    while points < 16 * phi.channels * (phi.deg_max - phi.deg_min + 1):
        points *= 2
    prev = _winding_on_grid(phi, points)
    while points < max_points:
        points *= 2
        cur = _winding_on_grid(phi, points)
        if cur == prev:
            return cur
        prev = cur
    raise ConvergenceError(f"winding did not stabilise by {max_points} points")


def multiplication_matrix(phi: LaurentSymbol, win_in: FourierWindow,
                          win_out: FourierWindow) -> np.ndarray:
    """Matrix of ``f -> P_out(phi f)``; block (j, i) is ``coeffs[j - i]``."""
    n = phi.channels
    if win_in.channels != n or win_out.channels != n:
        raise ArgumentError("window channels do not match the symbol")
    out = np.zeros((win_out.dim, win_in.dim), dtype=complex)
    for i in range(win_in.lo, win_in.hi):
        ci = (i - win_in.lo) * n
        for k, c in phi.coeffs.items():
            j = i + k
            if win_out.lo <= j < win_out.hi:
                rj = (j - win_out.lo) * n
                out[rj:rj + n, ci:ci + n] = c
    return out


@dataclass(frozen=True)
class BlockDecomposition:
    """Compressions of a windowed multiplication matrix to the flat/sharp parts.

    ``gamma_block`` maps flat to sharp and ``beta_block`` sharp to flat.
    """

    alpha_block: np.ndarray
    beta_block: np.ndarray
    gamma_block: np.ndarray
    delta_block: np.ndarray
    space: SplitSpace

    def reassemble(self):
        mask = self.space.flat_mask()
        out = np.zeros((self.space.dim, self.space.dim), dtype=complex)
        out[np.ix_(mask, mask)] = self.alpha_block
        out[np.ix_(mask, ~mask)] = self.beta_block
        out[np.ix_(~mask, mask)] = self.gamma_block
        out[np.ix_(~mask, ~mask)] = self.delta_block
        return out


def block_decompose(phi: LaurentSymbol, s: SplitSpace) -> BlockDecomposition:
    m = multiplication_matrix(phi, s.window, s.window)
    f = s.flat_mask()
    return BlockDecomposition(m[np.ix_(f, f)], m[np.ix_(f, ~f)],
                              m[np.ix_(~f, f)], m[np.ix_(~f, ~f)], s)


def check_margins(s: SplitSpace, d: int):
    w = s.window
    if s.cut - w.lo < d or w.hi - s.cut < d:
        raise WindowError(
            f"cut {s.cut} needs margin {d} inside window [{w.lo}, {w.hi})")


def commutator(phi: LaurentSymbol, s: SplitSpace) -> np.ndarray:
    """Windowed ``phi S - S phi``."""
    m = multiplication_matrix(phi, s.window, s.window)
    sym = np.diag(symmetry(s)).astype(complex)
    return m * sym[None, :] - sym[:, None] * m


def commutator_rank(phi: LaurentSymbol, s: SplitSpace, tol=DEFAULT_TOL) -> int:
    check_margins(s, phi.bandwidth)
    c = commutator(phi, s)
    if not np.any(c):
        return 0
    return tolerance_rank(np.linalg.svd(c, compute_uv=False), tol)[0]
