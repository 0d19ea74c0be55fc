"""Tolerance-ranked subspaces and the index of a pair of subspaces.

Two scalar backends are supported: ``"float"`` (complex128 with a relative
singular-value threshold) and ``"rational"`` (exact Gaussian rationals via
sympy's ``DomainMatrix``).  The rational backend is meant for oracle checks on
small integer or monomial data.
"""
from __future__ import annotations

import contextlib
import contextvars
import threading
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
from sympy import QQ_I
from sympy.polys.matrices import DomainMatrix

from .errors import ArgumentError

DEFAULT_TOL = 1e-8
ILL_CONDITIONED_GAP = 10.0
BACKENDS = ("float", "rational")


class IllConditionedWarning(UserWarning):
    """Rank decision taken with a singular-value gap below the threshold."""


_MONITORS = contextvars.ContextVar("rank_gap_monitors", default=())


class GapMonitor:
    """Collects the gap of every float rank decision made while active."""

    def __init__(self):
        self.count = 0
        self.flagged = 0
        self.min_gap = np.inf
        self._lock = threading.Lock()

    def record(self, gap):
        with self._lock:
            self.count += 1
            self.min_gap = min(self.min_gap, gap)
            if gap < ILL_CONDITIONED_GAP:
                self.flagged += 1

    def as_dict(self):
        return {"decisions": self.count, "flagged": self.flagged,
                "min_gap": _json_float(self.min_gap)}


@contextlib.contextmanager
def gap_monitor():
    mon = GapMonitor()
    token = _MONITORS.set(_MONITORS.get() + (mon,))
    try:
        yield mon
    finally:
        _MONITORS.reset(token)


def tolerance_rank(s, tol=DEFAULT_TOL):
    r, gap = _tolerance_rank(s, tol)
    for mon in _MONITORS.get():
        mon.record(gap)
    return r, gap


def _tolerance_rank(s, tol):
    """Rank and gap for descending singular values ``s``.

    Values strictly above ``tol * s[0]`` are retained.  The gap is the smallest
    retained value over the largest discarded one; it is ``inf`` when nothing
    nonzero was discarded and ``0`` when nothing was retained.
    """
    s = np.asarray(s, dtype=float)
    if s.size == 0 or s[0] == 0.0:
        return 0, np.inf
    r = int(np.sum(s > tol * s[0]))
    if r == s.size or s[r] == 0.0:
        return r, np.inf
    if r == 0:
        return 0, 0.0
    return r, float(s[r - 1] / s[r])


# exact helpers -------------------------------------------------------------

def _to_qqi(x):
    if isinstance(x, (int, np.integer)):
        return QQ_I(int(x), 0)
    if isinstance(x, Fraction):
        return QQ_I(QQ_I.dom.convert(x.numerator) / x.denominator, 0)
    if isinstance(x, tuple) and len(x) == 2:
        re, im = (Fraction(v) for v in x)
        return QQ_I(QQ_I.dom.convert(re.numerator) / re.denominator,
                    QQ_I.dom.convert(im.numerator) / im.denominator)
    try:
        return QQ_I.convert(x)
    except Exception:
        c = complex(x)
        return _to_qqi((Fraction(c.real), Fraction(c.imag)))


def to_exact(a) -> DomainMatrix:
    """Convert a 2-D array-like (or a DomainMatrix) to a QQ_I DomainMatrix."""
    if isinstance(a, DomainMatrix):
        return a.convert_to(QQ_I)
    if isinstance(a, np.ndarray) and a.dtype != object:
        a = a.tolist()
    rows = [list(r) for r in a]
    n_rows = len(rows)
    n_cols = len(rows[0]) if n_rows else 0
    return DomainMatrix([[_to_qqi(x) for x in r] for r in rows], (n_rows, n_cols), QQ_I)


def exact_to_complex(m: DomainMatrix) -> np.ndarray:
    rows, cols = m.shape
    out = np.zeros((rows, cols), dtype=complex)
    for i, row in enumerate(m.to_list()):
        for j, e in enumerate(row):
            out[i, j] = complex(float(e.x), float(e.y))
    return out


def _exact_conj_t(m: DomainMatrix) -> DomainMatrix:
    return m.transpose().applyfunc(lambda e: QQ_I(e.x, -e.y), QQ_I)


def _exact_independent_columns(m: DomainMatrix) -> DomainMatrix:
    if m.shape[1] == 0:
        return m
    _, pivots = m.rref()
    cols = m.to_list()
    picked = [[row[j] for j in pivots] for row in cols]
    return DomainMatrix(picked, (m.shape[0], len(pivots)), QQ_I)


def _exact_nullspace(m: DomainMatrix) -> DomainMatrix:
    """Columns spanning the right null space of ``m``."""
    rows, cols = m.shape
    if cols == 0:
        return DomainMatrix.zeros((0, 0), QQ_I)
    if rows == 0:
        return DomainMatrix.eye(cols, QQ_I)
    ns = m.nullspace()
    if ns.shape[0] == 0:
        return DomainMatrix.zeros((cols, 0), QQ_I)
    return ns.transpose()


# subspaces ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Subspace:
    """A subspace of C^ambient_dim.

    In the float backend ``frame`` is an orthonormal column family; in the
    rational backend ``exact`` holds a full-column-rank exact basis and
    ``frame`` is derived from it on demand.
    """

    ambient_dim: int
    frame: Optional[np.ndarray] = None
    tol: float = DEFAULT_TOL
    rank_gap: float = np.inf
    exact: Optional[DomainMatrix] = field(default=None, repr=False)

    @property
    def backend(self):
        return "rational" if self.exact is not None else "float"

    @property
    def dim(self):
        if self.exact is not None:
            return self.exact.shape[1]
        return self.frame.shape[1]

    def orthonormal_frame(self) -> np.ndarray:
        if self.exact is None:
            return self.frame
        if self.dim == 0:
            return np.zeros((self.ambient_dim, 0), dtype=complex)
        q, _ = np.linalg.qr(exact_to_complex(self.exact))
        return q

    def projector(self) -> np.ndarray:
        q = self.orthonormal_frame()
        return q @ q.conj().T

    @classmethod
    def zero(cls, ambient_dim, backend="float", tol=DEFAULT_TOL):
        if backend == "rational":
            return cls(ambient_dim, None, tol, np.inf,
                       DomainMatrix.zeros((ambient_dim, 0), QQ_I))
        return cls(ambient_dim, np.zeros((ambient_dim, 0), dtype=complex), tol)

    @classmethod
    def full(cls, ambient_dim, backend="float", tol=DEFAULT_TOL):
        return coordinate(ambient_dim, range(ambient_dim), backend, tol)

    def __repr__(self):
        return (f"Subspace(dim={self.dim}, ambient={self.ambient_dim}, "
                f"backend={self.backend}, gap={self.rank_gap:.3g})")


def _check_backend(backend):
    if backend not in BACKENDS:
        raise ArgumentError(f"unknown backend {backend!r}")


def _as_columns(vectors, ambient_dim):
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        if vectors.shape[0] != ambient_dim:
            raise ArgumentError(
                f"vectors have length {vectors.shape[0]}, expected {ambient_dim}")
        return vectors
    cols = [np.asarray(v) for v in vectors]
    if not cols:
        return np.zeros((ambient_dim, 0), dtype=complex)
    for v in cols:
        if v.shape != (ambient_dim,):
            raise ArgumentError(f"vector of shape {v.shape}, expected ({ambient_dim},)")
    return np.stack(cols, axis=1)


def _float_span(m, ambient_dim, tol):
    m = np.asarray(m, dtype=complex)
    if m.shape[1] == 0:
        return Subspace.zero(ambient_dim, tol=tol)
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    r, gap = tolerance_rank(s, tol)
    return Subspace(ambient_dim, u[:, :r], tol, gap)


def span(vectors, ambient_dim, tol=DEFAULT_TOL, backend="float") -> Subspace:
    """Subspace spanned by a column family (2-D array or sequence of vectors)."""
    _check_backend(backend)
    if ambient_dim <= 0:
        raise ArgumentError("ambient dimension must be positive")
    if backend == "rational":
        if isinstance(vectors, DomainMatrix):
            m = vectors.convert_to(QQ_I)
        else:
            m = _as_columns(vectors, ambient_dim) if not (
                isinstance(vectors, np.ndarray) and vectors.dtype == object) else vectors
            m = to_exact(m) if m.shape[1] else DomainMatrix.zeros((ambient_dim, 0), QQ_I)
        if m.shape[0] != ambient_dim:
            raise ArgumentError("vector length does not match ambient dimension")
        return Subspace(ambient_dim, None, tol, np.inf, _exact_independent_columns(m))
    return _float_span(_as_columns(vectors, ambient_dim), ambient_dim, tol)


def coordinate(ambient_dim, indices, backend="float", tol=DEFAULT_TOL) -> Subspace:
    """Span of the standard basis vectors with the given indices."""
    idx = list(indices)
    if backend == "rational":
        m = DomainMatrix.eye(ambient_dim, QQ_I).to_Matrix()[:, idx] if idx else None
        exact = (DomainMatrix.from_Matrix(m).convert_to(QQ_I) if idx
                 else DomainMatrix.zeros((ambient_dim, 0), QQ_I))
        return Subspace(ambient_dim, None, tol, np.inf, exact)
    frame = np.eye(ambient_dim, dtype=complex)[:, idx]
    return Subspace(ambient_dim, frame, tol)


@dataclass(frozen=True)
class PairIndexResult:
    """alpha = dim of the intersection, beta = codim of the sum."""

    alpha: int
    beta: int
    index: int
    rank_gap: float = np.inf

    @property
    def ill_conditioned(self):
        return self.rank_gap < ILL_CONDITIONED_GAP

    def as_dict(self):
        return {"alpha": self.alpha, "beta": self.beta, "index": self.index,
                "rank_gap": _json_float(self.rank_gap),
                "ill_conditioned": self.ill_conditioned}


def _json_float(x):
    return None if not np.isfinite(x) else float(x)


def _common_backend(u, v):
    if u.backend == v.backend:
        return u.backend
    return "float"


def pair_index(u: Subspace, v: Subspace) -> PairIndexResult:
    """Kato index of the pair (u, v) via the rank of the concatenated frames."""
    if u.ambient_dim != v.ambient_dim:
        raise ArgumentError(
            f"ambient dimensions differ: {u.ambient_dim} vs {v.ambient_dim}")
    n = u.ambient_dim
    if _common_backend(u, v) == "rational":
        r = u.exact.hstack(v.exact).rank() if u.dim + v.dim else 0
        gap = np.inf
    else:
        tol = max(u.tol, v.tol)
        m = np.hstack([u.orthonormal_frame(), v.orthonormal_frame()])
        if m.shape[1] == 0 or n == 0:
            r, gap = 0, np.inf
        else:
            s = np.linalg.svd(m, compute_uv=False)
            r, gap = tolerance_rank(s, tol)
    alpha = u.dim + v.dim - r
    beta = n - r
    res = PairIndexResult(alpha, beta, alpha - beta, gap)
    if res.ill_conditioned:
        warnings.warn(f"pair index decided with rank gap {gap:.3g}",
                      IllConditionedWarning, stacklevel=2)
    return res


def kernel(a, tol=DEFAULT_TOL, backend="float") -> Subspace:
    """Null space of a matrix as a subspace of its domain."""
    _check_backend(backend)
    if backend == "rational":
        m = to_exact(a)
        return Subspace(m.shape[1], None, tol, np.inf, _exact_nullspace(m))
    a = np.asarray(a, dtype=complex)
    k = a.shape[1]
    if a.shape[0] == 0 or k == 0:
        return Subspace(k, np.eye(k, dtype=complex), tol)
    _, s, vh = np.linalg.svd(a, full_matrices=True)
    r, gap = tolerance_rank(s, tol)
    return Subspace(k, vh[r:].conj().T, tol, gap)


def complement(u: Subspace) -> Subspace:
    """Orthogonal complement."""
    if u.backend == "rational":
        return Subspace(u.ambient_dim, None, u.tol, np.inf,
                        _exact_nullspace(_exact_conj_t(u.exact)))
    if u.dim == 0:
        return Subspace.full(u.ambient_dim, tol=u.tol)
    q, _ = np.linalg.qr(u.frame, mode="complete")
    return Subspace(u.ambient_dim, q[:, u.dim:], u.tol, u.rank_gap)


def intersect(u: Subspace, v: Subspace) -> Subspace:
    """Intersection computed from the kernel of ``[U, -V]``."""
    if u.ambient_dim != v.ambient_dim:
        raise ArgumentError("ambient dimensions differ")
    if _common_backend(u, v) == "rational":
        ns = _exact_nullspace(u.exact.hstack(-v.exact))
        vecs = u.exact * ns[: u.dim, :] if ns.shape[1] and u.dim else None
        if vecs is None:
            return Subspace.zero(u.ambient_dim, "rational", u.tol)
        return Subspace(u.ambient_dim, None, u.tol, np.inf,
                        _exact_independent_columns(vecs))
    uf, vf = u.orthonormal_frame(), v.orthonormal_frame()
    tol = max(u.tol, v.tol)
    ker = kernel(np.hstack([uf, -vf]), tol)
    sub = _float_span(uf @ ker.frame[: u.dim], u.ambient_dim, tol)
    return Subspace(u.ambient_dim, sub.frame, tol, min(ker.rank_gap, sub.rank_gap))


def image(a, u: Subspace, tol=None) -> Subspace:
    """Image of a subspace under a matrix."""
    tol = u.tol if tol is None else tol
    if u.backend == "rational":
        m = to_exact(a) * u.exact if u.dim else DomainMatrix.zeros((len(a), 0), QQ_I)
        return Subspace(m.shape[0], None, tol, np.inf, _exact_independent_columns(m))
    a = np.asarray(a, dtype=complex)
    return _float_span(a @ u.frame, a.shape[0], tol)


def graph(a, backend="float", tol=DEFAULT_TOL) -> Subspace:
    """Graph of a map C^k -> C^m: the column span of [I; a] in C^(k+m)."""
    if backend == "rational":
        ea = to_exact(a)
        k = ea.shape[1]
        return span(DomainMatrix.eye(k, QQ_I).vstack(ea), k + ea.shape[0], tol, "rational")
    a = np.atleast_2d(np.asarray(a, dtype=complex))
    m, k = a.shape
    return span(np.vstack([np.eye(k), a]), k + m, tol)


def kato_index(a, backend="float", tol=DEFAULT_TOL) -> int:
    """Index of the pair (graph a, C^k + 0); equals k - m for an m x k matrix."""
    g = graph(a, backend, tol)
    k = g.dim
    return pair_index(g, coordinate(g.ambient_dim, range(k), backend, tol)).index
