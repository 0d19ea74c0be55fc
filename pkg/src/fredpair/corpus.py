"""Seeded symbol corpora used by the test suite and the verify command."""
from __future__ import annotations

import numpy as np

from .symbols import LaurentSymbol

ROOT_GAP = 0.6


def monomials(kmax=8):
    return [(f"z^{k}", LaurentSymbol.monomial(k)) for k in range(-kmax, kmax + 1)]


def diag_monomials(rng, count=6, nmax=4, kmax=3):
    out = []
    for i in range(count):
        n = 2 + i % (nmax - 1)
        ks = [int(k) for k in rng.integers(-kmax, kmax + 1, size=n)]
        out.append((f"diag{tuple(ks)}", LaurentSymbol.diag_monomial(ks)))
    return out


def _det_roots(c0, c1):
    # det(c0 + c1 z) = det(c1) z^2 + (tr-like term) z + det(c0)
    a = np.linalg.det(c1)
    cc = np.linalg.det(c0)
    b = c0[0, 0] * c1[1, 1] + c1[0, 0] * c0[1, 1] - c0[0, 1] * c1[1, 0] - c1[0, 1] * c0[1, 0]
    return np.roots([a, b, cc])


def affine_2x2(rng, count=6, root_gap=ROOT_GAP, max_cond=10.0):
    """``c0 + c1 z`` whose determinant roots stay off the annulus
    ``root_gap < |z| < 1/root_gap`` and whose coefficients are well conditioned."""
    out = []
    while len(out) < count:
        c0 = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        c1 = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        if max(np.linalg.cond(c0), np.linalg.cond(c1)) > max_cond:
            continue
        r = np.abs(_det_roots(c0, c1))
        if np.any((r > root_gap) & (r < 1 / root_gap)):
            continue
        out.append((f"affine{len(out)}", LaurentSymbol({0: c0, 1: c1})))
    return out


def random_products(rng, pool, count, max_factors=3):
    by_n = {}
    for name, phi in pool:
        by_n.setdefault(phi.channels, []).append((name, phi))
    groups = [g for g in by_n.values() if len(g) >= 2]
    out = []
    while len(out) < count:
        g = groups[rng.integers(len(groups))]
        nf = int(rng.integers(2, max_factors + 1))
        picks = [g[int(i)] for i in rng.integers(len(g), size=nf)]
        phi = picks[0][1]
        for _, p in picks[1:]:
            phi = phi * p
        if phi.bandwidth > 8:
            continue
        out.append(("*".join(n for n, _ in picks), phi))
    return out


def symbol_corpus(seed=0, n_products=20):
    """Monomials, diagonal monomials, 2x2 affine symbols and seeded products."""
    rng = np.random.default_rng(seed)
    base = monomials() + diag_monomials(rng) + affine_2x2(rng)
    pool = [(n, p) for n, p in base if abs(p.deg_min) <= 3 and abs(p.deg_max) <= 3]
    pool += [(f"z^{k}I2", LaurentSymbol.monomial(k, 2)) for k in (-1, 1)]
    return base + random_products(rng, pool, n_products)


def symbol_pairs(seed=0, count=50):
    """Pairs of same-size corpus symbols for the homomorphism checks."""
    rng = np.random.default_rng(seed + 1)
    corpus = [(n, p) for n, p in symbol_corpus(seed) if p.bandwidth <= 4]
    by_n = {}
    for item in corpus:
        by_n.setdefault(item[1].channels, []).append(item)
    keys = sorted(by_n)
    out = []
    while len(out) < count:
        g = by_n[keys[int(rng.integers(len(keys)))]]
        a, b = (g[int(i)] for i in rng.integers(len(g), size=2))
        out.append((a, b))
    return out


def perturb(phi, rng, rel=1e-3):
    """Perturb every stored coefficient by less than ``rel * ||phi||``."""
    scale = rel * phi.norm()
    out = {}
    for k, c in phi.coeffs.items():
        e = rng.normal(size=c.shape) + 1j * rng.normal(size=c.shape)
        out[k] = c + 0.99 * scale * e / np.linalg.norm(e, 2)
    return LaurentSymbol(out, phi.delta)
