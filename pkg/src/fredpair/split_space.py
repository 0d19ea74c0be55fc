"""Truncated Fourier models of L^2(S^1; C^n) split by a mode cut.

Basis vectors are enumerated mode-major: index ``(mode - lo) * channels + c``.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ArgumentError, RangeError


@dataclass(frozen=True)
class FourierWindow:
    """Modes ``lo <= k < hi`` with ``channels`` components each."""

    lo: int
    hi: int
    channels: int = 1

    def __post_init__(self):
        if self.lo >= self.hi:
            raise ArgumentError(f"empty window [{self.lo}, {self.hi})")
        if self.channels < 1:
            raise ArgumentError("channels must be positive")

    @classmethod
    def symmetric(cls, n_half, channels=1):
        return cls(-n_half, n_half, channels)

    @property
    def dim(self):
        return self.channels * (self.hi - self.lo)

    @property
    def modes(self):
        return np.arange(self.lo, self.hi)

    def mode_of_index(self):
        """Mode number of every basis vector, in basis order."""
        return np.repeat(self.modes, self.channels)

    def index(self, mode, channel=0):
        if not self.lo <= mode < self.hi:
            raise RangeError(f"mode {mode} outside [{self.lo}, {self.hi})")
        return (mode - self.lo) * self.channels + channel

    def contains(self, mode):
        return self.lo <= mode < self.hi


@dataclass(frozen=True)
class SplitSpace:
    """A window with a cut: modes below ``cut`` are flat, the rest sharp."""

    window: FourierWindow
    cut: int = 0

    def __post_init__(self):
        if not self.window.lo <= self.cut <= self.window.hi:
            raise RangeError(
                f"cut {self.cut} outside [{self.window.lo}, {self.window.hi}]")

    @classmethod
    def symmetric(cls, n_half, channels=1, cut=0):
        return cls(FourierWindow.symmetric(n_half, channels), cut)

    @property
    def dim(self):
        return self.window.dim

    @property
    def channels(self):
        return self.window.channels

    def flat_mask(self):
        return self.window.mode_of_index() < self.cut

    @property
    def flat_dim(self):
        return int(self.flat_mask().sum())

    @property
    def sharp_dim(self):
        return self.dim - self.flat_dim


def flat_projector(s: SplitSpace) -> np.ndarray:
    """Diagonal 0/1 projector onto the modes below the cut."""
    return np.diag(s.flat_mask().astype(float))


def sharp_projector(s: SplitSpace) -> np.ndarray:
    return np.diag((~s.flat_mask()).astype(float))


def symmetry(s: SplitSpace) -> np.ndarray:
    """The involution ``P_sharp - P_flat``."""
    return np.diag(np.where(s.flat_mask(), -1.0, 1.0))


def twist_cut(s: SplitSpace, k: int) -> SplitSpace:
    """Move the cut by ``k`` modes (multiplication of the flat part by z^k)."""
    return replace(s, cut=s.cut + k)


def flat_basis(s: SplitSpace) -> np.ndarray:
    """Columns of the identity spanning the flat part."""
    return np.eye(s.dim)[:, s.flat_mask()]


def sharp_basis(s: SplitSpace) -> np.ndarray:
    return np.eye(s.dim)[:, ~s.flat_mask()]
