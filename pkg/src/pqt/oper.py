"""Truncated finite-dimensional *-representation and operator norms.

The bicyclic generators act as the truncated forward/backward shifts, so
p q = e holds exactly except for a rank-one defect in the top corner
(no finite-dimensional algebra can avoid one), while q p annihilates the
bottom basis vector by construction.  Free generators get dense matrices
with a deterministic trigonometric fill; nothing here uses a PRNG, so
identical configurations reproduce bitwise-identical matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import UniverseMismatch
from . import words as W
from .algebra import Element

DEFAULT_NORM_TOL = 1e-10
DEFAULT_NORM_MAX_ITER = 10_000


@dataclass(frozen=True)
class RepConfig:
    dim: int = 256
    max_index: int = 64

    def __post_init__(self):
        if self.dim < 8:
            raise ValueError(f"dim must be >= 8, got {self.dim}")
        if self.max_index < 1:
            raise ValueError(f"max_index must be >= 1, got {self.max_index}")


class ShiftRepresentation:
    """Matrices for generators and, multiplicatively/linearly, for elements."""

    def __init__(self, cfg: RepConfig | None = None):
        self.cfg = cfg if cfg is not None else RepConfig()
        d = self.cfg.dim
        self._forward = np.eye(d, k=-1, dtype=complex)  # e_i -> e_{i+1}, kills e_{d-1}
        self._backward = self._forward.conj().T  # e_i -> e_{i-1}, kills e_0
        self._free: dict = {}

    @property
    def dim(self) -> int:
        return self.cfg.dim

    @property
    def forward_shift(self) -> np.ndarray:
        return self._forward

    @property
    def backward_shift(self) -> np.ndarray:
        return self._backward

    def free_matrix(self, n: int, starred: bool = False) -> np.ndarray:
        if not 1 <= n <= self.cfg.max_index:
            raise ValueError(f"generator index {n} outside 1..{self.cfg.max_index}")
        base = self._free.get(n)
        if base is None:
            d = self.cfg.dim
            j = np.arange(d, dtype=float)[:, None]
            k = np.arange(d, dtype=float)[None, :]
            base = (np.cos(n + 3.0 * j + 7.0 * k) + 1j * np.sin(2.0 * n + 5.0 * j + 11.0 * k)) / math.sqrt(d)
            self._free[n] = base
        return base.conj().T if starred else base

    def item_matrix(self, item) -> np.ndarray:
        if isinstance(item, W.BCElement):
            out = np.eye(self.cfg.dim, dtype=complex)
            for _ in range(item.a):
                out = self._forward @ out
            for _ in range(item.b):
                out = out @ self._backward
            return out
        return self.free_matrix(item.index, item.starred)

    def word_matrix(self, w) -> np.ndarray:
        """Product word (or free word, or a lone bicyclic element) to matrix."""
        if isinstance(w, W.BCElement):
            return self.item_matrix(w)
        out = np.eye(self.cfg.dim, dtype=complex)
        for item in w:
            out = out @ self.item_matrix(item)
        return out

    def matrix(self, x: Element) -> np.ndarray:
        if x.universe == W.F2:
            raise UniverseMismatch("the shift representation does not cover the free-group algebra")
        out = np.zeros((self.cfg.dim, self.cfg.dim), dtype=complex)
        for word, coeff in x.terms.items():
            out += complex(float(coeff.re), float(coeff.im)) * self.word_matrix(word)
        return out


class OpNormResult(NamedTuple):
    value: float
    iterations: int
    converged: bool


def op_norm(a: np.ndarray, tol: float = DEFAULT_NORM_TOL, max_iterations: int = DEFAULT_NORM_MAX_ITER) -> OpNormResult:
    """Largest singular value by power iteration on a*a.

    The start vector is a fixed trigonometric fill, the accumulation order
    is whatever the BLAS product does for the full matrix: both are pinned
    so repeated runs agree bitwise.
    """
    a = np.asarray(a, dtype=complex)
    b = a.conj().T @ a
    d = b.shape[0]
    idx = np.arange(d, dtype=float)
    v = np.cos(idx + 1.0) + 1j * np.sin(2.0 * idx + 1.0)
    v = v / np.linalg.norm(v)
    sigma = 0.0
    sigma_prev = None
    for it in range(1, max_iterations + 1):
        w = b @ v
        lam = float(np.linalg.norm(w))
        if lam == 0.0:
            return OpNormResult(0.0, it, True)
        v = w / lam
        sigma = math.sqrt(lam)
        if sigma_prev is not None and abs(sigma - sigma_prev) <= tol * max(sigma, 1e-300):
            return OpNormResult(sigma, it, True)
        sigma_prev = sigma
    return OpNormResult(sigma, max_iterations, False)


class GammaEstimate(NamedTuple):
    value: float
    iterations: int
    converged: bool


def gamma_from_rep(n: int, rep: ShiftRepresentation | None = None) -> GammaEstimate:
    """The norm-matched weight 1 / (n * ||t_n matrix||)."""
    rep = rep if rep is not None else ShiftRepresentation()
    norm = op_norm(rep.free_matrix(n))
    return GammaEstimate(1.0 / (n * norm.value), norm.iterations, norm.converged)


@dataclass
class ConvergenceRow:
    n: int
    gamma: float
    norm_diff: float
    iterations: int
    converged: bool


@dataclass
class ConvergenceReport:
    dim: int
    rows: list

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "rows": [
                {"n": r.n, "gamma": r.gamma, "norm_an_minus_p": r.norm_diff, "iters": r.iterations}
                for r in self.rows
            ],
        }


def convergence_report(count: int, cfg: RepConfig | None = None) -> ConvergenceReport:
    """Distance of each weighted generator image from the p matrix.

    Row n reports ||(p + gamma_n t_n) - p|| with the norm-matched gamma,
    which is 1/n up to the norm-estimation tolerance.
    """
    rep = ShiftRepresentation(cfg)
    if count > rep.cfg.max_index:
        raise ValueError(f"count {count} exceeds max_index {rep.cfg.max_index}")
    p_mat = rep.item_matrix(W.P)
    rows = []
    for n in range(1, count + 1):
        r_mat = rep.free_matrix(n)
        gamma = gamma_from_rep(n, rep)
        a_mat = p_mat + gamma.value * r_mat
        diff = op_norm(a_mat - p_mat)
        rows.append(ConvergenceRow(n, gamma.value, diff.value, diff.iterations, gamma.converged and diff.converged))
    return ConvergenceReport(rep.cfg.dim, rows)


@dataclass
class BoundaryReport:
    window: int
    dim: int
    words_checked: int
    vectors_checked: int
    failures: list

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        out = {
            "check": "boundary-exactness",
            "L": self.window,
            "dim": self.dim,
            "words_checked": self.words_checked,
            "vectors_checked": self.vectors_checked,
            "result": "pass" if self.passed else "fail",
        }
        if self.failures:
            out["failures"] = self.failures[:10]
        return out


def boundary_exactness_check(window: int, cfg: RepConfig | None = None) -> BoundaryReport:
    """Shift words act with zero numerical error away from the truncation edge.

    Every bicyclic word with exponent sum <= window, applied to a basis
    vector e_i with window <= i < dim - window, must land exactly on the
    predicted basis vector.
    """
    rep = ShiftRepresentation(cfg)
    d = rep.cfg.dim
    if not window < d // 2:
        raise ValueError(f"window {window} must be < dim/2 = {d // 2}")
    failures: list = []
    words = W.bc_elements(window)
    vectors = range(window, d - window)
    for bc in words:
        mat = rep.item_matrix(bc)
        for i in vectors:
            col = mat[:, i]
            target = i - bc.b + bc.a
            if col[target] != 1.0 or np.count_nonzero(col) != 1:
                failures.append({"word": W.render_word(W.BC, bc), "vector": i})
    return BoundaryReport(window, d, len(words), len(vectors), failures)
