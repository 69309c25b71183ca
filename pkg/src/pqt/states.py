"""States on the component algebras and their free product, plus the trace.

The bicyclic component carries the diagonal-density shift state
mu1(q^a p^b) = [a == b] * 2^-a, whose dyadic weights keep every moment an
exact rational.  The free *-monoid component carries either a character
(each generator evaluates to a fixed rational z) or the vacuum.  The free
product of the two is evaluated by the centering recursion: write a word
as alternating component blocks, expand each block into its centered part
plus its mean, and use that fully centered alternating products have
moment zero.  Summing the resulting telescope gives, for an alternating
word c_1 ... c_r with component moments mu_i,

    mu(c_1...c_r) = sum over proper subsets U of the blocks of
                    (-1)^(|V|+1) * prod(mu_i for i in V) * mu(word of U)

with V the removed blocks; the kept blocks are re-merged inside their
components, so the recursion strictly shrinks the block count.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import LimitExceeded, UniverseMismatch
from . import words as W
from .algebra import Element, GaussianRational, ONE, ZERO

DEFAULT_MAX_BLOCKS = 10


_F0 = Fraction(0)
_F1 = Fraction(1)


@dataclass(frozen=True)
class DyadicShiftState:
    """mu1(q^a p^b) = 2^-a when a == b, else 0; positive and unital."""

    def moment_fraction(self, x: W.BCElement) -> Fraction:
        if x.a != x.b:
            return _F0
        return Fraction(1, 2**x.a)

    def moment(self, x: W.BCElement) -> GaussianRational:
        return GaussianRational(self.moment_fraction(x))

    def describe(self) -> dict:
        return {"kind": "dyadic-shift"}


@dataclass(frozen=True)
class Character:
    """Multiplicative state: every generator letter contributes a factor z."""

    z: Fraction = Fraction(1, 2)

    def __post_init__(self):
        object.__setattr__(self, "z", Fraction(self.z))

    def moment_fraction(self, w) -> Fraction:
        return self.z ** len(w)

    def moment(self, w) -> GaussianRational:
        return GaussianRational(self.moment_fraction(w))

    def describe(self) -> dict:
        return {"kind": "character", "z": str(self.z)}


@dataclass(frozen=True)
class Vacuum:
    """Coefficient-at-identity state on the free *-monoid algebra."""

    def moment_fraction(self, w) -> Fraction:
        return _F1 if not w else _F0

    def moment(self, w) -> GaussianRational:
        return GaussianRational(self.moment_fraction(w))

    def describe(self) -> dict:
        return {"kind": "vacuum"}


SState = Union[Character, Vacuum]


@dataclass(frozen=True)
class StateConfig:
    bc_state: DyadicShiftState = DyadicShiftState()
    s_state: SState = Character()

    def describe(self) -> dict:
        return {"bc_state": self.bc_state.describe(), "s_state": self.s_state.describe()}


def bc_moment(x: W.BCElement, state: DyadicShiftState | None = None) -> GaussianRational:
    return (state or DyadicShiftState()).moment(x)


def _split_blocks(w) -> list:
    """Alternating component blocks: ("bc", BCElement) and ("s", FreeWord)."""
    blocks: list = []
    run: list = []
    for it in w:
        if isinstance(it, W.BCElement):
            if run:
                blocks.append(("s", tuple(run)))
                run = []
            blocks.append(("bc", it))
        else:
            run.append(it)
    if run:
        blocks.append(("s", tuple(run)))
    return blocks


def _merge_blocks(blocks) -> list:
    """Multiply out same-component adjacencies created by dropping blocks."""
    stack: list = []
    for kind, payload in blocks:
        if stack and stack[-1][0] == kind:
            _, prev = stack.pop()
            if kind == "bc":
                merged = W.bc_mul(prev, payload)
                if not merged.is_identity():
                    stack.append(("bc", merged))
                # an identity block vanishes; later items keep merging
            else:
                stack.append(("s", prev + payload))
        else:
            stack.append((kind, payload))
    return stack


def _blocks_to_word(blocks) -> tuple:
    items: list = []
    for kind, payload in blocks:
        if kind == "bc":
            items.append(payload)
        else:
            items.extend(payload)
    return tuple(items)


class FreeProductState:
    """Moment functional on the free-product algebra, with memoisation.

    The cache maps normal-form words to their moments; inserts are
    idempotent, so concurrent use only has to keep individual reads and
    writes atomic.  Component states are rational-valued, so the inner
    recursion runs on plain fractions and only the public surface wraps
    them into scalars.
    """

    def __init__(self, cfg: StateConfig | None = None, max_blocks: int = DEFAULT_MAX_BLOCKS):
        self.cfg = cfg if cfg is not None else StateConfig()
        self.max_blocks = max_blocks
        self._cache: dict = {(): ONE}
        self._frac: dict = {(): _F1}

    def moment(self, x: Element) -> GaussianRational:
        if x.universe != W.BCS:
            raise UniverseMismatch(f"free-product state lives on {W.BCS!r}, got {x.universe!r}")
        total = ZERO
        for w, c in x.terms.items():
            total = total + c * self.word_moment(w)
        return total

    def word_moment(self, w) -> GaussianRational:
        cached = self._cache.get(w)
        if cached is None:
            cached = GaussianRational(self._word_fraction(w))
            self._cache[w] = cached
        return cached

    def _word_fraction(self, w) -> Fraction:
        cached = self._frac.get(w)
        if cached is None:
            cached = self._blocks_fraction(_split_blocks(w))
            self._frac[w] = cached
        return cached

    def _component_fraction(self, block) -> Fraction:
        kind, payload = block
        if kind == "bc":
            return self.cfg.bc_state.moment_fraction(payload)
        return self.cfg.s_state.moment_fraction(payload)

    def _blocks_fraction(self, blocks) -> Fraction:
        r = len(blocks)
        if r == 0:
            return _F1
        if r == 1:
            return self._component_fraction(blocks[0])
        if r > self.max_blocks:
            raise LimitExceeded(f"word has {r} blocks, cap is {self.max_blocks}")
        comp = [self._component_fraction(b) for b in blocks]
        total = _F0
        for mask in range((1 << r) - 1):  # proper subsets of the block set
            coeff = _F1
            removed = 0
            for i in range(r):
                if not (mask >> i) & 1:
                    mi = comp[i]
                    if not mi:
                        coeff = _F0
                        break
                    coeff = coeff * mi
                    removed += 1
            if not coeff:
                continue
            kept = _merge_blocks([blocks[i] for i in range(r) if (mask >> i) & 1])
            sub = self._word_fraction(_blocks_to_word(kept))
            if not sub:
                continue
            term = coeff * sub
            total = total + term if removed % 2 == 1 else total - term
        return total


def free_moment(x: Element, cfg: StateConfig | None = None, *, max_blocks: int = DEFAULT_MAX_BLOCKS) -> GaussianRational:
    return FreeProductState(cfg, max_blocks=max_blocks).moment(x)


def state_word_moment(universe: str, state: FreeProductState, w) -> GaussianRational:
    """Moment of a single word in any universe the states cover."""
    if universe == W.BC:
        return state.cfg.bc_state.moment(w)
    if universe == W.SINF:
        return state.cfg.s_state.moment(w)
    if universe == W.BCS:
        return state.word_moment(w)
    if universe == W.F2:
        return ONE if not w else ZERO  # the canonical trace
    raise ValueError(f"unknown universe {universe!r}")


# -- exact positive-semidefiniteness -------------------------------------------


def _psd_int(m_rows: list) -> tuple:
    """Fraction-free symmetric elimination on an integer symmetric matrix.

    One-step Bareiss scaling keeps every intermediate entry an integer;
    positive pivots are eliminated, a zero pivot must head an all-zero
    row, anything else certifies a negative principal minor.
    """
    idx = list(range(len(m_rows)))
    M = [row[:] for row in m_rows]
    processed: list = []
    prev = 1
    while M:
        p = M[0][0]
        if p < 0:
            return False, processed + [idx[0]]
        if p == 0:
            bad = next((j for j in range(1, len(M)) if M[0][j] != 0), None)
            if bad is not None:
                return False, processed + [idx[0], idx[bad]]
            M = [row[1:] for row in M[1:]]
            idx = idx[1:]
            continue
        size = len(M)
        row0 = M[0]
        newM = []
        for i in range(1, size):
            Mi = M[i]
            mi0 = Mi[0]
            newrow = []
            for j in range(1, size):
                val = p * Mi[j] - mi0 * row0[j]
                assert val % prev == 0
                newrow.append(val // prev)
            newM.append(newrow)
        processed.append(idx[0])
        idx = idx[1:]
        prev = p
        M = newM
    return True, None


def _psd_general(gram: list) -> tuple:
    """Rational Schur-complement elimination for Hermitian matrices."""
    idx = list(range(len(gram)))
    M = [row[:] for row in gram]
    processed: list = []
    while M:
        p = M[0][0]
        if p.im != 0:
            raise ValueError("gram matrix is not Hermitian (complex diagonal)")
        if p.re < 0:
            return False, processed + [idx[0]]
        if p.re == 0:
            bad = next((j for j in range(1, len(M)) if not M[0][j].is_zero()), None)
            if bad is not None:
                return False, processed + [idx[0], idx[bad]]
            M = [row[1:] for row in M[1:]]
            idx = idx[1:]
            continue
        size = len(M)
        row0 = M[0]
        newM = []
        for i in range(1, size):
            Mi = M[i]
            mi0 = Mi[0]
            newM.append([Mi[j] - mi0 * row0[j] / p for j in range(1, size)])
        processed.append(idx[0])
        idx = idx[1:]
        M = newM
    return True, None


def psd_decide(gram: list) -> tuple:
    """Exact PSD decision; returns (is_psd, violating principal minor indices)."""
    n = len(gram)
    if n == 0:
        return True, None
    if all(e.im == 0 for row in gram for e in row):
        denoms = [e.re.denominator for row in gram for e in row]
        scale = math.lcm(*denoms)
        M = [[int(e.re * scale) for e in row] for row in gram]
        return _psd_int(M)
    return _psd_general(gram)


def gram_matrix(universe: str, words: list, state: FreeProductState) -> list:
    n = len(words)
    stars = [W.word_star(universe, w) for w in words]
    G = [[ZERO] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            val = state_word_moment(universe, state, W.word_mul(universe, stars[i], words[j]))
            G[i][j] = val
            if i != j:
                G[j][i] = val.conjugate()
    return G


@dataclass
class GramReport:
    universe: str
    words: list
    state: dict
    psd: bool
    violating_minor: list | None = None
    elapsed_ms: float = 0.0

    @property
    def passed(self) -> bool:
        return self.psd

    def to_dict(self) -> dict:
        out = {
            "check": "gram-psd",
            "universe": self.universe,
            "words": self.words,
            "state_config": self.state,
            "psd": self.psd,
        }
        if self.violating_minor is not None:
            out["violating_minor"] = self.violating_minor
        out["elapsed_ms"] = round(self.elapsed_ms, 3)
        return out


def gram_psd_check(
    universe: str,
    words: list,
    cfg: StateConfig | None = None,
    *,
    max_blocks: int = DEFAULT_MAX_BLOCKS,
) -> GramReport:
    """Exact positivity check of the state on span{delta_w : w in words}."""
    if len(set(words)) != len(words):
        raise ValueError("gram words must be pairwise distinct")
    start = time.perf_counter()
    state = FreeProductState(cfg, max_blocks=max_blocks)
    G = gram_matrix(universe, words, state)
    psd, minor = psd_decide(G)
    elapsed = (time.perf_counter() - start) * 1000.0
    return GramReport(
        universe=universe,
        words=[W.render_word(universe, w) for w in words],
        state=state.cfg.describe(),
        psd=psd,
        violating_minor=minor,
        elapsed_ms=elapsed,
    )


# -- the trace on the free-group algebra ----------------------------------------


def trace_f2(x: Element) -> GaussianRational:
    """Coefficient at the empty word; tracial, and faithful on x*x."""
    if x.universe != W.F2:
        raise UniverseMismatch(f"trace is defined on {W.F2!r}, got {x.universe!r}")
    return x.coordinate(())
