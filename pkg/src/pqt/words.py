"""Normal forms and arithmetic for the monoids behind the workbench.

Four universes share one calling convention (a universe tag plus an
immutable, hashable word value):

* ``bc``   -- the bicyclic monoid <p, q : pq = e>, canonical words q^a p^b
* ``sinf`` -- the free *-monoid on t1, t1*, t2, t2*, ...
* ``bcs``  -- the monoid free product of the two above
* ``f2``   -- the free group on x, y (carrier of the trace checks)

A ``bcs`` word is stored in alternating normal form: a tuple of items,
each either a non-identity bicyclic block or a single free generator,
with no two bicyclic blocks adjacent.  The item count is the word's
length.  ``sinf`` words are item tuples containing no bicyclic blocks,
so they double as ``bcs`` words under the natural inclusion.

All operations are pure functions of immutable values and safe to call
concurrently.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Union

from .errors import LimitExceeded

BC = "bc"
SINF = "sinf"
BCS = "bcs"
F2 = "f2"

UNIVERSES = (BC, SINF, BCS, F2)

DEFAULT_BLOCK_FACTOR = 3
DEFAULT_ENUMERATION_LIMIT = 200_000
MAX_LENGTH = 12
MAX_INDEX = 16


@dataclass(frozen=True, slots=True)
class BCElement:
    """q^a p^b in canonical form; (0, 0) is the identity.

    Deliberately not a tuple subclass: words are dict keys, and item
    equality has to be class-aware.
    """

    a: int
    b: int

    def is_identity(self) -> bool:
        return self.a == 0 and self.b == 0


BC_IDENTITY = BCElement(0, 0)
P = BCElement(0, 1)
Q = BCElement(1, 0)


def bc_mul(l: BCElement, r: BCElement) -> BCElement:
    # the inner p^b q^c collapses through pq = e; the longer run survives
    if l.b >= r.a:
        return BCElement(l.a, l.b - r.a + r.b)
    return BCElement(l.a + r.a - l.b, r.b)


def bc_star(x: BCElement) -> BCElement:
    return BCElement(x.b, x.a)


@dataclass(frozen=True, slots=True)
class FreeGen:
    """Free *-monoid generator t_index, or its star when ``starred``."""

    index: int
    starred: bool = False

    def star(self) -> "FreeGen":
        return FreeGen(self.index, not self.starred)


Item = Union[BCElement, FreeGen]
ProductWord = tuple  # tuple[Item, ...] in alternating normal form
FreeWord = tuple  # tuple[FreeGen, ...]
FGLetter = tuple  # (gen, exp) with gen in {"x", "y"}, exp in {+1, -1}
FGWord = tuple  # tuple[FGLetter, ...], freely reduced


def t(index: int, starred: bool = False) -> FreeGen:
    if index < 1:
        raise ValueError(f"generator index must be >= 1, got {index}")
    return FreeGen(index, starred)


def normalize_items(items: Iterable[Item]) -> ProductWord:
    """Fold an arbitrary item sequence into alternating normal form."""
    stack: list[Item] = []
    for it in items:
        if isinstance(it, BCElement):
            if it.is_identity():
                continue
            if stack and isinstance(stack[-1], BCElement):
                merged = bc_mul(stack.pop(), it)
                if not merged.is_identity():
                    stack.append(merged)
                # a dropped identity exposes a free generator (or nothing),
                # so the stack stays in normal form
            else:
                stack.append(it)
        else:
            stack.append(it)
    return tuple(stack)


def pw_mul(l: ProductWord, r: ProductWord) -> ProductWord:
    """Multiply two normal-form words; only the seam can need work."""
    if not l:
        return r
    if not r:
        return l
    ll, rf = l[-1], r[0]
    if isinstance(ll, BCElement) and isinstance(rf, BCElement):
        merged = bc_mul(ll, rf)
        if merged.is_identity():
            # alternation makes both splice neighbours free generators,
            # so no cascade is possible
            assert len(l) < 2 or isinstance(l[-2], FreeGen)
            assert len(r) < 2 or isinstance(r[1], FreeGen)
            return l[:-1] + r[1:]
        return l[:-1] + (merged,) + r[1:]
    return l + r


def pw_star(w: ProductWord) -> ProductWord:
    out = []
    for it in reversed(w):
        out.append(bc_star(it) if isinstance(it, BCElement) else it.star())
    return tuple(out)


def pw_len(w: ProductWord) -> int:
    return len(w)


def free_star(w: FreeWord) -> FreeWord:
    return tuple(g.star() for g in reversed(w))


def fg_inverse(w: FGWord) -> FGWord:
    return tuple((g, -e) for g, e in reversed(w))


def fg_normalize(letters: Iterable[FGLetter]) -> FGWord:
    stack: list[FGLetter] = []
    for g, e in letters:
        if stack and stack[-1][0] == g and stack[-1][1] == -e:
            stack.pop()
        else:
            stack.append((g, e))
    return tuple(stack)


def fg_mul(l: FGWord, r: FGWord) -> FGWord:
    stack = list(l)
    for g, e in r:
        if stack and stack[-1][0] == g and stack[-1][1] == -e:
            stack.pop()
        else:
            stack.append((g, e))
    return tuple(stack)


def map_to_two_generators(w: FreeWord) -> tuple:
    """Monoid map into the free *-monoid <a, b> with a* = b.

    t_n goes to a b^n a and t_n* to b a^n b; the images decode uniquely,
    which is what makes the composed group embedding injective.
    """
    out: list[str] = []
    for g in w:
        if g.starred:
            out.append("b")
            out.extend("a" * g.index)
            out.append("b")
        else:
            out.append("a")
            out.extend("b" * g.index)
            out.append("a")
    return tuple(out)


def map_to_f2(w: FreeWord) -> FGWord:
    """Compose the two-generator map with a -> x, b -> y into the free group.

    Images are positive words, so reduction never fires here; it is kept
    for the general contract.
    """
    letters = [("x" if c == "a" else "y", 1) for c in map_to_two_generators(w)]
    return fg_normalize(letters)


# -- generic word interface, dispatched on the universe tag ------------------


def identity_word(universe: str):
    _check_universe(universe)
    return BC_IDENTITY if universe == BC else ()


def word_mul(universe: str, u, v):
    if universe == BC:
        return bc_mul(u, v)
    if universe == SINF:
        return u + v
    if universe == BCS:
        return pw_mul(u, v)
    if universe == F2:
        return fg_mul(u, v)
    raise ValueError(f"unknown universe {universe!r}")


def word_star(universe: str, u):
    if universe == BC:
        return bc_star(u)
    if universe == SINF:
        return free_star(u)
    if universe == BCS:
        return pw_star(u)
    if universe == F2:
        return fg_inverse(u)
    raise ValueError(f"unknown universe {universe!r}")


def word_len(universe: str, u) -> int:
    if universe == BC:
        return 0 if u.is_identity() else 1
    return len(u)


_F2_RANK = {("x", 1): 0, ("x", -1): 1, ("y", 1): 2, ("y", -1): 3}


def _gen_rank(g: FreeGen) -> int:
    return 2 * g.index + (1 if g.starred else 0)


def _token_ranks(universe: str, u) -> tuple:
    # generator order: p < q < t1 < t1* < t2 < ...
    if universe == BC:
        return (1,) * u.a + (0,) * u.b
    if universe == F2:
        return tuple(_F2_RANK[let] for let in u)
    ranks: list[int] = []
    for it in u:
        if isinstance(it, BCElement):
            ranks.extend((1,) * it.a + (0,) * it.b)
        else:
            ranks.append(_gen_rank(it))
    return tuple(ranks)


def word_sort_key(universe: str, u) -> tuple:
    """Total order: length first, then lexicographic on generator tokens."""
    return (word_len(universe, u), _token_ranks(universe, u))


def word_tokens(universe: str, u) -> list:
    if universe == BC:
        return ["q"] * u.a + ["p"] * u.b
    if universe == F2:
        return [g if e == 1 else g + "-" for g, e in u]
    toks: list[str] = []
    for it in u:
        if isinstance(it, BCElement):
            toks.extend(["q"] * it.a + ["p"] * it.b)
        else:
            toks.append(f"t{it.index}*" if it.starred else f"t{it.index}")
    return toks


def render_word(universe: str, u) -> str:
    toks = word_tokens(universe, u)
    return " ".join(toks) if toks else "e"


def max_free_index(universe: str, u) -> int:
    if universe == BC:
        return 0
    if universe == F2:
        return 0
    return max((it.index for it in u if isinstance(it, FreeGen)), default=0)


def _check_universe(universe: str) -> None:
    if universe not in UNIVERSES:
        raise ValueError(f"unknown universe {universe!r}")


# -- enumeration --------------------------------------------------------------


def bc_elements(max_exponent_sum: int, include_identity: bool = True) -> list:
    """All q^a p^b with a + b <= max_exponent_sum, in canonical order."""
    out = [BCElement(a, s - a) for s in range(1, max_exponent_sum + 1) for a in range(s + 1)]
    out.sort(key=lambda x: word_sort_key(BC, x))
    if include_identity:
        return [BC_IDENTITY] + out
    return out


def _free_gens(k: int) -> list:
    return [FreeGen(i, s) for i in range(1, k + 1) for s in (False, True)]


def count_words(m: int, k: int, universe: str, *, block_exponent_factor: int = DEFAULT_BLOCK_FACTOR) -> int:
    """Size of the enumeration without materialising it."""
    if universe == SINF:
        return sum((2 * k) ** i for i in range(m + 1))
    if universe == BCS:
        bound = m * block_exponent_factor
        n_free = 2 * k
        n_bc = bound * (bound + 3) // 2  # sum of (s + 1) for s = 1..bound
        end_free, end_bc = 0, 0
        total = 1
        for length in range(1, m + 1):
            prev_any = (end_free + end_bc) if length > 1 else 1
            prev_free = end_free if length > 1 else 1
            end_free = prev_any * n_free
            end_bc = prev_free * n_bc if length > 1 else n_bc
            total += end_free + end_bc
        return total
    raise ValueError(f"enumeration is defined for {SINF!r} and {BCS!r}, not {universe!r}")


def enumerate_words(
    m: int,
    k: int,
    universe: str,
    *,
    block_exponent_factor: int = DEFAULT_BLOCK_FACTOR,
    limit: int | None = DEFAULT_ENUMERATION_LIMIT,
) -> list:
    """All words of length <= m with generator indices <= k, sorted.

    For ``bcs`` the bicyclic blocks are capped at exponent sum
    m * block_exponent_factor; the abstract length filtration is infinite,
    so any finite enumeration has to bound exponents somewhere.

    Index-bounded enumeration is a sound basis for the verifiers built on
    it: every checked statement is uniform in the generator index, and a
    finite computation only ever touches finitely many indices.
    """
    if m < 0:
        raise ValueError("m must be >= 0")
    if k < 1:
        raise ValueError("k must be >= 1")
    if limit is not None and (m > MAX_LENGTH or k > MAX_INDEX):
        raise LimitExceeded(f"enumeration bounds m={m}, k={k} exceed the safety limits (pass limit=None to force)")
    total = count_words(m, k, universe, block_exponent_factor=block_exponent_factor)
    if limit is not None and total > limit:
        raise LimitExceeded(f"enumeration would produce {total} words (limit {limit})")

    if universe == SINF:
        gens = _free_gens(k)
        words: list = [()]
        for length in range(1, m + 1):
            words.extend(itertools.product(gens, repeat=length))
        words.sort(key=lambda w: word_sort_key(SINF, w))
        return words

    # bcs: grow item sequences, never placing two bicyclic blocks side by side
    blocks = bc_elements(m * block_exponent_factor, include_identity=False)
    gens = _free_gens(k)
    words = [()]
    frontier: list = [()]
    for _ in range(m):
        grown: list = []
        for w in frontier:
            bc_ok = not (w and isinstance(w[-1], BCElement))
            for g in gens:
                grown.append(w + (g,))
            if bc_ok:
                for b in blocks:
                    grown.append(w + (b,))
        words.extend(grown)
        frontier = grown
    words.sort(key=lambda w: word_sort_key(BCS, w))
    return words


def enumerate_f2(m: int, *, limit: int | None = DEFAULT_ENUMERATION_LIMIT) -> list:
    """All reduced words of length <= m over x, y and their inverses."""
    if m < 0:
        raise ValueError("m must be >= 0")
    total = 1 + sum(4 * 3 ** (i - 1) for i in range(1, m + 1))
    if limit is not None and total > limit:
        raise LimitExceeded(f"enumeration would produce {total} words (limit {limit})")
    letters = [("x", 1), ("x", -1), ("y", 1), ("y", -1)]
    words: list = [()]
    frontier: list = [()]
    for _ in range(m):
        grown = []
        for w in frontier:
            for g, e in letters:
                if w and w[-1][0] == g and w[-1][1] == -e:
                    continue
                grown.append(w + ((g, e),))
        words.extend(grown)
        frontier = grown
    words.sort(key=lambda w: word_sort_key(F2, w))
    return words
