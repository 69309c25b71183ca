"""Independent oracles and random-value helpers shared by the test modules.

Everything here deliberately avoids the production code paths it is used
to check: bicyclic multiplication is redone by string rewriting, free
reduction by a fixpoint scan, the free-product moment by the literal
two-level centered expansion.
"""

from __future__ import annotations

import re
from fractions import Fraction

from pqt import words as W
from pqt.algebra import Element, GaussianRational
from pqt.states import StateConfig, Character, Vacuum


# -- string rewriting oracle for the bicyclic relation ---------------------------


def rewrite_pq(tokens):
    """Exhaustively apply pq -> (empty) until no occurrence is left."""
    tokens = list(tokens)
    changed = True
    while changed:
        changed = False
        out = []
        i = 0
        while i < len(tokens):
            if i + 1 < len(tokens) and tokens[i] == "p" and tokens[i + 1] == "q":
                i += 2
                changed = True
            else:
                out.append(tokens[i])
                i += 1
        tokens = out
    return tokens


def bc_mul_by_rewriting(l: W.BCElement, r: W.BCElement) -> W.BCElement:
    tokens = rewrite_pq(["q"] * l.a + ["p"] * l.b + ["q"] * r.a + ["p"] * r.b)
    a = 0
    while a < len(tokens) and tokens[a] == "q":
        a += 1
    b = len(tokens) - a
    assert all(tok == "p" for tok in tokens[a:])
    return W.BCElement(a, b)


_T_RE = re.compile(r"t(\d+)(\*)?\Z")


def reblock(tokens) -> tuple:
    """Independent normal-form builder from a rewritten token stream."""
    items = []
    i = 0
    n = len(tokens)
    while i < n:
        if tokens[i] in ("p", "q"):
            a = b = 0
            while i < n and tokens[i] == "q":
                a += 1
                i += 1
            while i < n and tokens[i] == "p":
                b += 1
                i += 1
            # no pq substring survives rewriting, so the run is q...q p...p
            assert i >= n or tokens[i] not in ("p", "q")
            items.append(W.BCElement(a, b))
        else:
            m = _T_RE.fullmatch(tokens[i])
            items.append(W.FreeGen(int(m.group(1)), m.group(2) is not None))
            i += 1
    return tuple(items)


def pw_mul_by_rewriting(u, v) -> tuple:
    tokens = W.word_tokens(W.BCS, u) + W.word_tokens(W.BCS, v)
    return reblock(rewrite_pq(tokens))


# -- alternative free reduction ---------------------------------------------------


def fg_reduce_fixpoint(letters) -> tuple:
    letters = list(letters)
    changed = True
    while changed:
        changed = False
        out = []
        i = 0
        while i < len(letters):
            if i + 1 < len(letters) and letters[i][0] == letters[i + 1][0] and letters[i][1] == -letters[i + 1][1]:
                i += 2
                changed = True
            else:
                out.append(letters[i])
                i += 1
        letters = out
    return tuple(letters)


# -- literal two-level moment expansion -------------------------------------------


def _oracle_component_moment(kind, payload, cfg: StateConfig) -> Fraction:
    if kind == "bc":
        return Fraction(1, 2**payload.a) if payload.a == payload.b else Fraction(0)
    if isinstance(cfg.s_state, Vacuum):
        return Fraction(1) if not payload else Fraction(0)
    return Fraction(cfg.s_state.z) ** len(payload)


def _oracle_split(word) -> list:
    blocks = []
    run = []
    for it in word:
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


def _oracle_merge(blocks) -> tuple:
    out = list(blocks)
    changed = True
    while changed:
        changed = False
        for i in range(len(out) - 1):
            if out[i][0] == out[i + 1][0]:
                kind = out[i][0]
                if kind == "bc":
                    merged = bc_mul_by_rewriting(out[i][1], out[i + 1][1])
                    repl = [] if merged.is_identity() else [("bc", merged)]
                else:
                    repl = [("s", out[i][1] + out[i + 1][1])]
                out = out[:i] + repl + out[i + 2 :]
                changed = True
                break
    return tuple(out)


def _blocks_word(blocks) -> tuple:
    items = []
    for kind, payload in blocks:
        if kind == "bc":
            items.append(payload)
        else:
            items.extend(payload)
    return tuple(items)


def _alternating(blocks) -> bool:
    return all(blocks[i][0] != blocks[i + 1][0] for i in range(len(blocks) - 1))


def moment_two_level(word, cfg: StateConfig) -> Fraction:
    """Literal centered expansion: lift each block to its centered part plus
    its mean, kill fully centered alternating products, recurse on the rest."""
    blocks = _oracle_split(word)
    r = len(blocks)
    if r == 0:
        return Fraction(1)
    if r == 1:
        return _oracle_component_moment(blocks[0][0], blocks[0][1], cfg)
    mus = [_oracle_component_moment(k, p, cfg) for k, p in blocks]
    total = Fraction(0)
    for t_mask in range((1 << r) - 1):  # proper subsets carry centered factors
        scalar = Fraction(1)
        for i in range(r):
            if not (t_mask >> i) & 1:
                scalar *= mus[i]
        if scalar == 0:
            continue
        kept = [i for i in range(r) if (t_mask >> i) & 1]
        total += scalar * _centered_product_moment(kept, blocks, mus, cfg)
    return total


def _centered_product_moment(kept, blocks, mus, cfg) -> Fraction:
    if not kept:
        return Fraction(1)
    sub = [blocks[i] for i in kept]
    if _alternating(sub):
        return Fraction(0)
    total = Fraction(0)
    nn = len(kept)
    for u_mask in range(1 << nn):
        scalar = Fraction(1)
        for pos in range(nn):
            if not (u_mask >> pos) & 1:
                scalar *= -mus[kept[pos]]
        if scalar == 0:
            continue
        chosen = [blocks[kept[pos]] for pos in range(nn) if (u_mask >> pos) & 1]
        word = _blocks_word(_oracle_merge(chosen))
        total += scalar * moment_two_level(word, cfg)
    return total


# -- dense exact linear algebra, for checking the sparse kernels -------------------


def dense_rank(rows) -> int:
    """Textbook Gaussian elimination over exact scalars, dense and destructive."""
    m = [list(r) for r in rows]
    if not m:
        return 0
    n_rows, n_cols = len(m), len(m[0])
    rank = 0
    for col in range(n_cols):
        pivot = next((r for r in range(rank, n_rows) if not m[r][col].is_zero()), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        pv = m[rank][col]
        m[rank] = [v / pv for v in m[rank]]
        for r in range(n_rows):
            if r != rank and not m[r][col].is_zero():
                f = m[r][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank


def dense_solvable(rows, rhs) -> bool:
    """Consistency of A x = b by comparing dense ranks."""
    plain = dense_rank(rows)
    augmented = dense_rank([list(r) + [v] for r, v in zip(rows, rhs)])
    return augmented == plain


# -- random data helpers -----------------------------------------------------------


def random_word(rng, universe, max_len=3, max_index=2, max_exp=2):
    length = rng.randint(0, max_len)
    if universe == W.BC:
        return W.BCElement(rng.randint(0, max_exp), rng.randint(0, max_exp))
    if universe == W.SINF:
        return tuple(W.FreeGen(rng.randint(1, max_index), rng.random() < 0.5) for _ in range(length))
    if universe == W.F2:
        letters = [(rng.choice("xy"), rng.choice((1, -1))) for _ in range(length)]
        return W.fg_normalize(letters)
    items = []
    for _ in range(length):
        if items and isinstance(items[-1], W.BCElement):
            use_bc = False
        else:
            use_bc = rng.random() < 0.5
        if use_bc:
            a = rng.randint(0, max_exp)
            b = rng.randint(0, max_exp - a) if a < max_exp else 0
            if a == 0 and b == 0:
                a = 1
            items.append(W.BCElement(a, b))
        else:
            items.append(W.FreeGen(rng.randint(1, max_index), rng.random() < 0.5))
    return tuple(items)


def random_scalar(rng, complex_ok=True) -> GaussianRational:
    re = Fraction(rng.randint(-4, 4), rng.randint(1, 4))
    im = Fraction(rng.randint(-4, 4), rng.randint(1, 4)) if complex_ok and rng.random() < 0.4 else Fraction(0)
    if re == 0 and im == 0:
        re = Fraction(1)
    return GaussianRational(re, im)


def random_element(rng, universe, terms=3, complex_ok=True, **word_kw) -> Element:
    out = {}
    for _ in range(rng.randint(1, terms)):
        out[random_word(rng, universe, **word_kw)] = random_scalar(rng, complex_ok)
    return Element(universe, out)
