"""Graph-group elements as irreducible traces over a doubled alphabet.

Inverse letters are spelled with a trailing apostrophe.  Free reduction uses
the same piling technique as trace normal forms, with one column per base
letter and signed entries; a letter cancels the most recent surviving
occurrence of its inverse exactly when that occurrence is on top of its
column.  Entries carry position tags so that multiplication can report the
cancelled middle trace of the unique boundary factorization.
"""

from __future__ import annotations

from collections import deque
from typing import Sequence, Tuple

from .errors import AlphabetMismatchError, ResourceExceeded, TraceError
from .traces import (
    IndependenceAlphabet,
    Trace,
    empty_trace,
    left_quotient,
    right_quotient,
)

INVERSE_MARK = "'"


def inverse_letter(letter: str) -> str:
    if letter.endswith(INVERSE_MARK):
        return letter[:-1]
    return letter + INVERSE_MARK


def base_letter(letter: str) -> str:
    return letter[:-1] if letter.endswith(INVERSE_MARK) else letter


def is_inverse_letter(letter: str) -> bool:
    return letter.endswith(INVERSE_MARK)


class DoubledAlphabet(IndependenceAlphabet):
    """Base letters plus formal inverses; independence lifted sign-blind."""

    __slots__ = ("base", "_base_rank", "_letter_sign")

    def __init__(self, base: IndependenceAlphabet):
        for name in base.letters:
            if name.endswith(INVERSE_MARK):
                raise TraceError(f"base letter {name!r} must not end in {INVERSE_MARK!r}")
        letters = []
        for a in base.letters:
            letters.append(a)
            letters.append(a + INVERSE_MARK)
        pairs = []
        for pair in base.independence:
            a, b = tuple(pair)
            for x in (a, a + INVERSE_MARK):
                for y in (b, b + INVERSE_MARK):
                    pairs.append((x, y))
        super().__init__(letters, pairs)
        self.base = base
        self._base_rank = {}
        self._letter_sign = {}
        for i, a in enumerate(base.letters):
            self._base_rank[a] = i
            self._base_rank[a + INVERSE_MARK] = i
            self._letter_sign[a] = 1
            self._letter_sign[a + INVERSE_MARK] = -1

    def base_rank(self, letter: str) -> int:
        return self._base_rank[letter]

    def sign(self, letter: str) -> int:
        return self._letter_sign[letter]


def doubled(base: IndependenceAlphabet) -> DoubledAlphabet:
    return DoubledAlphabet(base)


def invert_word(word: Sequence[str]) -> tuple:
    """Reversal with letterwise inversion; an involution on raw words."""
    return tuple(inverse_letter(a) for a in reversed(word))


class GroupElement:
    """An element of the graph group, stored as its irreducible canonical trace."""

    __slots__ = ("trace",)

    def __init__(self, trace: Trace):
        self.trace = trace

    @property
    def alphabet(self) -> DoubledAlphabet:
        return self.trace.alphabet

    @property
    def word(self) -> tuple:
        return self.trace.word

    def __len__(self):
        return len(self.trace)

    def __eq__(self, other):
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self.trace == other.trace

    def __hash__(self):
        return hash(("GroupElement", self.trace))

    def __repr__(self):
        return f"GroupElement({' '.join(self.word) if self.word else '_'})"

    def __bool__(self):
        return bool(self.word)

    def is_identity(self) -> bool:
        return not self.word

    def inverse(self) -> "GroupElement":
        # The inverse of an irreducible trace is irreducible.
        return GroupElement(Trace(self.alphabet, invert_word(self.word)))


def identity(alphabet: DoubledAlphabet) -> GroupElement:
    return GroupElement(empty_trace(alphabet))


def invert(value):
    """Inverse of a raw word (sequence of letters) or of a GroupElement."""
    if isinstance(value, GroupElement):
        return value.inverse()
    return invert_word(value)


def _reduce_tagged(alphabet: DoubledAlphabet, word: Sequence[str]):
    """Free reduction via signed piling.

    Returns (canonical reduced word, cancelled pairs as (tag_i, tag_j) with
    tag_i < tag_j, surviving tags in canonical-word order).
    """
    n_base = len(alphabet.base.letters)
    base_dep_incl = alphabet.base._dep_incl_ranks
    base_rank = alphabet._base_rank
    sign_of = alphabet._letter_sign
    # pile entries: (sign, tag) for real entries, None markers for dependents
    piles = [deque() for _ in range(n_base)]
    pairs = []
    count = 0
    for tag, letter in enumerate(word):
        b = base_rank[letter]
        s = sign_of[letter]
        pile = piles[b]
        if pile and pile[-1] is not None and pile[-1][0] == -s:
            partner = pile[-1][1]
            pairs.append((partner, tag))
            for j in base_dep_incl[b]:
                piles[j].pop()
            count -= 1
        else:
            for j in base_dep_incl[b]:
                piles[j].append((s, tag) if j == b else None)
            count += 1
    # depile: lex-least linearization over the doubled order (a < a' < b < ...)
    base_letters = alphabet.base.letters
    out = []
    tags = []
    while count:
        for b in range(n_base):
            pile = piles[b]
            if pile and pile[0] is not None:
                s, tag = pile[0]
                out.append(base_letters[b] if s > 0 else base_letters[b] + INVERSE_MARK)
                tags.append(tag)
                for j in base_dep_incl[b]:
                    piles[j].popleft()
                count -= 1
                break
        else:  # pragma: no cover
            raise AssertionError("group piling depile stuck")
    return tuple(out), pairs, tags


def free_reduce(alphabet: DoubledAlphabet, word) -> GroupElement:
    """The unique irreducible normal form of a raw word or trace."""
    if isinstance(word, Trace):
        if word.alphabet != alphabet:
            raise AlphabetMismatchError("trace over a different alphabet")
        word = word.word
    else:
        alphabet.check_word(word)
    reduced, _, _ = _reduce_tagged(alphabet, tuple(word))
    return GroupElement(Trace._from_canonical(alphabet, reduced))


def element(alphabet: DoubledAlphabet, word) -> GroupElement:
    """Convenience constructor: free-reduce a raw word."""
    return free_reduce(alphabet, word)


def is_identity(alphabet: DoubledAlphabet, word) -> bool:
    """Word problem: does ``word`` represent 1 in the graph group?"""
    return free_reduce(alphabet, word).is_identity()


_VERIFY_MULT_LIMIT = 4000


def mult(g: GroupElement, h: GroupElement) -> Tuple[GroupElement, Trace]:
    """Irreducible normal form of gh plus the cancelled middle p.

    There are unique factorizations g = u p and h = p^{-1} v with uv irreducible;
    returns (uv, p).  Every cancellation pairs a letter of g with a letter of
    h (both operands are irreducible), which is asserted.
    """
    if g.alphabet != h.alphabet:
        raise AlphabetMismatchError("mult over mixed alphabets")
    alphabet = g.alphabet
    gw, hw = g.word, h.word
    cut = len(gw)
    reduced, pairs, _ = _reduce_tagged(alphabet, gw + hw)
    cancelled_in_g = []
    for i, j in pairs:
        if not (i < cut <= j):
            raise AssertionError(
                "internal cancellation between irreducible operands"
            )  # pragma: no cover
        cancelled_in_g.append(i)
    cancelled_in_g.sort()
    p = Trace(alphabet, [gw[i] for i in cancelled_in_g])
    product = GroupElement(Trace._from_canonical(alphabet, reduced))
    if len(gw) + len(hw) <= _VERIFY_MULT_LIMIT:
        u = right_quotient(g.trace, p)
        assert u is not None, "cancelled part is not a suffix of g"
        v = left_quotient(h.trace, Trace(alphabet, invert_word(p.word)))
        assert v is not None, "inverse of cancelled part is not a prefix of h"
        assert (u * v) == product.trace, "u*v differs from the reduced product"
    return product, p


def mult_all(alphabet: DoubledAlphabet, elements: Sequence[GroupElement]) -> GroupElement:
    acc = identity(alphabet)
    for e in elements:
        acc, _ = mult(acc, e)
    return acc


def cyclic_reduce(g: GroupElement) -> Tuple[GroupElement, GroupElement]:
    """Unique (p, w) with g = p w p^{-1} and w cyclically reduced; |g| = |w| + 2|p|."""
    alphabet = g.alphabet
    w = g.trace
    peeled = []
    changed = True
    while changed and len(w) >= 2:
        changed = False
        for letter in sorted(w.alph(), key=alphabet.rank):
            single = Trace._from_canonical(alphabet, (letter,))
            rest = left_quotient(w, single)
            if rest is None:
                continue
            inv = Trace._from_canonical(alphabet, (inverse_letter(letter),))
            core = right_quotient(rest, inv)
            if core is None:
                continue
            peeled.append(letter)
            w = core
            changed = True
            break
    p = GroupElement(Trace(alphabet, peeled))
    return p, GroupElement(w)


def is_cyclically_reduced(g: GroupElement) -> bool:
    p, _ = cyclic_reduce(g)
    return p.is_identity()


def power_nf(g: GroupElement, k: int, cap: int) -> GroupElement:
    """Normal form of g^k via the conjugate-power representation p w^k p^{-1}.

    Since w^k is irreducible for cyclically reduced w, the result length is
    exactly 2|p| + k|w| for k >= 1; raises ResourceExceeded when that exceeds
    ``cap`` (without materializing anything).
    """
    if k < 0:
        raise ValueError("power_nf takes natural exponents")
    alphabet = g.alphabet
    if k == 0:
        return identity(alphabet)
    p, w = cyclic_reduce(g)
    required = 2 * len(p) + k * len(w)
    if required > cap:
        raise ResourceExceeded(required, cap)
    word = p.word + w.word * k + invert_word(p.word)
    reduced, pairs, _ = _reduce_tagged(alphabet, word)
    assert not pairs, "p w^k p^-1 unexpectedly reducible"
    return GroupElement(Trace._from_canonical(alphabet, reduced))


def conjugate_power_word(g: GroupElement, k: int) -> tuple:
    """Raw word p w^k p^{-1} (unreduced spelling of g^k); cheap for symbolic use."""
    if k < 0:
        raise ValueError("natural exponents only")
    if k == 0:
        return ()
    p, w = cyclic_reduce(g)
    return p.word + w.word * k + invert_word(p.word)
