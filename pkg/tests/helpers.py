"""Slow independent oracles and generators shared by the test modules."""

from __future__ import annotations

import itertools
import random
from collections import deque

from ggsolve.traces import IndependenceAlphabet, Trace
from ggsolve.groups import (
    DoubledAlphabet,
    GroupElement,
    base_letter,
    free_reduce,
    inverse_letter,
)


def equivalence_class(alphabet: IndependenceAlphabet, word) -> set:
    """All words equivalent to ``word`` (closure under adjacent independent swaps)."""
    start = tuple(word)
    seen = {start}
    queue = deque([start])
    while queue:
        w = queue.popleft()
        for i in range(len(w) - 1):
            if alphabet.independent(w[i], w[i + 1]):
                nxt = w[:i] + (w[i + 1], w[i]) + w[i + 2 :]
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
    return seen


def slow_normal_form(alphabet: IndependenceAlphabet, word) -> tuple:
    """Lex-least member of the equivalence class, by exhaustive enumeration."""
    rank = {a: i for i, a in enumerate(alphabet.letters)}
    return min(equivalence_class(alphabet, word), key=lambda w: [rank[a] for a in w])


def slow_free_reduce(alphabet: DoubledAlphabet, word, rng: random.Random) -> tuple:
    """Cancel factors [a a'] in random rule order until irreducible."""
    w = list(word)
    while True:
        candidates = []
        for i in range(len(w)):
            for j in range(i + 1, len(w)):
                if w[j] != inverse_letter(w[i]):
                    continue
                if all(alphabet.independent(w[k], w[i]) for k in range(i + 1, j)):
                    candidates.append((i, j))
        if not candidates:
            return tuple(w)
        i, j = rng.choice(candidates)
        del w[j]
        del w[i]


def all_alphabets(max_letters: int, letters="abcd"):
    """Every independence alphabet with up to ``max_letters`` letters."""
    for n in range(1, max_letters + 1):
        names = tuple(letters[:n])
        pairs = list(itertools.combinations(names, 2))
        for bits in range(2 ** len(pairs)):
            indep = [pairs[i] for i in range(len(pairs)) if bits >> i & 1]
            yield IndependenceAlphabet(names, indep)


def random_alphabet(rng: random.Random, max_letters: int = 3, letters="abc"):
    n = rng.randint(1, max_letters)
    names = tuple(letters[:n])
    pairs = [p for p in itertools.combinations(names, 2) if rng.random() < 0.5]
    return IndependenceAlphabet(names, pairs)


def random_word(rng: random.Random, alphabet: IndependenceAlphabet, max_len: int):
    return tuple(rng.choice(alphabet.letters) for _ in range(rng.randint(0, max_len)))


def random_group_word(rng: random.Random, dbl: DoubledAlphabet, max_len: int):
    return tuple(rng.choice(dbl.letters) for _ in range(rng.randint(0, max_len)))


def random_element(rng: random.Random, dbl: DoubledAlphabet, max_len: int) -> GroupElement:
    return free_reduce(dbl, random_group_word(rng, dbl, max_len))


def words_up_to(alphabet: IndependenceAlphabet, max_len: int):
    for n in range(max_len + 1):
        yield from itertools.product(alphabet.letters, repeat=n)


def canonical_traces_up_to(alphabet: IndependenceAlphabet, max_len: int):
    """Each trace of length <= max_len exactly once."""
    seen = set()
    for word in words_up_to(alphabet, max_len):
        t = Trace(alphabet, word)
        if t.word not in seen:
            seen.add(t.word)
            yield t
