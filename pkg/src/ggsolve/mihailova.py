"""Mihailova-style hardness instance generation.

Given a finite presentation <Sigma | R> and a word w, the subgroup of
F(Sigma) x F(Sigma) generated by D = {(r^e, 1)} u {(a, a)} detects w = 1:
(w,1) lies in the subgroup iff w = 1 in the presented group.  The direct
product of free groups is realized as the graph group on two internally
dependent cliques that commute with each other, and the bounded-product
question "(w,1) in D^n for some n <= cap" becomes an exponent equation.
Only the direction "solvable implies w = 1" is unconditional; the cap for
the converse depends on the presentation's Dehn function and is supplied by
the caller.
"""

from __future__ import annotations

from typing import List, Sequence

from .groups import inverse_letter, invert_word


def _left(letter: str) -> str:
    base = letter[:-1] if letter.endswith("'") else letter
    inv = "'" if letter.endswith("'") else ""
    return base + "L" + inv


def _right(letter: str) -> str:
    base = letter[:-1] if letter.endswith("'") else letter
    inv = "'" if letter.endswith("'") else ""
    return base + "R" + inv


def mihailova_generators(sigma: Sequence[str], relators: Sequence[Sequence[str]]):
    """The generating set D as words over the two-clique graph group."""
    d_words: List[tuple] = []
    for r in relators:
        left_word = tuple(_left(a) for a in r)
        d_words.append(left_word)
        d_words.append(invert_word(left_word))
    for a in sigma:
        for letter in (a, inverse_letter(a)):
            d_words.append((_left(letter), _right(letter)))
    return d_words


def gen_mihailova(
    sigma: Sequence[str],
    relators: Sequence[Sequence[str]],
    word: Sequence[str],
    exponent_cap: int,
) -> str:
    """Instance text asking whether (w, 1) is a product of <= cap rounds over D."""
    sigma = tuple(sigma)
    lines: List[str] = [
        "# Mihailova bounded-submonoid instance",
        "# solvable => w = 1 in the presented group (the converse needs a",
        "# sufficiently large round cap, tied to the presentation's Dehn function)",
        "gens " + " ".join([a + "L" for a in sigma] + [a + "R" for a in sigma]),
    ]
    for a in sigma:
        for b in sigma:
            lines.append(f"indep {a}L {b}R")
    d_words = mihailova_generators(sigma, relators)
    lines.append("eq")
    for i in range(1, exponent_cap + 1):
        for j, d in enumerate(d_words):
            lines.append(f"pow {' '.join(d)} x_{i}_{j}")
    target = tuple(_left(a) for a in word)
    inv = invert_word(target)
    lines.append("const " + (" ".join(inv) if inv else "_"))
    return "\n".join(lines) + "\n"
