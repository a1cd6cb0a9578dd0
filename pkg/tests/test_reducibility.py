"""I-free reducibility, the constructive refinement, power-split decompositions."""

import itertools
import random

import pytest

from ggsolve.groups import doubled, free_reduce, identity, mult
from ggsolve.solver.reducibility import (
    is_i_freely_reducible,
    power_two_factorizations,
    refine_to_reducible,
    validate_reduction,
)
from ggsolve.traces import IndependenceAlphabet, is_connected, left_quotient, normal_form, power

from helpers import all_alphabets, canonical_traces_up_to, random_element

AC = doubled(IndependenceAlphabet("abc", [("a", "c")]))
FREE2 = doubled(IndependenceAlphabet("ab"))


def els(alphabet, *words):
    return [free_reduce(alphabet, w) for w in words]


class TestReducible:
    def test_inverse_pair(self):
        steps = is_i_freely_reducible(els(FREE2, "a", ("a'",)))
        assert steps is not None
        validate_reduction(els(FREE2, "a", ("a'",)), steps)

    def test_fixed_counterexample(self):
        # a^{-1}, ab, b^{-1} has no reduction
        seq = els(FREE2, ("a'",), ("a", "b"), ("b'",))
        assert is_i_freely_reducible(seq) is None

    def test_swap_then_cancel(self):
        seq = els(AC, "a", "c", ("a'",), ("c'",))
        steps = is_i_freely_reducible(seq)
        assert steps is not None
        validate_reduction(seq, steps)

    def test_drops(self):
        seq = els(AC, "", "a", "", ("a'",))
        steps = is_i_freely_reducible(seq)
        assert steps is not None
        validate_reduction(seq, steps)


class TestRefine:
    def test_pair(self):
        seq = els(FREE2, "a", ("a'",))
        parts, steps = refine_to_reducible(seq)
        assert sum(len(p) for p in parts) == 2 <= 2**2 - 2
        validate_reduction([g for ps in parts for g in ps], steps)

    def test_counterexample_refines(self):
        seq = els(FREE2, ("a'",), ("a", "b"), ("b'",))
        parts, steps = refine_to_reducible(seq)
        total = sum(len(p) for p in parts)
        assert total <= 2**3 - 2
        flat = [g for ps in parts for g in ps]
        validate_reduction(flat, steps)
        # factorizations recompose the entries
        for entry, ps in zip(seq, parts):
            acc = identity(FREE2)
            for g in ps:
                acc, _ = mult(acc, g)
            assert acc == entry

    def test_independent_pair_unrefined(self):
        seq = els(AC, ("a", "c"), ("c'", "a'"))
        parts, steps = refine_to_reducible(seq)
        assert sum(len(p) for p in parts) == 2

    def test_not_product_one(self):
        assert refine_to_reducible(els(FREE2, "a", "b")) is None

    def test_random_product_one_sequences(self):
        """Generated product-1 sequences refine within the 2^n - 2 bound."""
        rng = random.Random(101)
        for trial in range(120):
            alphabet = rng.choice([AC, FREE2])
            n = rng.randint(2, 4)
            pieces = [random_element(rng, alphabet, 3) for _ in range(n - 1)]
            total = identity(alphabet)
            for g in pieces:
                total, _ = mult(total, g)
            seq = pieces + [total.inverse()]
            # shuffle which position holds the balancing entry
            k = rng.randrange(n)
            seq = seq[k:] + seq[:k]
            # rotation preserves product-1 only for conjugation-free cases; rebuild honestly
            seq = pieces + [total.inverse()]
            parts, steps = refine_to_reducible(seq)
            total_parts = sum(len(p) for p in parts)
            assert total_parts <= 2**n - 2 or all(
                g.is_identity() for g in seq
            ), (seq, total_parts)
            flat = [g for ps in parts for g in ps]
            validate_reduction(flat, steps)
            for entry, ps in zip(seq, parts):
                acc = identity(alphabet)
                for g in ps:
                    acc, _ = mult(acc, g)
                assert acc == entry

    def test_with_identity_entries(self):
        seq = els(AC, "", "a", ("a'",), "")
        parts, steps = refine_to_reducible(seq)
        flat = [g for ps in parts for g in ps]
        validate_reduction(flat, steps)


class TestPowerSplits:
    def test_z_like(self):
        a1 = IndependenceAlphabet("a")
        u = normal_form(a1, "a")
        got = power_two_factorizations(u, 3, normal_form(a1, "a"), normal_form(a1, "aa"))
        assert got is not None
        l, k, c, s, p = got
        assert l + k + c == 3 and c <= 1

    def test_spec_example(self):
        ab = IndependenceAlphabet("ab")
        u = normal_form(ab, "ab")
        got = power_two_factorizations(
            u, 2, normal_form(ab, "aba"), normal_form(ab, "b")
        )
        assert got is not None
        l, k, c, s, p = got
        assert s * p == power(u, c)
        assert l == 1 and k == 0 and c == 1
        assert s.word == ("a",) and p.word == ("b",)

    def test_trivial_split(self):
        ab = IndependenceAlphabet("ab")
        u = normal_form(ab, "ab")
        got = power_two_factorizations(
            u, 2, normal_form(ab, ""), normal_form(ab, "abab")
        )
        assert got == (0, 2, 0, normal_form(ab, ""), normal_form(ab, ""))

    def test_exhaustive_small(self):
        """Every two-factor split of u^x admits the (l,k,c,s,p) decomposition."""
        from ggsolve.traces import iter_prefixes

        checked = 0
        for alphabet in all_alphabets(2):
            for u in canonical_traces_up_to(alphabet, 2):
                if u.is_empty() or not is_connected(u):
                    continue
                for x in range(4):
                    ux = power(u, x)
                    for y1 in iter_prefixes(ux):
                        y2 = left_quotient(ux, y1)
                        got = power_two_factorizations(u, x, y1, y2)
                        assert got is not None, (alphabet, u, x, y1)
                        l, k, c, s, p = got
                        assert l + k + c == x
                        assert c <= len(alphabet.letters)
                        assert power(u, l) * s == y1
                        assert p * power(u, k) == y2
                        assert s * p == power(u, c)
                        checked += 1
        assert checked > 100
