"""Automata: closure constructions, certificates, unary decomposition, Benois."""

import itertools
import random

import pytest

from ggsolve.automata import (
    EPS,
    Nfa,
    Progression,
    benois_member,
    benois_saturate,
    concat_closure,
    enumerate_accepted,
    intersect,
    length_automaton,
    power_closure_nfa,
    prefix_nfa,
    star_nfa,
    trim,
    unary_progressions,
)
from ggsolve.errors import CertificateError, StructureError, TraceError
from ggsolve.groups import doubled
from ggsolve.traces import IndependenceAlphabet, Trace, is_connected, normal_form, power, prefix_count

from helpers import (
    all_alphabets,
    canonical_traces_up_to,
    equivalence_class,
    random_alphabet,
    random_word,
    words_up_to,
)

AC = IndependenceAlphabet("abc", [("a", "c")])
AB_DEP = IndependenceAlphabet("ab")
AB_IND = IndependenceAlphabet("ab", [("a", "b")])


def language(nfa, max_len):
    return enumerate_accepted(nfa, max_len)


class TestPrefixNfa:
    def test_dependent_pair(self):
        t = normal_form(AB_DEP, "ab")
        nfa = prefix_nfa(t)
        assert nfa.num_states() == 3
        assert language(nfa, 4) == {("a", "b")}

    def test_independent_pair(self):
        t = normal_form(AC, "ac")
        nfa = prefix_nfa(t)
        assert nfa.num_states() == 4
        assert language(nfa, 4) == {("a", "c"), ("c", "a")}

    def test_empty(self):
        t = normal_form(AC, "")
        nfa = prefix_nfa(t)
        assert nfa.num_states() == 1
        assert language(nfa, 2) == {()}

    def test_accepts_exactly_linearizations(self):
        rng = random.Random(5)
        for _ in range(40):
            alphabet = random_alphabet(rng, 3)
            t = normal_form(alphabet, random_word(rng, alphabet, 5))
            nfa = prefix_nfa(t)
            assert nfa.num_states() == prefix_count(t)
            assert language(nfa, len(t)) == equivalence_class(alphabet, t.word)
            nfa.validate_i_diamond()
            nfa.validate_memorizing()


def star_language_oracle(u, max_len):
    """[u*]_I up to max_len, independently of the automaton construction."""
    out = set()
    k = 0
    while k * len(u) <= max_len or (len(u) == 0 and k == 0):
        out.update(equivalence_class(u.alphabet, power(u, k).word))
        k += 1
        if len(u) == 0:
            break
    return {w for w in out if len(w) <= max_len}


class TestStarNfa:
    def test_single_letter(self):
        u = normal_form(AC, "a")
        nfa = star_nfa(u)
        assert nfa.num_states() == 1  # the empty tuple is the only state
        assert language(nfa, 3) == {(), ("a",), ("a", "a"), ("a", "a", "a")}

    def test_dependent_word(self):
        u = normal_form(AB_DEP, "ab")
        nfa = star_nfa(u)
        assert {len(s) for s in [nfa.states]}  # smoke
        lang = language(nfa, 4)
        assert lang == {(), ("a", "b"), ("a", "b", "a", "b")}
        assert ("a",) not in lang and ("b", "a") not in lang

    def test_disconnected_rejected(self):
        with pytest.raises(TraceError):
            star_nfa(normal_form(AB_IND, "ab"))

    def test_empty_rejected(self):
        with pytest.raises(TraceError):
            star_nfa(normal_form(AC, ""))

    def test_memorizing_certificate(self):
        u = normal_form(AC, "ab")
        nfa = star_nfa(u, memorize=True)
        nfa.validate_i_diamond()
        nfa.validate_memorizing()

    def test_language_exact_small(self):
        rng = random.Random(9)
        count = 0
        for alphabet in all_alphabets(3):
            for t in canonical_traces_up_to(alphabet, 3):
                if t.is_empty() or not is_connected(t):
                    continue
                count += 1
                nfa = star_nfa(t)
                max_len = min(3 * len(t), 7)
                assert language(nfa, max_len) == star_language_oracle(t, max_len), (
                    alphabet,
                    t,
                )
        assert count > 20

    def test_size_bound(self):
        for alphabet in all_alphabets(3):
            alpha_star = alphabet.max_independent_size()
            for t in canonical_traces_up_to(alphabet, 3):
                if t.is_empty() or not is_connected(t):
                    continue
                nfa = star_nfa(t, memorize=True)
                assert nfa.num_states() <= 2 * prefix_count(t) ** alpha_star


def closure_product_oracle(a1, a2, max_len):
    """[L(a1)L(a2)]_I up to max_len via the accepted languages themselves."""
    l1 = enumerate_accepted(a1, max_len)
    l2 = enumerate_accepted(a2, max_len)
    out = set()
    for w1 in l1:
        for w2 in l2:
            if len(w1) + len(w2) <= max_len:
                out.update(equivalence_class(a1.alphabet, w1 + w2))
    return out


class TestConcatClosure:
    def test_independent_singletons(self):
        a1 = prefix_nfa(normal_form(AC, "a"))
        a2 = prefix_nfa(normal_form(AC, "c"))
        closed = concat_closure(a1, a2)
        assert language(closed, 3) == {("a", "c"), ("c", "a")}

    def test_left_identity(self):
        a1 = prefix_nfa(normal_form(AC, ""))
        a2 = star_nfa(normal_form(AC, "b"), memorize=True)
        closed = concat_closure(a1, a2)
        assert language(closed, 3) == language(a2, 3)

    def test_state_count(self):
        a1 = prefix_nfa(normal_form(AB_DEP, "a"))
        a2 = prefix_nfa(normal_form(AB_DEP, "b"))
        assert a1.num_states() == 2 and a2.num_states() == 2
        assert concat_closure(a1, a2).num_states() == 4

    def test_requires_memorizing(self):
        a1 = prefix_nfa(normal_form(AC, "a"))
        a2 = star_nfa(normal_form(AC, "b"))  # not memorizing
        with pytest.raises(CertificateError):
            concat_closure(a1, a2)

    def test_closure_language_random(self):
        rng = random.Random(15)
        for _ in range(60):
            alphabet = random_alphabet(rng, 3)
            t1 = normal_form(alphabet, random_word(rng, alphabet, 3))
            t2 = normal_form(alphabet, random_word(rng, alphabet, 3))
            a1, a2 = prefix_nfa(t1), prefix_nfa(t2)
            closed = concat_closure(a1, a2)
            assert closed.num_states() == a1.num_states() * a2.num_states()
            closed.validate_i_diamond()
            assert language(closed, 6) == closure_product_oracle(a1, a2, 6)


class TestPowerClosure:
    def test_pure_star(self):
        nfa = power_closure_nfa(
            normal_form(AC, ""), normal_form(AC, "a"), normal_form(AC, "")
        )
        assert language(nfa, 3) == {(), ("a",), ("a", "a"), ("a", "a", "a")}

    def test_prefixed(self):
        nfa = power_closure_nfa(
            normal_form(AB_DEP, "b"), normal_form(AB_DEP, "a"), normal_form(AB_DEP, "")
        )
        expected = {("b",) + ("a",) * k for k in range(5)}
        assert language(nfa, 5) == expected

    def test_suffixed_word(self):
        nfa = power_closure_nfa(
            normal_form(AB_DEP, ""), normal_form(AB_DEP, "ab"), normal_form(AB_DEP, "a")
        )
        expected = {("a",), ("a", "b", "a"), ("a", "b", "a", "b", "a")}
        assert language(nfa, 5) == expected

    def test_random_against_oracle(self):
        rng = random.Random(21)
        done = 0
        while done < 25:
            alphabet = random_alphabet(rng, 3)
            u = normal_form(alphabet, random_word(rng, alphabet, 3))
            if u.is_empty() or not is_connected(u):
                continue
            p = normal_form(alphabet, random_word(rng, alphabet, 2))
            s = normal_form(alphabet, random_word(rng, alphabet, 2))
            done += 1
            nfa = power_closure_nfa(p, u, s)
            max_len = min(len(p) + len(s) + 2 * len(u), 7)
            oracle = set()
            k = 0
            while len(p) + len(s) + k * len(u) <= max_len:
                oracle.update(
                    equivalence_class(alphabet, (p * power(u, k) * s).word)
                )
                k += 1
            oracle = {w for w in oracle if len(w) <= max_len}
            assert language(nfa, max_len) == oracle


class TestIntersect:
    def test_star_intersection(self):
        a = star_nfa(normal_form(AB_DEP, "a"))
        aa = prefix_nfa(normal_form(AB_DEP, "aa"))
        aa_star = concat_closure(
            prefix_nfa(normal_form(AB_DEP, "")), star_nfa(normal_form(AB_DEP, "aa"), True)
        )
        prod = intersect(a, aa_star)
        assert language(prod, 6) == {(), ("a",) * 2, ("a",) * 4, ("a",) * 6}

    def test_empty_intersection(self):
        a = prefix_nfa(normal_form(AB_DEP, "a"))
        b = prefix_nfa(normal_form(AB_DEP, "b"))
        assert language(intersect(a, b), 4) == set()

    def test_epsilon_membership(self):
        a = prefix_nfa(normal_form(AB_DEP, ""))
        b = star_nfa(normal_form(AB_DEP, "a"))
        assert language(intersect(a, b), 3) == {()}

    def test_state_count(self):
        a = prefix_nfa(normal_form(AB_DEP, "a"))
        b = prefix_nfa(normal_form(AB_DEP, "ab"))
        assert intersect(a, b).num_states() == a.num_states() * b.num_states()


class TestLengthAutomaton:
    def test_single_word(self):
        nfa = length_automaton(prefix_nfa(normal_form(AB_DEP, "ab")))
        assert language(nfa, 4) == {("a", "a")}

    def test_even_lengths(self):
        star = star_nfa(normal_form(AB_DEP, "ab"))
        nfa = length_automaton(star)
        assert language(nfa, 5) == {(), ("a",) * 2, ("a",) * 4}

    def test_rejects_eps(self):
        dbl = doubled(IndependenceAlphabet("a"))
        eps_nfa = Nfa(dbl, ["p", "q"], [("p", EPS, "q")], "p", ["q"])
        with pytest.raises(StructureError):
            length_automaton(eps_nfa)

    def test_empty_language(self):
        dbl = IndependenceAlphabet("ab")
        dead = Nfa(dbl, ["p", "q"], [("p", "a", "p")], "p", ["q"])
        unary = length_automaton(dead)
        assert unary_progressions(unary) == frozenset()


def lengths_of(nfa, bound):
    return {len(w) for w in enumerate_accepted(nfa, bound)}


class TestUnaryProgressions:
    def test_odd(self):
        # a (aa)*
        star = concat_closure(
            prefix_nfa(normal_form(AB_DEP, "a")), star_nfa(normal_form(AB_DEP, "aa"), True)
        )
        unary = length_automaton(star)
        assert unary_progressions(unary) == {Progression(1, 2)}

    def test_singleton_zero(self):
        unary = length_automaton(prefix_nfa(normal_form(AB_DEP, "")))
        assert unary_progressions(unary) == {Progression(0, 0)}

    def test_union_two_periods(self):
        """(aa)* union (aaa)*: verified pointwise up to 24."""
        ab = AB_DEP
        two = star_nfa(normal_form(ab, "aa"))
        three = star_nfa(normal_form(ab, "aaa"))
        # plain union automaton over the unary letter
        states = (
            ["init"]
            + [("2", s) for s in two.states]
            + [("3", s) for s in three.states]
        )
        transitions = []
        for p, x, q in two.transitions:
            transitions.append((("2", p), "a", ("2", q)))
            if p == two.initial:
                transitions.append(("init", "a", ("2", q)))
        for p, x, q in three.transitions:
            transitions.append((("3", p), "a", ("3", q)))
            if p == three.initial:
                transitions.append(("init", "a", ("3", q)))
        finals = (
            ["init"]
            + [("2", f) for f in two.finals]
            + [("3", f) for f in three.finals]
        )
        from ggsolve.automata import UNARY_ALPHABET

        union = Nfa(UNARY_ALPHABET, states, transitions, "init", finals)
        progs = unary_progressions(union)
        expected = {n for n in range(25) if n % 2 == 0 or n % 3 == 0}
        got = {n for n in range(25) if any(n in p for p in progs)}
        assert got == expected

    def test_random_unary(self):
        rng = random.Random(33)
        from ggsolve.automata import UNARY_ALPHABET

        for _ in range(80):
            n = rng.randint(1, 5)
            states = list(range(n))
            transitions = []
            for p in states:
                for q in states:
                    if rng.random() < 0.4:
                        transitions.append((p, "a", q))
            finals = [s for s in states if rng.random() < 0.4]
            nfa = Nfa(UNARY_ALPHABET, states, transitions, 0, finals)
            progs = unary_progressions(nfa)
            for length in range(20):
                assert nfa.accepts(("a",) * length) == any(length in p for p in progs)


class TestBenois:
    FREE = doubled(IndependenceAlphabet("ab"))

    def word_nfa(self, word):
        states = list(range(len(word) + 1))
        transitions = [(i, word[i], i + 1) for i in range(len(word))]
        return Nfa(self.FREE, states, transitions, 0, [len(word)])

    def test_simple_pair(self):
        nfa = self.word_nfa(("a", "a'"))
        assert benois_member(nfa, ())

    def test_two_rounds(self):
        nfa = self.word_nfa(("a", "b", "b'", "a'"))
        assert benois_member(nfa, ())

    def test_negative(self):
        nfa = self.word_nfa(("a", "b"))
        assert not benois_member(nfa, ())
        assert benois_member(nfa, ("a", "b"))

    def test_rejects_independence(self):
        dbl = doubled(IndependenceAlphabet("ab", [("a", "b")]))
        nfa = Nfa(dbl, [0], [], 0, [0])
        with pytest.raises(StructureError):
            benois_member(nfa, ())

    def test_against_brute_force(self):
        """benois_member agrees with brute-force path search (length <= 10)."""
        rng = random.Random(77)
        from ggsolve.automata import free_reduce_word

        for _ in range(40):
            n = rng.randint(1, 4)
            states = list(range(n))
            letters = self.FREE.letters
            transitions = []
            for _ in range(rng.randint(1, 6)):
                transitions.append(
                    (rng.randrange(n), rng.choice(letters), rng.randrange(n))
                )
            finals = [s for s in states if rng.random() < 0.5]
            nfa = Nfa(self.FREE, states, transitions, 0, finals)
            accepted = enumerate_accepted(nfa, 10)
            for target in [(), ("a",), ("a", "b'"), ("b", "b")]:
                red = free_reduce_word(target)
                brute = any(free_reduce_word(w) == red for w in accepted)
                got = benois_member(nfa, target)
                # brute force is depth-limited: it may miss witnesses, never invent them
                if brute:
                    assert got
                if not got:
                    assert not brute


class TestTrim:
    def test_language_preserved(self):
        rng = random.Random(99)
        for _ in range(40):
            alphabet = random_alphabet(rng, 3)
            t = normal_form(alphabet, random_word(rng, alphabet, 4))
            nfa = power_closure_nfa(
                normal_form(alphabet, ""),
                (
                    t
                    if not t.is_empty() and is_connected(t)
                    else normal_form(alphabet, alphabet.letters[0])
                ),
                normal_form(alphabet, ""),
            )
            trimmed = trim(nfa)
            assert trimmed.num_states() <= nfa.num_states()
            assert language(trimmed, 5) == language(nfa, 5)
