"""Finite-extension reduction on the infinite dihedral group vs direct arithmetic."""

import itertools
import random

import pytest

from ggsolve.errors import StructureError
from ggsolve.transfer import FiniteExtension, ZOracle, finite_ext_reduce

from transfer_oracles import dinf_brute_solvable, dinf_is_identity


def dinf_extension():
    """D-inf = <a, t | t^2 = 1, t a t = a^-1> over G = <a> = Z, C = {1, t}."""
    z = ZOracle("a")
    table = {
        ("1", "a"): (("a",), "1"),
        ("1", "a'"): (("a'",), "1"),
        ("1", "t"): ((), "t"),
        ("1", "t'"): ((), "t"),
        ("t", "a"): (("a'",), "t"),
        ("t", "a'"): (("a",), "t"),
        ("t", "t"): ((), "1"),
        ("t", "t'"): ((), "1"),
    }
    return FiniteExtension(z, ("a", "t"), ("1", "t"), "1", table), z


class TestTable:
    def test_validates(self):
        dinf_extension()

    def test_inconsistent_rejected(self):
        z = ZOracle("a")
        table = {
            ("1", "a"): (("a",), "1"),
            ("1", "a'"): (("a", "a"), "1"),  # wrong inverse rewrite
            ("1", "t"): ((), "t"),
            ("1", "t'"): ((), "t"),
            ("t", "a"): (("a'",), "t"),
            ("t", "a'"): (("a",), "t"),
            ("t", "t"): ((), "1"),
            ("t", "t'"): ((), "1"),
        }
        with pytest.raises(StructureError):
            FiniteExtension(z, ("a", "t"), ("1", "t"), "1", table)

    def test_coset_tracking(self):
        fe, _ = dinf_extension()
        assert fe.coset_of(("t", "a", "t")) == "1"
        assert fe.coset_of(("t", "a")) == "t"
        assert fe.is_identity_in_h(("t", "a", "t", "a"))
        assert not fe.is_identity_in_h(("t", "a", "t", "a'"))


class TestDinfInstances:
    def test_ta_power_even(self):
        fe, z = dinf_extension()
        # (ta)^x = 1: solvable with x even (x = 0 included)
        assert finite_ext_reduce(fe, [(), ()], [("t", "a")], z)
        # (ta)^x = ta: solvable with x = 1 (small-exponent branch)
        assert finite_ext_reduce(fe, [(), ("a'", "t'")], [("t", "a")], z)

    def test_a_power_vs_t(self):
        fe, z = dinf_extension()
        # a^x = t: never (wrong coset)
        assert not finite_ext_reduce(fe, [(), ("t'",)], [("a",)], z)

    def test_repeated_variables_rejected(self):
        fe, z = dinf_extension()
        with pytest.raises(StructureError):
            finite_ext_reduce(
                fe, [(), (), ()], [("a",), ("a",)], z, variables=("x", "x")
            )

    def test_against_brute_force_random(self):
        """Agreement with table-driven brute force on random D-inf instances."""
        rng = random.Random(99)
        fe, z = dinf_extension()
        letters = ("a", "a'", "t", "t'")
        agreements = 0
        for _ in range(50):
            n = rng.randint(1, 2)
            u_words = [
                tuple(rng.choice(letters) for _ in range(rng.randint(1, 3)))
                for _ in range(n)
            ]
            v_words = [
                tuple(rng.choice(letters) for _ in range(rng.randint(0, 2)))
                for _ in range(n + 1)
            ]
            got = finite_ext_reduce(fe, v_words, u_words, z)
            brute = dinf_brute_solvable(v_words, u_words, cap=8)
            if brute:
                assert got, (v_words, u_words)
            else:
                # brute force is exponent-capped; a positive answer beyond the
                # cap is possible but must then verify at some larger exponent
                if got:
                    assert dinf_brute_solvable(v_words, u_words, cap=40), (
                        v_words,
                        u_words,
                    )
            agreements += 1
        assert agreements == 50
