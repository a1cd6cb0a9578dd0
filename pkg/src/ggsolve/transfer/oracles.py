"""Base-group oracles: the pluggable contract behind the transfer algorithms.

An oracle answers the word problem and knapsack-automaton membership for its
group.  Implementations: finite groups via multiplication tables, the
integers, free groups via Benois saturation, graph groups via the solver, and
free products (which close the loop with the saturation algorithms).
"""

from __future__ import annotations

from collections import deque
from typing import Dict, List, Sequence, Tuple

from ..automata import EPS, Nfa, benois_member
from ..errors import LimitsExceeded, StructureError
from ..groups import DoubledAlphabet, free_reduce, inverse_letter
from ..semilinear import DiophantineSystem, diophantine_solve
from ..traces import IndependenceAlphabet
from .kauto import KnapsackAutomaton, plain_alphabet, skeletons


class GroupOracle:
    """Contract: a named generator alphabet plus two decision procedures.

    ``ka_membership`` trims the automaton to its useful part and memoizes;
    implementations override ``_member_impl``.
    """

    letters: Tuple[str, ...]

    def is_identity(self, word: Sequence[str]) -> bool:
        raise NotImplementedError

    def _member_impl(self, nfa: Nfa, target_word: tuple) -> bool:
        raise NotImplementedError

    def ka_membership(self, nfa: Nfa, target_word: Sequence[str]) -> bool:
        """Does the automaton accept some word equal to ``target_word`` in the group?"""
        from ..automata import trim

        cache = getattr(self, "_member_cache", None)
        if cache is None:
            cache = {}
            self._member_cache = cache
        trimmed = trim(self._rehome(nfa))
        key = (
            trimmed.transitions,
            trimmed.initial,
            trimmed.finals,
            tuple(target_word),
        )
        hit = cache.get(key)
        if hit is None:
            hit = self._member_impl(trimmed, tuple(target_word))
            cache[key] = hit
        return hit

    def _rehome(self, nfa: Nfa) -> Nfa:
        """Rebuild the automaton over this oracle's own label alphabet."""
        alphabet = plain_alphabet(self.letters)
        return Nfa(alphabet, nfa.states, nfa.transitions, nfa.initial, nfa.finals)


class FiniteGroupOracle(GroupOracle):
    """A finite group given by its multiplication table; complete and exact."""

    def __init__(
        self,
        elements: Sequence[str],
        table: Dict[Tuple[str, str], str],
        identity_elem: str,
        gen_map: Dict[str, str],
    ):
        self.elements = tuple(elements)
        self.table = dict(table)
        self.identity_elem = identity_elem
        if identity_elem not in self.elements:
            raise StructureError("identity element missing")
        for x in self.elements:
            for y in self.elements:
                if (x, y) not in self.table or self.table[(x, y)] not in self.elements:
                    raise StructureError(f"multiplication table incomplete at ({x},{y})")
        inverse: Dict[str, str] = {}
        for x in self.elements:
            for y in self.elements:
                if self.table[(x, y)] == identity_elem and self.table[(y, x)] == identity_elem:
                    inverse[x] = y
        if set(inverse) != set(self.elements):
            raise StructureError("not every element has an inverse")
        self.inverse = inverse
        self.gen_map = dict(gen_map)
        for letter, elem in list(gen_map.items()):
            self.gen_map[inverse_letter(letter)] = self.inverse[elem]
        self.letters = tuple(self.gen_map)

    @classmethod
    def cyclic(cls, n: int, letter: str = "g") -> "FiniteGroupOracle":
        elements = [f"e{i}" for i in range(n)]
        table = {
            (f"e{i}", f"e{j}"): f"e{(i + j) % n}" for i in range(n) for j in range(n)
        }
        return cls(elements, table, "e0", {letter: "e1"})

    def mult_elems(self, x: str, y: str) -> str:
        return self.table[(x, y)]

    def eval_word(self, word: Sequence[str]) -> str:
        acc = self.identity_elem
        for a in word:
            acc = self.table[(acc, self.gen_map[a])]
        return acc

    def is_identity(self, word) -> bool:
        return self.eval_word(word) == self.identity_elem

    def _member_impl(self, nfa: Nfa, target_word) -> bool:
        target = self.eval_word(target_word)
        start = (nfa.initial, self.identity_elem)
        seen = {start}
        queue = deque([start])
        while queue:
            state, elem = queue.popleft()
            if state in nfa.finals and elem == target:
                return True
            for a, dests in nfa.out(state).items():
                nxt_elem = elem if a is EPS else self.table[(elem, self.gen_map[a])]
                for d in dests:
                    node = (d, nxt_elem)
                    if node not in seen:
                        seen.add(node)
                        queue.append(node)
        return False


class ZOracle(GroupOracle):
    """The integers; knapsack-automaton membership via skeletons + Diophantine."""

    def __init__(self, letter: str = "a"):
        self.letter = letter
        self.letters = (letter, inverse_letter(letter))

    def _weight(self, a: str) -> int:
        if a == self.letter:
            return 1
        if a == inverse_letter(self.letter):
            return -1
        raise StructureError(f"letter {a!r} outside the Z alphabet")

    def value(self, word) -> int:
        return sum(self._weight(a) for a in word)

    def is_identity(self, word) -> bool:
        return self.value(word) == 0

    def _member_impl(self, nfa: Nfa, target_word) -> bool:
        target = self.value(target_word)
        ka = KnapsackAutomaton(nfa)
        for vs, us in skeletons(ka):
            const = sum(self.value(v) for v in vs)
            weights = [self.value(u) for u in us]
            d = DiophantineSystem([weights], [target - const])
            if diophantine_solve(d) is not None:
                return True
        return False


class FreeGroupOracle(GroupOracle):
    """A finitely generated free group; membership by Benois saturation."""

    def __init__(self, base_letters: Sequence[str]):
        self.alphabet = DoubledAlphabet(IndependenceAlphabet(tuple(base_letters)))
        self.letters = self.alphabet.letters

    def is_identity(self, word) -> bool:
        return free_reduce(self.alphabet, word).is_identity()

    def _member_impl(self, nfa: Nfa, target_word) -> bool:
        homed = Nfa(self.alphabet, nfa.states, nfa.transitions, nfa.initial, nfa.finals)
        return benois_member(homed, tuple(target_word))


class GraphGroupOracle(GroupOracle):
    """A graph group; skeleton equations are delegated to the exponent solver."""

    def __init__(self, alphabet: DoubledAlphabet, search_cap: int = 12):
        self.alphabet = alphabet
        self.letters = alphabet.letters
        self.search_cap = search_cap

    def is_identity(self, word) -> bool:
        return free_reduce(self.alphabet, word).is_identity()

    def _member_impl(self, nfa: Nfa, target_word) -> bool:
        from ..groups import invert_word
        from ..solver import solve_exact, solve_search
        from .kauto import skeleton_equations

        homed = Nfa(self.alphabet, nfa.states, nfa.transitions, nfa.initial, nfa.finals)
        ka = KnapsackAutomaton(homed)
        prepend = invert_word(tuple(target_word))
        unknown = False
        for eq in skeleton_equations(ka, prepend, self.alphabet):
            rep = solve_exact(eq)
            if rep.status == "unknown":
                rep = solve_search(eq, cap=self.search_cap)
            if rep.status == "solvable":
                return True
            if rep.status == "unknown":
                unknown = True
        if unknown:
            raise LimitsExceeded("skeleton equation beyond solver limits")
        return False


class FreeProductOracle(GroupOracle):
    """Free product of two oracle groups over disjoint generator alphabets."""

    def __init__(self, left: GroupOracle, right: GroupOracle):
        if set(left.letters) & set(right.letters):
            raise StructureError("free-product factors must use disjoint letters")
        self.left = left
        self.right = right
        self.letters = tuple(left.letters) + tuple(right.letters)
        self._left_set = set(left.letters)
        self._right_set = set(right.letters)

    def factor_of(self, letter: str) -> int:
        if letter in self._left_set:
            return 0
        if letter in self._right_set:
            return 1
        raise StructureError(f"letter {letter!r} outside both factors")

    def factor(self, i: int) -> GroupOracle:
        return self.left if i == 0 else self.right

    def is_identity(self, word) -> bool:
        """Syllable folding: drop trivial syllables, merge neighbors, repeat."""
        blocks: List[Tuple[int, List[str]]] = []
        for a in word:
            f = self.factor_of(a)
            if blocks and blocks[-1][0] == f:
                blocks[-1][1].append(a)
            else:
                blocks.append((f, [a]))
        changed = True
        while changed:
            changed = False
            for i, (f, letters) in enumerate(blocks):
                if self.factor(f).is_identity(letters):
                    del blocks[i]
                    if 0 < i <= len(blocks) - 1 and blocks[i - 1][0] == blocks[i][0]:
                        blocks[i - 1][1].extend(blocks[i][1])
                        del blocks[i]
                    changed = True
                    break
        return not blocks

    def _member_impl(self, nfa: Nfa, target_word) -> bool:
        from ..groups import invert_word
        from .freeprod import free_product_saturate
        from .kauto import prepend_word

        ka = KnapsackAutomaton(nfa)
        ka = prepend_word(ka, invert_word(tuple(target_word)))
        return free_product_saturate(self.left, self.right, ka)
