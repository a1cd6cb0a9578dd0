"""HNN-extensions over finite associated subgroups: saturation of knapsack automata.

The presentation adjoins a stable letter t with t^{-1} a t = phi(a) for an
isomorphism phi between two finite subgroups of the base group.  Membership
of the identity in a knapsack automaton's language is decided by two-phase
saturation: reduction paths (spelling t^{-alpha} w t^{alpha} with h(w) in the
associated subgroup) on cycles are surgically replaced by shortcut edges with
bypass paths; reduction paths across components get shortcut edges directly.
After saturation, all stable-letter edges are removed and the base oracle
decides membership of 1.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Sequence, Set, Tuple

from ..automata import EPS, Nfa
from ..errors import StructureError
from ..groups import inverse_letter, invert_word
from .kauto import KnapsackAutomaton, ShapeInfo, _Builder, hnn_normalize, plain_alphabet
from .oracles import GroupOracle


class HnnPresentation:
    """Base oracle, finite associated subgroups A(+1), A(-1) (as representative
    words) with multiplication indices, the isomorphism phi, and the stable letter."""

    def __init__(
        self,
        base: GroupOracle,
        assoc_pos: Sequence[Sequence[str]],
        assoc_neg: Sequence[Sequence[str]],
        phi_pairs: Sequence[Tuple[Sequence[str], Sequence[str]]],
        stable: str = "t",
    ):
        self.base = base
        if stable in base.letters or inverse_letter(stable) in base.letters:
            raise StructureError("stable letter collides with base generators")
        self.stable = stable
        self.assoc = {
            1: [tuple(w) for w in assoc_pos],
            -1: [tuple(w) for w in assoc_neg],
        }
        self.letters = tuple(base.letters) + (stable, inverse_letter(stable))
        self._validate_subgroups()
        self.phi: Dict[int, int] = {}
        for wp, wn in phi_pairs:
            i = self.element_index(1, tuple(wp))
            j = self.element_index(-1, tuple(wn))
            if i is None or j is None:
                raise StructureError("phi pair outside the associated subgroups")
            if i in self.phi:
                raise StructureError("phi defined twice on an element")
            self.phi[i] = j
        if set(self.phi) != set(range(len(self.assoc[1]))) or set(
            self.phi.values()
        ) != set(range(len(self.assoc[-1]))):
            raise StructureError("phi is not a bijection between the subgroups")
        self._validate_phi()

    # -- subgroup structure -------------------------------------------------

    def element_index(self, alpha: int, word: Sequence[str]) -> Optional[int]:
        """Index of the subgroup element equal to ``word``, or None."""
        for i, rep in enumerate(self.assoc[alpha]):
            if self.base.is_identity(tuple(word) + invert_word(rep)):
                return i
        return None

    def _mult_index(self, alpha: int, i: int, j: int) -> Optional[int]:
        return self.element_index(alpha, self.assoc[alpha][i] + self.assoc[alpha][j])

    def _validate_subgroups(self) -> None:
        for alpha in (1, -1):
            reps = self.assoc[alpha]
            if not reps:
                raise StructureError("associated subgroups must contain 1")
            # distinct elements, closed under product and inverse, contain 1
            for i, r in enumerate(reps):
                for j in range(i + 1, len(reps)):
                    if self.base.is_identity(r + invert_word(reps[j])):
                        raise StructureError("duplicate subgroup element")
            if self.element_index(alpha, ()) is None:
                raise StructureError("associated subgroup misses the identity")
            for i in range(len(reps)):
                if self.element_index(alpha, invert_word(reps[i])) is None:
                    raise StructureError("subgroup not closed under inverse")
                for j in range(len(reps)):
                    if self._mult_index(alpha, i, j) is None:
                        raise StructureError("subgroup not closed under product")

    def _validate_phi(self) -> None:
        n = len(self.assoc[1])
        for i in range(n):
            for j in range(n):
                k = self._mult_index(1, i, j)
                img = self.element_index(
                    -1, self.assoc[-1][self.phi[i]] + self.assoc[-1][self.phi[j]]
                )
                if img != self.phi[k]:
                    raise StructureError("phi does not respect the multiplication tables")

    def phi_image(self, alpha: int, index: int) -> tuple:
        """Representative word of phi^alpha applied to element ``index`` of A(alpha)."""
        if alpha == 1:
            return self.assoc[-1][self.phi[index]]
        inv = {v: k for k, v in self.phi.items()}
        return self.assoc[1][inv[index]]


def _cycle_t_letters(shape: ShapeInfo, stable: str) -> int:
    tset = {stable, inverse_letter(stable)}
    total = 0
    for cid, comp in enumerate(shape.components):
        if not shape.is_cycle[cid]:
            continue
        for s in comp:
            a, _ = shape.cycle_next[s]
            if a in tset:
                total += 1
    return total


def _find_cycle_reduction(h: HnnPresentation, b: _Builder, shape: ShapeInfo):
    """A reduction path along some cycle: (p, alpha, elem_index, q, edges)."""
    t, ti = h.stable, inverse_letter(h.stable)
    for cid, comp in enumerate(shape.components):
        if not shape.is_cycle[cid]:
            continue
        for p in sorted(comp, key=repr):
            a0, r = shape.cycle_next[p]
            if a0 == ti:
                alpha = 1
            elif a0 == t:
                alpha = -1
            else:
                continue
            closing = t if alpha == 1 else ti
            word: List[str] = []
            edges = [(p, a0, r)]
            cur = r
            ok = None
            for _ in range(len(comp)):
                a, nxt = shape.cycle_next[cur]
                edges.append((cur, a, nxt))
                if a == closing:
                    ok = nxt
                    break
                if a in (t, ti):
                    break
                if a is not EPS:
                    word.append(a)
                cur = nxt
            if ok is None:
                continue
            idx = h.element_index(alpha, tuple(word))
            if idx is not None:
                return p, alpha, idx, ok, edges
    return None


def _surgery(
    h: HnnPresentation, b: _Builder, p, q, edges, label_word, eps_into_cycle=False
) -> None:
    """Replace the reduction path with a shortcut; graft the three bypass families.

    Path: p = r_0 -labels[0]-> r_1 ... -labels[n-1]-> r_n = q.  The interior
    r_1..r_{n-1} is removed.  With ``eps_into_cycle`` the arriving bypasses
    end in an extra epsilon edge (free-product invariant iii).
    """
    path_states = [p] + [e[2] for e in edges]
    interior_set = set(path_states[1:-1])
    pos = {s: i for i, s in enumerate(path_states[:-1]) if i > 0}
    path_edge_set = set(edges)
    arriving = []  # (s, v, i): outside edge into interior r_i
    leaving = []  # (i, v, s): edge from interior r_i to the outside
    for (src, a, dst) in list(b.edges):
        if (src, a, dst) in path_edge_set:
            continue
        if dst in interior_set and src not in interior_set:
            arriving.append((src, a, pos[dst]))
        if src in interior_set and dst not in interior_set:
            leaving.append((pos[src], a, dst))
    n = len(edges)
    labels = [e[1] for e in edges]
    # remove path edges and the interior with every incident edge
    for e in edges:
        b.edges.discard(e)
    b.edges = {
        (src, a, dst)
        for (src, a, dst) in b.edges
        if src not in interior_set and dst not in interior_set
    }
    b.states = [s for s in b.states if s not in interior_set]
    b_word_path(b, p, label_word, q)

    def chain(start, letters, end, entry=None):
        """start -entry-> . -letters...-> end (fresh states in between)."""
        seq = ([entry] if entry is not None else []) + list(letters)
        cur = start
        for a in seq[:-1]:
            nxt = b.fresh_nonclashing("y")
            b.edge(cur, a, nxt)
            cur = nxt
        b.edge(cur, seq[-1], end)

    # arriving: s -v-> . -labels[i..n-1]-> q
    for (s, v, i) in arriving:
        if eps_into_cycle:
            chain(s, labels[i:] + [EPS], q, entry=v)
        else:
            chain(s, labels[i:], q, entry=v)
    # leaving: p -labels[0..i-1]-> . -v-> s
    for (i, v, s) in leaving:
        chain(p, labels[:i] + [v], s)
    # pairs: s -v-> . -labels[i..j-1]-> . -v'-> s'   for i < j
    for (s, v, i) in arriving:
        for (j, v2, s2) in leaving:
            if i < j:
                chain(s, labels[i:j] + [v2], s2, entry=v)


def b_word_path(b: _Builder, p, word, q):
    word = tuple(word)
    if not word:
        b.edge(p, EPS, q)
        return
    cur = p
    for a in word[:-1]:
        nxt = b.fresh_nonclashing("c")
        b.edge(cur, a, nxt)
        cur = nxt
    b.edge(cur, word[-1], q)


def hnn_saturate(h: HnnPresentation, ka: KnapsackAutomaton) -> bool:
    """Does the automaton accept a word representing 1 in the HNN-extension?"""
    t, ti = h.stable, inverse_letter(h.stable)
    ka = hnn_normalize(ka)
    b = _Builder.from_nfa(ka.nfa)
    alphabet = plain_alphabet(h.letters)

    # Phase 1: saturate the cycles
    while True:
        nfa = b.to_nfa(alphabet)
        shape = ShapeInfo(nfa)
        before = _cycle_t_letters(shape, t)
        hit = _find_cycle_reduction(h, b, shape)
        if hit is None:
            break
        p, alpha, idx, q, edges = hit
        _surgery(h, b, p, q, edges, h.phi_image(alpha, idx))
        nfa2 = b.to_nfa(alphabet)
        shape2 = ShapeInfo(nfa2)  # revalidates the knapsack certificate
        after = _cycle_t_letters(shape2, t)
        assert after < before, "phase-1 surgery must remove stable letters from cycles"

    # Phase 2: shortcut reduction paths across components
    added: Set[tuple] = set()
    while True:
        nfa = b.to_nfa(alphabet)
        shape = ShapeInfo(nfa)
        base_edges = [
            (p, a, q) for (p, a, q) in b.edges if a not in (t, ti)
        ]
        base_adj: Dict = {}
        for (p, a, q) in base_edges:
            base_adj.setdefault(p, set()).add(q)

        def base_reach(src) -> Set:
            seen = {src}
            stack = [src]
            while stack:
                s = stack.pop()
                for d in base_adj.get(s, ()):
                    if d not in seen:
                        seen.add(d)
                        stack.append(d)
            return seen

        t_in = {}  # alpha -> list of (p, p') reading t^{-alpha}
        t_out = {}  # alpha -> list of (q', q) reading t^{alpha}
        t_in[1] = [(p, q) for (p, a, q) in b.edges if a == ti]
        t_in[-1] = [(p, q) for (p, a, q) in b.edges if a == t]
        t_out[1] = [(p, q) for (p, a, q) in b.edges if a == t]
        t_out[-1] = [(p, q) for (p, a, q) in b.edges if a == ti]
        grew = False
        for alpha in (1, -1):
            for (p, p2) in t_in[alpha]:
                reach = base_reach(p2)
                for (q2, q) in t_out[alpha]:
                    if q2 not in reach:
                        continue
                    if shape.comp_of.get(p) == shape.comp_of.get(q):
                        continue
                    for idx, rep in enumerate(h.assoc[alpha]):
                        key = (p, q, alpha, idx)
                        if key in added:
                            continue
                        sub = Nfa(
                            alphabet,
                            b.states,
                            base_edges,
                            p2,
                            [q2],
                        )
                        if h.base.ka_membership(sub, rep):
                            added.add(key)
                            b_word_path(b, p, h.phi_image(alpha, idx), q)
                            grew = True
        if not grew:
            break

    # Final: drop the stable-letter edges and ask the base oracle about 1
    final_edges = [(p, a, q) for (p, a, q) in b.edges if a not in (t, ti)]
    final = Nfa(alphabet, b.states, final_edges, b.initial, b.finals)
    return h.base.ka_membership(final, ())


def hnn_knapsack(
    h: HnnPresentation, base_words: Sequence[Sequence[str]], target: Sequence[str]
) -> bool:
    """Knapsack over the HNN-extension via automaton membership of 1."""
    from .kauto import knapsack_to_ka, prepend_word

    ka, tgt = knapsack_to_ka(h.letters, base_words, target)
    ka = prepend_word(ka, invert_word(tuple(tgt)))
    return hnn_saturate(h, ka)
