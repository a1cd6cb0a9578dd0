"""Knapsack automata: shape certificate, chain constructions, skeletons, normalization.

A knapsack automaton is an NFA whose strongly connected components are
singletons or induced cycles; epsilon edges count as edges for the SCC
analysis.  Membership of a group element in the accepted language modulo the
group is inter-reducible with knapsack solvability via skeleton enumeration.
"""

from __future__ import annotations

import itertools
from typing import Dict, List, Sequence, Set, Tuple

from ..automata import EPS, Nfa
from ..errors import CertificateError, StructureError
from ..traces import IndependenceAlphabet


def plain_alphabet(letters: Sequence[str]) -> IndependenceAlphabet:
    """Label alphabet for transfer automata (no independence structure)."""
    return IndependenceAlphabet(tuple(letters))


def strongly_connected_components(states, edges) -> Dict:
    """Iterative Tarjan; returns state -> component id (components are sets)."""
    adj: Dict = {s: [] for s in states}
    for p, _, q in edges:
        adj[p].append(q)
    index: Dict = {}
    low: Dict = {}
    on_stack: Set = set()
    stack: List = []
    comp_of: Dict = {}
    comps: List[Set] = []
    counter = itertools.count()

    for root in states:
        if root in index:
            continue
        work = [(root, iter(adj[root]))]
        index[root] = low[root] = next(counter)
        stack.append(root)
        on_stack.add(root)
        while work:
            node, it = work[-1]
            advanced = False
            for nxt in it:
                if nxt not in index:
                    index[nxt] = low[nxt] = next(counter)
                    stack.append(nxt)
                    on_stack.add(nxt)
                    work.append((nxt, iter(adj[nxt])))
                    advanced = True
                    break
                if nxt in on_stack:
                    low[node] = min(low[node], index[nxt])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                comp = set()
                while True:
                    s = stack.pop()
                    on_stack.discard(s)
                    comp.add(s)
                    if s == node:
                        break
                comps.append(comp)
    for cid, comp in enumerate(comps):
        for s in comp:
            comp_of[s] = cid
    return {"comp_of": comp_of, "components": comps}


class ShapeInfo:
    """SCC analysis of a knapsack automaton."""

    def __init__(self, nfa: Nfa):
        scc = strongly_connected_components(nfa.states, nfa.transitions)
        self.comp_of = scc["comp_of"]
        self.components = scc["components"]
        out_in_comp: Dict = {s: [] for s in nfa.states}
        in_in_comp: Dict = {s: [] for s in nfa.states}
        for p, a, q in nfa.transitions:
            if self.comp_of[p] == self.comp_of[q]:
                out_in_comp[p].append((a, q))
                in_in_comp[q].append((a, p))
        self.cycle_next: Dict = {}
        self.is_cycle: List[bool] = []
        for cid, comp in enumerate(self.components):
            internal = [(s, out_in_comp[s]) for s in comp]
            edge_count = sum(len(o) for _, o in internal)
            if len(comp) == 1:
                s = next(iter(comp))
                if edge_count == 0:
                    self.is_cycle.append(False)
                    continue
                if edge_count == 1 and out_in_comp[s][0][1] == s:
                    self.is_cycle.append(True)
                    self.cycle_next[s] = (out_in_comp[s][0][0], s)
                    continue
                raise CertificateError(f"state {s!r} carries multiple loops")
            # larger component: must be a single induced cycle
            if edge_count != len(comp):
                raise CertificateError(
                    f"component {sorted(map(repr, comp))} is not an induced cycle"
                )
            for s in comp:
                if len(out_in_comp[s]) != 1 or len(in_in_comp[s]) != 1:
                    raise CertificateError(
                        f"state {s!r} is not on a simple cycle"
                    )
                a, q = out_in_comp[s][0]
                self.cycle_next[s] = (a, q)
            # the unique successor walk must visit the whole component
            start = next(iter(comp))
            seen = {start}
            cur = start
            while True:
                _, cur = self.cycle_next[cur]
                if cur == start:
                    break
                if cur in seen:  # pragma: no cover
                    raise CertificateError("cycle walk revisited a state")
                seen.add(cur)
            if seen != comp:
                raise CertificateError("component is not a single cycle")
            self.is_cycle.append(True)

    def on_cycle(self, state) -> bool:
        return self.is_cycle[self.comp_of[state]]

    def cycle_states(self, state) -> Set:
        return self.components[self.comp_of[state]]

    def cycle_word_from(self, state) -> tuple:
        """Label word of one full loop starting (and ending) at ``state``."""
        word = []
        cur = state
        while True:
            a, nxt = self.cycle_next[cur]
            if a is not EPS:
                word.append(a)
            cur = nxt
            if cur == state:
                return tuple(word)

    def arc(self, p, q) -> Tuple[tuple, List]:
        """Label word and edge list along the cycle from p to q (< one round)."""
        word = []
        edges = []
        cur = p
        while cur != q:
            a, nxt = self.cycle_next[cur]
            if a is not EPS:
                word.append(a)
            edges.append((cur, a, nxt))
            cur = nxt
        return tuple(word), edges


class KnapsackAutomaton:
    """An Nfa with a validated knapsack shape certificate."""

    __slots__ = ("nfa", "shape")

    def __init__(self, nfa: Nfa):
        self.nfa = nfa
        self.shape = ShapeInfo(nfa)  # raises CertificateError on bad shape

    def __repr__(self):
        return f"KnapsackAutomaton(states={self.nfa.num_states()})"


class _Builder:
    """Mutable automaton builder used by the chain constructions and saturation."""

    def __init__(self, letters: Sequence[str]):
        self.letters = tuple(dict.fromkeys(letters))
        self.states: List = []
        self.edges: Set[tuple] = set()
        self.initial = None
        self.finals: Set = set()
        self._counter = itertools.count()

    def fresh(self, hint: str = "s"):
        name = f"{hint}{next(self._counter)}"
        self.states.append(name)
        return name

    def add_state(self, name):
        if name not in self.states:
            self.states.append(name)
        return name

    def edge(self, p, a, q):
        self.edges.add((p, a, q))

    def word_path(self, p, word: Sequence[str], q, hint: str = "w"):
        """Edges spelling ``word`` from p to q; fresh chain states in between.

        An empty word becomes a single epsilon edge (p == q allowed).
        """
        word = tuple(word)
        if not word:
            if p != q:
                self.edge(p, EPS, q)
            return
        cur = p
        for a in word[:-1]:
            nxt = self.fresh(hint)
            self.edge(cur, a, nxt)
            cur = nxt
        self.edge(cur, word[-1], q)

    def to_nfa(self, alphabet: IndependenceAlphabet) -> Nfa:
        return Nfa(
            alphabet, self.states, self.edges, self.initial, self.finals
        )

    @classmethod
    def from_nfa(cls, nfa: Nfa) -> "_Builder":
        b = cls(nfa.alphabet.letters)
        b.states = list(nfa.states)
        b.edges = set(nfa.transitions)
        b.initial = nfa.initial
        b.finals = set(nfa.finals)
        return b

    def fresh_nonclashing(self, hint="n"):
        existing = set(self.states)
        while True:
            name = f"{hint}{next(self._counter)}"
            if name not in existing:
                self.states.append(name)
                return name


def equation_chain_ka(
    letters: Sequence[str],
    v_words: Sequence[Sequence[str]],
    u_words: Sequence[Sequence[str]],
) -> KnapsackAutomaton:
    """Chain automaton accepting v0 u1* v1 ... un* vn (epsilon-free).

    Cycles are entered by consuming the first letter of the loop word, so
    skipping a power keeps the previous endpoint live; exits happen at the
    loop's base state only.
    """
    if len(v_words) != len(u_words) + 1:
        raise StructureError("need n+1 constants around n powers")
    b = _Builder(letters)
    start = b.fresh("c")
    b.initial = start
    endpoints = [start]

    def read_constant(word):
        nonlocal endpoints
        word = tuple(word)
        if not word:
            return
        chain = [b.fresh("c") for _ in word]
        for ep in endpoints:
            b.edge(ep, word[0], chain[0])
        for i in range(1, len(word)):
            b.edge(chain[i - 1], word[i], chain[i])
        endpoints = [chain[-1]]

    def read_star(word):
        nonlocal endpoints
        word = tuple(word)
        if not word:
            return
        cyc = [b.fresh("k") for _ in word]
        m = len(word)
        for i in range(m):
            b.edge(cyc[i], word[i], cyc[(i + 1) % m])
        # entering consumes the first letter of the loop word
        for ep in endpoints:
            b.edge(ep, word[0], cyc[1 % m])
        endpoints = endpoints + [cyc[0]]

    read_constant(v_words[0])
    for u, v in zip(u_words, v_words[1:]):
        read_star(u)
        read_constant(v)
    b.finals = set(endpoints)
    return KnapsackAutomaton(b.to_nfa(plain_alphabet(letters)))


def knapsack_to_ka(
    letters: Sequence[str], base_words: Sequence[Sequence[str]], target_word: Sequence[str]
) -> Tuple[KnapsackAutomaton, tuple]:
    """Automaton for w1* ... wk* plus the membership target."""
    v_words = [()] * (len(base_words) + 1)
    ka = equation_chain_ka(letters, v_words, base_words)
    return ka, tuple(target_word)


def prepend_word(ka: KnapsackAutomaton, word: Sequence[str]) -> KnapsackAutomaton:
    """Automaton first reading ``word`` and then behaving like ``ka``."""
    word = tuple(word)
    if not word:
        return ka
    b = _Builder.from_nfa(ka.nfa)
    cur = b.fresh_nonclashing("p")
    start = cur
    for a in word:
        nxt = b.fresh_nonclashing("p")
        b.edge(cur, a, nxt)
        cur = nxt
    # no epsilon edge: the last chain state copies the old initial's out-edges
    old_init = b.initial
    for p, a, q in list(b.edges):
        if p == old_init:
            b.edge(cur, a, q)
    if old_init in b.finals:
        b.finals.add(cur)
    b.initial = start
    return KnapsackAutomaton(b.to_nfa(ka.nfa.alphabet))


def skeletons(ka: KnapsackAutomaton, prepend: Sequence[str] = ()):
    """All skeletons as (v_words, u_words): runs' SCC paths with entry/exit data.

    ``prepend`` is merged into v0.  Every accepted word modulo reordering of
    loop iterations is captured by some skeleton, and every skeleton word is
    accepted.
    """
    nfa = ka.nfa
    shape = ka.shape
    out_edges: Dict = {s: [] for s in nfa.states}
    for p, a, q in nfa.transitions:
        if shape.comp_of[p] != shape.comp_of[q]:
            out_edges[p].append((a, q))

    results = []

    def emit(vs, us, current):
        results.append((tuple(tuple(v) for v in vs) + (tuple(current),), tuple(us)))

    def walk(state, vs, us, current):
        if shape.on_cycle(state):
            loop = shape.cycle_word_from(state)
            for q in sorted(shape.cycle_states(state), key=repr):
                arc_word, _ = shape.arc(state, q)
                vs2 = list(vs) + [tuple(current)]
                us2 = list(us) + [loop]
                cur2 = list(arc_word)
                if q in nfa.finals:
                    emit(vs2, us2, cur2)
                for a, r in sorted(out_edges[q], key=repr):
                    step = cur2 + ([a] if a is not EPS else [])
                    walk(r, vs2, us2, step)
        else:
            if state in nfa.finals:
                emit(vs, us, current)
            for a, r in sorted(out_edges[state], key=repr):
                step = list(current) + ([a] if a is not EPS else [])
                walk(r, vs, us, step)

    walk(nfa.initial, [], [], list(prepend))
    return results


def skeleton_equations(ka: KnapsackAutomaton, prepend, alphabet):
    """Skeletons as exponent equations over a graph-group alphabet (distinct vars)."""
    from ..groups import free_reduce
    from ..solver.equations import Const, ExponentEquation, Power

    for vs, us in skeletons(ka, prepend):
        items = []
        items.append(Const(free_reduce(alphabet, vs[0])))
        for i, u in enumerate(us):
            items.append(Power(free_reduce(alphabet, u), f"x{i+1}"))
            items.append(Const(free_reduce(alphabet, vs[i + 1])))
        yield ExponentEquation(alphabet, items)


def hnn_normalize(ka: KnapsackAutomaton) -> KnapsackAutomaton:
    """Epsilon-free normalization: no cycle-to-cycle edges, initial/finals off cycles.

    Intermediate states copy the out-edges (for the initial) or in-edges (for
    finals) of the cycle state they shadow; the language is unchanged.
    """
    b = _Builder.from_nfa(ka.nfa)
    changed = True
    while changed:
        changed = False
        nfa = b.to_nfa(plain_alphabet(b.letters))
        shape = ShapeInfo(nfa)
        # (ii) initial off cycles
        if shape.on_cycle(b.initial):
            old = b.initial
            fresh = b.fresh_nonclashing("i")
            for p, a, q in list(b.edges):
                if p == old:
                    b.edge(fresh, a, q)
            if old in b.finals:
                b.finals.add(fresh)
            b.initial = fresh
            changed = True
            continue
        # (ii) finals off cycles
        cyc_finals = [f for f in b.finals if shape.on_cycle(f)]
        if cyc_finals:
            f = cyc_finals[0]
            fresh = b.fresh_nonclashing("f")
            for p, a, q in list(b.edges):
                if q == f:
                    b.edge(p, a, fresh)
            b.finals.discard(f)
            b.finals.add(fresh)
            changed = True
            continue
        # (i) no edge between states of distinct cycles
        for p, a, q in sorted(b.edges, key=repr):
            if (
                shape.on_cycle(p)
                and shape.on_cycle(q)
                and shape.comp_of[p] != shape.comp_of[q]
            ):
                fresh = b.fresh_nonclashing("m")
                b.edges.discard((p, a, q))
                b.edge(p, a, fresh)
                for p2, a2, q2 in list(b.edges):
                    if p2 == q:
                        b.edge(fresh, a2, q2)
                if q in b.finals:
                    b.finals.add(fresh)
                changed = True
                break
    return KnapsackAutomaton(b.to_nfa(plain_alphabet(b.letters)))
