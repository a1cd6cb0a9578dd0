"""NFAs with I-diamond and memorizing certificates; commutation-closure constructions.

The constructions follow the recognizable-trace-language toolkit: prefix
automata for single traces, the tuple-state automaton for [u*]_I (connected
u), the gated product for [L1 L2]_I, plain products for intersection, unary
length automata with an arithmetic-progression decomposition, and Benois
saturation for free groups.  Certified automata validate their certificates
on construction.
"""

from __future__ import annotations

from collections import deque
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .errors import AlphabetMismatchError, CertificateError, StructureError, TraceError
from .groups import inverse_letter
from .traces import (
    IndependenceAlphabet,
    Trace,
    empty_trace,
    left_quotient,
    min_letters,
)

EPS = None  # epsilon edge label

UNARY_LETTER = "a"
UNARY_ALPHABET = IndependenceAlphabet((UNARY_LETTER,))


class Nfa:
    """Immutable NFA over an independence alphabet, with optional certificates.

    ``transitions`` holds triples (state, letter, state); ``letter`` is None
    for an epsilon edge.  ``memorizing`` maps every state to the alphabet of
    all words reaching it (validated).
    """

    __slots__ = (
        "alphabet",
        "states",
        "transitions",
        "initial",
        "finals",
        "i_diamond",
        "memorizing",
        "_out",
        "_eps_closure",
    )

    def __init__(
        self,
        alphabet: IndependenceAlphabet,
        states: Sequence,
        transitions: Iterable[tuple],
        initial,
        finals: Iterable,
        *,
        i_diamond: bool = False,
        memorizing: Optional[Dict] = None,
        validate: bool = True,
    ):
        self.alphabet = alphabet
        self.states = tuple(states)
        state_set = set(self.states)
        if len(state_set) != len(self.states):
            raise StructureError("duplicate states")
        trans = frozenset(transitions)
        for p, a, q in trans:
            if p not in state_set or q not in state_set:
                raise StructureError(f"transition ({p!r},{a!r},{q!r}) uses unknown state")
            if a is not EPS and a not in alphabet:
                raise StructureError(f"transition label {a!r} not in alphabet")
        if initial not in state_set:
            raise StructureError("initial state unknown")
        finals = frozenset(finals)
        if not finals <= state_set:
            raise StructureError("final states unknown")
        self.transitions = trans
        self.initial = initial
        self.finals = finals
        self.i_diamond = bool(i_diamond)
        self.memorizing = dict(memorizing) if memorizing is not None else None
        self._out = None
        self._eps_closure = None
        if validate:
            if self.i_diamond:
                self.validate_i_diamond()
            if self.memorizing is not None:
                self.validate_memorizing()

    # -- adjacency ---------------------------------------------------------

    def out(self, state) -> Dict:
        if self._out is None:
            out: Dict = {s: {} for s in self.states}
            for p, a, q in self.transitions:
                out[p].setdefault(a, set()).add(q)
            self._out = {
                s: {a: frozenset(dests) for a, dests in m.items()} for s, m in out.items()
            }
        return self._out[state]

    def has_eps(self) -> bool:
        return any(a is EPS for _, a, _ in self.transitions)

    def eps_closure(self, states: Iterable) -> FrozenSet:
        if self._eps_closure is None:
            self._eps_closure = {}
        result = set()
        stack = list(states)
        while stack:
            s = stack.pop()
            if s in result:
                continue
            result.add(s)
            for t in self.out(s).get(EPS, ()):
                if t not in result:
                    stack.append(t)
        return frozenset(result)

    def step(self, states: FrozenSet, letter: str) -> FrozenSet:
        nxt = set()
        for s in states:
            nxt.update(self.out(s).get(letter, ()))
        return self.eps_closure(nxt)

    def accepts(self, word: Sequence[str]) -> bool:
        current = self.eps_closure([self.initial])
        for letter in word:
            current = self.step(current, letter)
            if not current:
                return False
        return bool(current & self.finals)

    def num_states(self) -> int:
        return len(self.states)

    # -- certificates ------------------------------------------------------

    def validate_i_diamond(self) -> None:
        """Exhaustive pair check of the diamond property."""
        if self.has_eps():
            raise CertificateError("i_diamond automata must be epsilon-free")
        indep = self.alphabet.independent
        for p, a, q in self.transitions:
            out_q = self.out(q)
            for b, rs in out_q.items():
                if b == a or not indep(a, b):
                    continue
                out_p_b = self.out(p).get(b, frozenset())
                for r in rs:
                    if not any(r in self.out(s).get(a, frozenset()) for s in out_p_b):
                        raise CertificateError(
                            f"diamond fails at ({p!r},{a}{b},{r!r})"
                        )

    def validate_memorizing(self) -> None:
        """Fixpoint alphabet propagation from the initial state."""
        assert self.memorizing is not None
        computed = {self.initial: frozenset()}
        queue = deque([self.initial])
        while queue:
            s = queue.popleft()
            for a, dests in self.out(s).items():
                add = frozenset() if a is EPS else frozenset((a,))
                expected = computed[s] | add
                for d in dests:
                    if d in computed:
                        if computed[d] != expected:
                            raise CertificateError(
                                f"state {d!r} reachable with distinct alphabets"
                            )
                    else:
                        computed[d] = expected
                        queue.append(d)
        if set(computed) != set(self.states):
            raise CertificateError("memorizing automata must have all states reachable")
        for s, alpha in self.memorizing.items():
            if frozenset(alpha) != computed[s]:
                raise CertificateError(f"declared alpha({s!r}) is wrong")
        if set(self.memorizing) != set(self.states):
            raise CertificateError("alpha map must be total")


def trim(nfa: Nfa) -> Nfa:
    """Restrict to accessible and co-accessible states (language preserved).

    Keeps the i_diamond certificate (the diamond witness state q' lies on a
    surviving path) and restricts the memorizing map when every surviving
    state remains reachable.
    """
    fwd = {s: set() for s in nfa.states}
    bwd = {s: set() for s in nfa.states}
    for p, _, q in nfa.transitions:
        fwd[p].add(q)
        bwd[q].add(p)

    def reach(starts, adj):
        seen = set(starts)
        stack = list(starts)
        while stack:
            s = stack.pop()
            for t in adj[s]:
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        return seen

    acc = reach([nfa.initial], fwd)
    coacc = reach(list(nfa.finals), bwd)
    keep = acc & coacc
    if nfa.initial not in keep:
        # empty language: single dead initial state
        return Nfa(nfa.alphabet, [nfa.initial], [], nfa.initial, [])
    states = [s for s in nfa.states if s in keep]
    transitions = [(p, a, q) for p, a, q in nfa.transitions if p in keep and q in keep]
    memorizing = None
    if nfa.memorizing is not None:
        memorizing = {s: nfa.memorizing[s] for s in states}
    return Nfa(
        nfa.alphabet,
        states,
        transitions,
        nfa.initial,
        [f for f in nfa.finals if f in keep],
        i_diamond=nfa.i_diamond,
        memorizing=memorizing,
        validate=False,
    )


# -- constructions ----------------------------------------------------------


def prefix_nfa(t: Trace) -> Nfa:
    """Automaton accepting exactly the linearizations of ``t``.

    States are the prefixes of ``t`` (rho(t) many); memorizing with
    alpha(prefix) = alph(prefix); I-diamond.
    """
    alphabet = t.alphabet
    start = ()
    states = [start]
    index = {start: empty_trace(alphabet)}
    transitions = []
    memorizing = {start: frozenset()}
    queue = deque([start])
    while queue:
        key = queue.popleft()
        p = index[key]
        rest = left_quotient(t, p)
        for letter in min_letters(rest):
            nxt = p * Trace._from_canonical(alphabet, (letter,))
            nkey = nxt.word
            if nkey not in index:
                index[nkey] = nxt
                states.append(nkey)
                memorizing[nkey] = nxt.alph()
                queue.append(nkey)
            transitions.append((key, letter, nkey))
    return Nfa(
        alphabet,
        states,
        transitions,
        start,
        [t.word],
        i_diamond=True,
        memorizing=memorizing,
    )


def _star_tuple_valid(u: Trace, tup: Tuple[Trace, ...]) -> bool:
    """Side conditions of the tuple states: u = u_i v_i with u_i,v_i != 1 and v_i I u_j (i<j)."""
    rests = []
    for part in tup:
        if part.is_empty():
            return False
        rest = left_quotient(u, part)
        if rest is None or rest.is_empty():
            return False
        rests.append(rest)
    for i in range(len(tup)):
        for j in range(i + 1, len(tup)):
            if not rests[i].independent_of(tup[j]):
                return False
    return True


def star_nfa(u: Trace, memorize: bool = False) -> Nfa:
    """Automaton for [u*]_I per the tuple-state construction (u connected, nonempty).

    States are tuples (u_1,...,u_c) of nonempty proper prefixes of u with
    v_i I u_j for i < j; the optional memorizing bit records whether a full
    copy of u has been completed (set by the copy-completing transitions).
    """
    from .traces import is_connected

    alphabet = u.alphabet
    if u.is_empty():
        raise TraceError("star_nfa requires a nonempty trace")
    if not is_connected(u):
        raise TraceError("star_nfa requires a connected trace")
    letters = sorted(alphabet.letters, key=alphabet.rank)
    single = {a: Trace._from_canonical(alphabet, (a,)) for a in letters}
    u_single = len(u) == 1

    def tuple_alph(tup, start=0):
        out = set()
        for part in tup[start:]:
            out.update(part.alph())
        return out

    def moves(tup):
        # yields (letter, next_tuple, completes_copy)
        c = len(tup)
        for a in letters:
            # type (a): u is the single letter a
            if u_single and c == 0 and u.word == (a,):
                yield a, tup, True
            # type (b): complete a copy: u_1 * a == u
            if c > 0:
                if (tup[0] * single[a]) == u and alphabet.independent_sets(
                    (a,), tuple_alph(tup, 1)
                ):
                    yield a, tup[1:], True
            # type (c): start a new piece at slot i+1
            for i in range(c + 1):
                if alphabet.independent_sets((a,), tuple_alph(tup, i)):
                    cand = tup[:i] + (single[a],) + tup[i:]
                    if _star_tuple_valid(u, cand):
                        yield a, cand, False
            # type (d): extend piece i
            for i in range(c):
                if alphabet.independent_sets((a,), tuple_alph(tup, i + 1)):
                    cand = tup[:i] + (tup[i] * single[a],) + tup[i + 1 :]
                    if _star_tuple_valid(u, cand):
                        yield a, cand, False

    def key_of(tup):
        return tuple(part.word for part in tup)

    start_tup: Tuple[Trace, ...] = ()
    seen = {key_of(start_tup): start_tup}
    order = [start_tup]
    queue = deque([start_tup])
    edges = []  # (tup_key, letter, next_key, completes)
    while queue:
        tup = queue.popleft()
        for a, nxt, completes in moves(tup):
            nkey = key_of(nxt)
            if nkey not in seen:
                seen[nkey] = nxt
                order.append(nxt)
                queue.append(nxt)
            edges.append((key_of(tup), a, nkey, completes))

    if not memorize:
        states = [key_of(tup) for tup in order]
        transitions = [(p, a, q) for p, a, q, _ in edges]
        return Nfa(alphabet, states, transitions, key_of(start_tup), [key_of(start_tup)], i_diamond=True)

    # add the completed-copy bit; only reachable (tuple, bit) pairs are kept
    states = []
    transitions = []
    memorizing = {}
    alph_u = u.alph()
    reachable = set()
    start = (key_of(start_tup), 0)
    queue2 = deque([start])
    reachable.add(start)
    edge_index: Dict[tuple, list] = {}
    for p, a, q, completes in edges:
        edge_index.setdefault(p, []).append((a, q, completes))
    while queue2:
        key, bit = queue2.popleft()
        for a, q, completes in edge_index.get(key, ()):
            nbit = 1 if completes else bit
            nstate = (q, nbit)
            if nstate not in reachable:
                reachable.add(nstate)
                queue2.append(nstate)
            transitions.append(((key, bit), a, nstate))
    for key, bit in reachable:
        tup = seen[key]
        alpha = set()
        for part in tup:
            alpha.update(part.alph())
        if bit:
            alpha.update(alph_u)
        memorizing[(key, bit)] = frozenset(alpha)
        states.append((key, bit))
    finals = [s for s in ((key_of(start_tup), 0), (key_of(start_tup), 1)) if s in reachable]
    return Nfa(
        alphabet,
        states,
        transitions,
        start,
        finals,
        i_diamond=True,
        memorizing=memorizing,
    )


def concat_closure(a1: Nfa, a2: Nfa) -> Nfa:
    """I-diamond automaton for [L(a1) L(a2)]_I with exactly n1*n2 states.

    ``a2`` must carry a validated memorizing certificate; moves of ``a1`` are
    gated on independence with the alphabet memorized by the current a2-state.
    """
    if a1.alphabet != a2.alphabet:
        raise AlphabetMismatchError("concat_closure over mixed alphabets")
    if not a1.i_diamond or not a2.i_diamond:
        raise CertificateError("concat_closure needs I-diamond inputs")
    if a2.memorizing is None:
        raise CertificateError("concat_closure needs a memorizing right factor")
    alphabet = a1.alphabet
    alpha2 = a2.memorizing
    states = [(p1, p2) for p1 in a1.states for p2 in a2.states]
    transitions = []
    for p1 in a1.states:
        out1 = a1.out(p1)
        for p2 in a2.states:
            gate = alpha2[p2]
            for a, dests in out1.items():
                if alphabet.independent_sets((a,), gate):
                    for q1 in dests:
                        transitions.append(((p1, p2), a, (q1, p2)))
            for a, dests in a2.out(p2).items():
                for q2 in dests:
                    transitions.append(((p1, p2), a, (p1, q2)))
    finals = [(f1, f2) for f1 in a1.finals for f2 in a2.finals]
    return Nfa(
        alphabet,
        states,
        transitions,
        (a1.initial, a2.initial),
        finals,
        i_diamond=True,
        validate=False,  # diamond property holds by construction (gated product)
    )


def power_closure_nfa(p: Trace, u: Trace, s: Trace) -> Nfa:
    """Automaton for [p u* s]_I: prefix automaton, gated star, gated suffix."""
    left = concat_closure(prefix_nfa(p), star_nfa(u, memorize=True))
    return concat_closure(left, prefix_nfa(s))


def intersect(a: Nfa, b: Nfa) -> Nfa:
    """Plain product automaton (k*l states); inputs must be epsilon-free."""
    if a.alphabet != b.alphabet:
        raise AlphabetMismatchError("intersect over mixed alphabets")
    if a.has_eps() or b.has_eps():
        raise StructureError("intersect requires epsilon-free automata")
    states = [(p, q) for p in a.states for q in b.states]
    transitions = []
    for p in a.states:
        out_a = a.out(p)
        for q in b.states:
            out_b = b.out(q)
            for letter, dests_a in out_a.items():
                dests_b = out_b.get(letter)
                if not dests_b:
                    continue
                for pa in dests_a:
                    for qb in dests_b:
                        transitions.append(((p, q), letter, (pa, qb)))
    finals = [(p, q) for p in a.finals for q in b.finals]
    return Nfa(a.alphabet, states, transitions, (a.initial, b.initial), finals)


def length_automaton(a: Nfa) -> Nfa:
    """Replace every transition label by the unary letter; accepts {|w| : w in L(a)}."""
    if a.has_eps():
        raise StructureError("length_automaton requires an epsilon-free automaton")
    transitions = [(p, UNARY_LETTER, q) for p, _, q in a.transitions]
    return Nfa(UNARY_ALPHABET, a.states, transitions, a.initial, a.finals)


class Progression:
    """The set {offset + period * z : z in N}; period 0 means a singleton."""

    __slots__ = ("offset", "period")

    def __init__(self, offset: int, period: int):
        if offset < 0 or period < 0:
            raise ValueError("offset and period must be natural")
        self.offset = offset
        self.period = period

    def __eq__(self, other):
        return (
            isinstance(other, Progression)
            and self.offset == other.offset
            and self.period == other.period
        )

    def __hash__(self):
        return hash((self.offset, self.period))

    def __repr__(self):
        return f"Progression({self.offset},{self.period})"

    def __contains__(self, n: int) -> bool:
        if n < self.offset:
            return False
        if self.period == 0:
            return n == self.offset
        return (n - self.offset) % self.period == 0


def _covers(p: "Progression", q: "Progression") -> bool:
    """Every element of p lies in q."""
    if p.period == 0:
        return p.offset in q
    if q.period == 0:
        return False
    return p.period % q.period == 0 and p.offset in q


def _normalize_progressions(progs: set) -> FrozenSet:
    progs = set(progs)
    changed = True
    while changed:
        changed = False
        for p in list(progs):
            if any(q is not p and _covers(p, q) for q in progs):
                progs.discard(p)
                changed = True
                break
        if changed:
            continue
        for p in list(progs):
            if p.period and p.offset >= p.period:
                singleton = Progression(p.offset - p.period, 0)
                if singleton in progs:
                    progs.discard(singleton)
                    progs.discard(p)
                    progs.add(Progression(p.offset - p.period, p.period))
                    changed = True
                    break
    return frozenset(progs)


def unary_progressions(u: Nfa) -> FrozenSet:
    """Exact decomposition of the accepted length set into progressions.

    Determinizes the unary NFA by iterating the subset construction: the
    subset sequence is a tail followed by a cycle; accepting tail positions
    become singletons and accepting cycle positions become progressions with
    the cycle length as period, then adjacent pieces are merged.  Exactness
    is self-checked against direct membership up to tail + 2*period.
    """
    if tuple(u.alphabet.letters) != (UNARY_LETTER,):
        raise StructureError("unary_progressions requires the unary alphabet")
    if u.has_eps():
        raise StructureError("unary_progressions requires an epsilon-free automaton")
    subset = frozenset([u.initial])
    seen = {subset: 0}
    sequence = [subset]
    while True:
        nxt = frozenset(
            q for s in sequence[-1] for q in u.out(s).get(UNARY_LETTER, ())
        )
        if nxt in seen:
            tail = seen[nxt]
            period = len(sequence) - tail
            break
        seen[nxt] = len(sequence)
        sequence.append(nxt)
    accepting = [bool(subset & u.finals) for subset in sequence]
    progs = set()
    for i in range(tail):
        if accepting[i]:
            progs.add(Progression(i, 0))
    for i in range(tail, tail + period):
        if accepting[i]:
            progs.add(Progression(i, period))
    progs = _normalize_progressions(progs)
    # self-check: the decomposition agrees with membership up to tail + 2*period
    for n in range(tail + 2 * period + 1):
        direct = accepting[n] if n < len(sequence) else accepting[tail + (n - tail) % period]
        decomposed = any(n in p for p in progs)
        assert direct == decomposed, "progression decomposition mismatch"
    return progs


# -- Benois saturation (free groups) ----------------------------------------


def _require_free_doubled(alphabet: IndependenceAlphabet) -> None:
    if alphabet.independence:
        raise StructureError("Benois saturation requires an empty independence relation")
    letters = set(alphabet.letters)
    for a in letters:
        if inverse_letter(a) not in letters:
            raise StructureError(f"letter {a!r} has no inverse in the alphabet")


def benois_saturate(a: Nfa) -> Nfa:
    """Add eps-edges closing every path spelling x x^{-1} (over existing eps-edges)."""
    _require_free_doubled(a.alphabet)
    trans = set(a.transitions)

    def letter_edges():
        by_letter: Dict[str, List[tuple]] = {}
        for p, x, q in trans:
            if x is not EPS:
                by_letter.setdefault(x, []).append((p, q))
        return by_letter

    def eps_reach():
        adj: Dict = {s: set() for s in a.states}
        for p, x, q in trans:
            if x is EPS:
                adj[p].add(q)
        closure = {}
        for s in a.states:
            seen = {s}
            stack = [s]
            while stack:
                t = stack.pop()
                for r in adj[t]:
                    if r not in seen:
                        seen.add(r)
                        stack.append(r)
            closure[s] = seen
        return closure

    changed = True
    while changed:
        changed = False
        closure = eps_reach()
        by_letter = letter_edges()
        for x, edges in by_letter.items():
            inv_edges = by_letter.get(inverse_letter(x), ())
            starts: Dict = {}
            for r2, q in inv_edges:
                starts.setdefault(r2, []).append(q)
            for p, r in edges:
                for r2 in closure[r]:
                    for q in starts.get(r2, ()):
                        edge = (p, EPS, q)
                        if edge not in trans:
                            trans.add(edge)
                            changed = True
    return Nfa(a.alphabet, a.states, trans, a.initial, a.finals)


def free_reduce_word(word: Sequence[str]) -> tuple:
    """Free-group reduction of a word over a doubled free alphabet (stack based)."""
    out: List[str] = []
    for letter in word:
        if out and out[-1] == inverse_letter(letter):
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


def benois_member(a: Nfa, word: Sequence[str]) -> bool:
    """Does ``a`` accept some word equal to ``word`` in the free group?"""
    saturated = benois_saturate(a)
    return saturated.accepts(free_reduce_word(word))


# -- test/debug helpers ------------------------------------------------------


def enumerate_accepted(nfa: Nfa, max_len: int, canonical_only: bool = False) -> set:
    """All accepted words of length <= max_len (optionally only canonical words).

    Walks the word tree with subset states, pruning dead branches; with
    ``canonical_only`` the walk additionally tracks the Anisimov-Knuth filter
    state so only lexicographic normal forms are produced.
    """
    alphabet = nfa.alphabet
    letters = alphabet.letters
    accepted = set()
    start = nfa.eps_closure([nfa.initial])
    if not start:
        return accepted
    # canonical filter state: for each letter a, the set of letters b seen
    # such that b is followed only by letters independent of a
    init_filter = tuple(frozenset() for _ in letters)

    def violates(filter_state, letter):
        r = alphabet.rank(letter)
        for b in filter_state[r]:
            if alphabet.rank(b) > r and alphabet.independent(b, letter):
                return True
        return False

    def advance(filter_state, letter):
        out = []
        for i, a in enumerate(letters):
            base = filter_state[i] if alphabet.independent(letter, a) else frozenset()
            out.append(base | {letter})
        return tuple(out)

    stack = [((), start, init_filter)]
    while stack:
        word, subset, fstate = stack.pop()
        if subset & nfa.finals:
            accepted.add(word)
        if len(word) == max_len:
            continue
        for letter in letters:
            if canonical_only and violates(fstate, letter):
                continue
            nxt = nfa.step(subset, letter)
            if not nxt:
                continue
            nf = advance(fstate, letter) if canonical_only else fstate
            stack.append((word + (letter,), nxt, nf))
    return accepted


def relabel(nfa: Nfa) -> Tuple[Nfa, Dict]:
    """Deterministically rename states to q0..qN (BFS order); returns (nfa, old->new)."""
    order = []
    seen = set()
    queue = deque([nfa.initial])
    seen.add(nfa.initial)
    while queue:
        s = queue.popleft()
        order.append(s)
        for a in sorted(nfa.out(s), key=lambda x: "" if x is EPS else x):
            for t in sorted(nfa.out(s)[a], key=repr):
                if t not in seen:
                    seen.add(t)
                    queue.append(t)
    for s in nfa.states:
        if s not in seen:
            seen.add(s)
            order.append(s)
    mapping = {s: f"q{i}" for i, s in enumerate(order)}
    memorizing = None
    if nfa.memorizing is not None:
        memorizing = {mapping[s]: alpha for s, alpha in nfa.memorizing.items()}
    out = Nfa(
        nfa.alphabet,
        [mapping[s] for s in nfa.states],
        [(mapping[p], a, mapping[q]) for p, a, q in nfa.transitions],
        mapping[nfa.initial],
        [mapping[f] for f in nfa.finals],
        i_diamond=nfa.i_diamond,
        memorizing=memorizing,
        validate=False,
    )
    return out, mapping
