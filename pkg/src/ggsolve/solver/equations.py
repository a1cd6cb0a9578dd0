"""Exponent-equation types and the surrounding plumbing.

An equation denotes v0 u1^{x1} v1 ... un^{xn} vn = 1; the same variable may
label several powers.  Assignments map variables to naturals.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from itertools import product as iproduct
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple, Union

from ..errors import AlphabetMismatchError, ResourceExceeded, StructureError
from ..groups import (
    DoubledAlphabet,
    GroupElement,
    cyclic_reduce,
    free_reduce,
    identity,
    invert_word,
    mult,
    power_nf,
)
from ..semilinear import DiophantineSystem, SemilinearSet, diophantine_solve
from ..traces import connected_components

Assignment = Dict[str, int]


@dataclass(frozen=True)
class Const:
    value: GroupElement


@dataclass(frozen=True)
class Power:
    base: GroupElement
    var: str


Item = Union[Const, Power]


class ExponentEquation:
    """Alternating constants and variable powers; denotes their product = 1."""

    __slots__ = ("alphabet", "items", "vars")

    def __init__(
        self,
        alphabet: DoubledAlphabet,
        items: Sequence[Item],
        variables: Optional[Sequence[str]] = None,
    ):
        self.alphabet = alphabet
        self.items = tuple(items)
        seen: List[str] = []
        for item in self.items:
            value = item.value if isinstance(item, Const) else item.base
            if value.alphabet != alphabet:
                raise AlphabetMismatchError("item over a different alphabet")
            if isinstance(item, Power) and item.var not in seen:
                seen.append(item.var)
        if variables is None:
            self.vars = tuple(seen)
        else:
            self.vars = tuple(variables)
            missing = [v for v in seen if v not in self.vars]
            if missing:
                raise StructureError(f"variables {missing} not declared")

    def powers(self) -> List[Power]:
        return [item for item in self.items if isinstance(item, Power)]

    def __repr__(self):
        bits = []
        for item in self.items:
            if isinstance(item, Const):
                bits.append(" ".join(item.value.word) or "_")
            else:
                bits.append(f"({' '.join(item.base.word) or '_'})^{item.var}")
        return "Eq[" + " · ".join(bits) + " = 1]"


def equation(alphabet: DoubledAlphabet, *specs, variables=None) -> ExponentEquation:
    """Convenience builder: specs are constant words, or (word, var) power pairs.

    A 2-tuple counts as a power only when its second component is a plain
    identifier (variable names never carry apostrophes); spell multi-letter
    constants as strings of single-letter names or as token tuples.
    """
    items: List[Item] = []
    for spec in specs:
        is_power = (
            isinstance(spec, tuple)
            and len(spec) == 2
            and isinstance(spec[0], (str, tuple, list))
            and isinstance(spec[1], str)
            and spec[1].isidentifier()
        )
        if is_power:
            items.append(Power(free_reduce(alphabet, spec[0]), spec[1]))
        else:
            items.append(Const(free_reduce(alphabet, spec)))
    return ExponentEquation(alphabet, items, variables)


def evaluate(e: ExponentEquation, sigma: Assignment, cap: int = 10**6) -> GroupElement:
    """The group element denoted by the equation's left-hand side under sigma."""
    acc = identity(e.alphabet)
    for item in e.items:
        if isinstance(item, Const):
            step = item.value
        else:
            step = power_nf(item.base, sigma[item.var], cap)
        acc, _ = mult(acc, step)
        if len(acc) > cap:
            raise ResourceExceeded(len(acc), cap)
    return acc


def verify(e: ExponentEquation, sigma: Assignment, cap: int = 10**6) -> bool:
    """Substitute and reduce left-to-right; True iff the product is the identity.

    Uses the conjugate-power normal form, so huge exponents only pay for the
    letters they actually contribute; raises ResourceExceeded when an
    intermediate normal form would exceed ``cap``.
    """
    for v in e.vars:
        if v not in sigma:
            raise StructureError(f"assignment missing variable {v!r}")
    return evaluate(e, sigma, cap).is_identity()


def preprocess(e: ExponentEquation) -> ExponentEquation:
    """Cyclically reduce and connect all power bases; drop trivial powers.

    Each u^x becomes p w^x p^{-1} with the conjugators merged into the
    neighboring constants, and a disconnected w splits into its independent
    components, all sharing the variable.  Solution sets are preserved.
    """
    alphabet = e.alphabet
    items: List[Item] = []
    pending = identity(alphabet)

    def flush():
        nonlocal pending
        if not pending.is_identity():
            items.append(Const(pending))
            pending = identity(alphabet)

    for item in e.items:
        if isinstance(item, Const):
            pending, _ = mult(pending, item.value)
            continue
        if item.base.is_identity():
            continue
        p, w = cyclic_reduce(item.base)
        pending, _ = mult(pending, p)
        comps = connected_components(w.trace)
        for comp in comps:
            flush()
            items.append(Power(GroupElement(comp), item.var))
        pending, _ = mult(pending, p.inverse())
    flush()
    return ExponentEquation(alphabet, items, e.vars)


def brute_oracle(e: ExponentEquation, cap: int) -> Set[tuple]:
    """Exhaustive grid search over [0,cap]^k; assignments as tuples over e.vars."""
    k = len(e.vars)
    power_tables: Dict[Tuple[GroupElement, int], GroupElement] = {}
    solutions: Set[tuple] = set()
    big = 10**9
    for values in iproduct(range(cap + 1), repeat=k):
        sigma = dict(zip(e.vars, values))
        acc = identity(e.alphabet)
        for item in e.items:
            if isinstance(item, Const):
                step = item.value
            else:
                key = (item.base, sigma[item.var])
                step = power_tables.get(key)
                if step is None:
                    step = power_nf(item.base, sigma[item.var], big)
                    power_tables[key] = step
            acc, _ = mult(acc, step)
        if acc.is_identity():
            solutions.add(values)
    return solutions


def _letter_balance(g: GroupElement, base: str) -> int:
    pos = sum(1 for a in g.word if a == base)
    neg = sum(1 for a in g.word if a == base + "'")
    return pos - neg


def abelian_relaxation(e: ExponentEquation) -> DiophantineSystem:
    """Letter-count balance per generator; unsolvable system => unsolvable equation."""
    gens = e.alphabet.base.letters
    m = len(e.vars)
    var_index = {v: i for i, v in enumerate(e.vars)}
    A = [[0] * m for _ in gens]
    a = [0] * len(gens)
    for item in e.items:
        if isinstance(item, Const):
            for gi, gen in enumerate(gens):
                a[gi] -= _letter_balance(item.value, gen)
        else:
            j = var_index[item.var]
            for gi, gen in enumerate(gens):
                A[gi][j] += _letter_balance(item.base, gen)
    return DiophantineSystem(A, a)


@dataclass
class SolveReport:
    status: str  # "solvable" | "unsolvable" | "unknown"
    witness: Optional[Assignment] = None
    solution_set: Optional[SemilinearSet] = None
    bound_report: str = ""
    timings: Dict[str, float] = field(default_factory=dict)
    note: str = ""
    exhaustive: bool = True

    def is_solvable(self) -> Optional[bool]:
        if self.status == "solvable":
            return True
        if self.status == "unsolvable":
            return False
        return None


def solution_bound(e: ExponentEquation) -> int:
    """The headline exponent bound with all O-constants set to 1.

    HEURISTIC: a reporting aid only; exact answers come from solve_exact.
    Evaluated on the preprocessed equation.
    """
    pp = preprocess(e)
    n = len(pp.powers())
    alphabet = e.alphabet.base
    size_a = max(1, len(alphabet.letters))
    alpha = max(1, alphabet.max_independent_size())
    lam = 1
    for item in pp.items:
        value = item.value if isinstance(item, Const) else item.base
        lam = max(lam, len(value))
    if n == 0:
        return 1
    mu = (size_a**alpha) * (2 ** (2 * alpha * alpha * n)) * (lam**alpha)
    nu = lam**alpha
    return (
        math.factorial(alpha * n)
        * (2 ** (2 * alpha * alpha * n * (n + 3)))
        * (mu ** (8 * alpha * (n + 1)))
        * (nu ** (8 * alpha * size_a * (n + 1)))
    )


def bound_report_string(e: ExponentEquation) -> str:
    value = solution_bound(e)
    if value.bit_length() > 256:
        shown = f"~2^{value.bit_length() - 1}"
    else:
        shown = str(value)
    return f"HEURISTIC exponent bound (O-constants = 1): {shown}"


def solve_search(e: ExponentEquation, cap: int = 15) -> SolveReport:
    """Iterative deepening up to ``cap`` with abelianization pruning.

    Sound: a found witness is verified; Unsolvable only via the abelian
    relaxation certificate; otherwise Unknown(cap).
    """
    t0 = time.monotonic()
    relax = abelian_relaxation(e)
    if diophantine_solve(relax) is None:
        return SolveReport(
            status="unsolvable",
            bound_report=bound_report_string(e),
            note="abelian relaxation has no solution",
            timings={"total": time.monotonic() - t0},
        )
    k = len(e.vars)
    big = 10**9
    power_tables: Dict[Tuple[GroupElement, int], GroupElement] = {}

    def eval_values(values) -> bool:
        sigma = dict(zip(e.vars, values))
        acc = identity(e.alphabet)
        for item in e.items:
            if isinstance(item, Const):
                step = item.value
            else:
                key = (item.base, sigma[item.var])
                step = power_tables.get(key)
                if step is None:
                    step = power_nf(item.base, sigma[item.var], big)
                    power_tables[key] = step
            acc, _ = mult(acc, step)
        return acc.is_identity()

    if k == 0:
        ok = eval_values(())
        return SolveReport(
            status="solvable" if ok else "unsolvable",
            witness={} if ok else None,
            bound_report=bound_report_string(e),
            note="" if ok else "constant product differs from the identity",
            timings={"total": time.monotonic() - t0},
        )
    for depth in range(cap + 1):
        for values in iproduct(range(depth + 1), repeat=k):
            if depth and max(values) != depth:
                continue
            if eval_values(values):
                sigma = dict(zip(e.vars, values))
                assert verify(e, sigma, 10**9)
                return SolveReport(
                    status="solvable",
                    witness=sigma,
                    bound_report=bound_report_string(e),
                    timings={"total": time.monotonic() - t0},
                )
    return SolveReport(
        status="unknown",
        bound_report=bound_report_string(e),
        note=f"no witness with exponents <= {cap}",
        timings={"total": time.monotonic() - t0},
        exhaustive=False,
    )


def z_to_n_rewrite(
    e: ExponentEquation, int_vars: Optional[Iterable[str]] = None
) -> Tuple[ExponentEquation, Dict[str, str]]:
    """Rewrite Z-valued variables over N: u^x becomes u^x (u^{-1})^{y_x}.

    Every occurrence of a Z-variable x gets the same fresh partner y_x; the
    solution sets correspond via x -> x - y_x.  Returns (equation, x->y map).
    """
    zset = set(e.vars if int_vars is None else int_vars)
    partner: Dict[str, str] = {}
    for v in e.vars:
        if v in zset:
            name = v + "_neg"
            while name in e.vars or name in partner.values():
                name += "_"
            partner[v] = name
    items: List[Item] = []
    for item in e.items:
        items.append(item)
        if isinstance(item, Power) and item.var in partner:
            items.append(Power(item.base.inverse(), partner[item.var]))
    variables = list(e.vars)
    for v in e.vars:
        if v in partner:
            variables.append(partner[v])
    return ExponentEquation(e.alphabet, items, variables), partner


def knapsack_to_equation(
    alphabet: DoubledAlphabet, base_words: Sequence[Sequence[str]], target_word: Sequence[str]
) -> ExponentEquation:
    """u1^{x1}...un^{xn} = u as the equation with u^{-1} appended; distinct variables."""
    items: List[Item] = []
    for i, word in enumerate(base_words):
        items.append(Power(free_reduce(alphabet, word), f"x{i+1}"))
    items.append(Const(free_reduce(alphabet, invert_word(tuple(target_word)))))
    return ExponentEquation(alphabet, items)
