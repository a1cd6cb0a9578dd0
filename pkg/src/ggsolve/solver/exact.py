"""Exact semilinear solution sets for exponent equations with <= 2 power items.

The deterministic realization of the enumeration pipeline: small exponents
are merged into the constants and handled concretely (the K-set part of the
big disjunction); for two simultaneously large exponents the normal forms of
both sides stabilize into parametric shapes

    nf(v0 u1^x v1)        =  L * u1^(x - dx) * S      (x >= x*)
    nf(v2^-1 (u2^-1)^y)   =  Z * (u2^-1)^(y - dy)     (y >= y*)

and equality of the two shapes is exactly a two-power trace equation, solved
by the two-power closure-automata pipeline.  Repeated variables are merged with
identify_variables; variables whose powers disappeared in preprocessing are
unconstrained and get unit periods.

Stabilization argument: appending u to W cancels nothing as soon as one
append is cancellation-free, because a full intact copy of u then separates
any later candidate pair (a letter is never independent of itself); and all
v-against-power cancellation is bounded by |v|.  The extracted parametric
shapes are additionally verified at several consecutive exponents.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import List, Optional, Tuple

from ..groups import GroupElement, identity, invert_word, mult, power_nf
from ..semilinear import (
    LinearSet,
    SemilinearSet,
    identify_variables,
    two_power_solutions,
)
from ..traces import Trace, left_quotient, levi_split_pair, power, right_quotient
from .equations import (
    Const,
    ExponentEquation,
    SolveReport,
    bound_report_string,
    preprocess,
)

_BIG = 10**9


@dataclass
class Limits:
    max_power_items: int = 2
    max_base_length: int = 16
    max_constant_length: int = 64


def _stabilize_left(c: GroupElement, u: GroupElement) -> Tuple[GroupElement, int]:
    """(W, d) with nf(c u^x) = W * u^(x-d) (trace concatenation) for all x >= d.

    Appends copies of u until one append cancels nothing; once that happens,
    the intact copy blocks all later cancellation (a letter is never
    independent of itself), so the shape persists.
    """
    w = c
    d = 0
    cap = len(c) + 2 * len(u) + 8
    while True:
        nxt, cancelled = mult(w, u)
        if cancelled.is_empty():
            return w, d
        w = nxt
        d += 1
        assert d <= cap, "left absorption did not stabilize"


def _strip_power_prefix(t: Trace, u: Trace) -> Tuple[int, Trace]:
    count = 0
    cur = t
    while True:
        nxt = left_quotient(cur, u)
        if nxt is None:
            return count, cur
        count += 1
        cur = nxt


def _left_form(
    v0: GroupElement, u1: GroupElement, v1: GroupElement
) -> Tuple[Trace, Trace, int, int]:
    """Parametric shape of nf(v0 u1^x v1): (L, S, dx, x_min).

    For all x >= x_min, nf(v0 u1^x v1) = L * u1^(x-dx) * S as traces; and for
    every x >= 0 the group identity L u1^x S = v0 u1^(x+dx) v1 holds.
    """
    alphabet = v0.alphabet
    lam0, dl = _stabilize_left(v0, u1)  # nf(v0 u1^x) = lam0 u1^(x-dl), x >= dl
    ulen = max(1, len(u1))
    # the cancelled suffix-part covers at most |v1|/|u1| full copies plus a
    # partial piece of at most alphabet-many copies (power-split shape)
    probe = dl + (len(v1) // ulen) + 2 * len(alphabet.letters) + 4
    k0 = probe - dl
    body = GroupElement(lam0.trace * power(u1.trace, k0))
    total, cancelled = mult(body, v1)
    # Levi-split the cancelled suffix-part against (lam0, u1^k0)
    survivor = right_quotient(body.trace, cancelled)
    assert survivor is not None
    split = levi_split_pair(
        body.trace, survivor, cancelled, [lam0.trace, power(u1.trace, k0)]
    )
    assert split is not None
    (d_a, d_b), _ = split
    # D = d_a * d_b, with d_b = u1^l * stail
    l, stail = _strip_power_prefix(d_b, u1.trace)
    e_part = left_quotient(v1.trace, Trace(alphabet, invert_word(cancelled.word)))
    assert e_part is not None
    big_l = d_a
    big_s = stail * e_part
    dx = probe - l
    # verify the shape on several consecutive exponents
    for extra in range(4):
        x = probe + extra
        direct = _nf_three(v0, u1, x, v1)
        shaped = big_l * power(u1.trace, x - dx) * big_s
        assert direct.trace == shaped, "parametric left form failed verification"
    return big_l, big_s, dx, probe


def _nf_three(v0: GroupElement, u1: GroupElement, x: int, v1: GroupElement) -> GroupElement:
    acc, _ = mult(v0, power_nf(u1, x, _BIG))
    acc, _ = mult(acc, v1)
    return acc


def _right_form(v2: GroupElement, u2: GroupElement) -> Tuple[Trace, int, int]:
    """Parametric shape of nf(v2^-1 (u2^-1)^y): (Z, dy, y_min)."""
    u2i = u2.inverse()
    z, dy = _stabilize_left(v2.inverse(), u2i)
    for extra in range(3):
        y = dy + extra
        direct, _ = mult(v2.inverse(), power_nf(u2i, y, _BIG))
        shaped = z.trace * power(u2i.trace, y - dy)
        assert direct.trace == shaped, "parametric right form failed verification"
    return z.trace, dy, dy


def _solve_one_power(
    v0: GroupElement, u: GroupElement, v1: GroupElement
) -> List[int]:
    """All x with v0 u^x v1 = 1; at most one since u^x is irreducible."""
    g, _ = mult(v0.inverse(), v1.inverse())
    if len(g) % max(1, len(u)) != 0:
        return []
    x = len(g) // max(1, len(u))
    if power_nf(u, x, _BIG) == g:
        return [x]
    return []


def solve_exact(e: ExponentEquation, limits: Optional[Limits] = None) -> SolveReport:
    """Exact semilinear solution set over e.vars, or status Unknown past the limits."""
    limits = limits or Limits()
    t0 = time.monotonic()
    pp = preprocess(e)
    alphabet = pp.alphabet
    powers = pp.powers()
    n = len(powers)
    k = len(e.vars)
    bound_report = bound_report_string(e)

    def report(solset: SemilinearSet) -> SolveReport:
        if solset.is_empty():
            return SolveReport(
                status="unsolvable",
                solution_set=solset,
                bound_report=bound_report,
                note="exhaustive pipeline produced the empty set",
                timings={"total": time.monotonic() - t0},
            )
        witness_vec = solset.components[0].base
        witness = dict(zip(e.vars, witness_vec))
        return SolveReport(
            status="solvable",
            witness=witness,
            solution_set=solset,
            bound_report=bound_report,
            timings={"total": time.monotonic() - t0},
        )

    oversize = any(len(p.base) > limits.max_base_length for p in powers) or any(
        isinstance(item, Const) and len(item.value) > limits.max_constant_length
        for item in pp.items
    )
    if n > limits.max_power_items or oversize:
        return SolveReport(
            status="unknown",
            solution_set=None,
            bound_report=bound_report,
            note=f"instance beyond exact-enumeration limits ({n} power items)",
            timings={"total": time.monotonic() - t0},
            exhaustive=False,
        )

    active_vars = tuple(dict.fromkeys(p.var for p in powers))
    free_vars = tuple(v for v in e.vars if v not in active_vars)

    def lift(core: SemilinearSet) -> SemilinearSet:
        """Embed a solution set over active_vars into the full variable space."""
        if core.dimension != len(active_vars):
            raise AssertionError("dimension mismatch in lift")
        pos = {v: i for i, v in enumerate(e.vars)}
        comps = []
        for comp in core.components:
            base = [0] * k
            for i, v in enumerate(active_vars):
                base[pos[v]] = comp.base[i]
            periods = []
            for pvec in comp.periods:
                vec = [0] * k
                for i, v in enumerate(active_vars):
                    vec[pos[v]] = pvec[i]
                periods.append(vec)
            for v in free_vars:
                unit = [0] * k
                unit[pos[v]] = 1
                periods.append(unit)
            comps.append(LinearSet(base, periods))
        return SemilinearSet(k, comps)

    # ---- n = 0: plain word problem -------------------------------------
    if n == 0:
        total = identity(alphabet)
        for item in pp.items:
            total, _ = mult(total, item.value)
        if total.is_identity():
            # every variable is unconstrained
            periods = [[1 if j == i else 0 for j in range(k)] for i in range(k)]
            return report(SemilinearSet(k, [LinearSet([0] * k, periods)]))
        return report(SemilinearSet(k, []))

    # collect the constants around the powers: c0 P1 c1 [P2 c2]
    consts: List[GroupElement] = []
    bases: List[GroupElement] = []
    pending = identity(alphabet)
    for item in pp.items:
        if isinstance(item, Const):
            pending, _ = mult(pending, item.value)
        else:
            consts.append(pending)
            pending = identity(alphabet)
            bases.append(item.base)
    consts.append(pending)

    # ---- n = 1 ----------------------------------------------------------
    if n == 1:
        sols = _solve_one_power(consts[0], bases[0], consts[1])
        core = SemilinearSet(1, [LinearSet((x,)) for x in sols])
        return report(lift(core))

    # ---- n = 2 ----------------------------------------------------------
    v0, u1, v1, u2, v2 = consts[0], bases[0], consts[1], bases[1], consts[2]
    var1, var2 = powers[0].var, powers[1].var

    big_l, big_s, dx, x_min = _left_form(v0, u1, v1)
    big_z, dy, y_min = _right_form(v2, u2)
    u2i_trace = u2.inverse().trace

    pair_components: List[LinearSet] = []
    two = two_power_solutions(
        Trace(alphabet, big_l.word),
        u1.trace,
        Trace(alphabet, big_s.word),
        Trace(alphabet, big_z.word),
        u2i_trace,
        Trace(alphabet, ()),
    )
    for comp in two.components:
        base = (comp.base[0] + dx, comp.base[1] + dy)
        pair_components.append(LinearSet(base, comp.periods))

    point_components: List[LinearSet] = []
    seen_points = set()

    def add_point(x: int, y: int) -> None:
        if (x, y) not in seen_points:
            seen_points.add((x, y))
            point_components.append(LinearSet((x, y)))

    # strips: one exponent below its threshold, the other solved directly
    for x0 in range(x_min):
        left_val = _nf_three(v0, u1, x0, v1)
        for y0 in _solve_one_power(left_val, u2, v2):
            add_point(x0, y0)
    for y0 in range(y_min):
        # v0 u1^x (v1 u2^y0 v2) = 1
        tail, _ = mult(power_nf(u2, y0, _BIG), v2)
        tail, _ = mult(v1, tail)
        for x0 in _solve_one_power(v0, u1, tail):
            add_point(x0, y0)

    # drop strip points already covered by the parametric components
    if pair_components:
        from ..semilinear import member as _sl_member

        pair_set = SemilinearSet(2, pair_components)
        point_components = [
            c for c in point_components if not _sl_member(pair_set, c.base)
        ]
    raw = SemilinearSet(2, pair_components + point_components)

    if var1 == var2:
        core = identify_variables(raw, {0: 0, 1: 0})
    else:
        core = raw
    # active_vars order must match the projection order
    if var1 == var2:
        assert active_vars == (var1,)
    else:
        assert active_vars == (var1, var2)
    return report(lift(core))
