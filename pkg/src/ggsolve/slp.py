"""Straight-line programs: acyclic deterministic grammars producing one word.

Variables must start with an uppercase letter; every other token on a
right-hand side is a terminal letter.  The compressed-instance front end
builds on three operations: exact length without expansion, capped expansion,
and power construction by iterated squaring.
"""

from __future__ import annotations

from typing import Dict, Sequence, Tuple

from .errors import ResourceExceeded, StructureError


def is_variable_token(token: str) -> bool:
    return bool(token) and token[0].isupper()


class Slp:
    """An SLP: one production per variable, acyclic, with a start variable."""

    __slots__ = ("rhs", "start", "_order")

    def __init__(self, rhs: Dict[str, Sequence[str]], start: str):
        self.rhs = {var: tuple(body) for var, body in rhs.items()}
        self.start = start
        if start not in self.rhs:
            raise StructureError(f"start variable {start!r} has no production")
        for var in self.rhs:
            if not is_variable_token(var):
                raise StructureError(f"variable {var!r} must start uppercase")
        for var, body in self.rhs.items():
            for token in body:
                if is_variable_token(token) and token not in self.rhs:
                    raise StructureError(f"variable {token!r} in rhs({var}) has no production")
        self._order = self._toposort()

    def _toposort(self) -> Tuple[str, ...]:
        state: Dict[str, int] = {}
        order = []

        def visit(var, stack):
            mark = state.get(var)
            if mark == 2:
                return
            if mark == 1:
                raise StructureError(f"cycle through variable {var!r}")
            state[var] = 1
            stack.append(var)
            for token in self.rhs[var]:
                if is_variable_token(token):
                    visit(token, stack)
            stack.pop()
            state[var] = 2
            order.append(var)

        for var in self.rhs:
            visit(var, [])
        return tuple(order)

    @property
    def variables(self) -> Tuple[str, ...]:
        return tuple(self.rhs)

    def size(self) -> int:
        return sum(len(body) for body in self.rhs.values())

    def __repr__(self):
        return f"Slp(start={self.start}, size={self.size()}, vars={len(self.rhs)})"


def val_length(g: Slp) -> int:
    """|val(g)| by bottom-up accumulation, never expanding."""
    lengths: Dict[str, int] = {}
    for var in g._order:
        total = 0
        for token in g.rhs[var]:
            total += lengths[token] if is_variable_token(token) else 1
        lengths[var] = total
    return lengths[g.start]


def var_lengths(g: Slp) -> Dict[str, int]:
    lengths: Dict[str, int] = {}
    for var in g._order:
        lengths[var] = sum(
            lengths[t] if is_variable_token(t) else 1 for t in g.rhs[var]
        )
    return lengths


def expand_capped(g: Slp, cap: int) -> tuple:
    """val(g) as a letter tuple if its length fits the cap, else ResourceExceeded."""
    total = val_length(g)
    if total > cap:
        raise ResourceExceeded(total, cap)
    out = []
    stack = [iter(g.rhs[g.start])]
    while stack:
        it = stack[-1]
        token = next(it, None)
        if token is None:
            stack.pop()
        elif is_variable_token(token):
            stack.append(iter(g.rhs[token]))
        else:
            out.append(token)
    return tuple(out)


def expand(g: Slp) -> tuple:
    """Unbounded expansion; only for tests and tiny programs."""
    return expand_capped(g, val_length(g))


def _fresh_prefix(g: Slp, base: str) -> str:
    prefix = base
    while any(var.startswith(prefix) for var in g.rhs):
        prefix += "X"
    return prefix


def power_slp(g: Slp, k: int) -> Slp:
    """An SLP for val(g)^k using iterated squaring; adds O(log k) productions."""
    if k < 0:
        raise ValueError("power_slp takes natural exponents")
    prefix = _fresh_prefix(g, "Pow")
    rhs = dict(g.rhs)
    start = prefix + "S"
    if k == 0:
        rhs[start] = ()
        return Slp(rhs, start)
    squares = [g.start]
    for i in range(1, k.bit_length()):
        name = f"{prefix}{i}"
        rhs[name] = (squares[-1], squares[-1])
        squares.append(name)
    body = [squares[i] for i in range(k.bit_length()) if (k >> i) & 1]
    rhs[start] = tuple(body)
    return Slp(rhs, start)


def from_word(word: Sequence[str], start: str = "S") -> Slp:
    return Slp({start: tuple(word)}, start)


def compression_witness(n: int, letter: str = "a") -> Slp:
    """An SLP of size exactly 2n whose value has length exactly 2^n (n >= 1)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rhs = {"A1": (letter, letter)}
    for i in range(2, n + 1):
        rhs[f"A{i}"] = (f"A{i-1}", f"A{i-1}")
    return Slp(rhs, f"A{n}")
