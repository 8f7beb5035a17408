"""Finite value domains for program variables.

A :class:`FiniteDomain` fixes, for every declared variable, the values an
initial state may take.  Validity claims over "all states" are checked by
enumerating the Cartesian product of these value lists.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property

from ahl.errors import CapExceeded, DomainError

INT = "int"
BOOL = "bool"
LIST = "list"

DEFAULT_STATE_CAP = 10**6


@dataclass(frozen=True)
class IntRange:
    lo: int
    hi: int
    sort = INT

    def __post_init__(self):
        if self.lo > self.hi:
            raise DomainError(f"empty integer range {self.lo}..{self.hi}")

    def values(self):
        return tuple(range(self.lo, self.hi + 1))

    def __str__(self):
        return f"{self.lo}..{self.hi}"


@dataclass(frozen=True)
class BoolDom:
    sort = BOOL

    def values(self):
        return (False, True)

    def __str__(self):
        return "bool"


@dataclass(frozen=True)
class ListDom:
    max_len: int
    elem: IntRange
    sort = LIST

    def __post_init__(self):
        if self.max_len < 0:
            raise DomainError("maxlen must be non-negative")

    def values(self):
        # by length, then lexicographic
        elems = self.elem.values()
        out = []
        for n in range(self.max_len + 1):
            out.extend(itertools.product(elems, repeat=n))
        return tuple(out)

    def __str__(self):
        return f"list(maxlen={self.max_len}, {self.elem})"


VarDomain = IntRange | BoolDom | ListDom


@dataclass(frozen=True)
class FiniteDomain:
    """Per-variable domains, in declaration order, plus a state cap."""

    vars: tuple
    state_cap: int = DEFAULT_STATE_CAP

    @classmethod
    def of(cls, mapping, state_cap=DEFAULT_STATE_CAP):
        return cls(tuple(mapping.items()), state_cap)

    def __post_init__(self):
        names = [n for n, _ in self.vars]
        if len(set(names)) != len(names):
            raise DomainError("variable declared twice in domain")
        if self.state_cap < 1:
            raise DomainError("state cap must be positive")

    @property
    def names(self):
        return tuple(n for n, _ in self.vars)

    def env(self):
        return {n: d.sort for n, d in self.vars}

    def __getitem__(self, name):
        for n, d in self.vars:
            if n == name:
                return d
        raise KeyError(name)

    @cached_property
    def value_lists(self):
        return tuple(d.values() for _, d in self.vars)

    @cached_property
    def size(self):
        return math.prod(len(v) for v in self.value_lists)

    def check_cap(self):
        if self.size > self.state_cap:
            raise CapExceeded(self.size, self.state_cap)

    def with_cap(self, cap):
        return FiniteDomain(self.vars, cap)

    @cached_property
    def _positions(self):
        return tuple({v: i for i, v in enumerate(vals)} for vals in self.value_lists)

    def index_of(self, state):
        """Position of ``state`` in enumeration order, or None if outside."""
        idx = 0
        for (name, _), vals, pos in zip(self.vars, self.value_lists, self._positions):
            v = state.get(name)
            i = pos.get(v) if _same_kind(v, vals) else None
            if i is None:
                return None
            idx = idx * len(vals) + i
        return idx

    def __str__(self):
        return ", ".join(f"{n} in {d}" for n, d in self.vars)


def _same_kind(v, vals):
    # keep True from matching 1 in an int range and vice versa
    if not vals:
        return False
    return type(v) is type(vals[0])
