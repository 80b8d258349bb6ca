"""Constructors for standard CAO shapes and their link to positional numeration.

A chain ``c0 -/n0-> c1 -/n1-> ...`` with unit rates is ordinary mixed-radix
notation with the digits read low to high; rates other than one give
rational bases (n/r).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from typing import Sequence

from .engine import SYNC, run
from .model import CAO, Form, OperatorSpec, new_cao
from .topology import derive_weights

__all__ = [
    "ChainSpec",
    "make_chain",
    "make_fan_out",
    "make_fan_in",
    "make_mixed",
    "make_lattice",
    "encode",
    "decode",
    "oracle_digits",
    "width_for",
]


@dataclass(frozen=True)
class ChainSpec:
    width: int
    radices: tuple[int, ...]
    rates: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "radices", tuple(self.radices))
        rates = (1,) * len(self.radices) if self.rates is None else tuple(self.rates)
        object.__setattr__(self, "rates", rates)
        if self.width < 1:
            raise ValueError("chain width must be positive")
        if len(self.radices) != self.width - 1:
            raise ValueError(f"a chain of width {self.width} needs {self.width - 1} radices, got {len(self.radices)}")
        if len(self.rates) != self.width - 1:
            raise ValueError(f"a chain of width {self.width} needs {self.width - 1} rates, got {len(self.rates)}")
        if any(n < 1 for n in self.radices):
            raise ValueError("radices must be positive")
        if any(r < 0 for r in self.rates):
            raise ValueError("rates must be non-negative")

    @classmethod
    def uniform(cls, width: int, radix: int, rate: int = 1) -> "ChainSpec":
        return cls(width, (radix,) * (width - 1), (rate,) * (width - 1))


@lru_cache(maxsize=512)
def make_chain(spec: ChainSpec, name: str = "chain") -> CAO:
    ents = [f"c{k}" for k in range(spec.width)]
    ops = [
        OperatorSpec(f"L{k}", Form.L, ((ents[k], n),), ((ents[k + 1], r),))
        for k, (n, r) in enumerate(zip(spec.radices, spec.rates))
    ]
    return new_cao(name, ents, ops)


def make_mixed(w: int, v: int, radices: Sequence[int], rates: Sequence[int],
               name: str = "mixed", form: Form = Form.M) -> CAO:
    """One operator from ``u0..u(w-1)`` to ``v0..v(v-1)``."""
    if len(radices) != w or len(rates) != v:
        raise ValueError(f"need {w} radices and {v} rates")
    ins = [f"u{k}" for k in range(w)]
    outs = [f"v{k}" for k in range(v)]
    op = OperatorSpec(form.value, form, tuple(zip(ins, radices)), tuple(zip(outs, rates)))
    return new_cao(name, ins + outs, [op])


def make_fan_out(radix: int, rates: Sequence[int], name: str = "fan_out") -> CAO:
    return make_mixed(1, len(rates), [radix], rates, name, Form.D)


def make_fan_in(radices: Sequence[int], rate: int = 1, name: str = "fan_in") -> CAO:
    return make_mixed(len(radices), 1, radices, [rate], name, Form.F)


def make_lattice(rows: int, cols: int, radix: int = 2, rate: int = 1, name: str = "lattice") -> CAO:
    """A rows x cols grid; every cell feeds its right and lower neighbours.

    Interior cells use a D operator, the last row and column use L, and the
    bottom-right cell is final.
    """
    if rows < 1 or cols < 1:
        raise ValueError("lattice dimensions must be positive")
    cell = "g{}_{}".format
    ents = [cell(i, j) for i in range(rows) for j in range(cols)]
    ops = []
    for i in range(rows):
        for j in range(cols):
            nbrs = []
            if j + 1 < cols:
                nbrs.append((cell(i, j + 1), rate))
            if i + 1 < rows:
                nbrs.append((cell(i + 1, j), rate))
            if nbrs:
                form = Form.D if len(nbrs) == 2 else Form.L
                ops.append(OperatorSpec(f"op{i}_{j}", form, ((cell(i, j), radix),), tuple(nbrs)))
    return new_cao(name, ents, ops)


def encode(value: int, spec: ChainSpec) -> tuple[int, ...]:
    """Digits of ``value`` (low to high) as the fixpoint of the chain seeded at ``c0``."""
    if value < 0:
        raise ValueError("only non-negative values can be encoded")
    cao = make_chain(spec).with_init({"c0": value})
    res = run(cao, SYNC, keep_trace=False)
    return tuple(res.cardinals[k] for k in cao.keys)


def decode(digits: Sequence[int], spec: ChainSpec) -> Fraction:
    if len(digits) != spec.width:
        raise ValueError(f"expected {spec.width} digits, got {len(digits)}")
    weights = derive_weights(make_chain(spec))
    return sum((weights[f"c{k}"] * d for k, d in enumerate(digits)), Fraction(0))


def oracle_digits(value: int, radices: Sequence[int]) -> tuple[int, ...]:
    """Textbook mixed-radix digits via repeated divmod; the last digit absorbs the rest."""
    digits = []
    for n in radices:
        if n < 1:
            raise ValueError("radices must be positive")
        value, d = divmod(value, n)
        digits.append(d)
    digits.append(value)
    return tuple(digits)


def width_for(value: int, radix: int) -> int:
    """Smallest unit-rate chain width whose last digit stays below ``radix``."""
    if radix < 2:
        raise ValueError("width_for needs a radix of at least 2")
    width = 1
    while value >= radix:
        value //= radix
        width += 1
    return width
