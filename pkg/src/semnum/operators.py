"""Carry, remainder and transformant kernels.

Every form runs through the same multi-operand formulas: per-operand
partial carries, the common carry as their minimum, remainders computed
with that common carry, and one transformant ``p * r`` per image. L, D and
F are just the (1, 1), (1, v) and (w, 1) cases of M.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .model import Kind, OperatorKind, OperatorSpec

__all__ = [
    "KernelError",
    "OperatorEffect",
    "partial_carry",
    "remainder",
    "common_carry",
    "is_allowed",
    "eval_operator",
    "apply_effect",
]


class KernelError(ValueError):
    pass


@dataclass(frozen=True)
class OperatorEffect:
    op_id: str
    operands: tuple[str, ...]
    partial_carries: tuple[int, ...]
    common_carry: int
    new_operand_values: tuple[int, ...]
    images: tuple[str, ...]
    transformants: tuple[int, ...]

    @property
    def remainders(self) -> dict[str, int]:
        return dict(zip(self.operands, self.new_operand_values))

    @property
    def deposits(self) -> dict[str, int]:
        return dict(zip(self.images, self.transformants))


def partial_carry(kind: OperatorKind, N: int, n: int) -> int:
    tag = kind.tag
    if tag is Kind.RADIX_MULTIPLICITY:
        return N // n
    if tag is Kind.RADIX_EXCESS_VALUE:
        return N - n if N > n else 0
    if tag is Kind.RADIX_EXCESS_FACT:
        return 1 if N > n else 0
    p = kind.carry_hook(N, n)
    if isinstance(p, bool) or not isinstance(p, int) or p < 0:
        raise KernelError(f"invalid carry hook: {kind.hook_name}({N}, {n}) returned {p!r}")
    return p


def remainder(kind: OperatorKind, N: int, n: int, p: int) -> int:
    """Value left in an operand after ``p`` joint conversions."""
    tag = kind.tag
    if tag is Kind.RADIX_MULTIPLICITY:
        rem = N - p * n
        if rem < 0:
            raise KernelError(f"carry {p} exceeds {N} // {n}")
        return rem
    if tag is Kind.RADIX_EXCESS_VALUE:
        return 0
    rem = kind.remainder_hook(N, n)
    if isinstance(rem, bool) or not isinstance(rem, int) or rem < 0 or rem > N:
        raise KernelError(f"invalid remainder hook: {kind.hook_name or tag.value}({N}, {n}) returned {rem!r}")
    return rem


def common_carry(partial_carries: Sequence[int]) -> int:
    if not partial_carries:
        raise ValueError("common carry of an empty operand list")
    return min(partial_carries)


def _partials(op: OperatorSpec, cardinals: Mapping[str, int]) -> tuple[int, ...]:
    kind = op.kind
    if kind.tag is Kind.RADIX_MULTIPLICITY:
        return tuple(cardinals[e] // n for e, n in op.operands)
    return tuple(partial_carry(kind, cardinals[e], n) for e, n in op.operands)


def is_allowed(op: OperatorSpec, cardinals: Mapping[str, int]) -> bool:
    kind = op.kind
    if kind.tag is Kind.RADIX_MULTIPLICITY:
        for e, n in op.operands:
            if cardinals[e] < n:
                return False
        return True
    return min(_partials(op, cardinals)) >= 1


def eval_operator(op: OperatorSpec, cardinals: Mapping[str, int]) -> OperatorEffect:
    if len(op.operands) == 1 and op.kind.tag is Kind.RADIX_MULTIPLICITY:
        (e, n), = op.operands
        p, rem = divmod(cardinals[e], n)
        if p < 1:
            raise KernelError(f"operator not allowed: {op.op_id}")
        return OperatorEffect(
            op.op_id, op.operand_names, (p,), p, (rem,), op.image_names, tuple(p * r for _, r in op.images)
        )
    partials = _partials(op, cardinals)
    p = min(partials)
    if p < 1:
        raise KernelError(f"operator not allowed: {op.op_id}")
    kind = op.kind
    names = op.operand_names
    values = tuple(remainder(kind, cardinals[e], n, p) for e, n in op.operands)
    return OperatorEffect(
        op.op_id, names, partials, p, values, op.image_names, tuple(p * r for _, r in op.images)
    )


def apply_effect(cardinals: dict[str, int], effect: OperatorEffect) -> None:
    """Apply one effect in place: operands take their remainders, images receive transformants."""
    for e, v in zip(effect.operands, effect.new_operand_values):
        cardinals[e] = v
    for e, q in zip(effect.images, effect.transformants):
        cardinals[e] += q
