"""Domain types shared by every module: entities, operators, CAOs, snapshots.

Cardinals are plain Python ints (arbitrary precision, never negative).
Entities are addressed everywhere by their string key; see `EntityName.key`.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Callable, Iterable, Mapping, Union

__all__ = [
    "EntityName",
    "CardinalAbstractEntity",
    "Kind",
    "OperatorKind",
    "RADIX_MULTIPLICITY",
    "RADIX_EXCESS_VALUE",
    "RADIX_EXCESS_FACT",
    "Form",
    "Family",
    "OperatorSpec",
    "CAO",
    "Violation",
    "CAOValidationError",
    "Multicardinal",
    "Multinumber",
    "new_cao",
    "validate_cao",
    "check_cardinal",
]


def check_cardinal(value: object, what: str = "cardinal") -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise TypeError(f"{what} must be an int, got {type(value).__name__}")
    if value < 0:
        raise ValueError(f"{what} must be non-negative, got {value}")
    return value


@dataclass(frozen=True, order=True)
class EntityName:
    """Elementary (``i``) or composite (``i[0,1]``) entity name."""

    id: str
    coords: tuple[Union[str, int], ...] = ()

    def __post_init__(self):
        if not self.id:
            raise ValueError("entity id must be non-empty")
        if not isinstance(self.coords, tuple):
            object.__setattr__(self, "coords", tuple(self.coords))

    @property
    def key(self) -> str:
        if not self.coords:
            return self.id
        return f"{self.id}[{','.join(str(c) for c in self.coords)}]"

    def __str__(self):
        return self.key


NameLike = Union[EntityName, str]


def _as_name(name: NameLike) -> EntityName:
    return name if isinstance(name, EntityName) else EntityName(name)


def _as_key(name: NameLike) -> str:
    return name.key if isinstance(name, EntityName) else name


@dataclass(frozen=True)
class CardinalAbstractEntity:
    name: EntityName
    cardinal: int = 0

    def __post_init__(self):
        check_cardinal(self.cardinal)


class Kind(enum.Enum):
    RADIX_MULTIPLICITY = "radix-multiplicity"
    RADIX_EXCESS_VALUE = "radix-excess-value"
    RADIX_EXCESS_FACT = "radix-excess-fact"
    ARBITRARY_FUNCTION = "arbitrary-function"


def default_fact_remainder(N: int, n: int) -> int:
    """Cap the operand at its threshold (only reached when N > n)."""
    return min(N, n)


Hook = Callable[[int, int], int]


@dataclass(frozen=True)
class OperatorKind:
    """Carry/remainder rule of an operator.

    ``carry_hook`` is used by ARBITRARY_FUNCTION only; ``remainder_hook`` by
    RADIX_EXCESS_FACT and ARBITRARY_FUNCTION. Hooks take ``(N, n)``.
    ``hook_name`` is what the DSL prints after ``fn``.
    """

    tag: Kind
    carry_hook: Hook | None = None
    remainder_hook: Hook | None = None
    hook_name: str | None = None

    def __post_init__(self):
        if self.tag is Kind.ARBITRARY_FUNCTION:
            if self.carry_hook is None or self.remainder_hook is None:
                raise ValueError("arbitrary-function kind needs carry and remainder hooks")
        elif self.tag is Kind.RADIX_EXCESS_FACT:
            if self.remainder_hook is None:
                object.__setattr__(self, "remainder_hook", default_fact_remainder)
        elif self.carry_hook is not None or self.remainder_hook is not None:
            raise ValueError(f"{self.tag.value} kind takes no hooks")

    @classmethod
    def function(cls, name: str, carry: Hook, remainder: Hook) -> "OperatorKind":
        return cls(Kind.ARBITRARY_FUNCTION, carry, remainder, name)

    @property
    def is_default(self) -> bool:
        return self.tag is Kind.RADIX_MULTIPLICITY


RADIX_MULTIPLICITY = OperatorKind(Kind.RADIX_MULTIPLICITY)
RADIX_EXCESS_VALUE = OperatorKind(Kind.RADIX_EXCESS_VALUE)
RADIX_EXCESS_FACT = OperatorKind(Kind.RADIX_EXCESS_FACT)


class Form(enum.Enum):
    L = "L"
    D = "D"
    F = "F"
    M = "M"
    ASSIGN = "A"
    ZERO = "Z"

    def valence_error(self, w: int, v: int) -> str | None:
        """Message describing why (w, v) does not fit this form, or None."""
        if self is Form.L and (w, v) != (1, 1):
            return "form L requires exactly one operand and one image"
        if self is Form.D and (w != 1 or v < 2):
            return "form D requires exactly one operand and at least two images"
        if self is Form.F and (w < 2 or v != 1):
            return "form F requires at least two operands and exactly one image"
        if self in (Form.ASSIGN, Form.ZERO):
            return f"form {self.value} is an initialization directive, not a step operator"
        return None


class Family(enum.Enum):
    TRANSFORMING = "transforming"
    PRESERVING = "preserving"
    COMPLEX = "complex"


@dataclass(frozen=True)
class OperatorSpec:
    """One operator: ``operands`` are (entity, radix) pairs, ``images`` (entity, rate)."""

    op_id: str
    form: Form
    operands: tuple[tuple[str, int], ...]
    images: tuple[tuple[str, int], ...]
    kind: OperatorKind = RADIX_MULTIPLICITY
    family: Family = Family.TRANSFORMING

    def __post_init__(self):
        object.__setattr__(
            self, "operands", tuple((_as_key(e), n) for e, n in self.operands)
        )
        object.__setattr__(self, "images", tuple((_as_key(e), r) for e, r in self.images))
        if isinstance(self.form, str):
            object.__setattr__(self, "form", Form(self.form))

    @property
    def valence(self) -> tuple[int, int]:
        return len(self.operands), len(self.images)

    @cached_property
    def radices(self) -> tuple[int, ...]:
        return tuple(n for _, n in self.operands)

    @cached_property
    def rates(self) -> tuple[int, ...]:
        return tuple(r for _, r in self.images)

    @cached_property
    def operand_names(self) -> tuple[str, ...]:
        return tuple(e for e, _ in self.operands)

    @cached_property
    def image_names(self) -> tuple[str, ...]:
        return tuple(e for e, _ in self.images)

    def as_mixed(self) -> "OperatorSpec":
        """The same operator written as an M-form."""
        return replace(self, form=Form.M)

    def violations(self) -> list["Violation"]:
        out = []
        w, v = self.valence
        if w < 1:
            out.append(Violation("valence", f"operator {self.op_id} has no operands", op_id=self.op_id))
        if v < 1:
            out.append(Violation("valence", f"operator {self.op_id} has no images", op_id=self.op_id))
        msg = self.form.valence_error(w, v)
        if msg and w >= 1 and v >= 1:
            out.append(Violation("form", f"operator {self.op_id}: {msg}", op_id=self.op_id))
        for e, n in self.operands:
            if isinstance(n, bool) or not isinstance(n, int) or n < 1:
                out.append(Violation(
                    "radix", f"operator {self.op_id}: radix of {e} must be a positive integer, got {n}",
                    entity=e, op_id=self.op_id))
        for e, r in self.images:
            if isinstance(r, bool) or not isinstance(r, int) or r < 0:
                out.append(Violation(
                    "rate", f"operator {self.op_id}: rate of {e} must be a non-negative integer, got {r}",
                    entity=e, op_id=self.op_id))
        if v >= 1 and all(isinstance(r, int) and r <= 0 for _, r in self.images):
            out.append(Violation("rate", f"operator {self.op_id}: every image rate is zero", op_id=self.op_id))
        for label, names in (("operand", self.operand_names), ("image", self.image_names)):
            if len(set(names)) == len(names):
                continue
            for e, c in Counter(names).items():
                if c > 1:
                    out.append(Violation(
                        "duplicate", f"operator {self.op_id}: {label} {e} listed {c} times",
                        entity=e, op_id=self.op_id))
        for e in sorted(set(self.operand_names).intersection(self.image_names)):
            out.append(Violation(
                "overlap", f"operator {self.op_id}: entity {e} is both operand and image",
                entity=e, op_id=self.op_id))
        return out


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    entity: str | None = None
    op_id: str | None = None

    def __str__(self):
        return self.message


class CAOValidationError(ValueError):
    def __init__(self, violations: list[Violation]):
        self.violations = list(violations)
        super().__init__("; ".join(v.message for v in self.violations))


@dataclass(frozen=True)
class CAO:
    """Entities wired by operators, plus the initial assignment.

    Build through `new_cao`, which validates. ``init`` holds (key, value)
    pairs in entity declaration order; unlisted entities start at zero.
    """

    name: str
    entities: tuple[EntityName, ...]
    operators: tuple[OperatorSpec, ...]
    init: tuple[tuple[str, int], ...] = ()

    @cached_property
    def keys(self) -> tuple[str, ...]:
        return tuple(e.key for e in self.entities)

    @property
    def init_map(self) -> dict[str, int]:
        return dict(self.init)

    def initial_cardinals(self) -> dict[str, int]:
        cardinals = dict.fromkeys(self.keys, 0)
        cardinals.update(self.init)
        return cardinals

    @property
    def caes(self) -> tuple[CardinalAbstractEntity, ...]:
        init = self.init_map
        return tuple(CardinalAbstractEntity(e, init.get(e.key, 0)) for e in self.entities)

    @cached_property
    def consumer(self) -> dict[str, int]:
        """Entity key -> index of the (single) operator it feeds."""
        out = {}
        for i, op in enumerate(self.operators):
            for e in op.operand_names:
                out.setdefault(e, i)
        return out

    def operator(self, op_id: str) -> OperatorSpec:
        for op in self.operators:
            if op.op_id == op_id:
                return op
        raise KeyError(op_id)

    def with_init(self, init: Mapping[str, int]) -> "CAO":
        """Same wiring, new initial assignment (only the assignment is re-validated)."""
        order = {k: i for i, k in enumerate(self.keys)}
        pairs = sorted(init.items(), key=lambda kv: order.get(kv[0], len(order)))
        cao = replace(self, init=tuple(pairs))
        problems = _init_violations(cao, set(order))
        if problems:
            raise CAOValidationError(problems)
        return cao

    def is_executable(self) -> bool:
        return all(op.family is Family.TRANSFORMING for op in self.operators)


def validate_cao(cao: CAO, executable: bool = True) -> list[Violation]:
    out: list[Violation] = []
    keys = [e.key for e in cao.entities]
    for k, c in Counter(keys).items():
        if c > 1:
            out.append(Violation("duplicate-entity", f"duplicate entity {k}", entity=k))
    known = set(keys)
    for k, c in Counter(op.op_id for op in cao.operators).items():
        if c > 1:
            out.append(Violation("duplicate-operator", f"duplicate operator id {k}", op_id=k))
    feeds: dict[str, list[str]] = {}
    for op in cao.operators:
        out.extend(op.violations())
        for e in (*op.operand_names, *op.image_names):
            if e not in known:
                out.append(Violation("unknown-entity", f"unknown entity {e}", entity=e, op_id=op.op_id))
        for e in dict.fromkeys(op.operand_names):
            feeds.setdefault(e, []).append(op.op_id)
        if executable and op.family is not Family.TRANSFORMING:
            out.append(Violation(
                "family", f"operator {op.op_id} is {op.family.value}; only transforming operators are executable",
                op_id=op.op_id))
    for e, ops in feeds.items():
        if len(ops) > 1:
            out.append(Violation(
                "single-output",
                f"single-output constraint violated: entity {e} has two outputs ({', '.join(ops)})",
                entity=e, op_id=ops[1]))
    out.extend(_init_violations(cao, known))
    return out


def _init_violations(cao: CAO, known: set[str]) -> list[Violation]:
    out = []
    seen = set()
    for k, v in cao.init:
        if k not in known:
            out.append(Violation("unknown-entity", f"unknown entity {k} in init", entity=k))
        if k in seen:
            out.append(Violation("duplicate-init", f"entity {k} initialized twice", entity=k))
        seen.add(k)
        if isinstance(v, bool) or not isinstance(v, int) or v < 0:
            out.append(Violation("cardinal", f"initial cardinal of {k} must be a non-negative integer", entity=k))
    return out


def new_cao(
    name: str,
    entities: Iterable[NameLike],
    operators: Iterable[OperatorSpec],
    init: Mapping[str, int] | Iterable[tuple[str, int]] | None = None,
    *,
    executable: bool = True,
) -> CAO:
    """Build and validate a CAO; raises `CAOValidationError` listing every violation."""
    ents = tuple(_as_name(e) for e in entities)
    pairs = list(init.items() if isinstance(init, Mapping) else (init or ()))
    pairs = [(_as_key(k), v) for k, v in pairs]
    order = {e.key: i for i, e in enumerate(ents)}
    # canonical order: declaration order, unknown names last (they are errors anyway)
    pairs.sort(key=lambda kv: order.get(kv[0], len(order)))
    cao = CAO(name, ents, tuple(operators), tuple(pairs))
    problems = validate_cao(cao, executable=executable)
    if not name:
        problems.insert(0, Violation("name", "CAO name must be non-empty"))
    if problems:
        raise CAOValidationError(problems)
    return cao


@dataclass(frozen=True)
class Multicardinal:
    """The order-free multiset of cardinals at step ``step``."""

    values: tuple[int, ...]
    named: Mapping[str, int] = field(compare=False)
    step: int = 0

    @classmethod
    def of(cls, cardinals: Mapping[str, int], step: int = 0) -> "Multicardinal":
        return cls(tuple(sorted(cardinals.values())), dict(cardinals), step)

    @property
    def counts(self) -> Counter:
        return Counter(self.values)


@dataclass(frozen=True)
class Multinumber:
    """Structured snapshot: the CAO together with its cardinals at ``step``."""

    cao: CAO
    cardinals: Mapping[str, int]
    step: int = 0

    def __getitem__(self, key: NameLike) -> int:
        return self.cardinals[_as_key(key)]

    def multicardinal(self) -> Multicardinal:
        return Multicardinal.of(self.cardinals, self.step)
