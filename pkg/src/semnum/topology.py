"""Static analyses over CAOs: roles, cycles, classification, conservation weights."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import networkx as nx

from .model import CAO, Family, Form, Kind

__all__ = [
    "Role",
    "Shape",
    "Variability",
    "ClassificationRecord",
    "WeightAssignment",
    "WeightError",
    "UnderdeterminedWeights",
    "InconsistentWeights",
    "dependency_graph",
    "classify_entities",
    "detect_cycles",
    "classify_sns",
    "check_weights",
    "derive_weights",
]


class Role(enum.Enum):
    INITIAL = "initial"
    INTERMEDIATE = "intermediate"
    FINAL = "final"
    DETACHED = "detached"


class Shape(enum.Enum):
    LINEAR = "linear"
    TREE = "tree-like"
    LATTICE = "lattice"
    CYCLIC = "cyclic"
    ARBITRARY = "arbitrary"


class Variability(enum.Enum):
    HOMOGENEOUS = "homogeneous"
    HETEROGENEOUS = "heterogeneous"


def dependency_graph(cao: CAO) -> nx.DiGraph:
    """Bipartite digraph: ("e", key) -> ("o", op_id) -> ("e", key)."""
    g = nx.DiGraph()
    g.add_nodes_from((("e", k) for k in cao.keys), kind="entity")
    for op in cao.operators:
        node = ("o", op.op_id)
        g.add_node(node, kind="operator")
        g.add_edges_from((("e", e), node) for e in op.operand_names)
        g.add_edges_from((node, ("e", e)) for e in op.image_names)
    return g


def classify_entities(cao: CAO) -> dict[str, Role]:
    has_out = {e for op in cao.operators for e in op.operand_names}
    has_in = {e for op in cao.operators for e in op.image_names}
    roles = {}
    for k in cao.keys:
        if k in has_out:
            roles[k] = Role.INTERMEDIATE if k in has_in else Role.INITIAL
        else:
            roles[k] = Role.FINAL if k in has_in else Role.DETACHED
    return roles


def detect_cycles(cao: CAO) -> list[list[str]]:
    """Elementary cycles as closed entity/operator paths, e.g. ``[i, a, j, b, i]``."""
    g = dependency_graph(cao)
    pos = {k: i for i, k in enumerate(cao.keys)}
    cycles = []
    for cyc in nx.simple_cycles(g):
        ents = [i for i, (t, _) in enumerate(cyc) if t == "e"]
        start = min(ents, key=lambda i: pos[cyc[i][1]])
        rot = cyc[start:] + cyc[:start]
        cycles.append([name for _, name in rot] + [rot[0][1]])
    cycles.sort(key=lambda c: (len(c), [pos.get(x, -1) for x in c[::2]]))
    return cycles


def _is_chain(cao: CAO) -> bool:
    if not all(op.form is Form.L for op in cao.operators):
        return False
    roles = classify_entities(cao)
    linked = [k for k, r in roles.items() if r is not Role.DETACHED]
    if not cao.operators:
        return True
    n_in = {}
    for op in cao.operators:
        for e in op.image_names:
            n_in[e] = n_in.get(e, 0) + 1
    if any(c > 1 for c in n_in.values()):
        return False
    starts = [k for k in linked if roles[k] is Role.INITIAL]
    return len(starts) == 1 and len(linked) == len(cao.operators) + 1


def _is_generated_lattice(cao: CAO) -> bool:
    from .classic import make_lattice

    linked = [k for k, r in classify_entities(cao).items() if r is not Role.DETACHED]
    size = len(linked)
    g = dependency_graph(cao)
    g.remove_nodes_from([("e", k) for k in cao.keys if k not in set(linked)])
    same_kind = nx.algorithms.isomorphism.categorical_node_match("kind", None)
    for rows in range(2, size // 2 + 1):
        if size % rows or size // rows < 2:
            continue
        ref = dependency_graph(make_lattice(rows, size // rows))
        if ref.number_of_nodes() == g.number_of_nodes() and nx.is_isomorphic(g, ref, node_match=same_kind):
            return True
    return False


def _shape(cao: CAO) -> Shape:
    if detect_cycles(cao):
        return Shape.CYCLIC
    if _is_chain(cao):
        return Shape.LINEAR
    if _is_generated_lattice(cao):
        return Shape.LATTICE
    inputs: dict[str, int] = {}
    for op in cao.operators:
        for e in op.image_names:
            inputs[e] = inputs.get(e, 0) + 1
    if all(c <= 1 for c in inputs.values()):
        return Shape.TREE
    return Shape.ARBITRARY


@dataclass(frozen=True)
class ClassificationRecord:
    name: str
    family_influence: Family
    uncertainty: str
    topology_shape: Shape
    variability: Variability
    kind_label: str
    radices: tuple[int, ...]
    rates: tuple[int, ...]

    DEFAULTS = {
        "influence": "transforming",
        "uncertainty": "deterministic",
        "topology": "linear",
        "variability": "homogeneous",
        "kind": "radix-multiplicity",
    }

    def features(self) -> dict[str, str]:
        return {
            "influence": self.family_influence.value,
            "uncertainty": self.uncertainty,
            "topology": self.topology_shape.value,
            "variability": self.variability.value,
            "kind": self.kind_label,
        }

    def parameters(self) -> str:
        """``radix 10``, ``radices 2,3,4``, plus rates when any differs from one."""
        parts = []
        if self.radices:
            word = "radix" if len(self.radices) == 1 else "radices"
            parts.append(f"{word} {','.join(map(str, self.radices))}")
        if self.rates and self.rates != (1,):
            word = "rate" if len(self.rates) == 1 else "rates"
            parts.append(f"{word} {','.join(map(str, self.rates))}")
        return ", ".join(parts)

    def summary(self) -> str:
        text = ", ".join(self.features().values())
        params = self.parameters()
        return f"{text}; {params}" if params else text


def classify_sns(cao: CAO) -> ClassificationRecord:
    ops = cao.operators
    families = {op.family for op in ops}
    if len(families) > 1:
        family = Family.COMPLEX
    else:
        family = families.pop() if families else Family.TRANSFORMING
    kinds = {op.kind.tag for op in ops}
    if len(kinds) > 1:
        kind_label = "mixed"
    else:
        kind_label = (kinds.pop() if kinds else Kind.RADIX_MULTIPLICITY).value
    params = {(frozenset(op.radices), frozenset(op.rates)) for op in ops}
    variability = Variability.HOMOGENEOUS if len(params) <= 1 else Variability.HETEROGENEOUS
    radices = tuple(dict.fromkeys(n for op in ops for n in op.radices))
    rates = tuple(dict.fromkeys(r for op in ops for r in op.rates))
    return ClassificationRecord(
        cao.name, family, "deterministic", _shape(cao), variability, kind_label, radices, rates
    )


@dataclass(frozen=True)
class WeightAssignment:
    """Positive exact weights making every radix-multiplicity operator value-neutral."""

    weights: Mapping[str, Fraction]

    def __getitem__(self, key: str) -> Fraction:
        return self.weights[key]

    def value(self, cardinals: Mapping[str, int]) -> Fraction:
        return sum((self.weights[k] * v for k, v in cardinals.items()), Fraction(0))

    def integral(self) -> dict[str, int]:
        """The same assignment scaled by the common denominator."""
        den = math.lcm(*(w.denominator for w in self.weights.values()))
        return {k: int(w * den) for k, w in self.weights.items()}


class WeightError(ValueError):
    pass


class UnderdeterminedWeights(WeightError):
    pass


class InconsistentWeights(WeightError):
    pass


def check_weights(cao: CAO, weights: WeightAssignment | Mapping[str, Fraction]) -> tuple[bool, dict[str, Fraction]]:
    """Residual per radix-multiplicity operator: deposited value minus consumed value."""
    w = weights.weights if isinstance(weights, WeightAssignment) else weights
    missing = [k for k in cao.keys if k not in w]
    if missing:
        raise KeyError(f"missing weight for {', '.join(missing)}")
    residuals = {}
    for op in cao.operators:
        if op.kind.tag is not Kind.RADIX_MULTIPLICITY or op.family is not Family.TRANSFORMING:
            continue
        gained = sum((Fraction(w[e]) * r for e, r in op.images), Fraction(0))
        spent = sum((Fraction(w[e]) * n for e, n in op.operands), Fraction(0))
        residuals[op.op_id] = gained - spent
    return all(r == 0 for r in residuals.values()), residuals


def derive_weights(cao: CAO) -> WeightAssignment:
    """Seed initial entities with 1 and propagate forward in topological order."""
    if detect_cycles(cao):
        raise ValueError(f"cannot derive weights for cyclic CAO {cao.name}")
    roles = classify_entities(cao)
    w: dict[str, Fraction] = {
        k: Fraction(1) for k, r in roles.items() if r in (Role.INITIAL, Role.DETACHED)
    }
    by_id = {op.op_id: op for op in cao.operators}
    for t, name in nx.topological_sort(dependency_graph(cao)):
        if t != "o":
            continue
        op = by_id[name]
        unknown_in = [e for e in op.operand_names if e not in w]
        if unknown_in:
            raise UnderdeterminedWeights(
                f"operator {name}: operand weight of {', '.join(unknown_in)} is not determined")
        spent = sum((w[e] * n for e, n in op.operands), Fraction(0))
        known = sum((w[e] * r for e, r in op.images if e in w), Fraction(0))
        free = [(e, r) for e, r in op.images if e not in w and r > 0]
        if len(free) > 1:
            raise UnderdeterminedWeights(
                f"operator {name}: one equation for {len(free)} unknown weights ({', '.join(e for e, _ in free)})")
        if not free:
            if known != spent:
                raise InconsistentWeights(
                    f"operator {name}: images carry weight {known} but operands supply {spent}")
            continue
        e, r = free[0]
        value = (spent - known) / r
        if value <= 0:
            raise InconsistentWeights(f"operator {name}: entity {e} would need non-positive weight {value}")
        w[e] = value
    undetermined = [k for k in cao.keys if k not in w]
    if undetermined:
        raise UnderdeterminedWeights(f"weights of {', '.join(undetermined)} are not determined")
    return WeightAssignment({k: w[k] for k in cao.keys})
