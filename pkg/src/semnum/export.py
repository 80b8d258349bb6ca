"""JSON trace documents and Graphviz DOT rendering."""

from __future__ import annotations

import json
from typing import Any, Mapping

from .engine import RunResult, Synchronous
from .model import CAO, Kind, OperatorKind

__all__ = ["trace_document", "write_trace", "replay_trace", "to_dot", "kind_symbol"]


def _ints(mapping: Mapping[str, int]) -> dict[str, str]:
    return {k: str(v) for k, v in mapping.items()}


def trace_document(result: RunResult) -> dict[str, Any]:
    """JSON-ready image of a run; cardinals and carries are decimal strings."""
    cao = result.final.cao
    steps = []
    for rec in result.trace:
        fired = [
            {
                "op_id": eff.op_id,
                "partial_carries": _ints(dict(zip(eff.operands, eff.partial_carries))),
                "common_carry": str(eff.common_carry),
                "remainders": _ints(eff.remainders),
                "transformants": _ints(eff.deposits),
            }
            for eff in rec.fired
        ]
        steps.append({"tau": rec.tau, "fired": fired, "cardinals_after": _ints(rec.cardinals_after)})
    return {
        "cao": cao.name,
        "scheduler": str(result.scheduler),
        "status": result.status.value,
        "length": result.length,
        "steps": steps,
        "final_multicardinal": [str(v) for v in result.final_multicardinal.values],
    }


def write_trace(result: RunResult, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(trace_document(result), fh, indent=1, ensure_ascii=False)
        fh.write("\n")


def replay_trace(doc: Mapping[str, Any], cao: CAO) -> dict[str, int]:
    """Re-apply every recorded effect from ``cao.init``; checks each recorded step."""
    state = cao.initial_cardinals()
    sync = doc["scheduler"] == str(Synchronous())
    for step in doc["steps"]:
        fired = step["fired"]
        if sync:
            for eff in fired:
                state.update({k: int(v) for k, v in eff["remainders"].items()})
            for eff in fired:
                for k, q in eff["transformants"].items():
                    state[k] += int(q)
        else:
            for eff in fired:
                state.update({k: int(v) for k, v in eff["remainders"].items()})
                for k, q in eff["transformants"].items():
                    state[k] += int(q)
        recorded = {k: int(v) for k, v in step["cardinals_after"].items()}
        if recorded != state:
            raise ValueError(f"trace diverges at step {step['tau']}")
    return state


def kind_symbol(kind: OperatorKind) -> str:
    return {
        Kind.RADIX_MULTIPLICITY: "#",
        Kind.RADIX_EXCESS_VALUE: "delta",
        Kind.RADIX_EXCESS_FACT: "fact",
    }.get(kind.tag) or f"fn {kind.hook_name}"


def _q(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(cao: CAO, cardinals: Mapping[str, int] | None = None) -> str:
    """Entities as ellipses labelled ``name:N``, operators as boxes labelled ``form kind``."""
    values = cao.initial_cardinals() if cardinals is None else cardinals
    lines = [f"digraph {_q(cao.name)} {{", "  rankdir=LR;"]
    for k in cao.keys:
        lines.append(f"  {_q('e:' + k)} [shape=ellipse, label={_q(f'{k}:{values[k]}')}];")
    for op in cao.operators:
        label = f"{op.form.value} {kind_symbol(op.kind)}"
        lines.append(f"  {_q('op:' + op.op_id)} [shape=box, label={_q(label)}];")
    for op in cao.operators:
        node = _q("op:" + op.op_id)
        for e, n in op.operands:
            lines.append(f"  {_q('e:' + e)} -> {node} [label={_q(f'/{n}')}];")
        for e, r in op.images:
            lines.append(f"  {node} -> {_q('e:' + e)} [label={_q(f'*{r}')}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
