"""Run CAOs to their steady state.

A step fires every allowed operator once. Under the default synchronous
scheduler all effects are computed from the step-start snapshot; the
sequential schedulers apply each effect before visiting the next operator,
so carries can cascade within a single step.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

from .model import CAO, Family, Multicardinal, Multinumber
from .operators import OperatorEffect, apply_effect, eval_operator, is_allowed

__all__ = [
    "Synchronous",
    "SequentialDeclared",
    "SequentialPermuted",
    "Scheduler",
    "SYNC",
    "parse_scheduler",
    "StepRecord",
    "Status",
    "RunResult",
    "NoOperatorAllowed",
    "InconclusiveRun",
    "step",
    "run",
    "reset",
    "multicardinal_of",
    "confluence_check",
    "DEFAULT_MAX_STEPS",
]

DEFAULT_MAX_STEPS = 10**6


@dataclass(frozen=True)
class Synchronous:
    def __str__(self):
        return "sync"


@dataclass(frozen=True)
class SequentialDeclared:
    def __str__(self):
        return "seq"


@dataclass(frozen=True)
class SequentialPermuted:
    seed: int

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    def order(self, count: int, tau: int) -> list[int]:
        # keyed on (seed, tau) so any step can be reproduced in isolation
        idx = list(range(count))
        random.Random(f"{self.seed}/{tau}").shuffle(idx)
        return idx

    def __str__(self):
        return f"perm:{self.seed}"


Scheduler = Union[Synchronous, SequentialDeclared, SequentialPermuted]
SYNC = Synchronous()


def parse_scheduler(text: str) -> Scheduler:
    """Parse ``sync``, ``seq`` or ``perm:SEED``."""
    if text == "sync":
        return Synchronous()
    if text == "seq":
        return SequentialDeclared()
    if text.startswith("perm:"):
        try:
            seed = int(text[5:])
        except ValueError:
            raise ValueError(f"bad permutation seed in {text!r}") from None
        return SequentialPermuted(seed)
    raise ValueError(f"unknown scheduler {text!r} (expected sync, seq or perm:SEED)")


@dataclass(frozen=True)
class StepRecord:
    tau: int
    fired: tuple[OperatorEffect, ...]
    cardinals_after: Mapping[str, int]


class Status(enum.Enum):
    TERMINATED = "terminated"
    BUDGET_EXHAUSTED = "budget-exhausted"


@dataclass(frozen=True)
class RunResult:
    final: Multinumber
    length: int
    status: Status
    scheduler: Scheduler = SYNC
    trace: tuple[StepRecord, ...] = field(default=(), repr=False)

    @property
    def final_multicardinal(self) -> Multicardinal:
        return self.final.multicardinal()

    @property
    def cardinals(self) -> Mapping[str, int]:
        return self.final.cardinals

    @property
    def terminated(self) -> bool:
        return self.status is Status.TERMINATED


class NoOperatorAllowed(RuntimeError):
    pass


class InconclusiveRun(RuntimeError):
    def __init__(self, result: RunResult):
        self.result = result
        super().__init__(f"run under {result.scheduler} exhausted its budget after {result.length} steps")


def _check_executable(cao: CAO) -> None:
    if not cao.is_executable():
        bad = [op.op_id for op in cao.operators if op.family is not Family.TRANSFORMING]
        raise ValueError(f"CAO {cao.name} contains non-transforming operators: {', '.join(bad)}")


def _fire(cao: CAO, cardinals: dict[str, int], scheduler: Scheduler, tau: int,
          candidates: Iterable[int] | None = None) -> list[OperatorEffect]:
    """Execute one step in place and return the effects, in firing order."""
    ops = cao.operators
    if isinstance(scheduler, Synchronous):
        idx = range(len(ops)) if candidates is None else candidates
        effects = [eval_operator(ops[i], cardinals) for i in idx if is_allowed(ops[i], cardinals)]
        for eff in effects:
            for e, v in zip(eff.operands, eff.new_operand_values):
                cardinals[e] = v
        for eff in effects:
            for e, q in zip(eff.images, eff.transformants):
                cardinals[e] += q
        return effects
    if isinstance(scheduler, SequentialPermuted):
        order = scheduler.order(len(ops), tau)
    else:
        order = range(len(ops))
    effects = []
    for i in order:
        op = ops[i]
        if is_allowed(op, cardinals):
            eff = eval_operator(op, cardinals)
            apply_effect(cardinals, eff)
            effects.append(eff)
    return effects


def step(cao: CAO, cardinals: Mapping[str, int], scheduler: Scheduler = SYNC,
         tau: int = 1) -> tuple[dict[str, int], StepRecord]:
    """One step from ``cardinals``; the input mapping is not modified."""
    _check_executable(cao)
    state = dict(cardinals)
    effects = _fire(cao, state, scheduler, tau)
    if not effects:
        raise NoOperatorAllowed(f"no operator allowed in {cao.name}")
    return state, StepRecord(tau, tuple(effects), dict(state))


def run(cao: CAO, scheduler: Scheduler = SYNC, max_steps: int = DEFAULT_MAX_STEPS,
        cardinals: Mapping[str, int] | None = None, *, keep_trace: bool = True) -> RunResult:
    """Iterate steps until no operator is allowed or ``max_steps`` steps were taken.

    Starts from ``cao.init`` unless ``cardinals`` is given. With
    ``keep_trace=False`` no StepRecords are stored (``length`` is still exact).
    """
    _check_executable(cao)
    if max_steps < 1:
        raise ValueError("max_steps must be at least 1")
    state = cao.initial_cardinals() if cardinals is None else dict(cardinals)
    ops = cao.operators
    consumer = cao.consumer
    sync = isinstance(scheduler, Synchronous)
    candidates: list[int] | None = None
    trace = []
    tau = 0
    status = Status.TERMINATED
    while True:
        if tau >= max_steps:
            # budget spent: only report exhaustion when something could still fire
            if any(is_allowed(op, state) for op in ops):
                status = Status.BUDGET_EXHAUSTED
            break
        effects = _fire(cao, state, scheduler, tau + 1, candidates)
        if not effects:
            break
        tau += 1
        if keep_trace:
            trace.append(StepRecord(tau, tuple(effects), dict(state)))
        if sync:
            # an operator whose operands were untouched this step stays blocked
            touched = set()
            for eff in effects:
                touched.update(eff.operands)
                touched.update(eff.images)
            candidates = sorted({consumer[e] for e in touched if e in consumer})
    return RunResult(Multinumber(cao, state, tau), tau, status, scheduler, tuple(trace))


def reset(cao: CAO) -> dict[str, int]:
    return dict.fromkeys(cao.keys, 0)


def multicardinal_of(cardinals: Mapping[str, int], tau: int = 0) -> Multicardinal:
    return Multicardinal.of(cardinals, tau)


def confluence_check(cao: CAO, schedulers: Sequence[Scheduler],
                     max_steps: int = DEFAULT_MAX_STEPS) -> tuple[bool, tuple[RunResult, RunResult] | None]:
    """Run under each scheduler; return (True, None) or (False, divergent pair).

    Raises ValueError for cyclic CAOs and `InconclusiveRun` if any run
    exhausts its budget.
    """
    from .topology import detect_cycles

    if detect_cycles(cao):
        raise ValueError(f"confluence is only guaranteed for acyclic CAOs; {cao.name} has cycles")
    results = []
    for sched in schedulers:
        res = run(cao, sched, max_steps, keep_trace=False)
        if not res.terminated:
            raise InconclusiveRun(res)
        results.append(res)
    for res in results[1:]:
        if dict(res.cardinals) != dict(results[0].cardinals):
            return False, (results[0], res)
    return True, None
