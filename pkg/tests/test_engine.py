import random

import pytest
from hypothesis import given, settings, strategies as st

from semnum.classic import ChainSpec, make_chain
from semnum.engine import (
    InconclusiveRun,
    NoOperatorAllowed,
    SequentialDeclared,
    SequentialPermuted,
    Status,
    Synchronous,
    confluence_check,
    multicardinal_of,
    parse_scheduler,
    reset,
    run,
    step,
)
from semnum.model import Family, Form, OperatorSpec, RADIX_EXCESS_VALUE, new_cao
from semnum.operators import is_allowed
from semnum.scenarios import load_scenario

from cao_gen import ALL_BUILTIN_KINDS, random_cao, random_init, unit_firing_fixpoint

SCHEDULERS = [Synchronous(), SequentialDeclared()] + [SequentialPermuted(s) for s in range(5)]


def decimal():
    return load_scenario("decimal")


def test_sync_step():
    cao = decimal()
    state, rec = step(cao, {"c0": 234, "c1": 0, "c2": 0})
    assert state == {"c0": 4, "c1": 23, "c2": 0}
    assert [e.op_id for e in rec.fired] == ["a"]
    assert rec.cardinals_after == state


def test_sequential_step_cascades():
    state, rec = step(decimal(), {"c0": 234, "c1": 0, "c2": 0}, SequentialDeclared())
    assert state == {"c0": 4, "c1": 3, "c2": 2}
    assert [e.op_id for e in rec.fired] == ["a", "b"]


def test_step_requires_allowed_operator():
    with pytest.raises(NoOperatorAllowed):
        step(decimal(), {"c0": 0, "c1": 0, "c2": 0})


def test_step_does_not_mutate_input():
    start = {"c0": 234, "c1": 0, "c2": 0}
    step(decimal(), start)
    assert start == {"c0": 234, "c1": 0, "c2": 0}


def test_run_decimal():
    res = run(decimal())
    assert dict(res.cardinals) == {"c0": 4, "c1": 3, "c2": 2}
    assert res.length == 2 == len(res.trace)
    assert res.status is Status.TERMINATED
    assert res.final_multicardinal.values == (2, 3, 4)


def test_run_rational_base():
    res = run(load_scenario("rational"))
    assert tuple(res.cardinals.values()) == (1, 0, 1, 2)
    assert res.length == 3


def test_run_from_zero():
    cao = decimal().with_init({})
    res = run(cao)
    assert res.length == 0 and res.trace == () and res.terminated
    assert res.final_multicardinal == multicardinal_of(cao.initial_cardinals(), 0)


def test_budget_exhaustion():
    res = run(decimal(), max_steps=1)
    assert res.status is Status.BUDGET_EXHAUSTED
    assert dict(res.cardinals) == {"c0": 4, "c1": 23, "c2": 0}
    loop = run(load_scenario("loop"), max_steps=50)
    assert loop.status is Status.BUDGET_EXHAUSTED and loop.length == 50
    assert sum(loop.cardinals.values()) == 4


def test_exact_budget_is_terminated():
    res = run(decimal(), max_steps=2)
    assert res.status is Status.TERMINATED and res.length == 2


def test_bad_max_steps():
    with pytest.raises(ValueError):
        run(decimal(), max_steps=0)


def test_non_transforming_rejected():
    op = OperatorSpec("a", Form.L, (("i", 2),), (("j", 1),), family=Family.PRESERVING)
    cao = new_cao("p", ["i", "j"], [op], {"i": 5}, executable=False)
    with pytest.raises(ValueError):
        run(cao)


def test_reset():
    assert reset(decimal()) == {"c0": 0, "c1": 0, "c2": 0}
    assert reset(new_cao("empty", [], [])) == {}
    cao = decimal()
    assert run(cao, cardinals=reset(cao)).length == 0


def test_multicardinal_of():
    mc = multicardinal_of({"c0": 4, "c1": 3, "c2": 2}, 2)
    assert mc.values == (2, 3, 4) and mc.step == 2
    assert multicardinal_of({"i": 7, "j": 7}).values == (7, 7)
    assert multicardinal_of({"x": 2, "y": 3}) == multicardinal_of({"y": 2, "x": 3})


def test_parse_scheduler():
    assert parse_scheduler("sync") == Synchronous()
    assert parse_scheduler("seq") == SequentialDeclared()
    assert parse_scheduler("perm:7") == SequentialPermuted(7)
    for bad in ("perm:x", "fast", "perm:-1"):
        with pytest.raises(ValueError):
            parse_scheduler(bad)
    with pytest.raises(ValueError):
        SequentialPermuted(2**64)


def test_permutation_is_seed_determined():
    s = SequentialPermuted(7)
    assert s.order(8, 3) == SequentialPermuted(7).order(8, 3)
    assert sorted(s.order(8, 3)) == list(range(8))
    assert any(SequentialPermuted(k).order(8, 1) != s.order(8, 1) for k in range(1, 5))


def test_confluence_decimal():
    ok, witness = confluence_check(decimal(), [Synchronous(), SequentialDeclared(), SequentialPermuted(7)])
    assert ok and witness is None


def test_confluence_layered():
    base = load_scenario("layered")
    rng = random.Random(11)
    for _ in range(20):
        cao = base.with_init({"i": rng.randint(0, 5000), "j": rng.randint(0, 5000)})
        assert confluence_check(cao, SCHEDULERS)[0]


def test_confluence_rejects_cycles_and_budget():
    with pytest.raises(ValueError):
        confluence_check(load_scenario("loop"), [Synchronous()])
    with pytest.raises(InconclusiveRun):
        confluence_check(decimal(), [Synchronous()], max_steps=1)


def test_confluence_reports_divergence():
    # excess-value remainders discard the operand, so arrival timing changes the result
    ops = [
        OperatorSpec("a", Form.L, (("x", 1),), (("y", 1),), RADIX_EXCESS_VALUE),
        OperatorSpec("b", Form.L, (("y", 1),), (("z", 1),), RADIX_EXCESS_VALUE),
    ]
    cao = new_cao("ex", ["x", "y", "z"], ops, {"x": 5, "y": 3})
    ok, (first, second) = confluence_check(cao, [Synchronous(), SequentialDeclared()])
    assert not ok
    assert dict(first.cardinals) == {"x": 0, "y": 0, "z": 5}
    assert dict(second.cardinals) == {"x": 0, "y": 0, "z": 6}


def _replay(cao, result):
    state = cao.initial_cardinals()
    for rec in result.trace:
        if isinstance(result.scheduler, Synchronous):
            for eff in rec.fired:
                state.update(eff.remainders)
            for eff in rec.fired:
                for e, q in eff.deposits.items():
                    state[e] += q
        else:
            for eff in rec.fired:
                state.update(eff.remainders)
                for e, q in eff.deposits.items():
                    state[e] += q
        assert state == rec.cardinals_after
    return state


seeds = st.integers(0, 2**32 - 1)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_random_acyclic_runs(seed):
    rng = random.Random(seed)
    cao = random_cao(rng)
    cao = cao.with_init(random_init(rng, cao))
    finals = []
    for sched in SCHEDULERS:
        res = run(cao, sched)
        assert res.terminated
        assert not any(is_allowed(op, res.cardinals) for op in cao.operators)
        assert _replay(cao, res) == dict(res.cardinals)
        assert res.length == len(res.trace)
        assert all(rec.fired for rec in res.trace)
        finals.append(dict(res.cardinals))
    assert all(f == finals[0] for f in finals)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_engine_matches_unit_firing(seed):
    rng = random.Random(seed)
    cao = random_cao(rng, max_radix=4, max_rate=2)
    init = random_init(rng, cao, high=60)
    assert dict(run(cao.with_init(init)).cardinals) == unit_firing_fixpoint(cao, init, rng)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_other_kinds_terminate_and_replay(seed):
    rng = random.Random(seed)
    cao = random_cao(rng, kinds=ALL_BUILTIN_KINDS)
    cao = cao.with_init(random_init(rng, cao, high=1000))
    for sched in SCHEDULERS[:3]:
        res = run(cao, sched, max_steps=10**4)
        assert res.terminated
        assert _replay(cao, res) == dict(res.cardinals)


def test_sync_candidate_tracking_matches_full_scan():
    rng = random.Random(5)
    for _ in range(50):
        cao = random_cao(rng)
        state = random_init(rng, cao)
        fast = run(cao, cardinals=state)
        full = dict(state)
        tau = 0
        while any(is_allowed(op, full) for op in cao.operators):
            full, _ = step(cao, full, Synchronous(), tau + 1)
            tau += 1
        assert full == dict(fast.cardinals) and tau == fast.length


def test_chain_lengths():
    cao = make_chain(ChainSpec.uniform(5, 2)).with_init({"c0": 31})
    res = run(cao)
    assert tuple(res.cardinals.values()) == (1, 1, 1, 1, 1)
    assert res.length == 4
    assert run(cao, SequentialDeclared()).length == 1
