import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from semnum.classic import (
    ChainSpec,
    decode,
    encode,
    make_chain,
    make_fan_in,
    make_fan_out,
    make_lattice,
    make_mixed,
    oracle_digits,
    width_for,
)
from semnum.engine import SYNC, run
from semnum.model import Form
from semnum.operators import eval_operator
from semnum.topology import Shape, Variability, classify_sns, derive_weights

from cao_gen import brute_effect, unit_firing_fixpoint

DEC = ChainSpec(3, (10, 10))
MIXED = ChainSpec(4, (2, 3, 4))
THREE_HALVES = ChainSpec(4, (3, 3, 3), (2, 2, 2))


def test_chain_spec_validation():
    assert DEC.rates == (1, 1)
    with pytest.raises(ValueError):
        ChainSpec(3, (10,))
    with pytest.raises(ValueError):
        ChainSpec(3, (10, 10), (1,))
    with pytest.raises(ValueError):
        ChainSpec(2, (0,))
    with pytest.raises(ValueError):
        ChainSpec(0, ())
    assert ChainSpec.uniform(4, 3, 2) == THREE_HALVES


def test_make_chain():
    cao = make_chain(DEC)
    assert cao.keys == ("c0", "c1", "c2")
    assert [(op.form, op.operands, op.images) for op in cao.operators] == [
        (Form.L, (("c0", 10),), (("c1", 1),)),
        (Form.L, (("c1", 10),), (("c2", 1),)),
    ]
    assert classify_sns(cao).topology_shape is Shape.LINEAR
    rational = make_chain(THREE_HALVES)
    assert [op.rates for op in rational.operators] == [(2,)] * 3
    single = make_chain(ChainSpec(1, ()))
    assert single.keys == ("c0",) and not single.operators
    assert classify_sns(single).topology_shape is Shape.LINEAR


@pytest.mark.parametrize(
    "value, spec, digits",
    [(234, DEC, (4, 3, 2)), (23, MIXED, (1, 2, 3, 0)), (10, THREE_HALVES, (1, 0, 1, 2)), (0, DEC, (0, 0, 0))],
)
def test_encode_decode_examples(value, spec, digits):
    assert encode(value, spec) == digits
    assert decode(digits, spec) == value


def test_rational_weights():
    w = derive_weights(make_chain(THREE_HALVES))
    assert [w[f"c{k}"] for k in range(4)] == [1, Fraction(3, 2), Fraction(9, 4), Fraction(27, 8)]


def test_rational_encode_matches_unit_firing():
    for value in range(200):
        cao = make_chain(THREE_HALVES).with_init({"c0": value})
        expected = unit_firing_fixpoint(cao, cao.initial_cardinals())
        assert encode(value, THREE_HALVES) == tuple(expected[k] for k in cao.keys)


def test_decode_errors_and_zero():
    assert decode((0, 0, 0, 0), THREE_HALVES) == 0
    with pytest.raises(ValueError):
        decode((1, 2), DEC)
    with pytest.raises(ValueError):
        encode(-1, DEC)


def test_oracle_digits():
    assert oracle_digits(234, (10, 10)) == (4, 3, 2)
    assert oracle_digits(23, (2, 3, 4)) == (1, 2, 3, 0)
    assert oracle_digits(0, (7, 7, 7)) == (0, 0, 0, 0)
    with pytest.raises(ValueError):
        oracle_digits(5, (0,))


def test_width_for():
    assert width_for(0, 10) == 1
    assert width_for(9, 10) == 1
    assert width_for(10, 10) == 2
    assert width_for(4096, 2) == 13
    with pytest.raises(ValueError):
        width_for(5, 1)


@settings(max_examples=80, deadline=None)
@given(st.lists(st.integers(1, 12), min_size=1, max_size=8), st.integers(0, 10**12))
def test_unit_rate_chain_matches_oracle(radices, value):
    spec = ChainSpec(len(radices) + 1, tuple(radices))
    digits = encode(value, spec)
    assert digits == oracle_digits(value, radices)
    # digit bounds at fixpoint
    assert all(d < n for d, n in zip(digits, radices))
    assert decode(digits, spec) == value


@settings(max_examples=80, deadline=None)
@given(
    st.lists(st.tuples(st.integers(1, 6), st.integers(0, 4)), min_size=1, max_size=6),
    st.integers(0, 10**6),
)
def test_decode_inverts_encode(params, value):
    radices, rates = zip(*params)
    if rates[0] == 0:
        rates = (1,) + rates[1:]
    spec = ChainSpec(len(radices) + 1, radices, rates)
    try:
        derive_weights(make_chain(spec))
    except ValueError:
        return  # a zero rate past c0 leaves later weights undetermined
    assert decode(encode(value, spec), spec) == value


def test_fan_out_matches_d_example():
    cao = make_fan_out(4, (2, 3))
    (op,) = cao.operators
    assert op.form is Form.D and op.radices == (4,) and op.rates == (2, 3)
    eff = eval_operator(op, {"u0": 9, "v0": 0, "v1": 0})
    assert (eff.common_carry, eff.new_operand_values, eff.transformants) == (2, (1,), (4, 6))


def test_fan_in_and_mixed_match_examples():
    (f,) = make_fan_in((2, 3), 1).operators
    assert f.form is Form.F
    eff = eval_operator(f, {"u0": 7, "u1": 10, "v0": 0})
    assert (eff.partial_carries, eff.new_operand_values, eff.transformants) == ((3, 3), (1, 1), (3,))
    (m,) = make_mixed(2, 2, (3, 5), (2, 1)).operators
    assert m.form is Form.M
    eff = eval_operator(m, {"u0": 10, "u1": 12, "v0": 0, "v1": 0})
    assert (eff.common_carry, eff.new_operand_values, eff.transformants) == (2, (4, 2), (4, 2))
    assert brute_effect((3, 5), (2, 1), (10, 12)) == (2, (4, 2), (4, 2))


@pytest.mark.parametrize("m", range(1, 9))
def test_generators_valid_for_every_width(m):
    # all constructors pass new_cao (it raises otherwise) over m entities
    assert len(make_chain(ChainSpec.uniform(m, 2)).keys) == m
    if m >= 2:
        for w in range(1, m):
            assert len(make_mixed(w, m - w, [2] * w, [1] * (m - w)).keys) == m
    if m >= 3:
        assert len(make_fan_out(2, [1] * (m - 1)).keys) == m
        assert len(make_fan_in([2] * (m - 1)).keys) == m


def test_lattice():
    cao = make_lattice(3, 3)
    assert classify_sns(cao).topology_shape is Shape.LATTICE
    assert classify_sns(cao).variability is Variability.HOMOGENEOUS
    rng = random.Random(3)
    for _ in range(20):
        init = {k: rng.randint(0, 50) for k in cao.keys}
        res = run(cao.with_init(init), SYNC)
        assert res.cardinals == unit_firing_fixpoint(cao, init, rng)
    with pytest.raises(ValueError):
        make_lattice(0, 2)
