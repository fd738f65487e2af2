import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ordept.channel import (
    ChannelParams,
    compute_llr,
    ebno_to_sigma,
    format_instance,
    hard_decision,
    modulate,
    parse_instance,
    q_function,
    receive,
    simulate_instance,
    sort_reliability,
    transmit,
    trial_rng,
    uncoded_ber,
)


def test_modulate():
    np.testing.assert_array_equal(modulate([0, 1, 0]), [1.0, -1.0, 1.0])
    np.testing.assert_array_equal(modulate(np.zeros(5, dtype=np.uint8)), np.ones(5))


def test_transmit_degenerate_noise():
    x = modulate([0, 1, 1, 0])
    y = transmit(x, 1e-12, np.random.default_rng(0))
    np.testing.assert_allclose(y, x, atol=1e-6)


def test_transmit_replays_with_seed():
    x = modulate(np.zeros(64, dtype=np.uint8))
    a = transmit(x, 0.7, trial_rng(5, 1, 2))
    b = transmit(x, 0.7, trial_rng(5, 1, 2))
    c = transmit(x, 0.7, trial_rng(5, 1, 3))
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)


def test_noise_variance_statistical():
    sigma = 0.8
    x = np.ones(10**6)
    noise = transmit(x, sigma, np.random.default_rng(11)) - x
    assert abs(noise.var() / sigma**2 - 1) < 0.01


def test_compute_llr():
    llr, abs_llr = compute_llr(np.array([1.0, 0.0, -0.5]), 1.0)
    np.testing.assert_array_equal(llr, [2.0, 0.0, -1.0])
    np.testing.assert_array_equal(abs_llr, [2.0, 0.0, 1.0])
    with pytest.raises(ValueError):
        compute_llr(np.ones(2), 0.0)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-10, 10, allow_nan=False), min_size=1, max_size=40), st.floats(0.1, 3.0))
def test_llr_sign_follows_y(y, sigma):
    llr, _ = compute_llr(np.array(y), sigma)
    np.testing.assert_array_equal(np.sign(llr), np.sign(y))


def test_hard_decision():
    np.testing.assert_array_equal(hard_decision([0.3, -1.2]), [0, 1])
    np.testing.assert_array_equal(hard_decision([0.0]), [0])
    c = np.array([0, 1, 1, 0, 1], dtype=np.uint8)
    np.testing.assert_array_equal(hard_decision(modulate(c)), c)


def test_sort_reliability():
    np.testing.assert_array_equal(sort_reliability(np.array([3.0, 1.0, 2.0])), [1, 2, 0])
    np.testing.assert_array_equal(sort_reliability(np.ones(6)), np.arange(6))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 5), min_size=1, max_size=30))
def test_sort_reliability_matches_oracle(values):
    a = np.array(values, dtype=float)
    expected = sorted(range(len(values)), key=lambda i: (values[i], i))
    np.testing.assert_array_equal(sort_reliability(a), expected)


def test_ebno_to_sigma():
    assert ebno_to_sigma(0.0, 0.5) == pytest.approx(1.0)
    assert ebno_to_sigma(0.0, 1.0) == pytest.approx(1 / math.sqrt(2))
    assert ebno_to_sigma(300.0, 0.5) < 1e-14
    assert ChannelParams(3.0, 0.5).sigma == pytest.approx(ebno_to_sigma(3.0, 0.5))
    with pytest.raises(ValueError):
        ebno_to_sigma(1.0, 0.0)


def test_received_instance_invariants(bch32):
    sigma = ebno_to_sigma(3.0, bch32.rate)
    for t in range(50):
        inst = simulate_instance(bch32, sigma, trial_rng(3, 0, t))
        np.testing.assert_array_equal(inst.w, (inst.y < 0).astype(np.uint8))
        assert np.all(np.diff(inst.abs_llr[inst.pi]) >= 0)
        assert sorted(inst.pi) == list(range(bch32.n))
        np.testing.assert_array_equal(inst.z_true, inst.c_true ^ inst.w)


def test_noiseless_round_trip(bch32):
    for t in range(100):
        inst = simulate_instance(bch32, 1e-7, trial_rng(0, 0, t))
        np.testing.assert_array_equal(inst.w, inst.c_true)


def test_uncoded_ber_close_to_theory():
    errors, bits, theory = uncoded_ber(1.0, 200_000, seed=4)
    sd = math.sqrt(bits * theory * (1 - theory))
    assert abs(errors - bits * theory) < 4 * sd
    assert q_function(0.0) == pytest.approx(0.5)


def test_instance_dump_round_trip(bch32):
    inst = simulate_instance(bch32, 0.6, trial_rng(1, 0, 0))
    rec = parse_instance(format_instance(inst, 4.5, 17))
    assert rec["ebno_db"] == 4.5 and rec["trial"] == 17
    np.testing.assert_array_equal(rec["y"], inst.y)
    np.testing.assert_array_equal(rec["llr"], inst.llr)
    np.testing.assert_array_equal(rec["w"], inst.w)
    np.testing.assert_array_equal(rec["pi"], inst.pi)


def test_receive_without_truth():
    inst = receive(np.array([0.5, -0.1]), 1.0)
    assert inst.c_true is None and inst.z_true is None
