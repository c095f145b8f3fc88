import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from coinbet.coin_betting import (
    bet_and_settle,
    kelly_fraction,
    kt_fraction_from_state,
    kt_wealth_guarantee_check,
    logloss_regret_to_wealth_bound,
    new_state,
    optimal_fixed_fraction_wealth,
    run_kt_bettor,
    validate_coins,
)
from coinbet.numerics import kl_bernoulli
from coinbet.potentials import KTPotential

coin_seqs = st.lists(st.floats(-1, 1), min_size=1, max_size=80)
binary_seqs = st.lists(st.sampled_from([-1.0, 1.0]), min_size=1, max_size=80)


def test_bet_and_settle_examples():
    s = new_state(1.0)
    assert bet_and_settle(s, 0.0, 0.7).wealth == 1.0
    assert bet_and_settle(s, 1.0, 1.0).wealth == 2.0
    s = bet_and_settle(s, kt_fraction_from_state(s), 1.0)
    s = bet_and_settle(s, kt_fraction_from_state(s), 1.0)
    assert s.wealth == 1.5
    assert s.reward == 0.5 and s.round == 2 and s.coin_sum == 2.0


def test_bet_and_settle_rejects_borrowing_and_bad_coins():
    s = new_state()
    with pytest.raises(ValueError):
        bet_and_settle(s, 1.01, 1.0)
    with pytest.raises(ValueError):
        bet_and_settle(s, 0.5, 1.5)
    with pytest.raises(ValueError):
        new_state(0.0)
    with pytest.raises(ValueError):
        validate_coins([0.5, 2.0])


def test_kt_fraction_examples():
    s = new_state()
    assert kt_fraction_from_state(s) == 0.0
    for g in (1, 1, 1):
        s = bet_and_settle(s, kt_fraction_from_state(s), g)
    assert kt_fraction_from_state(s) == 0.75
    s = new_state()
    for g in (1, -1):
        s = bet_and_settle(s, kt_fraction_from_state(s, 2.0), g)
    assert kt_fraction_from_state(s, 2.0) == 0.0


def test_kelly_fraction_examples():
    assert kelly_fraction(0.5) == 0.0
    assert kelly_fraction(1.0) == 1.0
    assert kelly_fraction(0.75) == 0.5
    with pytest.raises(ValueError):
        kelly_fraction(1.2)


def test_optimal_fixed_fraction_examples():
    assert optimal_fixed_fraction_wealth([1, -1, -1, 1], 3.0) == (0.0, 3.0)
    frac, w = optimal_fixed_fraction_wealth([1, 1])
    assert (frac, w) == (1.0, 4.0)
    assert w == pytest.approx(math.exp(2 * math.log(2)))
    frac, w = optimal_fixed_fraction_wealth([1, 1, 1, -1])
    assert frac == 0.5 and w == pytest.approx(1.6875, rel=1e-15)
    assert w == pytest.approx(math.exp(4 * kl_bernoulli(0.75, 0.5)), rel=1e-14)


@given(binary_seqs)
def test_oracle_wealth_is_exp_t_kl_on_binary_coins(coins):
    T = len(coins)
    _, w = optimal_fixed_fraction_wealth(coins)
    p = 0.5 + sum(coins) / (2 * T)
    assert w == pytest.approx(math.exp(T * kl_bernoulli(p, 0.5)), rel=1e-10)


def test_wealth_guarantee_examples():
    chk = kt_wealth_guarantee_check(np.zeros(12), endowment=2.0)
    assert chk.wealth == 2.0 and chk.floor < 2.0 and chk.holds
    chk = kt_wealth_guarantee_check([1, 1])
    assert chk.wealth == pytest.approx(1.5) and chk.floor == pytest.approx(1.5, rel=1e-13) and chk.holds


def test_wealth_guarantee_on_many_binary_sequences():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        assert kt_wealth_guarantee_check(rng.choice([-1.0, 1.0], size=100)).holds


@given(coin_seqs, st.sampled_from([0.0, 1.0, 5.0]), st.floats(0.1, 10))
def test_wealth_floor_on_real_coins(coins, shift, eps):
    assert kt_wealth_guarantee_check(coins, shift, eps).holds


@given(coin_seqs)
def test_direct_wealth_matches_log_space_accumulator(coins):
    states = run_kt_bettor(coins)
    log_w, s = 0.0, 0.0
    for t, g in enumerate(coins, start=1):
        log_w += math.log1p(s / t * g) if s / t * g > -1 else -math.inf
        s += g
    assert states[-1].wealth == pytest.approx(math.exp(log_w), rel=1e-12, abs=1e-300)


@given(coin_seqs)
def test_bets_never_exceed_wealth(coins):
    states = run_kt_bettor(coins)
    for s in states[:-1]:
        assert abs(kt_fraction_from_state(s)) <= 1.0
    assert all(s.wealth >= 0.0 for s in states)


def test_kt_equality_on_binary_coins_in_log_space():
    rng = np.random.default_rng(3)
    coins = rng.choice([-1.0, 1.0], size=100)
    wealth = run_kt_bettor(coins)[-1].wealth
    assert math.log(wealth) == pytest.approx(KTPotential().log_value(100, coins.sum()), rel=1e-12, abs=1e-12)


def test_logloss_bound_examples():
    assert logloss_regret_to_wealth_bound(0.0, 10, 10, 2.0) == pytest.approx(2.0 * 2**10, rel=1e-13)
    assert logloss_regret_to_wealth_bound(1.3, 10, 0, 2.0) == pytest.approx(2.0 * math.exp(-1.3), rel=1e-15)
    with pytest.raises(ValueError):
        logloss_regret_to_wealth_bound(0.0, 3, 4)


def test_logloss_bound_below_kt_wealth():
    rng = np.random.default_rng(11)
    for T in (1, 10, 100, 1000):
        for _ in range(50):
            coins = rng.choice([-1.0, 1.0], size=T)
            wealth = run_kt_bettor(coins)[-1].wealth
            bound = logloss_regret_to_wealth_bound(0.5 * math.log(T) + math.log(2), T, coins.sum())
            assert bound <= wealth * (1 + 1e-12)
