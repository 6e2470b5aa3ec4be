"""Peg mechanics: deterministic redemption, exact oracles, seeded Monte Carlo."""

from fractions import Fraction

import pytest

from moneygraph import (
    AgentKind,
    DemandProcess,
    PegConfig,
    Regime,
    SplitMix64,
    absorption_oracle,
    dp_absorption_oracle,
    new_graph,
    redeem,
    simulate,
)
from moneygraph import ops
from moneygraph.errors import (
    BadDistributionError,
    IndivisibleError,
    InsufficientClaimError,
    ReservesDepletedError,
    TooLargeError,
)
from moneygraph.pegsim import parse_deltas

FAIR = ((1, Fraction(1, 2)), (-1, Fraction(1, 2)))


class TestSplitMix64:
    def test_reference_vector_seed_1234567(self):
        # published splitmix64 outputs for seed 1234567
        rng = SplitMix64(1234567)
        assert [rng.next_u64() for _ in range(5)] == [
            6457827717110365317,
            3203168211198807973,
            9817491932198370423,
            4593380528125082431,
            16408922859458223821,
        ]

    def test_reference_vector_seed_0(self):
        rng = SplitMix64(0)
        assert rng.next_u64() == 0xE220A8397B1DCDAF

    def test_outputs_stay_in_64_bits(self):
        rng = SplitMix64(2**63 + 12345)
        for _ in range(100):
            assert 0 <= rng.next_u64() < 2**64


def gold_peg_graph(reserves=100, promised=150):
    g = new_graph(Regime.convertible())
    g.add_currency("DOM")
    g.add_commodity("GOLD")
    cb = g.add_agent(AgentKind.CENTRAL_BANK, "DOM", label="cb")
    fund = g.add_agent(AgentKind.FOREIGN, label="fund")
    if reserves:
        ops.mint_commodity(g, cb, "GOLD", reserves)
    ops.issue_convertible_note(g, cb, fund, promised, "DOM", "GOLD", Fraction(1))
    peg = PegConfig(domestic="DOM", reserve_asset="GOLD", rate=Fraction(1), initial_reserves=reserves)
    return g, cb, fund, peg


class TestRedeem:
    def test_partial_redemption(self):
        g, cb, fund, peg = gold_peg_graph()
        redeem(g, fund, 40, peg)
        assert g.holding(cb, "GOLD") == 60
        assert g.holding(fund, "GOLD") == 40
        assert g.balance_sheet(fund, "DOM").assets == (("convertible_note", 110),)

    def test_over_reserves_rejected_atomically(self):
        g, cb, fund, peg = gold_peg_graph(reserves=100, promised=150)
        before = g.snapshot_text()
        with pytest.raises(ReservesDepletedError):
            redeem(g, fund, 101, peg)
        assert g.snapshot_text() == before

    def test_indivisible_rate(self):
        peg3 = PegConfig("DOM", "GOLD", Fraction(1, 3), 100)
        g2 = new_graph(Regime.convertible())
        g2.add_currency("DOM")
        g2.add_commodity("GOLD")
        cb2 = g2.add_agent(AgentKind.CENTRAL_BANK, "DOM")
        fund2 = g2.add_agent(AgentKind.FOREIGN)
        ops.mint_commodity(g2, cb2, "GOLD", 100)
        ops.issue_convertible_note(g2, cb2, fund2, 30, "DOM", "GOLD", Fraction(1, 3))
        with pytest.raises(IndivisibleError):
            redeem(g2, fund2, 5, peg3)
        redeem(g2, fund2, 6, peg3)  # 6/3 = 2 gold, exact
        assert g2.holding(fund2, "GOLD") == 2

    def test_insufficient_claim(self):
        g, cb, fund, peg = gold_peg_graph(reserves=500, promised=100)
        with pytest.raises(InsufficientClaimError):
            redeem(g, fund, 101, peg)

    def test_dead_after_depletion(self):
        g, cb, fund, peg = gold_peg_graph(reserves=100, promised=150)
        redeem(g, fund, 100, peg)
        assert g.holding(cb, "GOLD") == 0
        for amount in (50, 10, 1):
            with pytest.raises(ReservesDepletedError):
                redeem(g, fund, amount, peg)

    def test_foreign_currency_reserve_asset(self):
        """Same machinery defends a currency peg: reserves are claims in the
        foreign currency, and redemption hands them over."""
        g = new_graph(Regime.convertible())
        g.add_currency("DOM")
        g.add_currency("FOR")
        cb = g.add_agent(AgentKind.CENTRAL_BANK, "DOM", label="cb")
        fcb = g.add_agent(AgentKind.CENTRAL_BANK, "FOR", label="fcb")
        fund = g.add_agent(AgentKind.FOREIGN, label="fund")
        # the domestic CB holds 80 FOR in reserve at the foreign CB
        from moneygraph import EdgeDelta, InstrumentKind

        g.post([EdgeDelta(InstrumentKind.DEPOSIT, fcb, cb, "FOR", 80)])
        ops.issue_convertible_note(g, cb, fund, 120, "DOM", "FOR", Fraction(1))
        peg = PegConfig("DOM", "FOR", Fraction(1), 80)
        redeem(g, fund, 50, peg)
        assert g.edge_amount(InstrumentKind.DEPOSIT, fcb, fund, "FOR") == 50
        assert g.edge_amount(InstrumentKind.DEPOSIT, fcb, cb, "FOR") == 30
        with pytest.raises(ReservesDepletedError):
            redeem(g, fund, 31, peg)
        assert g.check_invariants() == []


class TestAbsorptionOracle:
    def test_fair_walk_reserves_2_horizon_4(self):
        # independent hand enumeration of all 2^4 equally likely paths
        depleted = 0
        for bits in range(16):
            r = 2
            for step in range(4):
                r -= 1 if (bits >> step) & 1 else -1
                if r <= 0:
                    depleted += 1
                    break
        assert Fraction(depleted, 16) == Fraction(3, 8)
        assert absorption_oracle(2, FAIR, 4) == Fraction(3, 8)

    def test_horizon_zero(self):
        assert absorption_oracle(5, FAIR, 0) == 0

    def test_single_step_half(self):
        assert absorption_oracle(1, FAIR, 1) == Fraction(1, 2)

    def test_zero_reserves_already_absorbed(self):
        assert absorption_oracle(0, FAIR, 3) == 1

    def test_guard(self):
        with pytest.raises(TooLargeError):
            absorption_oracle(3, FAIR, 64)

    def test_bad_distribution(self):
        with pytest.raises(BadDistributionError):
            absorption_oracle(3, ((1, Fraction(1, 2)), (-1, Fraction(1, 4))), 4)


class TestDpOracle:
    @pytest.mark.parametrize("reserves", [1, 2, 3, 4])
    @pytest.mark.parametrize("horizon", [0, 1, 2, 5, 8])
    def test_matches_enumeration_fair(self, reserves, horizon):
        assert dp_absorption_oracle(reserves, FAIR, horizon) == absorption_oracle(reserves, FAIR, horizon)

    def test_matches_enumeration_asymmetric(self):
        deltas = ((2, Fraction(1, 3)), (-1, Fraction(2, 3)))
        for reserves in (1, 2, 3):
            for horizon in (1, 3, 6, 9):
                assert dp_absorption_oracle(reserves, deltas, horizon) == \
                    absorption_oracle(reserves, deltas, horizon)

    def test_matches_enumeration_three_outcomes(self):
        deltas = ((1, Fraction(1, 4)), (0, Fraction(1, 4)), (-1, Fraction(1, 2)))
        assert dp_absorption_oracle(2, deltas, 7) == absorption_oracle(2, deltas, 7)

    def test_monotone_in_horizon(self):
        values = [dp_absorption_oracle(3, FAIR, h) for h in (1, 2, 4, 8, 16, 32, 64)]
        assert all(a <= b for a, b in zip(values, values[1:]))

    def test_monotone_in_reserves(self):
        values = [dp_absorption_oracle(r, FAIR, 20) for r in (1, 2, 3, 4, 5)]
        assert all(a >= b for a, b in zip(values, values[1:]))

    def test_long_horizon_probability_grows(self):
        p10 = dp_absorption_oracle(2, FAIR, 10)
        p100 = dp_absorption_oracle(2, FAIR, 100)
        p1000 = dp_absorption_oracle(2, FAIR, 1000)
        assert p10 < p100 < p1000 < 1


class TestSimulate:
    def test_inflow_only_never_depletes(self):
        peg = PegConfig("DOM", "GOLD", Fraction(1), 2)
        demand = DemandProcess(deltas=((-1, Fraction(1)),), horizon=50, trials=200, seed=9)
        out = simulate(peg, demand)
        assert out.frequency == 0
        assert out.mean_survival == 50

    def test_certain_depletion_at_step_one(self):
        peg = PegConfig("DOM", "GOLD", Fraction(1), 1)
        demand = DemandProcess(deltas=((1, Fraction(1)),), horizon=5, trials=100, seed=0)
        out = simulate(peg, demand)
        assert out.frequency == 1
        assert set(out.depletion_steps) == {1}
        assert out.mean_survival == 1

    def test_deterministic_given_seed(self):
        peg = PegConfig("DOM", "GOLD", Fraction(1), 2)
        demand = DemandProcess(deltas=FAIR, horizon=8, trials=2000, seed=31)
        assert simulate(peg, demand) == simulate(peg, demand)

    def test_within_three_sigma_of_oracle(self):
        for reserves, horizon, seed in ((2, 4, 42), (3, 10, 42), (1, 7, 7)):
            p = absorption_oracle(reserves, FAIR, horizon)
            trials = 20000
            demand = DemandProcess(deltas=FAIR, horizon=horizon, trials=trials, seed=seed)
            out = simulate(PegConfig("DOM", "GOLD", Fraction(1), reserves), demand)
            sigma3 = 3 * float(p * (1 - p) / trials) ** 0.5
            assert abs(float(out.frequency - p)) <= sigma3

    def test_frequency_is_exact_ratio(self):
        peg = PegConfig("DOM", "GOLD", Fraction(1), 2)
        demand = DemandProcess(deltas=FAIR, horizon=4, trials=640, seed=3)
        out = simulate(peg, demand)
        assert out.frequency == Fraction(out.depleted, out.trials)

    def test_json_shape(self):
        peg = PegConfig("DOM", "GOLD", Fraction(1), 2)
        demand = DemandProcess(deltas=FAIR, horizon=4, trials=10, seed=3)
        payload = simulate(peg, demand).to_json_dict()
        assert set(payload) == {"depleted", "trials", "frequency", "mean_survival"}
        assert "/" in payload["frequency"]


class TestValidation:
    def test_probabilities_must_sum_to_one(self):
        with pytest.raises(BadDistributionError):
            DemandProcess(deltas=((1, Fraction(1, 2)), (-1, Fraction(1, 4))), horizon=4, trials=10, seed=0)

    def test_trials_positive(self):
        with pytest.raises(BadDistributionError):
            DemandProcess(deltas=FAIR, horizon=4, trials=0, seed=0)

    def test_parse_deltas(self):
        assert parse_deltas("+1:1/2,-1:1/2") == FAIR
        with pytest.raises(BadDistributionError):
            parse_deltas("+1:nope")
        with pytest.raises(BadDistributionError):
            parse_deltas("")
