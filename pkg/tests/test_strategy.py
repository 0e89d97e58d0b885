import random
from fractions import Fraction

import pytest

from trustlab.strategy import (
    HIGH_SEND_SUPPORT,
    LOW_SEND_SUPPORT,
    SendDistribution,
    StrategyError,
    StrategyTable,
    Treatment,
    bot_return,
    bot_send,
    default_tables,
    dump_strategy_config,
    expected_return,
    load_strategy_config,
    parse_strategy_config,
    validate_strategy_table,
    write_strategy_config,
)


@pytest.fixture(scope="module")
def tables():
    return default_tables()


def make_table(treatment, returns_override=None, support=None):
    base_high, base_low = default_tables()
    base = base_high if treatment == Treatment.HIGH_TRUST else base_low
    returns = dict(base.returns)
    if returns_override:
        returns.update(returns_override)
    send = base.send
    if support is not None:
        send = SendDistribution(support, tuple(Fraction(1) for _ in support))
    return StrategyTable(treatment, send, returns, base.practice_send)


class TestValidation:
    def test_default_tables_accepted(self, tables):
        assert validate_strategy_table(*tables).ok

    def test_quoted_x5_cells_accepted(self, tables):
        high, low = tables
        assert high.returns[5] == (7, 8, 10)
        assert low.returns[5] == (2, 1, 0)
        assert expected_return(high, 5) >= expected_return(low, 5)

    def test_zero_send_equality_permitted(self, tables):
        high, low = tables
        assert high.returns[0] == (0, 0, 0)
        assert low.returns[0] == (0, 0, 0)
        assert validate_strategy_table(high, low).ok

    def test_dominance_breach_reported(self):
        high = make_table(Treatment.HIGH_TRUST, {4: (1, 1, 1)})
        low = make_table(Treatment.LOW_TRUST, {4: (3, 3, 3)})
        report = validate_strategy_table(high, low)
        assert not report.ok
        assert any("x=4" in v for v in report.violations)

    def test_support_violation_reported(self):
        high = make_table(Treatment.HIGH_TRUST, support=(5, 7))
        low = make_table(Treatment.LOW_TRUST)
        report = validate_strategy_table(high, low)
        assert any("support" in v for v in report.violations)

    def test_out_of_bound_triple_rejected_at_construction(self):
        with pytest.raises(StrategyError):
            make_table(Treatment.HIGH_TRUST, {2: (0, 0, 7)})  # 7 > 3*2

    def test_missing_triple_rejected(self):
        base, _ = default_tables()
        returns = dict(base.returns)
        del returns[3]
        with pytest.raises(StrategyError, match="x=3"):
            StrategyTable(Treatment.HIGH_TRUST, base.send, returns)


class TestExpectedReturn:
    def test_high_x5_is_25_thirds(self, tables):
        assert expected_return(tables[0], 5) == Fraction(25, 3)

    def test_low_x5_is_one(self, tables):
        assert expected_return(tables[1], 5) == Fraction(1)

    def test_x0_is_zero(self, tables):
        assert expected_return(tables[0], 0) == 0
        assert expected_return(tables[1], 0) == 0

    def test_out_of_range(self, tables):
        with pytest.raises(StrategyError):
            expected_return(tables[0], 11)

    def test_default_dominance_strict_somewhere(self, tables):
        high, low = tables
        diffs = [expected_return(high, x) - expected_return(low, x) for x in range(11)]
        assert all(d >= 0 for d in diffs)
        assert any(d > 0 for d in diffs)


class TestDraws:
    def test_practice_send_is_5_in_both_arms(self, tables):
        rng = random.Random(0)
        assert bot_send(tables[0], 0, rng) == 5
        assert bot_send(tables[1], 0, rng) == 5

    def test_send_support_containment(self, tables):
        rng = random.Random(1)
        for _ in range(2000):
            assert bot_send(tables[0], 1, rng) in HIGH_SEND_SUPPORT
            assert bot_send(tables[1], 3, rng) in LOW_SEND_SUPPORT

    def test_return_draws_from_triple(self, tables):
        rng = random.Random(2)
        for _ in range(1000):
            assert bot_return(tables[0], 5, rng) in {7, 8, 10}
            assert bot_return(tables[1], 5, rng) in {2, 1, 0}

    def test_return_x0_is_zero(self, tables):
        rng = random.Random(3)
        assert bot_return(tables[0], 0, rng) == 0
        assert bot_return(tables[1], 0, rng) == 0

    def test_return_x_out_of_range(self, tables):
        with pytest.raises(StrategyError):
            bot_return(tables[0], 11, random.Random(0))

    def test_identical_seed_identical_sequence(self, tables):
        rng_a, rng_b = random.Random(99), random.Random(99)
        seq_a = [bot_send(tables[0], 1, rng_a) for _ in range(50)]
        seq_b = [bot_send(tables[0], 1, rng_b) for _ in range(50)]
        assert seq_a == seq_b

    def test_uniform_triple_frequencies(self, tables):
        rng = random.Random(4)
        counts = {7: 0, 8: 0, 10: 0}
        n = 30000
        for _ in range(n):
            counts[bot_return(tables[0], 5, rng)] += 1
        for value in counts.values():
            assert abs(value / n - 1 / 3) < 0.01


class TestConfigIO:
    def test_round_trip(self, tables, tmp_path):
        path = tmp_path / "strategy.yaml"
        write_strategy_config(path, *tables)
        high, low = load_strategy_config(path)
        assert high.returns == tables[0].returns
        assert low.returns == tables[1].returns
        assert [float(w) for w in high.send.weights] == [0.25] * 4

    def test_loader_rejects_dominance_violation(self, tables):
        raw = dump_strategy_config(*tables)
        raw["high_trust"]["returns"][4] = [0, 0, 0]
        raw["low_trust"]["returns"][4] = [9, 9, 9]
        with pytest.raises(StrategyError, match="dominance"):
            parse_strategy_config(raw)

    def test_loader_rejects_malformed(self):
        with pytest.raises(StrategyError):
            parse_strategy_config({"high_trust": {}})

    def test_shipped_default_config_loads(self):
        from importlib import resources

        with resources.as_file(
            resources.files("trustlab") / "data" / "strategy_default.yaml"
        ) as path:
            high, low = load_strategy_config(path)
        assert high.returns[5] == (7, 8, 10)
        assert low.returns[5] == (2, 1, 0)
