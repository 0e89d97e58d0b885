import itertools

import pytest

from trustlab import preferences as pref
from trustlab.questionnaires import CertaintyItem, Choice, PRESENT_VALUES


def full_answers(choice=Choice.FUTURE):
    return {key: choice for key in PRESENT_VALUES}


def answers_with(overrides):
    answers = full_answers()
    answers.update(overrides)
    return answers


class TestBlocks:
    def test_six_blocks_from_full_grid(self):
        blocks = pref.blocks_from_responses(full_answers())
        assert len(blocks) == 6
        assert {(b.m, b.t_short, b.t_long) for b in blocks} == {
            (m, s, l) for m in (25, 30, 40) for s, l in ((1, 2), (4, 8))
        }

    def test_block_carries_shared_present_value(self):
        blocks = pref.blocks_from_responses(full_answers())
        short25 = next(b for b in blocks if b.m == 25 and b.t_short == 1)
        assert short25.p == 21 and short25.t_long == 2

    def test_incomplete_grid_rejected(self):
        answers = full_answers()
        del answers[(40, 8)]
        with pytest.raises(pref.EstimationError, match="incomplete"):
            pref.blocks_from_responses(answers)


class TestDiscountRate:
    def block(self, m, pair, choice_short, choice_long):
        answers = answers_with({
            (m, pair[0]): choice_short,
            (m, pair[1]): choice_long,
        })
        blocks = pref.blocks_from_responses(answers)
        return next(b for b in blocks if b.m == m and b.t_short == pair[0])

    def test_fp_spot_value(self):
        block = self.block(25, (1, 2), Choice.FUTURE, Choice.PRESENT)
        est = pref.block_discount_rate(block)
        assert est.rate == 0.84
        assert est.censoring == pref.Censoring.NONE
        assert est.pattern == "FP"

    def test_pp_lower_censored(self):
        block = self.block(40, (4, 8), Choice.PRESENT, Choice.PRESENT)
        est = pref.block_discount_rate(block)
        assert est.rate == pytest.approx((31 / 40) ** 0.25, abs=1e-12)
        assert est.censoring == pref.Censoring.LOWER

    def test_ff_upper_censored_at_long_delay(self):
        block = self.block(25, (1, 2), Choice.FUTURE, Choice.FUTURE)
        est = pref.block_discount_rate(block)
        assert est.rate == pytest.approx((21 / 25) ** 0.5, abs=1e-12)
        assert est.censoring == pref.Censoring.UPPER

    def test_pf_flagged_non_monotone(self):
        block = self.block(30, (1, 2), Choice.PRESENT, Choice.FUTURE)
        est = pref.block_discount_rate(block)
        assert est.non_monotone
        assert est.censoring == pref.Censoring.NONE

    def test_oracle_all_patterns_all_blocks(self):
        # Numeric inversion check: the returned D solves p = D^t * m at the
        # attributed delay, for every pattern on every block.
        choices = (Choice.FUTURE, Choice.PRESENT)
        for m, pair in itertools.product((25, 30, 40), ((1, 2), (4, 8))):
            for cs, cl in itertools.product(choices, choices):
                block = self.block(m, pair, cs, cl)
                est = pref.block_discount_rate(block)
                t = pref.attributed_delay(est.pattern, block.t_short, block.t_long)
                assert abs(est.rate**t * block.m - block.p) < 1e-9
                assert 0 < est.rate <= 1

    def test_rate_in_unit_interval_and_monotone_in_delay(self):
        # Holding the pattern, the longer-delay pair implies a larger D.
        short = pref.block_discount_rate(self.block(25, (1, 2), Choice.PRESENT, Choice.PRESENT))
        long = pref.block_discount_rate(self.block(25, (4, 8), Choice.PRESENT, Choice.PRESENT))
        assert short.rate < long.rate < 1

    def test_all_4096_block_profiles_total(self):
        # Every per-subject combination of patterns across 6 blocks estimates.
        choices = (Choice.FUTURE, Choice.PRESENT)
        grid = sorted(PRESENT_VALUES)
        for profile in itertools.product(choices, repeat=4):
            answers = {key: profile[i % 4] for i, key in enumerate(grid)}
            blocks = pref.blocks_from_responses(answers)
            estimates = [pref.block_discount_rate(b) for b in blocks]
            assert len(estimates) == 6
            assert 0 < pref.mean_discount_rate(estimates) <= 1


class TestMeanRate:
    def estimates(self, rates):
        return [
            pref.DiscountRateEstimate(f"b{i}", r, pref.Censoring.NONE, "FP")
            for i, r in enumerate(rates)
        ]

    def test_idempotent_on_identical(self):
        assert pref.mean_discount_rate(self.estimates([0.9] * 6)) == pytest.approx(0.9)

    def test_arithmetic(self):
        rates = [0.84, 0.84, 0.84, 1, 1, 1]
        assert pref.mean_discount_rate(self.estimates(rates)) == pytest.approx(0.92)

    def test_wrong_count_rejected(self):
        with pytest.raises(pref.EstimationError):
            pref.mean_discount_rate(self.estimates([0.9] * 5))


class TestCertainty:
    def items(self, a, b):
        return [CertaintyItem(5, 0, a), CertaintyItem(10, 0, b)]

    def test_passthrough(self):
        assert pref.certainty_scores(self.items(70, 40)) == [70, 40]

    def test_inclusive_bounds(self):
        assert pref.certainty_scores(self.items(0, 100)) == [0, 100]

    def test_missing_block_rejected(self):
        with pytest.raises(pref.EstimationError):
            pref.certainty_scores([CertaintyItem(5, 0, 70)])
