import json

import numpy as np
import pytest

from fdrelay.channel import SystemParams
from fdrelay.markov import stationary, transition_probs
from fdrelay.montecarlo import estimate_mode_probs
from fdrelay.optimize import optimize_policy
from fdrelay.policy import Mode, QueuePolicy
from fdrelay.sim import SchemeVariant, mask_for, run_slots, validate_against_markov

ALL_VARIANTS = list(SchemeVariant)


@pytest.mark.parametrize("variant", ALL_VARIANTS)
def test_report_invariants(ref_params, variant):
    rep = run_slots(ref_params, QueuePolicy.from_interior([0.5, 0.5]), variant, 5_000, seed=1)
    assert rep.n_slots == 5_000
    assert sum(rep.mode_counts.values()) == 5_000
    assert rep.queue_hist.sum() == pytest.approx(1.0)
    assert rep.queue_hist.shape == (4,)
    assert 0 <= rep.delivered <= 5_000
    assert rep.empirical_mu == rep.delivered / 5_000


@pytest.mark.parametrize("variant", ALL_VARIANTS)
def test_silent_alice_delivers_nothing(ref_params, variant):
    rep = run_slots(ref_params.with_(p_a=0.0), QueuePolicy.constant(3, 0.5), variant,
                    2_000, seed=0)
    assert rep.empirical_mu == 0.0


def test_seed_determinism(ref_params):
    policy = QueuePolicy.from_interior([0.3, 0.7, 0.1])
    a = run_slots(ref_params, policy, SchemeVariant.PROPOSED, 20_000, seed=9)
    b = run_slots(ref_params, policy, SchemeVariant.PROPOSED, 20_000, seed=9)
    assert a.delivered == b.delivered
    np.testing.assert_array_equal(a.queue_hist, b.queue_hist)


def test_chunk_size_does_not_change_the_run(ref_params):
    policy = QueuePolicy.from_interior([0.3])
    a = run_slots(ref_params, policy, n_slots=7_000, seed=2, chunk_size=50_000)
    b = run_slots(ref_params, policy, n_slots=7_000, seed=2, chunk_size=999)
    assert a.delivered == b.delivered


def test_bufferless_two_seeds_agree(ref_params):
    n = 100_000
    a = run_slots(ref_params, QueuePolicy((1.0, 0.0)), SchemeVariant.BUFFERLESS_FD, n, seed=1)
    b = run_slots(ref_params, QueuePolicy((1.0, 0.0)), SchemeVariant.BUFFERLESS_FD, n, seed=2)
    p = 0.5 * (a.empirical_mu + b.empirical_mu)
    se = np.sqrt(2 * p * (1 - p) / n)
    assert abs(a.empirical_mu - b.empirical_mu) <= 4 * se
    assert a.queue_hist[0] == 1.0


def test_bufferless_matches_df_probability(ref_params):
    v = validate_against_markov(ref_params, QueuePolicy((1.0, 0.0)), 100_000, seed=4,
                                variant=SchemeVariant.BUFFERLESS_FD, n_mc=100_000)
    assert v.abs_gap <= 4 * np.sqrt(2 * v.analytic_mu / 100_000)


def test_hd_only_never_uses_full_duplex(ref_params):
    rep = run_slots(ref_params, QueuePolicy.constant(4, 0.5), SchemeVariant.S2_HD_ONLY,
                    20_000, seed=0)
    assert rep.mode_counts[Mode.RF_FD] == rep.mode_counts[Mode.DF_FD] == 0


def test_no_dffd_variant_never_uses_df(ref_params):
    rep = run_slots(ref_params, QueuePolicy.constant(4, 0.5), SchemeVariant.S1_NO_DFFD,
                    20_000, seed=0)
    assert rep.mode_counts[Mode.DF_FD] == 0
    assert rep.mode_counts[Mode.RF_FD] > 0


def test_no_eavesdropper_everything_delivered():
    params = SystemParams.from_snr_db(10.0, var_ae=0.0, var_re=0.0, rate_s=1e-6)
    v = validate_against_markov(params, QueuePolicy.from_interior([0.5]), 20_000, seed=0,
                                n_mc=20_000)
    assert v.analytic_mu == pytest.approx(1.0)
    assert v.abs_gap <= 0.01


def test_no_tie_slots_when_bob_link_is_dead(ref_params):
    # var_rb = 0: S5 never holds, so k1 = 0 and the policy is irrelevant.
    params = ref_params.with_(var_rb=0.0)
    est = estimate_mode_probs(params, 20_000, seed=0)
    assert est.probs.k1 == 0.0
    policy = QueuePolicy.from_interior([0.2, 0.9])
    v = validate_against_markov(params, policy, 50_000, seed=1, n_mc=50_000)
    assert v.abs_gap <= 0.01


@pytest.mark.slow
def test_occupancy_matches_stationary_distribution(ref_params):
    q = 5
    est = estimate_mode_probs(ref_params, 200_000, seed=21)
    policy = optimize_policy(est.probs, q).policy
    zeta = stationary(*transition_probs(est.probs, policy)).zeta
    rep = run_slots(ref_params, policy, SchemeVariant.PROPOSED, 1_000_000, seed=22)
    assert np.abs(rep.queue_hist - zeta).sum() <= 0.03


def test_report_serializes_to_json(ref_params):
    rep = run_slots(ref_params, QueuePolicy.from_interior([0.5]), n_slots=500, seed=3)
    data = json.loads(json.dumps(rep.to_dict()))
    assert data["variant"] == "proposed"
    assert data["initial_queue"] == 0
    assert sum(data["mode_counts"].values()) == 500
    assert len(data["queue_hist"]) == 3


def test_variant_masks():
    assert mask_for(SchemeVariant.PROPOSED) is None
    assert mask_for("s2_hd_only") is not None


def test_invalid_slot_count(ref_params):
    with pytest.raises(ValueError):
        run_slots(ref_params, QueuePolicy((1.0, 0.0)), n_slots=0)
