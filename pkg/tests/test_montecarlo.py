import numpy as np
import pytest

from fdrelay.channel import SystemParams
from fdrelay.montecarlo import EVENTS, count_events, draw_indicators, estimate_mode_probs
from fdrelay.policy import Indicators


def test_hand_counted_events():
    ind = Indicators(
        s1=np.array([1, 1, 0, 0, 0, 0, 0], bool),
        s2=np.array([1, 1, 0, 0, 0, 0, 0], bool),
        s3=np.array([1, 0, 1, 0, 0, 0, 0], bool),
        s4=np.array([0, 0, 0, 1, 0, 1, 0], bool),
        s5=np.array([0, 0, 0, 1, 1, 0, 0], bool),
        s_star=np.array([1, 1, 0, 0, 0, 0, 0], bool),
    )
    assert count_events(ind) == {"k1": 1, "k2": 1, "k3": 1, "idle": 1, "p_rf": 2,
                                 "p_df_only": 1, "p_df_total": 2}


def test_disjoint_events_partition_the_slots(ref_params):
    est = estimate_mode_probs(ref_params, 20_000, seed=1)
    c = est.counts
    assert c["k1"] + c["k2"] + c["k3"] + c["idle"] + c["p_rf"] + c["p_df_only"] == 20_000
    p = est.probs
    assert p.p_df_total - p.p_df_only <= p.p_rf + 1e-15
    assert set(est.stderr) == set(EVENTS)


def test_same_seed_same_estimate(ref_params):
    a = estimate_mode_probs(ref_params, 10_000, seed=42)
    b = estimate_mode_probs(ref_params, 10_000, seed=42)
    assert a.counts == b.counts


def test_chunking_does_not_change_counts(ref_params):
    a = estimate_mode_probs(ref_params, 12_345, seed=3, chunk_size=50_000)
    b = estimate_mode_probs(ref_params, 12_345, seed=3, chunk_size=1_000)
    assert a.counts == b.counts


def test_worker_split_is_deterministic(ref_params):
    a = estimate_mode_probs(ref_params, 30_001, seed=5, workers=3)
    b = estimate_mode_probs(ref_params, 30_001, seed=5, workers=3)
    assert a.counts == b.counts
    assert a.n_samples == 30_001


def test_silent_alice_never_secure(ref_params):
    est = estimate_mode_probs(ref_params.with_(p_a=0.0), 5_000, seed=0)
    p = est.probs
    assert p.k1 == p.k3 == p.p_rf == p.p_df_total == 0.0


def test_without_eavesdropper_and_tiny_rate_everything_is_secure():
    params = SystemParams.from_snr_db(10.0, var_ae=0.0, var_re=0.0, rate_s=1e-9)
    est = estimate_mode_probs(params, 5_000, seed=0)
    assert est.probs.p_df_total == 1.0
    assert est.probs.p_rf == 1.0


def test_two_seeds_agree_within_four_standard_errors(ref_params):
    a = estimate_mode_probs(ref_params, 100_000, seed=11)
    b = estimate_mode_probs(ref_params, 100_000, seed=12)
    for key in EVENTS:
        pa, pb = a.counts[key] / a.n_samples, b.counts[key] / b.n_samples
        se = np.hypot(a.stderr[key], b.stderr[key])
        assert abs(pa - pb) <= 4 * se + 1e-12, key


def test_mask_is_applied(ref_params):
    def drop_df(ind):
        return Indicators(ind.s1, ind.s2, np.zeros_like(ind.s3), ind.s4, ind.s5, ind.s_star)

    est = estimate_mode_probs(ref_params, 5_000, seed=0, mask=drop_df)
    assert est.probs.p_df_total == est.probs.p_df_only == 0.0


def test_draw_indicators_shapes(ref_params):
    ind = draw_indicators(np.random.default_rng(0), ref_params, 17)
    assert all(np.asarray(v).shape == (17,) for v in vars(ind).values())


def test_invalid_sample_counts(ref_params):
    with pytest.raises(ValueError):
        estimate_mode_probs(ref_params, 0)
    with pytest.raises(ValueError):
        estimate_mode_probs(ref_params, 10, workers=0)


def test_to_dict_round_trips_through_json(ref_params):
    import json

    est = estimate_mode_probs(ref_params, 1_000, seed=0)
    data = json.loads(json.dumps(est.to_dict()))
    assert data["n_samples"] == 1_000
    assert data["probs"]["k1"] == est.probs.k1
