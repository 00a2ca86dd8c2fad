import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fdrelay.channel import ChannelDraw, SystemParams, compute_sinrs, sample_channel_draw


def test_default_codeword_length_is_floor_of_wt():
    assert SystemParams().codeword_len_b == 1000
    assert SystemParams(bandwidth_w=10.0, slot_t=0.55).codeword_len_b == 5
    assert SystemParams(codeword_len_b=8).codeword_len_b == 8


def test_with_rederives_codeword_length():
    p = SystemParams().with_(slot_t=2e-3)
    assert p.codeword_len_b == 2000


@pytest.mark.parametrize("bad", [
    dict(p_a=-1.0), dict(var_rr=-0.1), dict(kappa_e=0.0), dict(bandwidth_w=0.0),
    dict(slot_t=-1.0), dict(buffer_cap_q=0), dict(rate_s=0.0), dict(codeword_len_b=0),
    dict(buffer_cap_q=2.5),
])
def test_invalid_params_rejected(bad):
    with pytest.raises(ValueError):
        SystemParams(**bad)


def test_from_snr_db_normalizes_noise():
    p = SystemParams.from_snr_db(10.0)
    assert p.p_a == pytest.approx(10.0)
    assert p.kappa_e * p.bandwidth_w == pytest.approx(1.0)
    assert p.var_rr == 0.1 and p.rate_s == 1.0 and p.codeword_len_b == 1000


def test_zero_variance_gives_exact_zero():
    params = SystemParams(var_ae=0.0)
    draw = sample_channel_draw(np.random.default_rng(1), params, size=1000)
    assert np.all(draw.h_ae == 0)
    single = sample_channel_draw(np.random.default_rng(1), params)
    assert single.h_ae == 0


def test_same_seed_same_draws():
    params = SystemParams()
    d1 = sample_channel_draw(np.random.default_rng(7), params, size=5)
    d2 = sample_channel_draw(np.random.default_rng(7), params, size=5)
    for name in ("h_ar", "h_rb", "h_ae", "h_re", "h_rr"):
        np.testing.assert_array_equal(getattr(d1, name), getattr(d2, name))


def test_batch_equals_sequential_single_draws():
    params = SystemParams()
    batch = sample_channel_draw(np.random.default_rng(3), params, size=4)
    rng = np.random.default_rng(3)
    for i in range(4):
        one = sample_channel_draw(rng, params)
        assert one.h_rr == batch.h_rr[i]
        assert one.h_ar == batch.h_ar[i]


def test_unit_variance_second_moment():
    params = SystemParams()
    draw = sample_channel_draw(np.random.default_rng(11), params, size=1_000_000)
    m = np.mean(np.abs(draw.h_ar) ** 2)
    assert 0.99 <= m <= 1.01


def test_moments_within_three_standard_errors():
    params = SystemParams(var_ar=2.0, var_rb=0.5, var_ae=1.0, var_re=3.0, var_rr=0.1)
    n = 200_000
    draw = sample_channel_draw(np.random.default_rng(5), params, size=n)
    for link in ("ar", "rb", "ae", "re", "rr"):
        power = np.abs(getattr(draw, "h_" + link)) ** 2
        var = getattr(params, "var_" + link)
        # |h|^2 is exponential with mean var, so its std is var too.
        assert abs(power.mean() - var) <= 3 * var / math.sqrt(n)
        h = getattr(draw, "h_" + link)
        assert abs(h.mean()) <= 4 * math.sqrt(var / n)


def _draw(h_ar=1.0, h_rb=1.0, h_ae=0.0, h_re=0.0, h_rr=0.0):
    return ChannelDraw(complex(h_ar), complex(h_rb), complex(h_ae), complex(h_re),
                       complex(h_rr))


def test_sinr_no_self_interference():
    params = SystemParams(p_a=10.0, p_r=10.0, kappa_r=1.0, kappa_b=1.0, kappa_e=1.0,
                          bandwidth_w=1.0, slot_t=1.0)
    s = compute_sinrs(_draw(h_rr=0.0), params)
    assert s.gamma_r_fd == pytest.approx(10.0)


def test_sinr_with_self_interference():
    params = SystemParams(p_a=10.0, p_r=10.0, kappa_r=1.0, kappa_b=1.0, kappa_e=1.0,
                          bandwidth_w=1.0, slot_t=1.0)
    s = compute_sinrs(_draw(h_rr=math.sqrt(0.1)), params)
    assert s.gamma_r_fd == pytest.approx(5.0)


def test_silent_source():
    params = SystemParams(p_a=0.0)
    s = compute_sinrs(_draw(h_ae=0.7 + 0.2j, h_re=0.3j, h_rr=0.1), params)
    assert s.gamma_r_fd == s.gamma_ar_hd == s.gamma_ae_hd == s.gamma_ae_fd == 0.0


def test_sinr_formulas_against_hand_values():
    params = SystemParams(p_a=2.0, p_r=3.0, kappa_r=0.5, kappa_b=0.25, kappa_e=2.0,
                          bandwidth_w=2.0, slot_t=1.0)
    d = _draw(h_ar=1.0, h_rb=2.0, h_ae=1.0j, h_re=0.5, h_rr=0.5)
    s = compute_sinrs(d, params)
    assert s.gamma_r_fd == pytest.approx(2.0 / (0.25 * 3.0 + 1.0))
    assert s.gamma_rb == pytest.approx(4.0 * 3.0 / 0.5) == s.gamma_rb_hd
    assert s.gamma_ar_hd == pytest.approx(2.0)
    assert s.gamma_ae_hd == pytest.approx(2.0 / 4.0)
    assert s.gamma_re_hd == pytest.approx(0.25 * 3.0 / 4.0)
    assert s.gamma_ae_fd == pytest.approx(2.0 / (0.75 + 4.0))
    assert s.gamma_re_fd == pytest.approx(0.75 / (2.0 + 4.0))


def test_sinr_orderings_on_random_draws():
    params = SystemParams.from_snr_db(10.0)
    draw = sample_channel_draw(np.random.default_rng(2), params, size=20_000)
    s = compute_sinrs(draw, params)
    assert np.all(s.gamma_r_fd <= s.gamma_ar_hd)
    assert np.all(s.gamma_ae_fd <= s.gamma_ae_hd)
    assert np.all(s.gamma_re_fd <= s.gamma_re_hd)
    np.testing.assert_array_equal(s.gamma_rb, s.gamma_rb_hd)
    for v in vars(s).values():
        assert np.all(v >= 0) and np.all(np.isfinite(v))


@settings(max_examples=200, deadline=None)
@given(scale=st.floats(1.0, 100.0), seed=st.integers(0, 2**32 - 1))
def test_stronger_self_interference_never_helps(scale, seed):
    params = SystemParams.from_snr_db(10.0)
    d = sample_channel_draw(np.random.default_rng(seed), params)
    louder = ChannelDraw(d.h_ar, d.h_rb, d.h_ae, d.h_re, d.h_rr * scale)
    assert compute_sinrs(louder, params).gamma_r_fd <= compute_sinrs(d, params).gamma_r_fd
