import numpy as np
import pytest

from fdrelay.channel import SystemParams
from fdrelay.markov import ModeProbabilities

# (criterion, passed, detail) lines collected by test_acceptance.py
ACCEPTANCE_RESULTS = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")


def random_mode_probs(rng, k_floor=1e-3):
    """Random valid ModeProbabilities with every k strictly positive."""
    w = rng.dirichlet(np.ones(6))
    k1, k2, k3, _idle, p_rf, p_df_only = w
    k1, k2, k3 = (max(k, k_floor) for k in (k1, k2, k3))
    total = k1 + k2 + k3 + p_rf + p_df_only
    if total > 1:
        k1, k2, k3, p_rf, p_df_only = (v / total for v in (k1, k2, k3, p_rf, p_df_only))
    p_df_total = p_df_only + rng.uniform() * p_rf
    return ModeProbabilities(k1=k1, k2=k2, k3=k3, p_rf=p_rf,
                             p_df_total=p_df_total, p_df_only=p_df_only)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def ref_params():
    return SystemParams.from_snr_db(10.0)


@pytest.fixture
def unit_params():
    """Unit noise power kappa*W = 1, unit powers, no self-interference."""
    return SystemParams(p_a=1.0, p_r=1.0, kappa_r=1.0, kappa_b=1.0, kappa_e=1.0,
                        bandwidth_w=1.0, slot_t=8.0, var_rr=0.0)
