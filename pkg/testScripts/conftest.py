import pytest

# Engineering thresholds for the distributional checks. Limit laws come without finite-n
# convergence rates, so these are picks, not derived values.
THRESHOLDS = {
    "tv_distance": 0.01,            # sampler vs exact shape law, n = 8, 10^6 samples
    "se_multiplier": 3.0,           # MC mean within this many standard errors of the exact value
    "chi2_min_pvalue": 1e-6,        # histogram vs exact probabilities
    "theta_ks_distance": 0.09,      # uniform-labeled H/(2 sqrt n), n = 4096, 10^4 samples; E H trails 2 sqrt(pi n) by ~6
    "yule_scaled_height": (3.5, 4.6),  # mean H/ln n at n = 10^6
    "yule_offset_iqr": 6.0,         # pooled IQR of H - alpha ln n + beta ln ln n
}


@pytest.fixture
def thresholds():
    return THRESHOLDS
