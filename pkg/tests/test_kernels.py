import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from csd import kernels
from csd.detection import DetectionParams, LlrReport
from csd.fusion import NoTrustedEvidence, csd_decision

BACKENDS = kernels.available_backends()
needs_both = pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled extension not built")


def reference(llr, mu, z_thr):
    """Per-cell statistic through the scalar fusion path, plus a near-tie mask."""
    params = DetectionParams(z_thr=z_thr)
    out = np.empty(llr.shape[:2])
    ties = np.zeros(llr.shape[:2], dtype=bool)
    for b in range(llr.shape[0]):
        for t in range(llr.shape[1]):
            reports = [LlrReport(i, float(v), float(m)) for i, (v, m) in enumerate(zip(llr[b, t], mu))]
            try:
                verdict, table = csd_decision(reports, t + 1, params)
                out[b, t] = verdict.statistic
            except NoTrustedEvidence as exc:
                table = exc.table
                out[b, t] = np.nan
            ties[b, t] = any(abs(abs(z) - z_thr) < 1e-9 for z in table.scores.values())
    return out, ties


def test_python_backend_always_available():
    assert "python" in BACKENDS
    assert kernels.BACKEND in BACKENDS


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.load_backend("fortran")


@pytest.mark.parametrize("name", BACKENDS)
def test_unfiltered_is_plain_sum(name):
    rng = np.random.default_rng(0)
    llr = rng.normal(size=(4, 6, 5))
    out = kernels.load_backend(name).filtered_statistics(llr, np.ones(5), 1.0, False)
    assert np.allclose(out, llr.sum(axis=-1), rtol=0, atol=1e-12)


@pytest.mark.parametrize("name", BACKENDS)
def test_all_removed_is_nan(name):
    llr = np.array([[[0.0, 30.0]]])
    out = kernels.load_backend(name).filtered_statistics(llr, np.array([41.0, 30.0]), 0.5)
    assert np.isnan(out[0, 0])


@pytest.mark.parametrize("name", BACKENDS)
def test_mu_length_checked(name):
    with pytest.raises(ValueError):
        kernels.load_backend(name).filtered_statistics(np.zeros((1, 1, 3)), np.ones(2), 1.0)


llr_blocks = arrays(
    np.float64,
    st.tuples(st.integers(1, 3), st.integers(1, 5), st.integers(1, 8)),
    elements=st.floats(-50, 50, allow_nan=False),
)


@settings(max_examples=60, deadline=None)
@given(llr_blocks, st.sampled_from([0.5, 1.0, 1.5]), st.data())
def test_backends_match_scalar_path(llr, z_thr, data):
    mu = np.array(data.draw(st.lists(st.floats(0.5, 20), min_size=llr.shape[2], max_size=llr.shape[2])))
    expected, ties = reference(llr, mu, z_thr)
    for name in BACKENDS:
        got = kernels.load_backend(name).filtered_statistics(llr, mu, z_thr)
        close = np.isclose(got, expected, rtol=1e-9, atol=1e-9) | (np.isnan(got) & np.isnan(expected))
        assert (close | ties).all()


@needs_both
@settings(max_examples=100, deadline=None)
@given(llr_blocks, st.floats(0.1, 3.0), st.data())
def test_backends_bit_identical(llr, z_thr, data):
    mu = np.array(data.draw(st.lists(st.floats(0.5, 20), min_size=llr.shape[2], max_size=llr.shape[2])))
    a = kernels.load_backend("cython").filtered_statistics(llr, mu, z_thr)
    b = kernels.load_backend("python").filtered_statistics(llr, mu, z_thr)
    assert np.array_equal(a, b, equal_nan=True)


@needs_both
def test_backends_identical_on_scenario():
    from csd.harness import bundled_scenario, simulate_statistics

    spec = bundled_scenario("scenario2").replace(max_periods=60)
    for h in (0, 1):
        a = simulate_statistics(spec, spec.truth(h), range(200), backend="cython")
        b = simulate_statistics(spec, spec.truth(h), range(200), backend="python")
        assert np.array_equal(a, b, equal_nan=True)
