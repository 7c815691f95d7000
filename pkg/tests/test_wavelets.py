import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wnoma.wavelets import (FAMILIES, CoefficientPyramid, WaveletSpec, daubechies, dwt_analyze,
                            idwt_synthesize, interpolate, pulse_peak, quadrature_mirror, synthesis_matrix,
                            wavelet_demodulate, wavelet_filters, wavelet_modulate)
from conftest import crandn


def analysis_matrix(g, h, n, levels):
    """Explicit analysis operator assembled from shifted, wrapped filter rows."""
    def step(m):
        a = np.zeros((m // 2, m))
        d = np.zeros((m // 2, m))
        for k in range(m // 2):
            for i, (gi, hi) in enumerate(zip(g, h)):
                a[k, (2 * k + i) % m] += gi
                d[k, (2 * k + i) % m] += hi
        return a, d

    rows_detail = []
    op = np.eye(n)
    m = n
    for _ in range(levels):
        a, d = step(m)
        rows_detail.insert(0, d @ op)
        op = a @ op
        m //= 2
    return np.vstack([op] + rows_detail)


@pytest.mark.parametrize("family", FAMILIES)
def test_orthonormal_filter_conditions(family):
    g, h = wavelet_filters(family)
    # sym4/coif2 are standard 16-digit tables, orthonormal to about 1e-12
    tol = 1e-11 if family in ("sym4", "coif2") else 1e-12
    assert g.sum() == pytest.approx(np.sqrt(2), abs=tol)
    assert np.dot(g, g) == pytest.approx(1.0, abs=tol)
    for s in range(2, len(g), 2):
        assert np.dot(g[:-s], g[s:]) == pytest.approx(0.0, abs=tol)
    assert h.sum() == pytest.approx(0.0, abs=tol)
    assert np.allclose(h, quadrature_mirror(g))


@pytest.mark.parametrize("p", [2, 3, 6, 8, 10])
def test_daubechies_vanishing_moments(p):
    g = daubechies(p)
    h = quadrature_mirror(g)
    n = np.arange(len(h), dtype=float)
    for k in range(p):
        assert abs(np.sum(n ** k * h)) < 1e-6 * max(1.0, np.sum(np.abs(n ** k * h)))


@pytest.mark.parametrize("family", FAMILIES)
def test_filters_match_pywavelets(family):
    pywt = pytest.importorskip("pywt")
    g, _ = wavelet_filters(family)
    ref = np.array(pywt.Wavelet(family).rec_lo)
    # orientation is a convention; compare up to reversal
    assert np.allclose(g, ref, atol=1e-12) or np.allclose(g, ref[::-1], atol=1e-12)


@pytest.mark.parametrize("family", ["haar", "db2", "db6", "sym4", "coif2"])
@pytest.mark.parametrize("levels", [1, 2, 3])
def test_dwt_matches_explicit_matrix(family, levels, rng):
    n = 64
    spec = WaveletSpec(family, levels)
    A = analysis_matrix(spec.g, spec.h, n, levels)
    assert np.allclose(A @ A.T, np.eye(n), atol=1e-10)
    x = crandn(rng, n)
    assert np.max(np.abs(dwt_analyze(x, spec).flatten() - A @ x)) < 1e-10
    c = crandn(rng, n)
    pyr = CoefficientPyramid.unflatten(c, levels)
    assert np.max(np.abs(np.asarray(idwt_synthesize(pyr, spec)) - A.T @ c)) < 1e-10
    assert np.allclose(synthesis_matrix(spec, n), A.T, atol=1e-12)


def test_haar_single_level_by_hand():
    x = np.array([1.0, 3.0, -2.0, 4.0])
    pyr = dwt_analyze(x, WaveletSpec("haar", 1))
    r = 1 / np.sqrt(2)
    assert np.allclose(pyr.approx, [4 * r, 2 * r])
    assert np.allclose(np.abs(pyr.details[0]), np.abs([-2 * r, -6 * r]))


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(FAMILIES), st.integers(1, 4), st.integers(5, 8), st.integers(0, 2**32 - 1))
def test_perfect_reconstruction_and_energy(family, levels, log_n, seed):
    spec = WaveletSpec(family, levels)
    x = crandn(np.random.default_rng(seed), 2 ** log_n)
    pyr = dwt_analyze(x, spec)
    assert pyr.energy == pytest.approx(np.sum(np.abs(x) ** 2), rel=1e-10)
    assert np.max(np.abs(np.asarray(idwt_synthesize(pyr, spec)) - x)) < 1e-10


def test_batched_transform_equals_rowwise(rng):
    spec = WaveletSpec("db6", 2)
    x = crandn(rng, 5, 128)
    batched = dwt_analyze(x, spec).flatten()
    for row, b in zip(x, batched):
        assert np.allclose(dwt_analyze(row, spec).flatten(), b)


def test_pyramid_flatten_roundtrip(rng):
    c = crandn(rng, 32)
    pyr = CoefficientPyramid.unflatten(c, 3)
    assert [len(pyr.approx)] + [len(d) for d in pyr.details] == [4, 4, 8, 16]
    assert np.array_equal(pyr.flatten(), c)
    assert pyr.levels == 3


def test_modem_roundtrip_and_no_prefix(rng):
    spec = WaveletSpec("sym4", 2)
    s = crandn(rng, 256)
    x = wavelet_modulate(s, spec)
    assert len(x) == 256
    assert np.allclose(np.asarray(wavelet_demodulate(x, spec)), s, atol=1e-12)


def test_invalid_specs():
    with pytest.raises(ValueError):
        WaveletSpec("db7", 2)
    with pytest.raises(ValueError):
        WaveletSpec("haar", 0)
    with pytest.raises(ValueError):
        dwt_analyze(np.ones(12), WaveletSpec("haar", 3))


def test_pulse_peak_is_sqrt_n_max_basis():
    spec = WaveletSpec("haar", 2)
    W = synthesis_matrix(spec, 16)
    assert pulse_peak(spec, 16) == pytest.approx(4 * np.abs(W).max())
    # the finest haar detail pulse is (1, -1)/sqrt(2)
    assert pulse_peak(spec, 16) == pytest.approx(4 / np.sqrt(2))


def test_interpolate_matches_explicit_upsampling(rng):
    spec = WaveletSpec("db2", 1)
    x = crandn(rng, 40)
    up = np.zeros(80, dtype=complex)
    up[::2] = x
    ref = np.convolve(up, spec.g)[:79]
    out = interpolate(x, spec, 1)
    assert np.allclose(out[:79], ref)
