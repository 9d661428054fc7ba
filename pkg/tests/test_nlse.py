import math
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sagnacsq import _core, nlse
from sagnacsq._core import _fallback
from sagnacsq.errors import InvalidParameterError, NumericInstabilityError, WindowingError
from sagnacsq.oracles import sech_energy_trapezoid
from sagnacsq.params import HB1500, FiberSpec, PulseSpec, fundamental_soliton_energy, t0_from_fwhm
from sagnacsq.validation import convergence_exponent

GRID = nlse.TimeGrid(1024, 8.0)


def soliton():
    e1 = fundamental_soliton_energy(HB1500, 100.0).soliton_energy_pj
    return nlse.make_sech_envelope(GRID, PulseSpec(100.0, energy_pj=e1))


def test_grid_layout():
    g = nlse.TimeGrid(256, 4.0)
    assert g.t[128] == 0.0
    assert g.dt == pytest.approx(4e-12 / 256)
    assert g.omega[1] == pytest.approx(g.d_omega)
    for bad in ((100, 4.0), (32, 4.0), (256, 0.0)):
        with pytest.raises(InvalidParameterError):
            nlse.TimeGrid(*bad)


def test_envelope_shape_check():
    with pytest.raises(InvalidParameterError):
        nlse.Envelope(GRID, np.zeros(10))


def test_sech_envelope_peak_and_energy():
    env = nlse.make_sech_envelope(nlse.TimeGrid(2048, 8.0), PulseSpec(100.0, energy_pj=146.3))
    p0 = 146.3e-12 / (2 * t0_from_fwhm(100.0) * 1e-15)
    assert abs(env.samples[1024]) == pytest.approx(math.sqrt(p0), rel=1e-12)
    assert env.energy_pj == pytest.approx(146.3, rel=1e-9)
    oracle = sech_energy_trapezoid(p0, t0_from_fwhm(100.0) * 1e-15, env.grid.t) * 1e12
    assert env.energy_pj == pytest.approx(oracle, rel=1e-9)
    assert env.fwhm_fs() == pytest.approx(100.0, rel=2e-3)


def test_window_too_small():
    with pytest.raises(WindowingError):
        nlse.make_sech_envelope(nlse.TimeGrid(256, 0.5), PulseSpec(100.0, energy_pj=1.0))


def test_wide_window_no_overflow():
    env = nlse.make_sech_envelope(nlse.TimeGrid(4096, 400.0), PulseSpec(100.0, energy_pj=1.0))
    assert np.isfinite(env.samples).all()


def test_identity_propagation():
    env = soliton()
    out = nlse.split_step(env.samples, GRID.dt, 0.0, 0.0, 10.0, 50)
    assert np.array_equal(out, env.samples)


def test_cw_spm_closed_form():
    a = np.full(256, math.sqrt(2.0), dtype=complex)
    out = nlse.split_step(a, 1e-14, -13.7e-27, 2.9e-3, 9.5, 17)
    # dispersion does nothing to a constant field; phase = gamma P L
    assert np.allclose(out, a * np.exp(1j * 2.9e-3 * 2.0 * 9.5), rtol=0, atol=1e-12)


def test_pure_dispersion_matches_single_multiply():
    env = soliton()
    many = nlse.split_step(env.samples, GRID.dt, HB1500.beta2, 0.0, 9.5, 1)
    spec = np.fft.fft(env.samples) * np.exp(1j * HB1500.beta2 / 2 * GRID.omega ** 2 * 9.5)
    assert np.allclose(many, np.fft.ifft(spec), atol=1e-12)


def test_soliton_fidelity_and_energy():
    env = soliton()
    out = nlse.ssfm_propagate(env, HB1500, 2000)
    assert out.peak_power_w == pytest.approx(env.peak_power_w, rel=1e-2)
    assert out.fwhm_fs() == pytest.approx(env.fwhm_fs(), rel=1e-2)
    assert out.energy_pj == pytest.approx(env.energy_pj, rel=1e-9)


def test_convergence_exponent():
    env = soliton()
    p, errs = convergence_exponent(GRID, env, HB1500)
    assert 1.7 <= p <= 2.3
    p_fine, errs_fine = convergence_exponent(GRID, env, HB1500, steps=(400, 800))
    assert 1.9 <= p_fine <= 2.1
    assert errs_fine[1] < errs[1]


@settings(max_examples=15, deadline=None)
@given(st.floats(0.0, 5.0), st.floats(-30, 30), st.floats(0, 1))
def test_energy_conserved(gamma, b2, scale):
    a = soliton().samples * scale
    out = nlse.split_step(a, GRID.dt, b2 * 1e-27, gamma * 1e-3, 5.0, 40)
    e0 = np.sum(np.abs(a) ** 2)
    assert np.sum(np.abs(out) ** 2) == pytest.approx(e0, rel=1e-9, abs=1e-300)


@settings(max_examples=10, deadline=None)
@given(st.floats(0.1, 3), st.floats(0.1, 3))
def test_linearity_without_kerr(c1, c2):
    a = soliton().samples
    b = np.roll(a, 100) * 1j
    prop = lambda x: nlse.split_step(x, GRID.dt, HB1500.beta2, 0.0, 9.5, 10)
    assert np.allclose(prop(c1 * a + c2 * b), c1 * prop(a) + c2 * prop(b), atol=1e-9)


def test_time_reversal():
    env = soliton()
    fwd = nlse.split_step(env.samples, GRID.dt, HB1500.beta2, HB1500.gamma, 9.5, 400)
    back = nlse.split_step(fwd, GRID.dt, -HB1500.beta2, -HB1500.gamma, 9.5, 400)
    scale = np.abs(env.samples).max()
    assert np.max(np.abs(back - env.samples)) / scale < 1e-4


def test_batched_equals_single():
    a = soliton().samples
    rows = np.stack([a, 0.5 * a, np.roll(a, 7)])
    batch = nlse.split_step(rows, GRID.dt, HB1500.beta2, HB1500.gamma, 9.5, 50)
    for row, out in zip(rows, batch):
        single = nlse.split_step(row, GRID.dt, HB1500.beta2, HB1500.gamma, 9.5, 50)
        assert np.allclose(single, out, rtol=0, atol=1e-12)


def test_nan_input_reports_step_zero():
    a = soliton().samples.copy()
    a[10] = np.nan
    with pytest.raises(NumericInstabilityError) as info:
        nlse.split_step(a, GRID.dt, HB1500.beta2, HB1500.gamma, 9.5, 20)
    assert info.value.step == 0


def test_bad_step_count():
    with pytest.raises(InvalidParameterError):
        nlse.split_step(soliton().samples, GRID.dt, 0.0, 0.0, 1.0, 0)


def test_kernel_parity():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((3, 512)) + 1j * rng.standard_normal((3, 512))
    f = np.exp(1j * rng.standard_normal(512))
    x, y = a.copy(), a.copy()
    assert _core.spm_phase(x, 0.37) and _fallback.spm_phase(y, 0.37)
    assert np.allclose(x, y, rtol=0, atol=1e-13)
    _core.apply_spectral(x, f)
    _fallback.apply_spectral(y, f)
    assert np.allclose(x, y, rtol=0, atol=1e-13)
    bad = a.copy()
    bad[1, 3] = np.inf
    assert not _core.spm_phase(bad.copy(), 0.1)
    assert not _fallback.spm_phase(bad.copy(), 0.1)


def test_pure_python_backend_selected_by_env():
    env = dict(os.environ, SAGNACSQ_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import sagnacsq; print(sagnacsq.KERNEL_BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_envelope_csv():
    env = nlse.make_sech_envelope(nlse.TimeGrid(64, 4.0), PulseSpec(100.0, energy_pj=1.0))
    lines = env.to_csv().splitlines()
    assert lines[0] == "t_ps,re_sqrtW,im_sqrtW,power_W"
    assert len(lines) == 65
    assert env.to_csv() == env.to_csv()


def test_default_steps():
    assert nlse.default_steps(HB1500) == 2000
    assert nlse.default_steps(FiberSpec(-20.3, 1.05, 50.0)) == 8000
