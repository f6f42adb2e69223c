"""Reference solvers: limits, regressions, and cross-validation.

Both solvers here exist to check the hierarchy, so they get checked
against things that do not involve the hierarchy at all: closed-form
limits, analytic stationary values, step-halving ratios, and each other.
The frozen complex spot values are regression pins -- recorded from a
run of this code once its limits were verified, not derived elsewhere.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from delayheom import oracle
from delayheom.constants import CONSTANTS
from tests.conftest import make_decoupled, make_scaled


# ---------------------------------------------------------------------------
# delay equations
# ---------------------------------------------------------------------------


def test_wavefunction_argument_validation():
    cav = make_scaled(1.0, 0.0)
    with pytest.raises(ValueError):
        oracle.run_wavefunction(cav, 0, 100.0)
    with pytest.raises(ValueError):
        oracle.run_wavefunction(cav, 50, 0.0)


def test_decoupled_amplitude_is_a_plain_exponential():
    cav = make_decoupled(0.02)
    ga = cav.gamma_a_ev / CONSTANTS.hbar_ev_fs
    r = oracle.run_wavefunction(cav, 100, 1000.0)
    assert np.abs(r.amp_a - np.exp(-ga * r.times)).max() < 1e-8
    assert np.all(r.amp_b == 0.0)


def test_trapped_fixed_point():
    # resonant feedback with unit gamma*tau freezes a quarter of the
    # excitation in each slab, with opposite amplitude signs
    r = oracle.run_wavefunction(make_scaled(1.0, 0.0), 200, 3000.0)
    assert abs(r.amp_a[-1] - 0.25) < 1e-7
    assert abs(r.amp_b[-1] + 0.25) < 1e-7
    # frozen spot values, pinned to full precision
    assert r.amp_a[-1] == pytest.approx(0.2499999954730365 + 0j, abs=1e-12)
    assert r.amp_b[-1] == pytest.approx(-0.2500000045269628 + 0j, abs=1e-12)


def test_generic_spot_regression():
    r = oracle.run_wavefunction(make_scaled(1.0, 3.7), 200, 1000.0)
    assert r.amp_a[-1] == pytest.approx(
        -0.17975289387417598 + 0.09272027311310449j, abs=1e-12
    )
    assert r.amp_b[-1] == pytest.approx(
        -0.1848977569864272 + 0.09753020395517134j, abs=1e-12
    )


def test_wavefunction_step_halving_is_second_order():
    cav = make_scaled(1.0, 3.7)
    ref = oracle.run_wavefunction(cav, 800, 1000.0)
    d100 = np.abs(oracle.run_wavefunction(cav, 100, 1000.0).amp_a - ref.amp_a[::8]).max()
    d200 = np.abs(oracle.run_wavefunction(cav, 200, 1000.0).amp_a - ref.amp_a[::4]).max()
    assert 3.0 < d100 / d200 < 5.0


def test_wavefunction_silence_before_the_delay():
    r = oracle.run_wavefunction(make_scaled(2.0, 3.7), 50, 300.0)
    assert np.all(r.amp_b[:51] == 0.0)
    assert r.amp_b[51] != 0.0


# ---------------------------------------------------------------------------
# discretized field
# ---------------------------------------------------------------------------


def test_bath_argument_validation():
    cav = make_scaled(1.0, 0.0)
    with pytest.raises(ValueError):
        oracle.run_discretized_bath(cav, 1, 50, 100.0)
    with pytest.raises(ValueError):
        oracle.run_discretized_bath(cav, 64, 0, 100.0)
    with pytest.raises(ValueError):
        oracle.run_discretized_bath(cav, 64, 50, 0.0)
    with pytest.raises(ValueError):
        oracle.run_discretized_bath(cav, 64, 50, 100.0, half_bandwidth_fs=-1.0)


def test_bath_tracks_the_delay_equations():
    # modest mode count, short run: enough to see the two independent
    # constructions agree to the percent level (the tight comparison
    # with increasing mode counts lives in the acceptance suite)
    cav = make_scaled(1.0, 0.0)
    b = oracle.run_discretized_bath(cav, 1024, 100, 600.0)
    w = oracle.run_wavefunction(cav, 100, 600.0)
    dev = np.abs(np.abs(b.amp_a) ** 2 - np.abs(w.amp_a) ** 2).max()
    assert dev < 2e-2
    assert b.norm_drift < 1e-8


def test_bath_norm_is_conserved_to_roundoff():
    b = oracle.run_discretized_bath(make_scaled(2.0, 3.7), 512, 50, 400.0)
    assert b.norm_drift < 1e-10


def test_bath_recurrence_time_formula():
    b = oracle.run_discretized_bath(make_scaled(1.0, 0.0), 1024, 50, 100.0)
    assert b.n_modes == 1024
    assert b.recurrence_fs == pytest.approx(math.pi * 1024 / 0.8, rel=1e-12)


def test_bath_default_bandwidth_is_eighty_amplitude_rates():
    cav = make_scaled(1.0, 0.0)   # amplitude rate 0.01/fs
    b1 = oracle.run_discretized_bath(cav, 256, 50, 200.0)
    b2 = oracle.run_discretized_bath(cav, 256, 50, 200.0, half_bandwidth_fs=0.8)
    assert np.array_equal(b1.amp_a, b2.amp_a)
    assert np.array_equal(b1.amp_b, b2.amp_b)


def test_bath_with_no_coupling_is_exactly_frozen():
    init = (0.6 + 0j, 0.8j)
    b = oracle.run_discretized_bath(
        make_decoupled(0.0), 64, 50, 300.0, init=init, half_bandwidth_fs=1.0
    )
    assert np.all(b.amp_a == init[0])
    assert np.all(b.amp_b == init[1])
    assert b.norm_drift == 0.0


def test_dde_with_no_coupling_is_exactly_frozen():
    init = (0.6 + 0j, 0.8j)
    w = oracle.run_wavefunction(make_decoupled(0.0), 50, 300.0, init=init)
    assert np.all(w.amp_a == init[0])
    assert np.all(w.amp_b == init[1])
