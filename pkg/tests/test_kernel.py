"""Delayed-spike kernel assembly and grid sampling."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from delayheom.constants import CONSTANTS
from delayheom.kernel import (
    BACKWARD,
    FORWARD,
    DelayKernel,
    KernelTerm,
    build_kernel,
    kernel_convolve_sample,
)
from tests.conftest import make_scaled

HBAR2 = CONSTANTS.hbar_ev_fs**2


@pytest.fixture
def cavity():
    return make_scaled(1.0, 3.7)


def test_same_site_is_single_instantaneous_spike(cavity):
    for pair in (("A", "A"), ("B", "B")):
        k = build_kernel(cavity, pair)
        assert len(k.terms) == 1
        (term,) = k.terms
        assert term.direction == FORWARD
        assert term.delay_fs == 0.0
        assert term.weight == pytest.approx(2.0 * cavity.v_aa_ev * HBAR2, rel=1e-15)


def test_cross_site_split_into_retarded_and_advanced(cavity):
    k = build_kernel(cavity, ("A", "B"))
    assert len(k.terms) == 2
    directions = {t.direction for t in k.terms}
    assert directions == {FORWARD, BACKWARD}
    for t in k.terms:
        assert t.delay_fs == cavity.tau_fs
        assert t.weight == pytest.approx(2.0 * cavity.v_ab_ev * HBAR2, rel=1e-15)
    assert len(k.forward_terms()) == 1
    assert k.forward_terms()[0].direction == FORWARD


def test_cross_weight_is_half_same_site(cavity):
    w_same = build_kernel(cavity, ("A", "A")).terms[0].weight
    w_cross = build_kernel(cavity, ("B", "A")).terms[0].weight
    assert w_cross == pytest.approx(w_same / 2, rel=1e-15)


def test_invalid_pair_rejected(cavity):
    with pytest.raises(ValueError):
        build_kernel(cavity, ("A", "C"))
    with pytest.raises(ValueError):
        build_kernel(cavity, ("X", "X"))


def test_term_validation():
    with pytest.raises(ValueError):
        KernelTerm(weight=1.0, delay_fs=-2.0, direction=FORWARD)
    with pytest.raises(ValueError):
        KernelTerm(weight=1.0, delay_fs=2.0, direction="sideways")


# ---------------------------------------------------------------------------
# grid sampling
# ---------------------------------------------------------------------------


def test_instantaneous_sampling_is_pointwise(cavity):
    k = build_kernel(cavity, ("A", "A"))
    samples = np.exp(1j * np.linspace(0.0, 2.0, 11))
    w = k.terms[0].weight
    for n in range(11):
        assert kernel_convolve_sample(k, samples, 0.5, n) == pytest.approx(
            w * samples[n], rel=1e-15
        )


def test_retarded_sampling_shifts_by_the_delay(cavity):
    k = build_kernel(cavity, ("A", "B"))
    h = cavity.tau_fs / 10       # delay = 10 grid steps
    samples = np.arange(25, dtype=complex) + 1.0j
    w = k.forward_terms()[0].weight
    for n in range(25):
        got = kernel_convolve_sample(k, samples, h, n)
        want = w * samples[n - 10] if n >= 10 else 0.0
        assert got == pytest.approx(want, rel=1e-15, abs=0.0)


def test_pre_start_reads_contribute_zero(cavity):
    k = build_kernel(cavity, ("A", "B"))
    h = cavity.tau_fs / 10
    samples = np.ones(5, dtype=complex)
    assert kernel_convolve_sample(k, samples, h, 4) == 0.0


def test_misaligned_delay_is_an_error(cavity):
    k = build_kernel(cavity, ("A", "B"))
    with pytest.raises(ValueError):
        kernel_convolve_sample(k, np.ones(10, complex), cavity.tau_fs / 10.5, 9)


def test_sampling_argument_validation(cavity):
    k = build_kernel(cavity, ("A", "A"))
    with pytest.raises(ValueError):
        kernel_convolve_sample(k, np.ones(4, complex), 0.5, 4)    # out of range
    with pytest.raises(ValueError):
        kernel_convolve_sample(k, np.ones(4, complex), 0.5, -1)
    with pytest.raises(ValueError):
        kernel_convolve_sample(k, np.ones(4, complex), 0.0, 2)    # bad step


@settings(max_examples=30, deadline=None)
@given(
    re1=st.lists(st.floats(-2, 2), min_size=15, max_size=15),
    re2=st.lists(st.floats(-2, 2), min_size=15, max_size=15),
    a=st.floats(-3, 3),
    b=st.floats(-3, 3),
)
def test_sampling_is_linear(re1, re2, a, b):
    kern = DelayKernel(
        pair=("A", "B"),
        terms=(
            KernelTerm(weight=0.8, delay_fs=2.0, direction=FORWARD),
            KernelTerm(weight=0.3, delay_fs=0.0, direction=FORWARD),
        ),
    )
    x = np.array(re1, dtype=complex)
    y = np.array(re2, dtype=complex) * 1j
    for n in (0, 3, 7, 14):
        lhs = kernel_convolve_sample(kern, a * x + b * y, 1.0, n)
        rhs = a * kernel_convolve_sample(kern, x, 1.0, n) + b * kernel_convolve_sample(
            kern, y, 1.0, n
        )
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)
