"""Delta-retarded memory kernels for the slab pair.

The mode-mode memory function is frequency flat over the band that
matters, so its time profile collapses to sharp delta spikes: the
same-site kernel fires instantly, the cross kernel fires exactly one
flight time ``tau`` after emission -- plus, formally, one flight time
*before* (the advanced partner written here as a "backward" term, which
the time-ordered hierarchy never samples but which keeps the kernel's
symmetry on display).  On a grid locked to ``tau`` every delta lands on
a node, so convolution is an exact index lookup, never quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass

from .constants import CONSTANTS
from .qnm import CavityParams

__all__ = ["KernelTerm", "DelayKernel", "build_kernel", "kernel_convolve_sample"]

FORWARD = "forward"
BACKWARD = "backward"


@dataclass(frozen=True)
class KernelTerm:
    """One delta spike: ``weight * delta(t - t' -+ delay)``.

    ``weight = 2 V hbar^2`` carries the coupling strength; ``direction``
    records whether the spike samples the past ("forward", the retarded
    piece) or the future ("backward", the advanced piece that ordered
    integration never reaches).
    """

    weight: float
    delay_fs: float
    direction: str

    def __post_init__(self) -> None:
        if self.direction not in (FORWARD, BACKWARD):
            raise ValueError(f"direction must be {FORWARD!r} or {BACKWARD!r}")
        if self.delay_fs < 0:
            raise ValueError("delay_fs must be >= 0")


@dataclass(frozen=True)
class DelayKernel:
    """The full kernel for one ordered mode pair."""

    pair: tuple[str, str]
    terms: tuple[KernelTerm, ...]

    def forward_terms(self) -> tuple[KernelTerm, ...]:
        return tuple(t for t in self.terms if t.direction == FORWARD)


_PAIR_COUPLING = {
    ("A", "A"): "v_aa_ev",
    ("B", "B"): "v_bb_ev",
    ("A", "B"): "v_ab_ev",
    ("B", "A"): "v_ba_ev",
}


def build_kernel(cavity: CavityParams, pair: tuple[str, str]) -> DelayKernel:
    """Kernel for the ordered pair of mode labels (each "A" or "B").

    Same-site pairs give a single instantaneous spike; cross pairs give
    the retarded spike at ``+tau`` plus its advanced ("backward") mirror.
    """
    if pair not in _PAIR_COUPLING:
        raise ValueError(f"pair must combine 'A' and 'B' labels, got {pair!r}")
    weight = 2.0 * getattr(cavity, _PAIR_COUPLING[pair]) * CONSTANTS.hbar_ev_fs**2
    if pair[0] == pair[1]:
        terms = (KernelTerm(weight=weight, delay_fs=0.0, direction=FORWARD),)
    else:
        terms = (
            KernelTerm(weight=weight, delay_fs=cavity.tau_fs, direction=FORWARD),
            KernelTerm(weight=weight, delay_fs=cavity.tau_fs, direction=BACKWARD),
        )
    return DelayKernel(pair=pair, terms=terms)


def kernel_convolve_sample(kernel: DelayKernel, samples, h_fs: float, n: int):
    """One sample of the kernel acting on a gridded history.

    Evaluates ``sum_terms weight * f[n - delay/h]`` over the forward
    terms only; each delay must sit exactly on the grid (delta kernels
    are index lookups -- a misaligned grid is an error, not something to
    interpolate over).  Reads before the start of the history contribute
    zero.
    """
    if h_fs <= 0:
        raise ValueError("h_fs must be positive")
    if not 0 <= n < len(samples):
        raise ValueError(f"sample index {n} outside history of length {len(samples)}")
    total = 0.0 * samples[0]
    for term in kernel.forward_terms():
        steps = term.delay_fs / h_fs
        rounded = round(steps)
        if abs(steps - rounded) > 1e-9:
            raise ValueError(
                f"delay {term.delay_fs} fs is not a multiple of the grid step {h_fs} fs"
            )
        k = n - int(rounded)
        if k >= 0:
            total = total + term.weight * samples[k]
    return total
