"""Fixed-step integrator for a delay hierarchy with one auxiliary line per step.

The state is a small vector of "system" variables rho(t) together with a band
of auxiliary lines B(i, j): line j is created at grid time j (a delta source
fires once, converting a system value into the line's birth value) and is then
propagated forward in position i.  Couplings only ever look back exactly one
delay tau, and the grid is locked to the delay (h = tau / steps_per_delay), so
every delayed read is an exact index lookup K steps into the past -- no
interpolation anywhere.

Reference patterns
------------------
Equations are declared structurally; a term on variable X picks one of five
read patterns, evaluated while integrating X at time t (system) or while
advancing line t1 at position t (band):

* ``CURRENT``             -- system value at t.
* ``DIAGONAL``            -- band value at (t, t - tau): the returning line.
* ``OWN``                 -- band value at (t, t1): the line itself.
* ``SECOND_ARG_DELAYED``  -- band value at (t1, t - tau): a line one delay
                             older, read at this line's birth position.
* ``FIRST_ARG_DELAYED``   -- band value at (t - tau, t1): the same line, one
                             delay earlier in position.

Delay gating
------------
Reads across the delay switch on only once their whole step lies inside the
causal region, judged at the step start n (in units of h, K = tau/h):

* DIAGONAL and SECOND_ARG_DELAYED terms participate from n >= K on (before
  that the read would cross the start of the history, where lines do not
  exist yet);
* SECOND_ARG_DELAYED additionally requires the advancing line to be younger
  than the delay (age <= K - 1);
* FIRST_ARG_DELAYED requires it to be at least one delay old (age >= K).

A gated term contributes to both slope evaluations of a step or to neither.
Boundary reads landing exactly on a line's birth position return the
post-source value (the one-sided limit from inside the causal region).  This
keeps the scheme second order through the kink at t = tau, makes the
pre-delay silence of undriven variables exact, and means values at ages
<= K never receive FIRST_ARG_DELAYED contributions -- so the system output
is bit-for-bit independent of those terms, as the structure promises.

Storage
-------
One complex array indexed [position ring, line ring, variable].  Positions
are kept modulo K + 2 (nothing ever reads further back than one delay);
line labels modulo max(band_width, K) + 2.  Lines stop advancing at age
``band_width``; the largest magnitude ever discarded at that edge is
reported as the truncation certificate.  Reads beyond the retained band,
before the start of history, or ahead of a line's birth all return zero.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

__all__ = [
    "Pattern",
    "Reference",
    "Term",
    "DiagonalSource",
    "EquationSet",
    "EquationSetError",
    "NonFiniteStateError",
    "BandBuffer",
    "HierarchyIntegrator",
    "SimResult",
    "default_band_width",
    "run",
]


class Pattern(enum.Enum):
    CURRENT = "current"
    DIAGONAL = "diagonal"
    OWN = "own"
    SECOND_ARG_DELAYED = "second_arg_delayed"
    FIRST_ARG_DELAYED = "first_arg_delayed"


_SYSTEM_PATTERNS = frozenset({Pattern.CURRENT, Pattern.DIAGONAL})
_BAND_PATTERNS = frozenset(
    {Pattern.OWN, Pattern.SECOND_ARG_DELAYED, Pattern.FIRST_ARG_DELAYED}
)


class EquationSetError(ValueError):
    """Raised when a declared equation set is structurally inconsistent."""


class NonFiniteStateError(RuntimeError):
    """Raised when the integration produces a non-finite value."""

    def __init__(self, step_index: int, time_fs: float):
        super().__init__(
            f"non-finite state at step {step_index} (t = {time_fs:g} fs)"
        )
        self.step_index = step_index
        self.time_fs = time_fs


@dataclass(frozen=True)
class Reference:
    """A read of variable ``var`` under one of the five patterns."""

    var: str
    pattern: Pattern
    conjugate: bool = False


@dataclass(frozen=True)
class Term:
    """One linear contribution ``coefficient * read`` to d/dt of ``target``."""

    target: str
    coefficient: complex
    ref: Reference


@dataclass(frozen=True)
class DiagonalSource:
    """Birth rule of a band variable: line t1 starts at
    ``coefficient * system_var(t1)`` (conjugated if requested).

    With ``derivative=True`` the source samples the instantaneous time
    derivative of the system variable instead of its value (a literal
    reading of some printed source conventions; off by default).
    """

    band_var: str
    coefficient: complex
    system_var: str
    conjugate: bool = False
    derivative: bool = False


@dataclass(frozen=True)
class EquationSet:
    """A closed linear delay hierarchy.

    ``system_vars`` evolve under CURRENT/DIAGONAL terms; ``band_vars``
    under OWN/SECOND_ARG_DELAYED/FIRST_ARG_DELAYED terms, each with
    exactly one :class:`DiagonalSource`.  ``tau_fs`` is the single delay
    shared by every delayed pattern.
    """

    system_vars: tuple[str, ...]
    band_vars: tuple[str, ...]
    terms: tuple[Term, ...]
    sources: tuple[DiagonalSource, ...]
    tau_fs: float

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        names = list(self.system_vars) + list(self.band_vars)
        if not self.system_vars:
            raise EquationSetError("at least one system variable is required")
        if len(set(names)) != len(names) or any(not n for n in names):
            raise EquationSetError("variable names must be unique and non-empty")
        if not (self.tau_fs > 0):
            raise EquationSetError("tau_fs must be positive")
        sys_set = set(self.system_vars)
        band_set = set(self.band_vars)
        for t in self.terms:
            if t.target in sys_set:
                if t.ref.pattern not in _SYSTEM_PATTERNS:
                    raise EquationSetError(
                        f"system variable {t.target!r} may only use "
                        f"CURRENT/DIAGONAL reads, got {t.ref.pattern}"
                    )
                expected = sys_set if t.ref.pattern is Pattern.CURRENT else band_set
            elif t.target in band_set:
                if t.ref.pattern not in _BAND_PATTERNS:
                    raise EquationSetError(
                        f"band variable {t.target!r} may only use "
                        f"OWN/SECOND_ARG_DELAYED/FIRST_ARG_DELAYED reads, "
                        f"got {t.ref.pattern}"
                    )
                expected = band_set
            else:
                raise EquationSetError(f"term targets unknown variable {t.target!r}")
            if t.ref.var not in expected:
                raise EquationSetError(
                    f"term on {t.target!r} references {t.ref.var!r}, which is "
                    f"not a valid {t.ref.pattern.value} source"
                )
        sourced = [s.band_var for s in self.sources]
        if sorted(sourced) != sorted(self.band_vars):
            raise EquationSetError(
                "every band variable needs exactly one diagonal source "
                f"(got sources for {sorted(sourced)}, band vars {sorted(self.band_vars)})"
            )
        for s in self.sources:
            if s.system_var not in sys_set:
                raise EquationSetError(
                    f"source of {s.band_var!r} references unknown system "
                    f"variable {s.system_var!r}"
                )

    def system_index(self, name: str) -> int:
        return self.system_vars.index(name)

    def band_index(self, name: str) -> int:
        return self.band_vars.index(name)


def default_band_width(
    eqs: EquationSet, steps_per_delay: int, eps_band: float = 1e-12
) -> int:
    """Number of steps a line is kept, ``ceil(ln(1/eps) / (gamma_min h))``.

    ``gamma_min`` is the slowest own-damping rate over the band equations.
    The result is clamped to ``steps_per_delay + 1``: values deeper into a
    line than one delay past its birth can never propagate back into the
    system variables, so keeping more buys exactly nothing (see the module
    notes; the claim is also regression-tested).
    """
    if not (0 < eps_band < 1):
        raise ValueError("eps_band must be in (0, 1)")
    k = int(steps_per_delay)
    if k < 1:
        raise ValueError("steps_per_delay must be >= 1")
    h = eqs.tau_fs / k
    rates = [
        -t.coefficient.real
        for t in eqs.terms
        if t.ref.pattern is Pattern.OWN and t.target == t.ref.var
    ]
    positive = [r for r in rates if r > 0]
    cap = k + 1
    if not positive:
        return cap
    width = math.ceil(math.log(1.0 / eps_band) / (min(positive) * h))
    return max(1, min(width, cap))


class BandBuffer:
    """Ring storage for the band with the zero-read contracts attached.

    ``value()`` is the contractual scalar read: it returns 0 for reads
    ahead of a line's birth (i < j), beyond the retained band
    (i - j > band_width), or before the start of history (j < 0); it
    refuses reads of positions that were never computed or that have
    been evicted from the ring (older than one delay behind the
    frontier).  The integrator touches ``data`` directly on its hot path;
    the masks there are equivalent by construction.
    """

    def __init__(
        self,
        n_vars: int,
        steps_per_delay: int,
        band_width: int,
        horizon: int | None = None,
    ):
        if steps_per_delay < 1:
            raise ValueError("steps_per_delay must be >= 1")
        if band_width < 1:
            raise ValueError("band_width must be >= 1")
        self.n_vars = int(n_vars)
        self.steps_per_delay = int(steps_per_delay)
        self.band_width = int(band_width)
        # a run of at most `horizon` steps touches positions and labels
        # 0..horizon only, so the rings shrink accordingly -- this is what
        # keeps fine delay grids (large steps_per_delay) affordable when
        # the run itself is short
        span = self.steps_per_delay
        label_span = max(self.band_width, self.steps_per_delay)
        if horizon is not None:
            if horizon < 1:
                raise ValueError("horizon must be >= 1")
            span = min(span, int(horizon))
            label_span = min(label_span, int(horizon))
        self.n_rows = span + 2
        self.n_cols = label_span + 2
        self.data = np.zeros((self.n_rows, self.n_cols, self.n_vars), dtype=complex)
        self.frontier = -1  # highest fully-computed position

    def row(self, position: int) -> int:
        return position % self.n_rows

    def col(self, label: int) -> int:
        return label % self.n_cols

    def value(self, var_index: int, position: int, label: int) -> complex:
        if label < 0 or position < label:
            return 0j
        if position - label > self.band_width:
            return 0j
        if position > self.frontier:
            raise ValueError(
                f"position {position} not computed yet (frontier {self.frontier})"
            )
        if position < self.frontier - self.steps_per_delay:
            raise ValueError(
                f"position {position} already evicted (frontier {self.frontier}, "
                f"ring keeps one delay)"
            )
        return complex(self.data[self.row(position), self.col(label), var_index])


def _term_matrices(eqs: EquationSet):
    """Assemble the coefficient matrices used by the vectorised stepper."""
    n_s, n_b = len(eqs.system_vars), len(eqs.band_vars)
    m_cur = np.zeros((n_s, n_s), dtype=complex)
    m_cur_c = np.zeros((n_s, n_s), dtype=complex)
    m_diag = np.zeros((n_s, n_b), dtype=complex)
    m_diag_c = np.zeros((n_s, n_b), dtype=complex)
    # band matrices are stored transposed: row-of-values @ T accumulates targets
    t_own = np.zeros((n_b, n_b), dtype=complex)
    t_own_c = np.zeros((n_b, n_b), dtype=complex)
    t_sad = np.zeros((n_b, n_b), dtype=complex)
    t_sad_c = np.zeros((n_b, n_b), dtype=complex)
    t_fad = np.zeros((n_b, n_b), dtype=complex)
    t_fad_c = np.zeros((n_b, n_b), dtype=complex)
    for t in eqs.terms:
        c = complex(t.coefficient)
        if t.target in eqs.system_vars:
            i = eqs.system_index(t.target)
            if t.ref.pattern is Pattern.CURRENT:
                j = eqs.system_index(t.ref.var)
                (m_cur_c if t.ref.conjugate else m_cur)[i, j] += c
            else:
                j = eqs.band_index(t.ref.var)
                (m_diag_c if t.ref.conjugate else m_diag)[i, j] += c
        else:
            i = eqs.band_index(t.target)
            j = eqs.band_index(t.ref.var)
            if t.ref.pattern is Pattern.OWN:
                (t_own_c if t.ref.conjugate else t_own)[j, i] += c
            elif t.ref.pattern is Pattern.SECOND_ARG_DELAYED:
                (t_sad_c if t.ref.conjugate else t_sad)[j, i] += c
            else:
                (t_fad_c if t.ref.conjugate else t_fad)[j, i] += c
    return m_cur, m_cur_c, m_diag, m_diag_c, t_own, t_own_c, t_sad, t_sad_c, t_fad, t_fad_c


class HierarchyIntegrator:
    """Synchronised Heun stepper over system + band.

    One call to :meth:`step` advances everything by h: left slopes from the
    final state at n, an Euler predictor into position n + 1, right slopes
    with predicted data at n + 1 (historical reads stay final), trapezoidal
    correction, retirement bookkeeping, then the birth of line n + 1 from
    the corrected system values.

    ``horizon_steps`` is an optional promise that at most that many steps
    will be taken; it shrinks the ring allocation for short runs on fine
    delay grids and makes further stepping an error.
    """

    def __init__(
        self,
        eqs: EquationSet,
        init: Mapping[str, complex],
        *,
        steps_per_delay: int,
        band_width: int,
        include_first_arg_delayed: bool = True,
        horizon_steps: int | None = None,
    ):
        eqs.validate()
        if steps_per_delay < 1:
            raise ValueError("steps_per_delay must be >= 1")
        if band_width < 1:
            raise ValueError("band_width must be >= 1")
        if horizon_steps is not None and horizon_steps < 1:
            raise ValueError("horizon_steps must be >= 1")
        self._horizon = None if horizon_steps is None else int(horizon_steps)
        self.eqs = eqs
        self.K = int(steps_per_delay)
        self.band_width = int(band_width)
        self.h_fs = eqs.tau_fs / self.K
        self.include_first_arg_delayed = bool(include_first_arg_delayed)

        (
            self._m_cur,
            self._m_cur_c,
            self._m_diag,
            self._m_diag_c,
            self._t_own,
            self._t_own_c,
            self._t_sad,
            self._t_sad_c,
            self._t_fad,
            self._t_fad_c,
        ) = _term_matrices(eqs)
        self._has_sad = bool(self._t_sad.any() or self._t_sad_c.any())
        self._has_fad = bool(self._t_fad.any() or self._t_fad_c.any())
        self._has_diag = bool(self._m_diag.any() or self._m_diag_c.any())

        n_b = len(eqs.band_vars)
        self._src_idx = np.zeros(n_b, dtype=int)
        self._src_coeff = np.zeros(n_b, dtype=complex)
        self._src_conj = np.zeros(n_b, dtype=bool)
        self._src_deriv = np.zeros(n_b, dtype=bool)
        for s in eqs.sources:
            i = eqs.band_index(s.band_var)
            self._src_idx[i] = eqs.system_index(s.system_var)
            self._src_coeff[i] = s.coefficient
            self._src_conj[i] = s.conjugate
            self._src_deriv[i] = s.derivative

        unknown = set(init) - set(eqs.system_vars)
        if unknown:
            raise ValueError(f"initial state names unknown variables: {sorted(unknown)}")
        self.state = np.zeros(len(eqs.system_vars), dtype=complex)
        for name, value in init.items():
            self.state[eqs.system_index(name)] = complex(value)

        self.buffer = BandBuffer(n_b, self.K, self.band_width, horizon=self._horizon)
        self.n = 0
        self.truncation_certificate = 0.0
        self._give_birth(0, self.state)
        self.buffer.frontier = 0

    # -- helpers ---------------------------------------------------------

    @property
    def time_fs(self) -> float:
        return self.n * self.h_fs

    def band_value(self, var: str, position: int, label: int) -> complex:
        """Masked band read (the BandBuffer contract, by variable name)."""
        return self.buffer.value(self.eqs.band_index(var), position, label)

    def system_value(self, var: str) -> complex:
        return complex(self.state[self.eqs.system_index(var)])

    def _system_rhs(self, sys_vec: np.ndarray, diag_vec: np.ndarray | None) -> np.ndarray:
        f = self._m_cur @ sys_vec + self._m_cur_c @ sys_vec.conj()
        if diag_vec is not None:
            f = f + self._m_diag @ diag_vec + self._m_diag_c @ diag_vec.conj()
        return f

    def _give_birth(self, position: int, sys_vec: np.ndarray, diag_vec=None) -> None:
        picked = sys_vec[self._src_idx]
        if self._src_deriv.any():
            rhs = self._system_rhs(sys_vec, diag_vec)[self._src_idx]
            picked = np.where(self._src_deriv, rhs, picked)
        picked = np.where(self._src_conj, picked.conj(), picked)
        buf = self.buffer
        buf.data[buf.row(position), buf.col(position), :] = self._src_coeff * picked

    # -- the step --------------------------------------------------------

    def step(self) -> None:
        if self._horizon is not None and self.n >= self._horizon:
            raise ValueError(
                f"integrator was allocated for {self._horizon} steps "
                f"(horizon_steps); construct without a horizon to continue"
            )
        with np.errstate(over="ignore", invalid="ignore"):
            self._step_impl()

    def _step_impl(self) -> None:
        # overflow is deliberate territory here: a diverging run is caught by
        # the isfinite check below and surfaced as NonFiniteStateError, so the
        # intermediate inf/nan arithmetic must not spam warnings
        n, K, W = self.n, self.K, self.band_width
        h = self.h_fs
        buf = self.buffer
        A = buf.data
        n_adv = min(W, n + 1)  # lines at ages 0 .. n_adv-1 still advance
        ages = np.arange(n_adv)
        labels = n - ages
        cols = labels % buf.n_cols
        row_n = buf.row(n)
        row_n1 = buf.row(n + 1)
        diag_open = self._has_diag and n >= K and K <= W
        sad_open = self._has_sad and n >= K
        fad_open = self.include_first_arg_delayed and self._has_fad and n_adv > K

        own0 = A[row_n, cols, :]  # (n_adv, n_b), values at position n

        # ---- left slopes (time n, all reads final) ----
        diag_l = A[row_n, buf.col(n - K), :] if diag_open else None
        f_sys_l = self._system_rhs(self.state, diag_l)
        f_band_l = own0 @ self._t_own + own0.conj() @ self._t_own_c
        if sad_open:
            # read (position j, label n - K); rows are ordered by age
            lo = max(0, K - W)          # deeper reads fall off the band
            hi = min(n_adv, K)          # age gate: younger than the delay
            if hi > lo:
                rows_j = labels[lo:hi] % buf.n_rows
                vals = A[rows_j, buf.col(n - K), :]
                f_band_l[lo:hi] += vals @ self._t_sad + vals.conj() @ self._t_sad_c
        if fad_open:
            # read (position n - K, label j) for lines at least one delay old
            vals = A[buf.row(n - K), cols[K:], :]
            f_band_l[K:] += vals @ self._t_fad + vals.conj() @ self._t_fad_c

        # ---- predictor into position n + 1 ----
        sys_p = self.state + h * f_sys_l
        A[row_n1, cols, :] = own0 + h * f_band_l

        # ---- right slopes (time n + 1; predicted data only at n + 1) ----
        diag_r = A[row_n1, buf.col(n + 1 - K), :] if diag_open else None
        f_sys_r = self._system_rhs(sys_p, diag_r)
        own1 = A[row_n1, cols, :]
        f_band_r = own1 @ self._t_own + own1.conj() @ self._t_own_c
        if sad_open:
            lo = max(0, K - 1 - W)
            hi = min(n_adv, K)
            if hi > lo:
                rows_j = labels[lo:hi] % buf.n_rows
                vals = A[rows_j, buf.col(n + 1 - K), :]
                f_band_r[lo:hi] += vals @ self._t_sad + vals.conj() @ self._t_sad_c
        if fad_open:
            vals = A[buf.row(n + 1 - K), cols[K:], :]
            f_band_r[K:] += vals @ self._t_fad + vals.conj() @ self._t_fad_c

        # ---- trapezoidal corrector ----
        sys_new = self.state + 0.5 * h * (f_sys_l + f_sys_r)
        band_new = own0 + 0.5 * h * (f_band_l + f_band_r)
        A[row_n1, cols, :] = band_new

        if not (np.isfinite(sys_new).all() and np.isfinite(band_new).all()):
            raise NonFiniteStateError(n + 1, (n + 1) * h)

        # ---- retirement: the oldest line reaches age W and stops ----
        if n_adv == W:
            edge = float(np.abs(band_new[W - 1]).max())
            if edge > self.truncation_certificate:
                self.truncation_certificate = edge

        # ---- birth of line n + 1 from the corrected system state ----
        self.state = sys_new
        self.n = n + 1
        diag_birth = None
        if self._has_diag and self.n >= K and K <= W:
            diag_birth = A[row_n1, buf.col(self.n - K), :]
        self._give_birth(self.n, sys_new, diag_birth)
        buf.frontier = self.n


@dataclass
class SimResult:
    """Output of :func:`run`: the system trajectories plus the run settings."""

    times: np.ndarray
    series: dict[str, np.ndarray]
    h_fs: float
    tau_fs: float
    steps_per_delay: int
    band_width: int
    n_steps: int
    truncation_certificate: float
    include_first_arg_delayed: bool


def run(
    eqs: EquationSet,
    init: Mapping[str, complex],
    *,
    steps_per_delay: int,
    t_end_fs: float,
    band_width: int | None = None,
    eps_band: float = 1e-12,
    include_first_arg_delayed: bool = True,
) -> SimResult:
    """Integrate the hierarchy to ``t_end_fs`` and record the system variables.

    ``h = tau / steps_per_delay`` exactly; the number of steps is
    ``ceil(t_end / h)`` (so the final time may overshoot ``t_end_fs`` by a
    fraction of a step).  ``band_width`` defaults to
    :func:`default_band_width` with the given ``eps_band``.
    """
    eqs.validate()
    if t_end_fs <= 0:
        raise ValueError("t_end_fs must be positive")
    if steps_per_delay < 1:
        raise ValueError("steps_per_delay must be >= 1")
    if band_width is None:
        band_width = default_band_width(eqs, steps_per_delay, eps_band)
    h = eqs.tau_fs / steps_per_delay
    n_steps = max(1, math.ceil(t_end_fs / h - 1e-9))
    integ = HierarchyIntegrator(
        eqs,
        init,
        steps_per_delay=steps_per_delay,
        band_width=band_width,
        include_first_arg_delayed=include_first_arg_delayed,
        horizon_steps=n_steps,
    )
    n_sys = len(eqs.system_vars)
    traj = np.zeros((n_steps + 1, n_sys), dtype=complex)
    traj[0] = integ.state
    for i in range(n_steps):
        integ.step()
        traj[i + 1] = integ.state
    times = np.arange(n_steps + 1) * h
    series = {name: traj[:, k].copy() for k, name in enumerate(eqs.system_vars)}
    return SimResult(
        times=times,
        series=series,
        h_fs=h,
        tau_fs=eqs.tau_fs,
        steps_per_delay=integ.K,
        band_width=integ.band_width,
        n_steps=n_steps,
        truncation_certificate=integ.truncation_certificate,
        include_first_arg_delayed=include_first_arg_delayed,
    )
