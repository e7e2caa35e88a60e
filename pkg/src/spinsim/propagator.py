"""Second-order symmetrized product-formula integrator.

One time step of length delta applies five factors, right to left,

    exp(-i d Hz/2) exp(-i d Hy/2) exp(-i d Hx) exp(-i d Hy/2) exp(-i d Hz/2),

with every sinusoidal field evaluated at the single midpoint time
t + delta/2. Each per-axis Hamiltonian H_a collects the pair couplings and
fields of that axis only. The z factor is diagonal in the computational
basis, so it reduces to an element-by-element phase sweep; the y and x
factors are computed by conjugating the same diagonal sweep (loaded with the
y or x parameters) with a global quarter-turn of all spins:

    exp(-i d Hy) = Rx exp(-i d Hy-as-diagonal) Rx+,   Rx = exp(+i (pi/2) Sx)
    exp(-i d Hx) = Ry exp(-i d Hx-as-diagonal) Ry+,   Ry = exp(-i (pi/2) Sy)

The rotation signs are pinned by Rx Sz Rx+ = Sy and Ry Sz Ry+ = Sx; they are
asserted by the oracle cross-checks rather than trusted. Since an axis whose
parameter family is all zero contributes an exactly-identity factor, its
surrounding rotation pair is skipped; adjacent rotations of consecutive
active factors are never cancelled against each other.

The Hamiltonian carries an overall minus sign in front of both the coupling
and field sums, so exp(-i*theta*H) multiplies amplitude n by the positive
phase exp(+i*theta*(sum_pairs J*s_j*s_k + sum_j h_j(t)*s_j)) with
s_j = +/- 1/2.

Clock convention: a sequence advances one monotone global clock for
bookkeeping (durations, trajectory timestamps), but the sinusoidal drive of
each operation is referenced to that operation's own start, sin(f*u + phi)
with u in [0, tau]. An instruction's action is therefore fully determined by
its parameter table and duration, never by where it sits in the sequence.
(A drive phase referenced to absolute time would instead be invisible in the
co-rotating frame, and the pulse-order sensitivity this simulator is built
to expose would largely vanish.)
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .state import MAX_QUBITS, Observables, StateVector, check_axis

_SQ2 = math.sqrt(2.0)

#: Global quarter-turn generators; ROT[axis] = (R, R_dagger).
_ROT_X = np.array([[1, 1j], [1j, 1]]) / _SQ2
_ROT_Y = np.array([[1, -1], [1, 1]]) / _SQ2
_ROT = {"x": (_ROT_X, _ROT_X.conj().T), "y": (_ROT_Y, _ROT_Y.conj().T)}

_SPIN_CACHE_MAX_L = 12
_spin_cache: dict = {}


@dataclass
class KernelCounters:
    """Instrumentation for the operation-count invariants of one run."""

    diagonal_sweeps: int = 0
    global_rotations: int = 0
    gate_kernel_calls: int = 0
    pair_terms: int = 0
    field_terms: int = 0

    def reset(self) -> None:
        self.diagonal_sweeps = 0
        self.global_rotations = 0
        self.gate_kernel_calls = 0
        self.pair_terms = 0
        self.field_terms = 0


counters = KernelCounters()


def worker_count() -> int:
    """Partition cap from SPINSIM_THREADS (0 or unset = auto).

    Kernels are vectorized elementwise numpy operations over disjoint index
    ranges, so results are bitwise independent of this value; it only caps how
    many ranges a sweep is split into.
    """
    raw = os.environ.get("SPINSIM_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"SPINSIM_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise ValueError(f"SPINSIM_THREADS must be >= 0, got {n}")
    return n if n > 0 else (os.cpu_count() or 1)


def _chunk_ranges(dim: int):
    """Split 0..dim into at most worker_count() equal ranges (>= 4096 each)."""
    n = min(worker_count(), max(1, dim // 4096))
    size = -(-dim // n)
    return [(lo, min(lo + size, dim)) for lo in range(0, dim, size)]


@dataclass
class _AxisTerms:
    pairs: list
    static: list
    rf: list

    @property
    def active(self) -> bool:
        return bool(self.pairs or self.static or self.rf)


class SpinModel:
    """All Hamiltonian parameters: couplings, static fields, RF drives.

    Angular-frequency units throughout; qubit indices are 1-based. Parameters
    not set are zero. The coupling array is kept symmetric in (j, k) with a
    zero diagonal.
    """

    __slots__ = ("L", "coupling", "static_field", "rf_amp", "rf_freq", "rf_phase")

    def __init__(self, L: int):
        if not 1 <= L <= MAX_QUBITS:
            raise ValueError(f"qubit count must be in 1..{MAX_QUBITS}, got {L}")
        self.L = int(L)
        self.coupling = np.zeros((L, L, 3))
        self.static_field = np.zeros((L, 3))
        self.rf_amp = np.zeros((L, 3))
        self.rf_freq = np.zeros((L, 3))
        self.rf_phase = np.zeros((L, 3))

    def copy(self) -> "SpinModel":
        dup = SpinModel(self.L)
        dup.coupling = self.coupling.copy()
        dup.static_field = self.static_field.copy()
        dup.rf_amp = self.rf_amp.copy()
        dup.rf_freq = self.rf_freq.copy()
        dup.rf_phase = self.rf_phase.copy()
        return dup

    def _check_qubit(self, j: int) -> None:
        if not 1 <= j <= self.L:
            raise ValueError(f"qubit index must be in 1..{self.L}, got {j}")

    def set_coupling(self, j: int, k: int, axis: str, value: float) -> "SpinModel":
        self._check_qubit(j)
        self._check_qubit(k)
        if j == k:
            raise ValueError("self-coupling is not allowed")
        a = check_axis(axis)
        self.coupling[j - 1, k - 1, a] = value
        self.coupling[k - 1, j - 1, a] = value
        return self

    def set_static(self, j: int, axis: str, value: float) -> "SpinModel":
        self._check_qubit(j)
        self.static_field[j - 1, check_axis(axis)] = value
        return self

    def set_rf(self, j: int, axis: str, amp: float, freq: float, phase: float = 0.0) -> "SpinModel":
        self._check_qubit(j)
        a = check_axis(axis)
        self.rf_amp[j - 1, a] = amp
        self.rf_freq[j - 1, a] = freq
        self.rf_phase[j - 1, a] = phase
        return self

    def validate(self) -> None:
        for arr, name in (
            (self.coupling, "coupling"),
            (self.static_field, "static_field"),
            (self.rf_amp, "rf_amp"),
            (self.rf_freq, "rf_freq"),
            (self.rf_phase, "rf_phase"),
        ):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"non-finite entries in {name}")
        if not np.allclose(self.coupling, np.transpose(self.coupling, (1, 0, 2)), atol=0.0):
            raise ValueError("coupling must be symmetric in (j, k)")
        if np.any(np.diagonal(self.coupling, axis1=0, axis2=1) != 0.0):
            raise ValueError("diagonal couplings must be zero")

    def pair_count(self, axis: str) -> int:
        """Number of pairs j < k with a nonzero coupling on this axis."""
        a = check_axis(axis)
        return int(np.count_nonzero(np.triu(self.coupling[:, :, a], 1)))

    def axis_terms(self) -> tuple:
        """Precompute per-axis term lists for the diagonal sweeps (x, y, z)."""
        out = []
        for a in range(3):
            pairs = [
                (j, k, float(self.coupling[j, k, a]))
                for j in range(self.L)
                for k in range(j + 1, self.L)
                if self.coupling[j, k, a] != 0.0
            ]
            static = [
                (j, float(self.static_field[j, a]))
                for j in range(self.L)
                if self.static_field[j, a] != 0.0
            ]
            groups: dict = {}
            for j in range(self.L):
                h1 = float(self.rf_amp[j, a])
                if h1 != 0.0:
                    key = (float(self.rf_freq[j, a]), float(self.rf_phase[j, a]))
                    groups.setdefault(key, []).append((j, h1))
            rf = [(f, phi, members) for (f, phi), members in groups.items()]
            out.append(_AxisTerms(pairs=pairs, static=static, rf=rf))
        return tuple(out)


@dataclass
class ElementaryOperation:
    """One hardware instruction: a model held constant for a duration tau."""

    name: str
    model: SpinModel
    tau: float

    def __post_init__(self):
        if self.tau < 0:
            raise ValueError(f"duration must be >= 0, got {self.tau}")
        self.model.validate()


@dataclass
class PulseSequence:
    """Ordered list of operations executed left-to-right on a global clock.

    Operator products in written gate algebra apply right-to-left; sequence
    constructors must reverse product notation before building one of these.
    """

    eos: list
    t0: float = 0.0

    def __post_init__(self):
        if self.eos:
            L = self.eos[0].model.L
            for eo in self.eos:
                if eo.model.L != L:
                    raise ValueError("all operations in a sequence must share one qubit count")

    def __len__(self) -> int:
        return len(self.eos)

    def __iter__(self):
        return iter(self.eos)

    def __add__(self, other: "PulseSequence") -> "PulseSequence":
        return PulseSequence(self.eos + other.eos, t0=self.t0)

    @property
    def total_duration(self) -> float:
        return sum(eo.tau for eo in self.eos)


@dataclass(frozen=True)
class StepPlan:
    """Substep count for one operation; the substep length is derived."""

    m: int
    tau: float

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"substep count must be >= 1, got {self.m}")

    @property
    def delta(self) -> float:
        return self.tau / self.m


@dataclass
class TrajectorySample:
    """One recorded point of a sequence run."""

    step: int
    eo_index: int
    obs: Observables


def _spin_values(L: int, j0: int, idx: np.ndarray | None):
    """S^z eigenvalues (+-1/2) of 0-based qubit j0, cached for small registers."""
    if idx is not None:
        return 0.5 - ((idx >> j0) & 1)
    key = (L, j0)
    cached = _spin_cache.get(key)
    if cached is None:
        cached = 0.5 - ((np.arange(1 << L, dtype=np.int64) >> j0) & 1)
        if L <= _SPIN_CACHE_MAX_L:
            _spin_cache[key] = cached
    return cached


def _diagonal_factor(state: StateVector, terms: _AxisTerms, theta: float, t_mid: float) -> None:
    """amp[n] *= exp(+i*theta*(sum_pairs J s_j s_k + sum_j h_j(t_mid) s_j))."""
    counters.diagonal_sweeps += 1
    if not terms.active:
        return
    # per-qubit field value at the midpoint time
    coef: dict = {}
    for j0, h in terms.static:
        coef[j0] = coef.get(j0, 0.0) + h
    for f, phi, members in terms.rf:
        s = math.sin(f * t_mid + phi)
        for j0, h1 in members:
            coef[j0] = coef.get(j0, 0.0) + h1 * s
    counters.pair_terms += len(terms.pairs)
    counters.field_terms += len(coef)
    L = state.L
    dim = state.amp.size
    if L <= _SPIN_CACHE_MAX_L:
        ranges = [(0, dim)]
    else:
        ranges = _chunk_ranges(dim)
    for lo, hi in ranges:
        idx = None if (lo, hi) == (0, dim) else np.arange(lo, hi, dtype=np.int64)
        local: dict = {}

        def spin(j0):
            if j0 not in local:
                local[j0] = _spin_values(L, j0, idx)
            return local[j0]

        phase = np.zeros(hi - lo)
        for j0, k0, cjk in terms.pairs:
            phase += cjk * (spin(j0) * spin(k0))
        for j0, h in coef.items():
            if h != 0.0:
                phase += h * spin(j0)
        state.amp[lo:hi] *= np.exp(1j * theta * phase)


_COMPILE_MAX_L = 20  # above this, cached full-length phase vectors get too big


class _CompiledSweep:
    """One axis factor of a step, precomputed for a fixed theta.

    Without sinusoids the whole factor is one cached multiplier vector; with
    them, the constant part and each drive's amplitude profile are cached and
    only the sine evaluations remain per substep. Counter increments report
    the logical per-sweep term visits (one per nonzero pair coupling and per
    driven/static qubit), which the caching only makes cheaper, not fewer.
    """

    __slots__ = ("terms", "theta", "n_fields", "const_mult", "base_arg", "groups")

    def __init__(self, terms: _AxisTerms, theta: float, L: int):
        self.terms = terms
        self.theta = theta
        qubits = {j0 for j0, _ in terms.static}
        for _, _, members in terms.rf:
            qubits.update(j0 for j0, _ in members)
        self.n_fields = len(qubits)
        self.const_mult = None
        self.base_arg = None
        self.groups = []
        if not terms.active:
            return
        base = np.zeros(1 << L)
        for j0, k0, cjk in terms.pairs:
            base += (theta * cjk) * (_spin_values(L, j0, None) * _spin_values(L, k0, None))
        for j0, h in terms.static:
            base += (theta * h) * _spin_values(L, j0, None)
        for f, phi, members in terms.rf:
            vec = np.zeros(1 << L)
            for j0, h1 in members:
                vec += (theta * h1) * _spin_values(L, j0, None)
            self.groups.append((f, phi, vec))
        if self.groups:
            self.base_arg = base
        else:
            self.const_mult = np.exp(1j * base)

    def apply(self, state: StateVector, t_mid: float) -> None:
        counters.diagonal_sweeps += 1
        if not self.terms.active:
            return
        counters.pair_terms += len(self.terms.pairs)
        counters.field_terms += self.n_fields
        if self.const_mult is not None:
            state.amp *= self.const_mult
            return
        arg = self.base_arg.copy()
        for f, phi, vec in self.groups:
            arg += math.sin(f * t_mid + phi) * vec
        state.amp *= np.exp(1j * arg)


def apply_diagonal_factor(
    state: StateVector, model: SpinModel, axis: str, delta: float, t_mid: float, half: bool = False
) -> StateVector:
    """Apply one diagonal (z-form) factor loaded with the given axis's parameters.

    theta is delta/2 when ``half`` is set, else delta. Pure phase; the norm is
    untouched.
    """
    a = check_axis(axis)
    terms = model.axis_terms()[a]
    _diagonal_factor(state, terms, 0.5 * delta if half else delta, t_mid)
    return state


def global_half_pi_rotation(state: StateVector, axis: str, inverse: bool = False) -> StateVector:
    """Rotate every spin by a quarter turn about x or y (or undo it)."""
    if axis not in _ROT:
        raise ValueError(f"rotation axis must be 'x' or 'y', got {axis!r}")
    g = _ROT[axis][1 if inverse else 0]
    counters.global_rotations += 1
    for j in range(1, state.L + 1):
        state.apply_gate(j, g, check_unitary=False)
        counters.gate_kernel_calls += 1
    return state


def _conjugated_factor(
    state: StateVector, terms: _AxisTerms, theta: float, t_mid: float, rot_axis: str
) -> None:
    """Apply exp(-i*theta*H_axis) as R (diagonal sweep) R+ for a non-z axis."""
    if terms.active:
        global_half_pi_rotation(state, rot_axis, inverse=True)
        _diagonal_factor(state, terms, theta, t_mid)
        global_half_pi_rotation(state, rot_axis, inverse=False)
    else:
        _diagonal_factor(state, terms, theta, t_mid)  # identity factor, counted


def _step(state: StateVector, terms: tuple, delta: float, t_mid: float) -> None:
    tx, ty, tz = terms
    half = 0.5 * delta
    _diagonal_factor(state, tz, half, t_mid)
    _conjugated_factor(state, ty, half, t_mid, "x")
    _conjugated_factor(state, tx, delta, t_mid, "y")
    _conjugated_factor(state, ty, half, t_mid, "x")
    _diagonal_factor(state, tz, half, t_mid)


class _StepProgram:
    """All five factors of one step, compiled for a fixed substep length."""

    __slots__ = ("x", "y", "z")

    def __init__(self, terms: tuple, delta: float, L: int):
        tx, ty, tz = terms
        self.x = _CompiledSweep(tx, delta, L)
        self.y = _CompiledSweep(ty, 0.5 * delta, L)
        self.z = _CompiledSweep(tz, 0.5 * delta, L)

    def _conjugated(self, state: StateVector, sweep: _CompiledSweep, rot_axis: str, t_mid: float):
        if sweep.terms.active:
            global_half_pi_rotation(state, rot_axis, inverse=True)
            sweep.apply(state, t_mid)
            global_half_pi_rotation(state, rot_axis, inverse=False)
        else:
            sweep.apply(state, t_mid)

    def apply(self, state: StateVector, t_mid: float) -> None:
        self.z.apply(state, t_mid)
        self._conjugated(state, self.y, "x", t_mid)
        self._conjugated(state, self.x, "y", t_mid)
        self._conjugated(state, self.y, "x", t_mid)
        self.z.apply(state, t_mid)


def symmetrized_step(state: StateVector, model: SpinModel, delta: float, t: float) -> StateVector:
    """Advance the state by one product-formula step over [t, t+delta].

    All five factors share the midpoint time t + delta/2.
    """
    if delta <= 0:
        raise ValueError(f"step length must be > 0, got {delta}")
    if model.L != state.L:
        raise ValueError(f"model has L={model.L} but state has L={state.L}")
    _step(state, model.axis_terms(), delta, t + 0.5 * delta)
    return state


def auto_substeps(
    eo: ElementaryOperation,
    rf_samples_per_period: int = 64,
    max_phase_per_step: float = 0.1,
) -> StepPlan:
    """Pick a substep count for which the results no longer depend on it.

    A constant Hamiltonian confined to a single axis is integrated exactly by
    one step. Otherwise the substep length is capped both at 1/64 of the
    fastest RF period and at the time over which the strongest field advances
    a spin phase by 0.1 rad (both constants overridable).
    """
    model = eo.model
    if eo.tau == 0.0:
        return StepPlan(1, 0.0)
    active = [
        a
        for a in range(3)
        if np.any(model.coupling[:, :, a]) or np.any(model.static_field[:, a]) or np.any(model.rf_amp[:, a])
    ]
    if len(active) <= 1 and not np.any(model.rf_amp):
        return StepPlan(1, eo.tau)
    bounds = []
    freqs = np.abs(model.rf_freq[model.rf_freq != 0.0])
    if freqs.size:
        bounds.append(2.0 * math.pi / float(freqs.max()) / rf_samples_per_period)
    h_scale = float(np.max(np.abs(model.static_field) + np.abs(model.rf_amp)))
    if h_scale > 0.0:
        bounds.append(max_phase_per_step / h_scale)
    if not bounds:
        # constant multi-axis coupling-only model: bound the phase per step by J
        bounds.append(max_phase_per_step / float(np.max(np.abs(model.coupling))))
    m = max(1, math.ceil(eo.tau / min(bounds) - 1e-9))
    return StepPlan(m, eo.tau)


def evolve_eo(
    state: StateVector,
    eo: ElementaryOperation,
    t0: float,
    plan: StepPlan | None = None,
    substep_hook=None,
) -> tuple:
    """Run one operation starting at global time t0; returns (state, t0 + tau).

    The state is evolved in place through plan.m symmetrized steps. Sinusoid
    arguments use the operation-local midpoint times (n + 1/2) * delta, so the
    result does not depend on t0; ``substep_hook(n, t_end)`` receives the
    global end time of each substep for sampling.
    """
    if eo.model.L != state.L:
        raise ValueError(f"operation has L={eo.model.L} but state has L={state.L}")
    if plan is None:
        plan = auto_substeps(eo)
    if eo.tau == 0.0:
        return state, t0
    terms = eo.model.axis_terms()
    delta = eo.tau / plan.m
    if state.L <= _COMPILE_MAX_L:
        prog = _StepProgram(terms, delta, state.L)
        for n in range(plan.m):
            prog.apply(state, (n + 0.5) * delta)
            if substep_hook is not None:
                substep_hook(n, t0 + (n + 1) * delta)
    else:
        for n in range(plan.m):
            _step(state, terms, delta, (n + 0.5) * delta)
            if substep_hook is not None:
                substep_hook(n, t0 + (n + 1) * delta)
    return state, t0 + eo.tau


def run_sequence(
    state: StateVector,
    seq: PulseSequence,
    sample_every: int | None = None,
    plans: list | None = None,
    on_sample=None,
) -> tuple:
    """Execute a sequence on a continuous clock; returns (final state, samples).

    The input state is not modified. Observables are recorded at the initial
    point, after every ``sample_every``-th substep, at each operation boundary
    and at the final point. When ``sample_every`` is None each operation is
    sampled about 200 times (once per substep if it has fewer). ``on_sample``
    is called with each TrajectorySample as it is recorded.
    """
    for eo in seq.eos:
        if eo.model.L != state.L:
            raise ValueError(f"operation {eo.name!r} has L={eo.model.L} but state has L={state.L}")
    if sample_every is not None and sample_every < 1:
        raise ValueError("sample_every must be >= 1")
    out = state.copy()
    samples: list = []

    def record(step: int, eo_index: int, t_now: float) -> None:
        smp = TrajectorySample(step=step, eo_index=eo_index, obs=out.observables(t=t_now))
        samples.append(smp)
        if on_sample is not None:
            on_sample(smp)

    t = seq.t0
    record(0, 0, t)
    gstep = 0
    for i, eo in enumerate(seq.eos):
        plan = plans[i] if plans is not None else auto_substeps(eo)
        if eo.tau == 0.0:
            continue
        stride = sample_every if sample_every is not None else max(1, round(plan.m / 200))
        base = gstep

        def hook(n, t_end, _i=i, _stride=stride, _m=plan.m, _base=base):
            nonlocal gstep
            gstep = _base + n + 1
            if (n + 1) % _stride == 0 or (n + 1) == _m:
                record(gstep, _i, t_end)

        evolve_eo(out, eo, t, plan=plan, substep_hook=hook)
        t += eo.tau
    return out, samples
