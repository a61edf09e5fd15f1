"""Independent brute-force validator on a truncated Fock space.

The continuum field is replaced by a finite set of discrete modes.  On
that mode set two entirely different routes compute the same numbers:

  * exact_*: build each detector's unitary as the dense matrix
    exponential of its delta-coupling generator (qubit (x) joint-mode
    displacement), apply them in coupling-time order, and read the
    observable off the evolved state vector;

  * discrete_*: the closed-form pipeline expressions with every momentum
    integral replaced by the same discrete mode sums.

Agreement validates the operator algebra (the conditional-displacement
reduction, the C1 vacuum factor, the gating of the signal angles, the
energy-density cross terms) in complete isolation from quadrature
accuracy, which the kernels module owns through its own dual strategies.
The oracle never integrates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .emitters import MonopolePhase, pair_correlation, product_expectation
from .kernels import sphere_form_factor
from .scenario import Detector, Scenario

__all__ = [
    "ModeSet",
    "OracleBudgetError",
    "mode_amplitudes",
    "derivative_amplitudes",
    "exact_probability",
    "exact_energy",
    "discrete_probability",
    "discrete_energy",
    "ComparisonRow",
    "standard_comparison_cases",
    "run_standard_comparisons",
]

DEFAULT_DIMENSION_BUDGET = 4096
_SQRT_16PI3 = math.sqrt(16.0 * math.pi**3)


class OracleBudgetError(RuntimeError):
    """The requested Hilbert dimension exceeds the configured budget."""

    def __init__(self, dimension: int, budget: int):
        super().__init__(f"Hilbert dimension {dimension} exceeds budget {budget}; "
                         f"raise the budget or shrink modes/cutoff")
        self.dimension = dimension
        self.budget = budget


@dataclass(frozen=True)
class ModeSet:
    """Discrete field modes: momenta, quadrature weights, Fock cutoff per mode."""

    momenta: tuple[tuple[float, float, float], ...]
    weights: tuple[float, ...]
    cutoff: int

    def __post_init__(self):
        momenta = tuple(tuple(float(c) for c in k) for k in self.momenta)
        weights = tuple(float(w) for w in self.weights)
        if len(momenta) != len(weights):
            raise ValueError("momenta and weights differ in length")
        if any(len(k) != 3 for k in momenta):
            raise ValueError("momenta must be 3-vectors")
        if any(np.linalg.norm(k) <= 0 for k in momenta):
            raise ValueError("mode momenta must be nonzero")
        if any(w <= 0 for w in weights):
            raise ValueError("mode weights must be positive")
        if self.cutoff < 2:
            raise ValueError("Fock cutoff must be >= 2")
        object.__setattr__(self, "momenta", momenta)
        object.__setattr__(self, "weights", weights)

    @property
    def n_modes(self) -> int:
        return len(self.momenta)

    def with_cutoff(self, cutoff: int) -> "ModeSet":
        return ModeSet(self.momenta, self.weights, cutoff)

    def fock_dimension(self) -> int:
        return self.cutoff ** self.n_modes


def mode_amplitudes(modes: ModeSet, position, time: float, radius: float) -> np.ndarray:
    """Per-mode coupling amplitudes sqrt(w) S(|k|) e^{i(|k|t - k.x)} / sqrt(16 pi^3 |k|).

    Uses the same ball form factor as the continuum pipeline, so a
    pipeline/oracle disagreement can only come from the operator algebra.
    """
    pos = np.asarray(position, dtype=float)
    out = np.empty(modes.n_modes, dtype=complex)
    for j, (kvec, w) in enumerate(zip(modes.momenta, modes.weights)):
        kv = np.asarray(kvec)
        k = float(np.linalg.norm(kv))
        out[j] = (math.sqrt(w) * sphere_form_factor(k, radius)
                  * np.exp(1j * (k * time - kv @ pos)) / (_SQRT_16PI3 * math.sqrt(k)))
    return out


def derivative_amplitudes(modes: ModeSet, position, time: float, j: int) -> np.ndarray:
    """Point-observation amplitudes of the field derivative d_j phi."""
    pos = np.asarray(position, dtype=float)
    out = np.empty(modes.n_modes, dtype=complex)
    for m, (kvec, w) in enumerate(zip(modes.momenta, modes.weights)):
        kv = np.asarray(kvec)
        k = float(np.linalg.norm(kv))
        phase = np.exp(1j * (k * time - kv @ pos)) / (_SQRT_16PI3 * math.sqrt(k))
        factor = 1j * k if j == 0 else -1j * kv[j - 1]
        out[m] = math.sqrt(w) * factor * phase
    return out


# ----------------------------------------------------------------------
# dense operator construction
# ----------------------------------------------------------------------

def _kron_all(mats) -> np.ndarray:
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def _mode_annihilators(modes: ModeSet) -> list[np.ndarray]:
    cut = modes.cutoff
    a = np.diag(np.sqrt(np.arange(1, cut, dtype=float)), 1)
    eye = np.eye(cut)
    ops = []
    for j in range(modes.n_modes):
        mats = [eye] * modes.n_modes
        mats[j] = a
        ops.append(_kron_all(mats))
    return ops


def _monopole_matrix(n_qubits: int, index: int, omega_t: float) -> np.ndarray:
    raise_op = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)  # |e><g|, basis (g, e)
    mu = raise_op * np.exp(1j * omega_t) + raise_op.conj().T * np.exp(-1j * omega_t)
    mats = [np.eye(2, dtype=complex)] * n_qubits
    mats[index] = mu
    return _kron_all(mats)


def _field_displacement_generator(betas: np.ndarray, ann: list[np.ndarray]) -> np.ndarray:
    dim = ann[0].shape[0]
    phi = np.zeros((dim, dim), dtype=complex)
    for b, a in zip(betas, ann):
        phi += b * a.conj().T + np.conj(b) * a
    return phi


def _check_budget(n_qubits: int, modes: ModeSet, budget: int) -> int:
    dim = 2**n_qubits * modes.fock_dimension()
    if dim > budget:
        raise OracleBudgetError(dim, budget)
    return dim


def _evolve(detectors, qubit_indices, n_qubits, modes: ModeSet,
            psi: np.ndarray) -> np.ndarray:
    """Apply each detector's unitary in coupling-time order (stable on ties)."""
    ann = _mode_annihilators(modes)
    order = sorted(range(len(detectors)), key=lambda i: detectors[i].coupling_time)
    for i in order:
        det = detectors[i]
        betas = mode_amplitudes(modes, det.position, det.coupling_time,
                                det.smearing_radius)
        mu = _monopole_matrix(n_qubits, qubit_indices[i],
                              det.gap * det.coupling_time)
        gen = np.kron(mu, _field_displacement_generator(betas, ann))
        u = expm(-1j * det.coupling_strength * gen)
        psi = u @ psi
        norm = np.linalg.norm(psi)
        if abs(norm - 1.0) > 1e-10:
            raise FloatingPointError(f"evolution lost unitarity: |psi| = {norm!r}")
    return psi


def _emitter_register_vacuum(scenario: Scenario, modes: ModeSet):
    """Initial states: (weight, emitter register (x) mode vacuum)."""
    vac = np.zeros(modes.fock_dimension(), dtype=complex)
    vac[0] = 1.0
    return [(w, np.kron(vec, vac)) for w, vec in scenario.emitter_state.vectors()]


def exact_probability(modes: ModeSet, scenario: Scenario, couple: bool,
                      budget: int = DEFAULT_DIMENSION_BUDGET) -> float:
    """Receiver excitation probability from exact evolution on the mode set.

    With couple=False no operator touches the emitter register, which
    factors out of the expectation exactly; only the receiver qubit and
    the modes are evolved in that case.
    """
    rec = scenario.receiver
    if scenario.evaluation_time <= rec.coupling_time:
        return 0.0
    n = scenario.n_emitters if couple else 0
    n_qubits = n + 1
    _check_budget(n_qubits, modes, budget)
    detectors: list[Detector] = []
    qubit_indices: list[int] = []
    if couple:
        for i, e in enumerate(scenario.emitters):
            if e.coupling_time <= scenario.evaluation_time:
                detectors.append(e)
                qubit_indices.append(i)
    detectors.append(rec)
    qubit_indices.append(n)  # receiver is the last qubit
    fock_dim = modes.fock_dimension()
    q_b = _kron_all([np.eye(2, dtype=complex)] * n + [np.diag([0.0, 1.0]).astype(complex)])
    projector = np.kron(q_b, np.eye(fock_dim, dtype=complex))
    vac = np.zeros(fock_dim, dtype=complex)
    vac[0] = 1.0
    ground = np.array([1.0, 0.0], dtype=complex)
    if couple:
        initial = [(w, np.kron(np.kron(vec, ground), vac))
                   for w, vec in scenario.emitter_state.vectors()]
    else:
        initial = [(1.0, np.kron(ground, vac))]
    prob = 0.0
    for w, psi in initial:
        fin = _evolve(detectors, qubit_indices, n_qubits, modes, psi)
        prob += w * float(np.real(np.vdot(fin, projector @ fin)))
    return prob


def exact_energy(modes: ModeSet, scenario: Scenario, x, t: float,
                 budget: int = DEFAULT_DIMENSION_BUDGET) -> float:
    """Normal-ordered discrete energy density at (x, t) from exact evolution."""
    n = scenario.n_emitters
    _check_budget(n, modes, budget)
    detectors, qubit_indices = [], []
    for i, e in enumerate(scenario.emitters):
        if e.coupling_time <= t and e.coupling_strength != 0.0:
            detectors.append(e)
            qubit_indices.append(i)
    ann = _mode_annihilators(modes)
    qubit_dim = 2**n
    total = 0.0
    evolved = []
    for w, psi in _emitter_register_vacuum(scenario, modes):
        fin = _evolve(detectors, qubit_indices, n, modes, psi) if detectors else psi
        evolved.append((w, fin))
    for j in range(4):
        deltas = derivative_amplitudes(modes, x, t, j)
        deriv = _field_displacement_generator(deltas, ann)
        deriv_full = np.kron(np.eye(qubit_dim, dtype=complex), deriv)
        vacuum_piece = float(np.sum(np.abs(deltas) ** 2))
        for w, fin in evolved:
            dfin = deriv_full @ fin
            total += w * (float(np.real(np.vdot(dfin, dfin))) - vacuum_piece)
    return total


# ----------------------------------------------------------------------
# pipeline algebra on the identical mode sums
# ----------------------------------------------------------------------

def discrete_probability(modes: ModeSet, scenario: Scenario, couple: bool) -> float:
    """Closed-form pipeline probability with integrals replaced by mode sums."""
    rec = scenario.receiver
    if scenario.evaluation_time <= rec.coupling_time:
        return 0.0
    beta_rec = mode_amplitudes(modes, rec.position, rec.coupling_time,
                               rec.smearing_radius)
    c1 = math.exp(-2.0 * rec.coupling_strength**2
                  * float(np.sum(np.abs(beta_rec) ** 2)))
    if couple and scenario.n_emitters:
        g = np.zeros(scenario.n_emitters)
        for i, e in enumerate(scenario.emitters):
            if e.coupling_time > rec.coupling_time:
                continue
            beta_i = mode_amplitudes(modes, e.position, e.coupling_time,
                                     e.smearing_radius)
            delta = 2.0 * float(np.imag(np.sum(beta_i * np.conj(beta_rec))))
            g[i] = 2.0 * rec.coupling_strength * e.coupling_strength * delta
        phases = MonopolePhase.from_scenario(scenario)
        e_factor = product_expectation(scenario.emitter_state, g, phases)
    else:
        e_factor = 1.0
    return 0.5 * (1.0 - c1 * e_factor)


def discrete_energy(modes: ModeSet, scenario: Scenario, x, t: float) -> float:
    """Pipeline energy-density reduction with integrals replaced by mode sums."""
    active = [(i, e) for i, e in enumerate(scenario.emitters)
              if e.coupling_time <= t and e.coupling_strength != 0.0]
    if not active:
        return 0.0
    phases = MonopolePhase.from_scenario(scenario)
    im_a = {}
    for i, e in active:
        beta_i = mode_amplitudes(modes, e.position, e.coupling_time,
                                 e.smearing_radius)
        im_a[i] = np.array([
            float(np.imag(np.sum(derivative_amplitudes(modes, x, t, j)
                                 * np.conj(beta_i))))
            for j in range(4)])
    total = 0.0
    for i, e in active:
        total += 4.0 * e.coupling_strength**2 * float(im_a[i] @ im_a[i])
    for a in range(len(active)):
        ia, ea = active[a]
        for b in range(a + 1, len(active)):
            ib, eb = active[b]
            corr = pair_correlation(scenario.emitter_state, ia + 1, ib + 1, phases)
            total += (8.0 * ea.coupling_strength * eb.coupling_strength * corr
                      * float(im_a[ia] @ im_a[ib]))
    return total


# ----------------------------------------------------------------------
# standard comparison battery (used by tests and the `oracle` subcommand)
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class ComparisonRow:
    case: str
    pipeline: float
    exact: float
    difference: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.difference <= self.tolerance


def _case_modes(n_modes: int, cutoff: int) -> ModeSet:
    # weights sized so the conditional displacements are O(0.1): large enough
    # for meaningful probabilities, small enough for fast cutoff convergence
    pool = [((0.9, 0.2, -0.3), 12.0),
            ((-0.4, 1.1, 0.3), 20.0),
            ((0.1, -0.6, 0.9), 9.0),
            ((0.5, 0.5, 0.8), 15.0)]
    chosen = pool[:n_modes]
    return ModeSet(tuple(k for k, _ in chosen), tuple(w for _, w in chosen), cutoff)


def _case_scenario(n: int, state_kind: str) -> Scenario:
    from .scenario import classical_mixture, w_state, EmitterState
    emitters = tuple(Detector((1.4 * i, 0.15 * i, 0.0), 0.4 + 0.45 * i, 0.9 + 0.1 * i,
                              2.0, 0.5) for i in range(n))
    receiver = Detector((0.7, 0.9, 0.2), 3.0, 0.8, 2.0, 0.5)
    if state_kind == "w":
        thetas = [0.3 * (i + 1) for i in range(n)]
        state = w_state(n, thetas)
    elif state_kind == "classical":
        state = classical_mixture(n)
    else:  # product: every emitter in (|g> + e^{i phi}|e>)/sqrt(2)
        single = [np.array([1.0, np.exp(0.4j * (i + 1))]) / math.sqrt(2.0)
                  for i in range(n)]
        vec = single[0]
        for s in single[1:]:
            vec = np.kron(vec, s)
        state = EmitterState.pure(vec)
    return Scenario(emitters, receiver, state, 5.0)


def standard_comparison_cases() -> list[dict]:
    """>= 12 cases spanning emitter count, state family, coupling, and modes.

    Per-case cutoffs keep every Hilbert space, including the cutoff+2
    convergence run, inside the default dimension budget.
    """
    grid = [
        # (n, state, couple, n_modes, base_cutoff)
        (1, "w", True, 1, 7), (1, "w", False, 2, 7), (1, "classical", True, 3, 4),
        (2, "w", True, 2, 6), (2, "w", False, 3, 4), (2, "classical", True, 3, 4),
        (2, "product", True, 2, 6), (3, "w", True, 2, 5),
        (3, "classical", True, 2, 5), (3, "product", True, 2, 5),
        (3, "w", False, 4, 4), (2, "product", False, 1, 7),
        (3, "classical", False, 3, 4), (1, "classical", True, 2, 7),
    ]
    cases = []
    for n, kind, couple, n_modes, cutoff in grid:
        cases.append({"name": f"p[n={n},{kind},{'couple' if couple else 'silent'},"
                              f"modes={n_modes}]",
                      "kind": "probability", "n": n, "state": kind,
                      "couple": couple, "n_modes": n_modes, "cutoff": cutoff})
    for n, kind, cutoff in [(1, "w", 8), (2, "w", 6), (2, "classical", 6)]:
        cases.append({"name": f"T00[n={n},{kind},modes=2]", "kind": "energy",
                      "n": n, "state": kind, "couple": True, "n_modes": 2,
                      "cutoff": cutoff})
    return cases


def run_standard_comparisons(tolerance: float = 1e-6,
                             convergence_tol: float = 1e-7,
                             budget: int = DEFAULT_DIMENSION_BUDGET,
                             cases: list[dict] | None = None) -> list[ComparisonRow]:
    """Run the battery; each case first demonstrates Fock-cutoff convergence."""
    rows = []
    for case in cases or standard_comparison_cases():
        n, kind = case["n"], case["state"]
        scenario = _case_scenario(n, kind)
        base_cut = case["cutoff"]
        modes = _case_modes(case["n_modes"], base_cut)
        if case["kind"] == "probability":
            coarse = exact_probability(modes, scenario, case["couple"], budget)
            fine = exact_probability(modes.with_cutoff(base_cut + 2), scenario,
                                     case["couple"], budget)
            if abs(fine - coarse) > convergence_tol:
                raise FloatingPointError(
                    f"{case['name']}: cutoff not converged ({abs(fine - coarse):.2e})")
            pipeline = discrete_probability(modes, scenario, case["couple"])
        else:
            point, t_obs = (0.8, -0.4, 0.3), 2.6
            coarse = exact_energy(modes, scenario, point, t_obs, budget)
            fine = exact_energy(modes.with_cutoff(base_cut + 2), scenario, point,
                                t_obs, budget)
            if abs(fine - coarse) > convergence_tol:
                raise FloatingPointError(
                    f"{case['name']}: cutoff not converged ({abs(fine - coarse):.2e})")
            pipeline = discrete_energy(modes, scenario, point, t_obs)
        rows.append(ComparisonRow(case["name"], pipeline, fine,
                                  abs(pipeline - fine), tolerance))
    return rows
