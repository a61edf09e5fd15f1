"""Physical outputs: energy density, receiver excitation probability, capacity.

With delta switching the evolution is a product of conditional
displacements and everything reduces exactly (no perturbative step) to
the kernel integrals plus emitter-register algebra:

  * excitation probability of the receiver, initially in its ground
    state, after the emitters did (couple=True) or did not (couple=False)
    fire:

        p = (1/2) [1 - C1 * E],
        C1 = exp(-2 lambda_B^2 nu),
        E  = Re < prod_i (cos g_i + i mu_i sin g_i) >,
        g_i = 2 lambda_B lambda_i Theta(t_B - t_i) Delta(|x_i - x_B|, t_B - t_i);

    with couple=False all g_i = 0, E = 1 and p = q = (1 - C1)/2 -- the
    receiver's own vacuum noise.  The receiver gap drops out exactly.

  * normal-ordered energy density of the emitted field,

        T00(x, t) = sum_j [ sum_i 4 lambda_i^2 Theta_i (Im A_{i,j})^2
                    + 8 sum_{i<l} lambda_i lambda_l Theta_i Theta_l
                        <mu_i mu_l> Im A_{i,j} Im A_{l,j} ],

    where Im A_{i,0} / Im A_{i,radial} are the radiation kernels and the
    spatial j-sum contracts the radial scalars with unit separation
    vectors;

  * the capacity of the binary channel in which "1" = all emitters fire
    and "0" = none do, from the excitation probabilities (p, q).

docs/derivations.md holds the full reductions and their cross-checks.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .emitters import MonopolePhase, pair_correlation, product_expectation
from .kernels import KernelSet, QuadratureSettings
from .scenario import Scenario

__all__ = [
    "ChannelPoint",
    "KernelBank",
    "ReceiverNotCoupledWarning",
    "c1_factor",
    "excitation_probability",
    "energy_density",
    "channel_capacity",
    "channel_point",
    "binary_entropy",
]

_PROB_DUST = 1e-12


class ReceiverNotCoupledWarning(RuntimeWarning):
    """The evaluation time precedes the receiver's coupling instant."""


class KernelBank:
    """KernelSet per smearing radius, shared across observables of one run."""

    def __init__(self, settings: QuadratureSettings | None = None):
        self.settings = settings or QuadratureSettings()
        self._sets: dict[float, KernelSet] = {}

    def for_radius(self, radius: float) -> KernelSet:
        key = round(float(radius), 12)
        if key not in self._sets:
            self._sets[key] = KernelSet(radius, self.settings)
        return self._sets[key]


@dataclass(frozen=True)
class ChannelPoint:
    """Excitation probabilities p (emitters fired) and q (they did not)."""

    p: float
    q: float

    def __post_init__(self):
        object.__setattr__(self, "p", _clamp_probability(self.p, "p"))
        object.__setattr__(self, "q", _clamp_probability(self.q, "q"))


def _clamp_probability(value: float, name: str) -> float:
    value = float(value)
    if not -_PROB_DUST <= value <= 1.0 + _PROB_DUST:
        raise ValueError(f"{name} = {value!r} is not a probability; this signals a "
                         "kernel bug rather than rounding dust")
    return min(max(value, 0.0), 1.0)


def c1_factor(lambda_b: float, radius: float,
              bank: KernelBank | None = None) -> float:
    """Vacuum displacement factor exp(-2 lambda_B^2 nu): the receiver's own noise.

    Equals 1 at zero coupling and decreases monotonically to 0, driving
    the no-signal excitation q = (1 - C1)/2 up to 1/2.
    """
    if lambda_b < 0:
        raise ValueError("receiver coupling must be >= 0")
    bank = bank or KernelBank()
    nu = bank.for_radius(radius).vacuum_variance()
    return math.exp(-2.0 * lambda_b**2 * nu)


def _signal_angles(scenario: Scenario, bank: KernelBank) -> np.ndarray:
    """g_i = 2 lambda_B lambda_i Theta(t_B - t_i) Delta(d_i, t_B - t_i)."""
    rec = scenario.receiver
    ks = bank.for_radius(rec.smearing_radius)
    g = np.zeros(scenario.n_emitters)
    for idx, emitter in enumerate(scenario.emitters):
        dt = rec.coupling_time - emitter.coupling_time
        if dt < 0:  # emitter fires after the receiver: time ordering gates it out
            continue
        d = float(np.linalg.norm(rec.position_array - emitter.position_array))
        delta = ks.commutator(d, dt, other_radius=emitter.smearing_radius)
        g[idx] = 2.0 * rec.coupling_strength * emitter.coupling_strength * delta
    return g


def excitation_probability(scenario: Scenario, couple: bool,
                           bank: KernelBank | None = None) -> float:
    """Probability that the receiver ends excited at the evaluation time.

    couple=False encodes the emitters staying silent, which leaves only
    the receiver's own vacuum noise q = (1 - C1)/2.
    """
    rec = scenario.receiver
    if scenario.evaluation_time <= rec.coupling_time:
        warnings.warn("evaluation time does not exceed the receiver coupling instant; "
                      "probability is 0 until it fires", ReceiverNotCoupledWarning,
                      stacklevel=2)
        return 0.0
    bank = bank or KernelBank()
    c1 = c1_factor(rec.coupling_strength, rec.smearing_radius, bank)
    if couple and scenario.n_emitters:
        g = _signal_angles(scenario, bank)
        phases = MonopolePhase.from_scenario(scenario)
        e_factor = product_expectation(scenario.emitter_state, g, phases)
    else:
        e_factor = 1.0
    return _clamp_probability(0.5 * (1.0 - c1 * e_factor), "excitation probability")


def energy_density(scenario: Scenario, x, t: float,
                   bank: KernelBank | None = None) -> float:
    """Normal-ordered energy density of the emitted field at (x, t).

    Emitters that have not fired by t are gated out; the receiver is a
    passive probe and does not source this observable.
    """
    bank = bank or KernelBank()
    x = np.asarray(x, dtype=float)
    if x.shape != (3,):
        raise ValueError("observation point must be a 3-vector")
    active: list[tuple[int, float, float, np.ndarray]] = []
    for idx, emitter in enumerate(scenario.emitters):
        dt = float(t) - emitter.coupling_time
        if dt <= 0 or emitter.coupling_strength == 0.0:
            continue
        offset = x - emitter.position_array
        r = float(np.linalg.norm(offset))
        ks = bank.for_radius(emitter.smearing_radius)
        k_time = ks.radiation_time(r, dt)
        k_rad = ks.radiation_radial(r, dt)
        rhat = offset / r if r > 1e-12 else np.zeros(3)
        active.append((idx, emitter.coupling_strength, k_time, k_rad * rhat))
    if not active:
        return 0.0
    phases = MonopolePhase.from_scenario(scenario)
    total = 0.0
    for _, lam, k_time, k_vec in active:
        total += 4.0 * lam**2 * (k_time**2 + float(k_vec @ k_vec))
    for a in range(len(active)):
        ia, lam_a, t_a, v_a = active[a]
        for b in range(a + 1, len(active)):
            ib, lam_b, t_b, v_b = active[b]
            corr = pair_correlation(scenario.emitter_state, ia + 1, ib + 1, phases)
            total += 8.0 * lam_a * lam_b * corr * (t_a * t_b + float(v_a @ v_b))
    return float(total)


def binary_entropy(x: float) -> float:
    """h(x) = -x log2 x - (1-x) log2(1-x), with the endpoint limits 0."""
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def channel_capacity(point: ChannelPoint | None = None, *,
                     p: float | None = None, q: float | None = None) -> float:
    """Capacity in bits of the binary channel with hit probabilities (p, q).

    Input 1 excites the receiver with probability p, input 0 with
    probability q.  Zero iff p = q; the boundary limits (p or q in
    {0, 1}, p -> q) are taken explicitly.  Symmetric under relabelling
    inputs (p <-> q) and outputs (p, q) -> (1-p, 1-q).
    """
    if point is not None:
        p, q = point.p, point.q
    if p is None or q is None:
        raise ValueError("channel_capacity needs a ChannelPoint or both p and q")
    p = _clamp_probability(p, "p")
    q = _clamp_probability(q, "q")
    delta = p - q
    if delta == 0.0:
        return 0.0
    mean = 0.5 * (p + q)
    var = mean * (1.0 - mean)
    # near-useless channel: the closed form cancels catastrophically, so use
    # the quadratic limit C ~ (p-q)^2 / (8 ln2 pbar(1-pbar)) instead
    if abs(delta) <= 3e-5 * math.sqrt(var) and abs(delta) <= 1e-2 * var:
        return delta * delta / (8.0 * math.log(2.0) * var)
    hp, hq = binary_entropy(p), binary_entropy(q)
    s = (hp - hq) / (q - p)
    # log2(1 + 2^s) without overflow for |s| beyond float range
    if s > 50.0:
        log_term = s + math.log1p(2.0 ** (-s)) / math.log(2.0)
    elif s < -50.0:
        log_term = math.log1p(2.0**s) / math.log(2.0)
    else:
        log_term = math.log2(1.0 + 2.0**s)
    capacity = (-q * hp + p * hq) / (q - p) + log_term
    if capacity < 0.0:
        # rounding noise of the cancelling closed form near p = q
        if capacity < -1e-9:
            raise FloatingPointError(f"capacity {capacity!r} went negative")
        capacity = 0.0
    return min(capacity, 1.0)


def channel_point(scenario: Scenario, bank: KernelBank | None = None) -> ChannelPoint:
    """Evaluate (p, q) for the scenario's receiver in place."""
    bank = bank or KernelBank()
    p = excitation_probability(scenario, couple=True, bank=bank)
    q = excitation_probability(scenario, couple=False, bank=bank)
    return ChannelPoint(p, q)
