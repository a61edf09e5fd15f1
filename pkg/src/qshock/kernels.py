"""Radial kernel integrals for uniform-ball smeared detectors of a massless field.

Every field-theoretic quantity in the pipeline reduces to a 1-D momentum
integral over k in [0, inf) built from the ball form factor

    S(k) = 4 pi (sin kR - kR cos kR) / k^3,

namely

    vacuum variance   nu          = (1/4pi^2) int k S(k)^2 dk
    commutator kernel Delta(d,dt) = -(1/2pi^2) int k S(k)^2 sinc(kd) sin(k dt) dk
    radiation kernels (time)      = (1/4pi^2) int k^2 S(k) sinc(kr)  cos(k dt) dk
                      (radial)    = (1/4pi^2) int k^2 S(k) sinc'(kr) sin(k dt) dk

(the derivations note in docs/derivations.md records how the 3-D mode
integrals collapse to these forms).  The radiation integrands decay only
like 1/k with oscillation, so a plain adaptive quadrature cannot be
trusted.  The evaluator used everywhere splits each integral at a cut
K0:  the head [0, K0] is integrated with panel-doubled Gauss-Legendre
rules on the cancellation-free combined integrand, while on the tail
the integrand is *identically* a finite sum of Fourier atoms
trig(a k)/k^m whose tails have closed forms in the sine/cosine
integrals, evaluated through the complex exponential integral.  The
only numerical error is therefore the head-panel estimate.

Two fully independent strategies are kept alongside for cross-checks
(and are exercised by the test suite and the `kernels` CLI subcommand):

  * an exponential regulator exp(-eps k) at a decreasing eps ladder with
    polynomial extrapolation to eps = 0, and
  * between-zeros summation of each oscillatory tail atom with iterated
    averaging as the series acceleration.

Evaluation is pure; a memo cache keyed by rounded arguments makes grid
scans cheap.  Values are deterministic for fixed settings regardless of
call order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import exp1

__all__ = [
    "QuadratureSettings",
    "QuadratureError",
    "KernelValue",
    "KernelSet",
    "sphere_form_factor",
    "vacuum_variance",
    "commutator_kernel",
    "radiation_kernel",
    "commutator_kernel_regulated",
    "commutator_kernel_zero_split",
    "radiation_kernel_regulated",
    "radiation_kernel_zero_split",
    "vacuum_variance_regulated",
]

_FOUR_PI = 4.0 * math.pi
_INV_4PI2 = 1.0 / (4.0 * math.pi**2)
_INV_2PI2 = 1.0 / (2.0 * math.pi**2)

# Arguments closer to a kernel singularity than this are nudged outward;
# the kernels are smooth there and the shift is far below every tolerance.
_R_FLOOR = 1e-6


class QuadratureError(RuntimeError):
    """Raised when a kernel integral cannot reach the requested tolerance."""

    def __init__(self, message: str, achieved: float, requested: float):
        super().__init__(f"{message} (achieved {achieved:.3e}, requested {requested:.3e})")
        self.achieved = achieved
        self.requested = requested


@dataclass(frozen=True)
class QuadratureSettings:
    """Tolerances and policies shared by all kernel evaluations.

    rel_tol          relative tolerance for the head quadrature
    abs_floor        absolute floor below which values count as converged
    head_cut         momentum K0 where the analytic Fourier tail takes over
                     (None: max(6, 3/R) chosen per radius)
    head_order       Gauss-Legendre order per panel
    max_doublings    panel-doubling budget before QuadratureError
    regulator_base   largest eps of the regulator ladder (cross-check strategy)
    regulator_rungs  number of eps halvings in the ladder
    cache_decimals   rounding of (r, dt) cache keys
    """

    rel_tol: float = 1e-8
    abs_floor: float = 1e-13
    head_cut: float | None = None
    head_order: int = 12
    max_doublings: int = 12
    regulator_base: float = 0.02
    regulator_rungs: int = 8
    cache_decimals: int = 9

    def cut_for(self, radius: float) -> float:
        if self.head_cut is not None:
            return self.head_cut
        return max(6.0, 3.0 / radius)


@dataclass(frozen=True)
class KernelValue:
    """A kernel value with its achieved error estimate."""

    value: float
    error: float


# ----------------------------------------------------------------------
# stable elementary pieces
# ----------------------------------------------------------------------

def _ball_g(u: np.ndarray) -> np.ndarray:
    """(sin u - u cos u)/u^3, series-protected near u = 0 (limit 1/3)."""
    u = np.asarray(u, dtype=float)
    small = np.abs(u) < 5e-2
    us = np.where(small, u, 1.0)
    ub = np.where(small, 1.0, u)
    series = 1.0 / 3.0 - us**2 / 30.0 + us**4 / 840.0 - us**6 / 45360.0
    closed = (np.sin(ub) - ub * np.cos(ub)) / ub**3
    return np.where(small, series, closed)


def _sinc(u: np.ndarray) -> np.ndarray:
    return np.sinc(np.asarray(u, dtype=float) / math.pi)


def _dsinc(u: np.ndarray) -> np.ndarray:
    """d/du [sin u / u], series-protected near u = 0 (odd, ~ -u/3)."""
    u = np.asarray(u, dtype=float)
    small = np.abs(u) < 5e-2
    us = np.where(small, u, 1.0)
    ub = np.where(small, 1.0, u)
    series = -us / 3.0 + us**3 / 30.0 - us**5 / 840.0
    closed = (ub * np.cos(ub) - np.sin(ub)) / ub**2
    return np.where(small, series, closed)


def sphere_form_factor(k, radius: float):
    """Spatial Fourier transform of the unit-height ball of the given radius.

    S(k) = 4 pi (sin kR - kR cos kR)/k^3; continuous at k = 0 with limit
    (4/3) pi R^3 (the ball volume), real for all k >= 0.
    """
    k = np.asarray(k, dtype=float)
    if np.any(k < 0):
        raise ValueError("momentum magnitude must be >= 0")
    out = _FOUR_PI * radius**3 * _ball_g(k * radius)
    return float(out) if out.ndim == 0 else out


# ----------------------------------------------------------------------
# Fourier-atom tails
# ----------------------------------------------------------------------
#
# On [K0, inf) each integrand below is *identically* Re[sum_j c_j
# e^{i a_j k}] / k^m after product-to-sum expansion of its trig factors,
# so the tail integral is a finite sum of
#
#   T_m(a, K; eps) = int_K^inf e^{(ia - eps) k} k^-m dk
#
# with T_1 = E1((eps - ia) K) and the upward recursion
# T_{m} = e^{(ia-eps)K} / ((m-1) K^{m-1}) + (ia - eps) T_{m-1} / (m-1).

def _expand_trig_product(coeff: float, factors) -> list[tuple[complex, float]]:
    """Expand coeff * prod trig(a_j k) into [(c, a)] with the piece = Re sum c e^{iak}."""
    terms: list[tuple[complex, float]] = [(complex(coeff), 0.0)]
    for kind, a in factors:
        nxt: list[tuple[complex, float]] = []
        for c, f in terms:
            if kind == "cos":
                nxt += [(c / 2.0, f + a), (c / 2.0, f - a)]
            else:
                nxt += [(c / 2.0j, f + a), (-c / 2.0j, f - a)]
        terms = nxt
    merged: dict[float, complex] = {}
    for c, f in terms:
        key = round(f, 12)
        merged[key] = merged.get(key, 0.0j) + c
    return [(c, f) for f, c in merged.items() if abs(c) > 0.0]


def _tail_T(m: int, a: float, cut: float, eps: float = 0.0) -> complex:
    z = 1j * a - eps
    if abs(z) * cut < 1e-14:
        if m == 1:
            raise ValueError("divergent zero-frequency tail of power 1")
        return complex(1.0 / ((m - 1) * cut ** (m - 1)))
    t = exp1(-z * cut)
    for mm in range(2, m + 1):
        t = np.exp(z * cut) / ((mm - 1) * cut ** (mm - 1)) + z * t / (mm - 1)
    return complex(t)


def _tail_sum(pieces, cut: float, eps: float = 0.0) -> float:
    total = 0.0j
    for coeff, factors, power in pieces:
        for c, a in _expand_trig_product(coeff, factors):
            if power == 1 and abs(a) < 1e-12:
                # sin-type expansions leave zero coefficient here; anything
                # else would be a genuinely divergent integral.
                if abs(c) > 1e-10 * abs(coeff):
                    raise ValueError("non-vanishing zero-frequency 1/k atom")
                continue
            total += c * _tail_T(power, a, cut, eps)
    return float(total.real)


# ----------------------------------------------------------------------
# head quadrature
# ----------------------------------------------------------------------

_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gl_nodes(order: int) -> tuple[np.ndarray, np.ndarray]:
    if order not in _GL_CACHE:
        _GL_CACHE[order] = leggauss(order)
    return _GL_CACHE[order]


def _head_quad(f, cut: float, freq: float, settings: QuadratureSettings,
               eps: float = 0.0) -> tuple[float, float]:
    """Panel-doubled composite Gauss-Legendre on [0, cut]; returns (value, error)."""
    x0, w0 = _gl_nodes(settings.head_order)
    panels = max(4, int(math.ceil(cut * (freq + 1.0) / 3.0)))
    prev = None
    cur = 0.0
    err = math.inf
    for _ in range(settings.max_doublings):
        edges = np.linspace(0.0, cut, panels + 1)
        mid = 0.5 * (edges[1:] + edges[:-1])
        half = 0.5 * (edges[1:] - edges[:-1])
        nodes = (mid[:, None] + half[:, None] * x0[None, :]).ravel()
        weights = (half[:, None] * w0[None, :]).ravel()
        vals = f(nodes)
        if eps:
            vals = vals * np.exp(-eps * nodes)
        cur = float(vals @ weights)
        if prev is not None:
            err = abs(cur - prev)
            if err <= settings.rel_tol * max(abs(cur), 1.0) + settings.abs_floor:
                return cur, err
        prev = cur
        panels *= 2
    raise QuadratureError("head quadrature did not converge", err, settings.rel_tol)


# ----------------------------------------------------------------------
# integrand definitions (head callable + tail atoms, valid for k >= K0)
# ----------------------------------------------------------------------

def _variance_parts(radius: float):
    r3 = radius**3

    def head(k):
        return k * (_FOUR_PI * r3 * _ball_g(k * radius)) ** 2

    pieces = [
        (16 * math.pi**2, (("sin", radius), ("sin", radius)), 5),
        (-32 * math.pi**2 * radius, (("sin", radius), ("cos", radius)), 4),
        (16 * math.pi**2 * radius**2, (("cos", radius), ("cos", radius)), 3),
    ]
    return head, pieces, 2 * radius


def _commutator_parts(d: float, dt: float, ra: float, rb: float):
    """k S_a S_b sinc(kd) sin(k dt); two radii supported for mixed detectors."""
    pa, pb = _FOUR_PI * ra**3, _FOUR_PI * rb**3

    def head(k):
        return (k * pa * _ball_g(k * ra) * pb * _ball_g(k * rb)
                * _sinc(k * d) * np.sin(k * dt))

    c0 = 16 * math.pi**2 / d
    pieces = [
        (c0, (("sin", ra), ("sin", rb), ("sin", d), ("sin", dt)), 6),
        (-c0 * rb, (("sin", ra), ("cos", rb), ("sin", d), ("sin", dt)), 5),
        (-c0 * ra, (("cos", ra), ("sin", rb), ("sin", d), ("sin", dt)), 5),
        (c0 * ra * rb, (("cos", ra), ("cos", rb), ("sin", d), ("sin", dt)), 4),
    ]
    return head, pieces, ra + rb + d + abs(dt)


def _radiation_time_parts(r: float, dt: float, radius: float):
    r3 = radius**3

    def head(k):
        return k * k * _FOUR_PI * r3 * _ball_g(k * radius) * _sinc(k * r) * np.cos(k * dt)

    pieces = [
        (_FOUR_PI / r, (("sin", radius), ("sin", r), ("cos", dt)), 2),
        (-_FOUR_PI * radius / r, (("cos", radius), ("sin", r), ("cos", dt)), 1),
    ]
    return head, pieces, radius + r + abs(dt)


def _radiation_radial_parts(r: float, dt: float, radius: float):
    r3 = radius**3

    def head(k):
        return k * k * _FOUR_PI * r3 * _ball_g(k * radius) * _dsinc(k * r) * np.sin(k * dt)

    pieces = [
        (_FOUR_PI / r, (("sin", radius), ("cos", r), ("sin", dt)), 2),
        (-_FOUR_PI / r**2, (("sin", radius), ("sin", r), ("sin", dt)), 3),
        (-_FOUR_PI * radius / r, (("cos", radius), ("cos", r), ("sin", dt)), 1),
        (_FOUR_PI * radius / r**2, (("cos", radius), ("sin", r), ("sin", dt)), 2),
    ]
    return head, pieces, radius + r + abs(dt)


def _evaluate(parts, prefactor: float, settings: QuadratureSettings,
              cut: float) -> KernelValue:
    head_f, pieces, freq = parts
    head, head_err = _head_quad(head_f, cut, freq, settings)
    tail = _tail_sum(pieces, cut)
    value = prefactor * (head + tail)
    error = max(abs(prefactor) * head_err, 1e-15 * abs(value), 1e-16)
    return KernelValue(value, error)


# ----------------------------------------------------------------------
# cross-check strategies
# ----------------------------------------------------------------------

def _neville_to_zero(xs: np.ndarray, ys: np.ndarray) -> tuple[float, float]:
    """Polynomial extrapolation of (xs, ys) to x = 0; returns (value, error)."""
    n = len(xs)
    tab = ys.astype(float).copy()
    last = tab[-1]
    for m in range(1, n):
        for i in range(n - m):
            tab[i] = tab[i + 1] + (tab[i + 1] - tab[i]) * xs[i + m] / (xs[i] - xs[i + m])
        last_prev, last = last, tab[0]
    return float(last), abs(last - last_prev)


def _evaluate_regulated(parts, prefactor: float, settings: QuadratureSettings,
                        cut: float) -> KernelValue:
    """Regulator ladder exp(-eps k) + extrapolation to eps = 0."""
    head_f, pieces, freq = parts
    rungs = settings.regulator_rungs
    eps = settings.regulator_base * 0.5 ** np.arange(rungs)
    vals = np.empty(rungs)
    for i, e in enumerate(eps):
        head, _ = _head_quad(head_f, cut, freq, settings, eps=e)
        vals[i] = head + _tail_sum(pieces, cut, eps=e)
    value, err = _neville_to_zero(eps, vals)
    return KernelValue(prefactor * value, abs(prefactor) * max(err, 1e-16))


def _real_atoms(pieces) -> list[tuple[str, float, float, int]]:
    """Collect pieces into real atoms (kind, coeff, freq >= 0, power)."""
    merged: dict[tuple[float, int], complex] = {}
    for coeff, factors, power in pieces:
        for c, a in _expand_trig_product(coeff, factors):
            key = (round(abs(a), 12), power)
            merged[key] = merged.get(key, 0.0j) + (c if a >= 0 else c.conjugate())
    atoms = []
    for (a, power), c in merged.items():
        # Re[c e^{iak} + conj-partner] accumulated above: cos and sin parts
        if abs(c.real) > 0.0:
            atoms.append(("cos", c.real, a, power))
        if abs(c.imag) > 0.0:
            atoms.append(("sin", -c.imag, a, power))
    return atoms


def _euler_average(partial: np.ndarray) -> tuple[float, float]:
    """Iterated averaging of an (eventually alternating) partial-sum sequence."""
    seq = partial.astype(float).copy()
    prev_tail = seq[-1]
    err = math.inf
    while len(seq) > 2:
        seq = 0.5 * (seq[1:] + seq[:-1])
        step = abs(seq[-1] - prev_tail)
        prev_tail = seq[-1]
        if step < err:
            err = step
        if err == 0.0:
            break
    return float(prev_tail), float(err if math.isfinite(err) else abs(prev_tail))


def _atom_tail_between_zeros(kind: str, a: float, power: int, cut: float,
                             chunks: int = 48) -> tuple[float, float]:
    """int_cut^inf trig(a k) / k^power dk by summation between consecutive
    zeros of the trig factor, accelerated by iterated averaging."""
    if a < 1e-9:
        if kind == "sin":
            return 0.0, 0.0
        if power == 1:
            raise ValueError("divergent zero-frequency tail")
        return 1.0 / ((power - 1) * cut ** (power - 1)), 0.0
    x0, w0 = _gl_nodes(10)
    trig = np.cos if kind == "cos" else np.sin
    # first zero of trig(a k) at k >= cut
    if kind == "cos":
        j0 = math.ceil((a * cut - 0.5 * math.pi) / math.pi)
        z0 = (0.5 * math.pi + j0 * math.pi) / a
    else:
        z0 = math.ceil(a * cut / math.pi) * math.pi / a
    zeros = z0 + (math.pi / a) * np.arange(chunks + 1)
    edges = np.concatenate(([cut], zeros))
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = mid[:, None] + half[:, None] * x0[None, :]
    seg = (trig(a * nodes) / nodes**power) @ w0 * half
    partial = np.cumsum(seg)
    return _euler_average(partial)


def _evaluate_zero_split(parts, prefactor: float, settings: QuadratureSettings,
                         cut: float) -> KernelValue:
    """Head quadrature + per-atom between-zeros tail summation.

    Every oscillatory atom is single-frequency, so its between-zeros
    chunk integrals alternate with smoothly decaying magnitude and the
    averaging transform converges fast; no closed-form tail is used.
    """
    head_f, pieces, freq = parts
    head, _ = _head_quad(head_f, cut, freq, settings)
    tail = 0.0
    err = 0.0
    for kind, coeff, a, power in _real_atoms(pieces):
        val, step = _atom_tail_between_zeros(kind, a, power, cut)
        tail += coeff * val
        err += abs(coeff) * step
    value = prefactor * (head + tail)
    return KernelValue(value, abs(prefactor) * max(err, 1e-16))


# ----------------------------------------------------------------------
# public kernel set
# ----------------------------------------------------------------------

class KernelSet:
    """Memoised kernel evaluations for one smearing radius.

    Evaluation is pure and idempotent, so plain dict inserts (atomic under
    the GIL) make the cache safe for concurrent use; a racing re-insert
    writes the identical value.
    """

    def __init__(self, radius: float, settings: QuadratureSettings | None = None):
        if radius <= 0:
            raise ValueError("smearing radius must be > 0")
        self.radius = float(radius)
        self.settings = settings or QuadratureSettings()
        self._cache: dict[tuple, KernelValue] = {}

    # -- internals ------------------------------------------------------

    def _key(self, kind: str, *args: float) -> tuple:
        dec = self.settings.cache_decimals
        return (kind,) + tuple(round(a, dec) for a in args)

    def _cut(self) -> float:
        return self.settings.cut_for(self.radius)

    # -- kernels --------------------------------------------------------

    def vacuum_variance_value(self) -> KernelValue:
        key = self._key("nu")
        if key not in self._cache:
            self._cache[key] = _evaluate(
                _variance_parts(self.radius), _INV_4PI2, self.settings, self._cut())
        return self._cache[key]

    def vacuum_variance(self) -> float:
        """Smeared-field vacuum variance; position/time independent, > 0."""
        val = self.vacuum_variance_value()
        if not val.value > 0.0:
            raise QuadratureError("vacuum variance must be positive", val.error,
                                  self.settings.rel_tol)
        return val.value

    def commutator_value(self, d: float, dt: float,
                         other_radius: float | None = None) -> KernelValue:
        if d < 0:
            raise ValueError("separation distance must be >= 0")
        rb = self.radius if other_radius is None else float(other_radius)
        if dt == 0.0:
            return KernelValue(0.0, 0.0)
        sign = 1.0 if dt > 0 else -1.0
        d_eff = max(d, _R_FLOOR)
        key = self._key("comm", d_eff, abs(dt), rb)
        if key not in self._cache:
            self._cache[key] = _evaluate(
                _commutator_parts(d_eff, abs(dt), self.radius, rb),
                -_INV_2PI2, self.settings, self._cut())
        base = self._cache[key]
        return KernelValue(sign * base.value, base.error)

    def commutator(self, d: float, dt: float, other_radius: float | None = None) -> float:
        """Smeared field commutator kernel Delta(d, dt); odd in dt, causal in d."""
        return self.commutator_value(d, dt, other_radius).value

    def radiation_time_value(self, r: float, dt: float) -> KernelValue:
        self._check_radiation_args(r, dt)
        r_eff = max(r, _R_FLOOR)
        key = self._key("rad0", r_eff, dt)
        if key not in self._cache:
            self._cache[key] = _evaluate(
                _radiation_time_parts(r_eff, dt, self.radius),
                _INV_4PI2, self.settings, self._cut())
        return self._cache[key]

    def radiation_radial_value(self, r: float, dt: float) -> KernelValue:
        self._check_radiation_args(r, dt)
        r_eff = max(r, _R_FLOOR)
        key = self._key("radr", r_eff, dt)
        if key not in self._cache:
            self._cache[key] = _evaluate(
                _radiation_radial_parts(r_eff, dt, self.radius),
                _INV_4PI2, self.settings, self._cut())
        return self._cache[key]

    def radiation_time(self, r: float, dt: float) -> float:
        """Time component of the emission kernel (Im of the 0-derivative overlap)."""
        return self.radiation_time_value(r, dt).value

    def radiation_radial(self, r: float, dt: float) -> float:
        """Radial scalar of the spatial emission kernel; caller applies r-hat."""
        return self.radiation_radial_value(r, dt).value

    @staticmethod
    def _check_radiation_args(r: float, dt: float) -> None:
        if r < 0:
            raise ValueError("distance from emitter centre must be >= 0")
        if dt <= 0:
            raise ValueError("radiation kernels require dt > 0; callers gate on the "
                             "switching step function")

    def cache_size(self) -> int:
        return len(self._cache)


# ----------------------------------------------------------------------
# module-level operations (single shared radius, per the data model)
# ----------------------------------------------------------------------

def vacuum_variance(radius: float, settings: QuadratureSettings | None = None) -> float:
    return KernelSet(radius, settings).vacuum_variance()


def commutator_kernel(d: float, dt: float, radius: float,
                      settings: QuadratureSettings | None = None) -> float:
    return KernelSet(radius, settings).commutator(d, dt)


def radiation_kernel(r: float, dt: float, radius: float, j: int,
                     settings: QuadratureSettings | None = None) -> float:
    """Component j of the emission kernel.

    j = 0 is the time derivative; j in {1, 2, 3} all return the same radial
    scalar, to be projected on (x - x_emitter)_j / r by the caller.
    """
    if j not in (0, 1, 2, 3):
        raise ValueError("component index must be 0..3")
    ks = KernelSet(radius, settings)
    return ks.radiation_time(r, dt) if j == 0 else ks.radiation_radial(r, dt)


# cross-check entry points ------------------------------------------------

def vacuum_variance_regulated(radius: float,
                              settings: QuadratureSettings | None = None) -> KernelValue:
    s = settings or QuadratureSettings()
    return _evaluate_regulated(_variance_parts(radius), _INV_4PI2, s, s.cut_for(radius))


def commutator_kernel_regulated(d: float, dt: float, radius: float,
                                settings: QuadratureSettings | None = None) -> KernelValue:
    s = settings or QuadratureSettings()
    if dt == 0.0:
        return KernelValue(0.0, 0.0)
    return _evaluate_regulated(
        _commutator_parts(max(d, _R_FLOOR), dt, radius, radius),
        -_INV_2PI2, s, s.cut_for(radius))


def commutator_kernel_zero_split(d: float, dt: float, radius: float,
                                 settings: QuadratureSettings | None = None) -> KernelValue:
    s = settings or QuadratureSettings()
    if dt == 0.0:
        return KernelValue(0.0, 0.0)
    return _evaluate_zero_split(
        _commutator_parts(max(d, _R_FLOOR), dt, radius, radius),
        -_INV_2PI2, s, s.cut_for(radius))


def radiation_kernel_regulated(r: float, dt: float, radius: float, j: int,
                               settings: QuadratureSettings | None = None) -> KernelValue:
    s = settings or QuadratureSettings()
    parts = (_radiation_time_parts if j == 0 else _radiation_radial_parts)(
        max(r, _R_FLOOR), dt, radius)
    return _evaluate_regulated(parts, _INV_4PI2, s, s.cut_for(radius))


def radiation_kernel_zero_split(r: float, dt: float, radius: float, j: int,
                                settings: QuadratureSettings | None = None) -> KernelValue:
    s = settings or QuadratureSettings()
    parts = (_radiation_time_parts if j == 0 else _radiation_radial_parts)(
        max(r, _R_FLOOR), dt, radius)
    return _evaluate_zero_split(parts, _INV_4PI2, s, s.cut_for(radius))
