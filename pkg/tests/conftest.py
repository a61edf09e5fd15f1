"""Shared test oracles, deliberately independent of the package internals.

Each helper recomputes a quantity by a different route than the code
under test: dense matrix algebra for the emitter register, closed-form
retarded fields for the radiation kernels, interval-doubled summation
for the variance integral, and Blahut-Arimoto iteration for capacities.
"""

import json

import numpy as np
import pytest


# ----------------------------------------------------------------------
# dense qubit-register oracle
# ----------------------------------------------------------------------

def kron_chain(mats):
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def dense_monopole(n: int, i: int, phase: float) -> np.ndarray:
    """mu_i as a dense 2^n matrix; basis (g, e) per qubit, emitter 1 = MSB."""
    raise_op = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)  # |e><g|
    mu = raise_op * np.exp(1j * phase) + raise_op.conj().T * np.exp(-1j * phase)
    mats = [np.eye(2, dtype=complex)] * n
    mats[i - 1] = mu
    return kron_chain(mats)


def dense_pair_correlation(state, i, l, phases) -> float:
    n = state.n_emitters
    op = dense_monopole(n, i, phases[i - 1]) @ dense_monopole(n, l, phases[l - 1])
    total = 0.0
    for w, vec in state.vectors():
        total += w * np.real(np.vdot(vec, op @ vec))
    return float(total)


def dense_product_expectation(state, g, phases) -> float:
    n = state.n_emitters
    op = np.eye(2**n, dtype=complex)
    for i in range(1, n + 1):
        mu = dense_monopole(n, i, phases[i - 1])
        op = op @ (np.cos(g[i - 1]) * np.eye(2**n) + 1j * np.sin(g[i - 1]) * mu)
    total = 0.0
    for w, vec in state.vectors():
        total += w * np.real(np.vdot(vec, op @ vec))
    return float(total)


# ----------------------------------------------------------------------
# closed-form retarded field of a ball flashed at one instant
# ----------------------------------------------------------------------

def retarded_potential(r: float, dt: float, radius: float) -> float:
    if dt <= 0:
        return 0.0
    if r + dt <= radius:
        return dt
    if abs(r - dt) < radius < r + dt:
        return (radius**2 - (r - dt) ** 2) / (4.0 * r)
    return 0.0


def retarded_dt(r: float, dt: float, radius: float) -> float:
    if dt <= 0:
        return 0.0
    if r + dt < radius:
        return 1.0
    if abs(r - dt) < radius < r + dt:
        return (r - dt) / (2.0 * r)
    return 0.0


def retarded_dr(r: float, dt: float, radius: float) -> float:
    if dt <= 0 or r + dt < radius:
        return 0.0
    if abs(r - dt) < radius < r + dt:
        return -(r - dt) / (2.0 * r) - (radius**2 - (r - dt) ** 2) / (4.0 * r * r)
    return 0.0


# ----------------------------------------------------------------------
# Blahut-Arimoto capacity of the 2x2 channel
# ----------------------------------------------------------------------

def blahut_arimoto_capacity(p: float, q: float, gap: float = 1e-12,
                            max_iter: int = 4000000) -> float:
    """Capacity via alternating maximization, stopped on the duality gap.

    The midpoint of the (lower, upper) bracket is within gap/(2 ln2) of
    the capacity; raises if the bracket never closes.
    """
    w = np.array([[1.0 - q, q], [1.0 - p, p]])
    r = np.array([0.5, 0.5])
    for _ in range(max_iter):
        qy = r @ w
        div = np.zeros(2)
        for x in range(2):
            mask = w[x] > 0
            div[x] = float(np.sum(w[x][mask] * np.log(w[x][mask]
                                                      / np.maximum(qy[mask], 1e-300))))
        lower = float(r @ div)
        upper = float(div.max())
        if upper - lower < gap:
            return 0.5 * (lower + upper) / np.log(2.0)
        r = r * np.exp(div - div.max())
        r = r / r.sum()
    raise AssertionError(f"duality gap stuck at {upper - lower:.2e}")


def blahut_arimoto_grid(ps: np.ndarray, qs: np.ndarray, gap: float = 2e-10,
                        max_iter: int = 400000) -> np.ndarray:
    """Vectorized Blahut-Arimoto over flat (p, q) arrays of channels."""
    ps = np.asarray(ps, dtype=float).ravel()
    qs = np.asarray(qs, dtype=float).ravel()
    w = np.stack([np.stack([1.0 - qs, qs], axis=1),
                  np.stack([1.0 - ps, ps], axis=1)], axis=1)  # (cells, x, y)
    logw = np.where(w > 0, np.log(np.maximum(w, 1e-300)), 0.0)
    r = np.full((len(ps), 2), 0.5)
    caps = np.zeros(len(ps))
    active = np.ones(len(ps), dtype=bool)
    for _ in range(max_iter):
        if not active.any():
            return caps
        wa, la, ra = w[active], logw[active], r[active]
        qy = np.einsum("cx,cxy->cy", ra, wa)
        div = np.einsum("cxy->cx", wa * (la - np.log(np.maximum(qy, 1e-300))[:, None, :]))
        lower = np.einsum("cx,cx->c", ra, div)
        upper = div.max(axis=1)
        done = (upper - lower) < gap
        caps_active = 0.5 * (lower + upper) / np.log(2.0)
        idx = np.flatnonzero(active)
        caps[idx[done]] = caps_active[done]
        ra = ra * np.exp(div - div.max(axis=1, keepdims=True))
        ra /= ra.sum(axis=1, keepdims=True)
        r[active] = ra
        active[idx[done]] = False
    raise AssertionError(f"{active.sum()} cells never closed the duality gap")


# ----------------------------------------------------------------------
# configuration snippets
# ----------------------------------------------------------------------

def three_emitter_config(state_type="w", phases=(0.0, 0.0, 0.0),
                         evaluation_time=8.0) -> str:
    state = {"type": state_type}
    if state_type == "w":
        state["phases"] = list(phases)
    return json.dumps({
        "emitters": [
            {"position": [5.0, 0.0, 0.0], "time": 1.0, "lambda": 1.0},
            {"position": [6.5, 0.0, 0.0], "time": 2.0, "lambda": 1.0},
            {"position": [8.0, 0.0, 0.0], "time": 3.0, "lambda": 1.0},
        ],
        "receiver": {"position": [11.0, 4.5, 0.0], "time": 8.0, "lambda": 2.0},
        "state": state,
        "evaluation_time": evaluation_time,
    })


def four_emitter_config(phases=(0.0, 0.0, 0.0, 0.0), state_type="w",
                        lam=1.0, receiver_pos=(11.0, 4.5, 0.0)) -> str:
    state = {"type": state_type}
    if state_type == "w":
        state["phases"] = list(phases)
    return json.dumps({
        "emitters": [
            {"position": [5.0, 0.0, 0.0], "time": 1.0, "lambda": lam},
            {"position": [6.5, 0.0, 0.0], "time": 2.0, "lambda": lam},
            {"position": [8.0, 0.0, 0.0], "time": 3.0, "lambda": lam},
            {"position": [9.5, 0.0, 0.0], "time": 4.0, "lambda": lam},
        ],
        "receiver": {"position": list(receiver_pos), "time": 8.0, "lambda": 2.0},
        "state": state,
        "evaluation_time": 9.0,
    })


@pytest.fixture(scope="session")
def kernel_bank():
    from qshock.observables import KernelBank
    return KernelBank()
