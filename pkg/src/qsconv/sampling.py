"""Seeded random tuples, contractions and step functions for the verification suites."""

import numpy as np

from .dynamics import StepFunction
from .generator import GeneratorTuple


def random_unitary(n, rng):
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_function_algebra_rep(n_points, K, rng):
    """Random unital *-representation of C(M): conjugated diagonal point projections."""
    assign = rng.integers(0, n_points, size=K)
    v = random_unitary(K, rng)
    rep = np.zeros((n_points, K, K), dtype=complex)
    for x in range(n_points):
        diag = np.diag((assign == x).astype(complex))
        rep[x] = v @ diag @ v.conj().T
    return rep


def random_cyclic_group_rep(m, K, rng):
    """Random unitary representation of Z_m: conjugated diagonal characters."""
    omega = np.exp(2j * np.pi / m)
    chars = rng.integers(0, m, size=K)
    v = random_unitary(K, rng)
    rep = np.zeros((m, K, K), dtype=complex)
    for j in range(m):
        rep[j] = v @ np.diag(omega ** (chars * j)) @ v.conj().T
    return rep


def random_rep(h, K, rng, kind):
    if K == 0:
        return np.zeros((h.dim, 0, 0), dtype=complex)
    if kind == "function":
        return random_function_algebra_rep(h.dim, K, rng)
    if kind == "cyclic":
        return random_cyclic_group_rep(h.dim, K, rng)
    raise ValueError(f"no random representation recipe for kind {kind!r}")


def random_contraction(rows, cols, rng, norm_cap=0.9):
    if rows == 0 or cols == 0:
        return np.zeros((rows, cols), dtype=complex)
    z = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    top = np.linalg.norm(z, 2)
    scale = norm_cap * rng.uniform(0.3, 1.0) / max(top, 1e-12)
    return z * scale


def random_tuple(h, dk, K, rng, kind="function", homomorphic=False):
    """A valid characterizing tuple with random rho, D, xi; d derived from e.

    With homomorphic=True the tuple is built to satisfy the structure-relation
    conditions: D a coisometry onto K with Dd = 0 via d = 0 after projecting,
    t = -|d|^2 and the derivation fixed by DD*.
    """
    rho = random_rep(h, K, rng, kind)
    xi = rng.standard_normal(K) + 1j * rng.standard_normal(K)
    if homomorphic:
        # coisometric D (so DD* = I_K) with d = e picked inside ker D and t = -|d|^2
        if dk < K:
            raise ValueError("homomorphic sampling needs dk >= K")
        u = random_unitary(dk, rng)
        D = u[:K, :].reshape(K, dk)
        if dk > K:
            coeffs = rng.standard_normal(dk - K) + 1j * rng.standard_normal(dk - K)
            e = 0.6 * (u[K:, :].conj().T @ coeffs)
        else:
            e = np.zeros(dk, dtype=complex)
        d = e.copy()
        return GeneratorTuple(K, rho, D, xi, d, e, -float(np.vdot(e, e).real))
    D = random_contraction(K, dk, rng)
    e = 0.7 * (rng.standard_normal(dk) + 1j * rng.standard_normal(dk))
    root = _psd_root(np.eye(dk) - D.conj().T @ D)
    d = root @ e
    t = -(float(np.vdot(e, e).real) + float(rng.uniform(0.0, 1.0)))
    return GeneratorTuple(K, rho, D, xi, d, e, t)


def _psd_root(m):
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def random_step_function(dk, rng, horizon=2.0, max_segments=3, scale=0.6):
    n_seg = int(rng.integers(1, max_segments + 1))
    pts = np.sort(rng.uniform(0.0, horizon, size=2 * n_seg))
    segs = []
    for i in range(n_seg):
        t0, t1 = pts[2 * i], pts[2 * i + 1]
        if t1 - t0 < 1e-3:
            continue
        v = scale * (rng.standard_normal(dk) + 1j * rng.standard_normal(dk))
        segs.append((t0, t1, v))
    return StepFunction(segs, dk=dk)
