"""Bloch-sphere geometry helpers shared by the ontic and orbit modules."""

from __future__ import annotations

import numpy as np

from .qcore import StateVector


def fibonacci_sphere(n: int) -> np.ndarray:
    """Quasi-uniform lattice of ``n`` unit vectors on the 2-sphere.

    Golden-angle spiral with half-integer offsets; deterministic.
    Returns an (n, 3) float array.
    """
    if n < 1:
        raise ValueError(f"need at least one point, got {n}")
    golden = (1.0 + np.sqrt(5.0)) / 2.0
    idx = np.arange(n, dtype=float) + 0.5
    polar = np.arccos(1.0 - 2.0 * idx / n)
    azimuth = 2.0 * np.pi * idx / golden
    sp = np.sin(polar)
    pts = np.empty((n, 3))
    pts[:, 0] = sp * np.cos(azimuth)
    pts[:, 1] = sp * np.sin(azimuth)
    pts[:, 2] = np.cos(polar)
    return pts


def bloch_from_state(state: StateVector) -> np.ndarray:
    """Bloch vector (x, y, z) of a qubit state."""
    if state.dim != 2:
        raise ValueError(f"Bloch vector needs a qubit, got dim {state.dim}")
    a0, a1 = state.amplitudes
    cross = np.conj(a0) * a1
    return np.array([2.0 * cross.real, 2.0 * cross.imag, abs(a0) ** 2 - abs(a1) ** 2])


def state_from_bloch(b) -> StateVector:
    """Qubit state with the given unit Bloch vector."""
    b = np.asarray(b, dtype=float)
    norm = float(np.linalg.norm(b))
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"Bloch vector must be unit length, got |b| = {norm!r}")
    b = b / norm
    polar = np.arccos(np.clip(b[2], -1.0, 1.0))
    azimuth = np.arctan2(b[1], b[0])
    amps = np.array([np.cos(polar / 2.0), np.exp(1j * azimuth) * np.sin(polar / 2.0)])
    return StateVector(2, amps / np.linalg.norm(amps))


def rodrigues_rotate(vectors: np.ndarray, axes: np.ndarray, angles: np.ndarray) -> np.ndarray:
    """Rotate ``vectors`` about unit ``axes`` by ``angles`` (all broadcastable).

    Standard axis-angle formula v cos(t) + (u x v) sin(t) + u (u.v)(1 - cos(t)).
    Shapes: vectors (..., 3), axes (..., 3), angles (...); broadcast together.
    """
    v = np.asarray(vectors, dtype=float)
    u = np.asarray(axes, dtype=float)
    t = np.asarray(angles, dtype=float)[..., None]
    cos_t = np.cos(t)
    sin_t = np.sin(t)
    dot = np.sum(u * v, axis=-1, keepdims=True)
    return v * cos_t + np.cross(u, v) * sin_t + u * dot * (1.0 - cos_t)
