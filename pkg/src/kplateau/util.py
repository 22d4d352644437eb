"""Small shared helpers: threading policy and vector utilities."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

# Chunk length for parallel pairwise reductions. Fixed so that the floating
# point summation order, and therefore every exported byte, is independent of
# the worker count.
_CHUNK = 1 << 15


def thread_count() -> int:
    """Worker count selected by the KP_THREADS environment variable.

    Unset or 0 means automatic (one worker per CPU). Values below zero are
    rejected.
    """
    raw = os.environ.get("KP_THREADS", "0").strip()
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"KP_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise ValueError("KP_THREADS must be >= 0")
    if n == 0:
        return os.cpu_count() or 1
    return n


def chunked_sum(fn, total: int):
    """Sum fn(lo, hi) over fixed-size chunks of range(total).

    The chunk grid never depends on the worker count, and partial results are
    reduced in index order, so the result is bitwise reproducible for any
    KP_THREADS setting. fn must return a float or ndarray.
    """
    bounds = [(lo, min(lo + _CHUNK, total)) for lo in range(0, total, _CHUNK)]
    if not bounds:
        return 0.0
    if len(bounds) == 1 or thread_count() == 1:
        parts = [fn(lo, hi) for lo, hi in bounds]
    else:
        with ThreadPoolExecutor(max_workers=thread_count()) as pool:
            parts = list(pool.map(lambda b: fn(*b), bounds))
    acc = parts[0]
    for p in parts[1:]:
        acc = acc + p
    return acc


def normalized(v: np.ndarray, axis: int = -1) -> np.ndarray:
    """Unit vectors along axis; zero vectors are left untouched."""
    n = np.linalg.norm(v, axis=axis, keepdims=True)
    safe = np.where(n == 0.0, 1.0, n)
    return v / safe


def rodrigues(phi: np.ndarray) -> np.ndarray:
    """Rotation matrix for a rotation vector (axis * angle)."""
    phi = np.asarray(phi, dtype=float)
    theta = np.linalg.norm(phi)
    if theta < 1e-14:
        k = np.zeros(3)
    else:
        k = phi / theta
    kx = np.array([[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]])
    return np.eye(3) + np.sin(theta) * kx + (1.0 - np.cos(theta)) * (kx @ kx)


def segment_segment_distance(
    p0: np.ndarray, p1: np.ndarray, q0: np.ndarray, q1: np.ndarray
) -> np.ndarray:
    """Minimum distance between segments [p0,p1] and [q0,q1].

    All inputs broadcast against each other over leading axes; the last axis
    holds xyz. Returns the distance array. Uses the standard clamped
    closest-point parameterization with a parallel-segment fallback.
    """
    p0, p1, q0, q1 = np.broadcast_arrays(p0, p1, q0, q1)
    d1 = p1 - p0
    d2 = q1 - q0
    r = p0 - q0
    a = np.einsum("...i,...i", d1, d1)
    e = np.einsum("...i,...i", d2, d2)
    f = np.einsum("...i,...i", d2, r)
    c = np.einsum("...i,...i", d1, r)
    b = np.einsum("...i,...i", d1, d2)
    denom = a * e - b * b
    tiny = 1e-30
    s = np.where(denom > tiny, np.clip((b * f - c * e) / np.where(denom > tiny, denom, 1.0), 0.0, 1.0), 0.0)
    # Recompute t for the chosen s, then re-clamp s against t.
    t = np.where(e > tiny, (b * s + f) / np.where(e > tiny, e, 1.0), 0.0)
    t_cl = np.clip(t, 0.0, 1.0)
    s = np.where(a > tiny, np.clip((b * t_cl - c) / np.where(a > tiny, a, 1.0), 0.0, 1.0), 0.0)
    closest1 = p0 + s[..., None] * d1
    closest2 = q0 + t_cl[..., None] * d2
    return np.linalg.norm(closest1 - closest2, axis=-1)
