"""Attachment-circle construction and loop pairing for seed surfaces."""

from __future__ import annotations

import numpy as np

from .errors import InitFailed
from .rod import CrossSection, FramedCurve, tube_frame_at

__all__ = ["loop_stations", "attachment_circle", "pair_loops", "band_attachments", "band_mid_curve"]


def loop_stations(fc: FramedCurve, count: int) -> np.ndarray:
    """`count` arc positions equally spaced around a closed loop (no seam duplicate)."""
    return np.arange(count) * (fc.length / count)


def attachment_circle(fc: FramedCurve, cs: CrossSection, stations: np.ndarray, toward: np.ndarray):
    """Points on the tube surface facing given target directions.

    For every station the section angle is chosen so the surface point leans
    toward the matching row of `toward`. Returns (angles, points).
    """
    pts, U = tube_frame_at(fc, stations)
    d = toward - pts
    du = np.einsum("ni,ni->n", d, U[:, 0])
    dv = np.einsum("ni,ni->n", d, U[:, 1])
    if np.any(np.hypot(du, dv) < 1e-12):
        raise InitFailed("attachment direction is parallel to the tangent")
    theta = np.arctan2(dv, du)
    a = cs.radius
    surface = pts + a * (np.cos(theta)[:, None] * U[:, 0] + np.sin(theta)[:, None] * U[:, 1])
    return theta, surface


def pair_loops(p1: np.ndarray, p2: np.ndarray) -> np.ndarray:
    """Cyclic correspondence j -> sigma(j) between two equal-length rings.

    Tries both traversal directions and every cyclic shift, keeping the map
    that minimizes the total squared distance between paired points. Returns
    the index array sigma with p2[sigma[j]] paired to p1[j].
    """
    n = p1.shape[0]
    if p2.shape[0] != n:
        raise InitFailed("loop pairing requires equal station counts")
    base = np.arange(n)
    best = None
    best_cost = np.inf
    for direction in (1, -1):
        order = base if direction == 1 else (-base) % n
        for shift in range(n):
            idx = (order + shift) % n
            cost = float(np.sum((p1 - p2[idx]) ** 2))
            if cost < best_cost:
                best_cost = cost
                best = idx
    return best


def band_attachments(
    fc1: FramedCurve, cs1: CrossSection, fc2: FramedCurve, cs2: CrossSection, count: int = 48
):
    """Matched attachment circles for a ruled band between two loops.

    Returns ((s1, theta1, ring1), (s2, theta2, ring2)) with ring2 already
    reordered so that ring1[j] pairs with ring2[j].
    """
    s1 = loop_stations(fc1, count)
    s2 = loop_stations(fc2, count)
    m1 = tube_frame_at(fc1, s1)[0]
    m2 = tube_frame_at(fc2, s2)[0]
    sigma = pair_loops(m1, m2)
    theta1, ring1 = attachment_circle(fc1, cs1, s1, m2[sigma])
    sigma_inv = np.empty_like(sigma)
    sigma_inv[sigma] = np.arange(sigma.shape[0])
    theta2, ring2 = attachment_circle(fc2, cs2, s2, m1[sigma_inv])
    return (s1, theta1, ring1), (s2[sigma], theta2[sigma], ring2[sigma])


def band_mid_curve(
    fc1: FramedCurve, cs1: CrossSection, fc2: FramedCurve, cs2: CrossSection, count: int = 48
) -> np.ndarray:
    """Mid-curve of the ruled band between two loops.

    Sliding it along the band onto either boundary shows it inherits linking
    number Lk(loop1, loop2) with each loop, so for singly linked loops it is
    a valid probe of the class that links both once.
    """
    (s1, t1, ring1), (s2, t2, ring2) = band_attachments(fc1, cs1, fc2, cs2, count)
    return 0.5 * (ring1 + ring2)


def disk_attachment(fc: FramedCurve, cs: CrossSection, count: int = 48):
    """Attachment circle facing the loop centroid (inner equator for a ring)."""
    s = loop_stations(fc, count)
    pts = tube_frame_at(fc, s)[0]
    centroid = pts.mean(axis=0)
    toward = np.broadcast_to(centroid, pts.shape)
    theta, ring = attachment_circle(fc, cs, s, toward)
    return s, theta, ring
