"""Shared geometry constructors for the test suite."""

import numpy as np

from kplateau.rod import (
    CrossSection,
    Frame,
    LinkConfig,
    Placement,
    constant_density,
    integrate_frame,
)

RING_FRAME = Frame(
    np.array([-1.0, 0.0, 0.0]),
    np.array([0.0, 0.0, 1.0]),
    np.array([0.0, 1.0, 0.0]),
)

TILTED_FRAME = Frame(
    np.array([-1.0, 0.0, 0.0]),
    np.array([0.0, 1.0, 0.0]),
    np.array([0.0, 0.0, -1.0]),
)


def ring_link(R=1.0, a=0.02, n=192, rho=0.0, gravity=(0.0, 0.0, 0.0)):
    """Closed circular rod of radius R in the xy-plane."""
    df = constant_density(2 * np.pi * R, n, kappa1=1.0 / R)
    pl = Placement(np.array([R, 0.0, 0.0]), RING_FRAME)
    return LinkConfig(
        rod1=(df, pl, CrossSection(a)),
        rod2=None,
        rho=(rho, 0.0),
        gravity=np.array(gravity),
    )


def hopf_link(a1=0.05, a2=0.05, n=192, rho=(0.0, 0.0), gravity=(0.0, 0.0, 0.0)):
    """Two unit circles forming a Hopf link with Lk12 = +1."""
    L = 2 * np.pi
    df1 = constant_density(L, n, kappa1=1.0)
    df2 = constant_density(L, n, kappa1=1.0)
    pl1 = Placement(np.array([1.0, 0.0, 0.0]), RING_FRAME)
    pl2 = Placement(np.array([2.0, 0.0, 0.0]), TILTED_FRAME)
    return LinkConfig(
        rod1=(df1, pl1, CrossSection(a1)),
        rod2=(df2, pl2, CrossSection(a2)),
        rho=rho,
        gravity=np.array(gravity),
    )


def circle_curve(a=0.02, n=256, center=(0.0, 0.0, 0.0), R=1.0):
    """Framed unit-ish circle plus its cross-section."""
    df = constant_density(2 * np.pi * R, n, kappa1=1.0 / R)
    pl = Placement(np.asarray(center, dtype=float) + np.array([R, 0.0, 0.0]), RING_FRAME)
    return integrate_frame(df, pl), CrossSection(a)


def circle_points(n, radius=1.0, center=(0.0, 0.0, 0.0), plane="xy"):
    """Raw polyline circle without the duplicate endpoint."""
    t = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    if plane == "xy":
        pts = np.stack([radius * np.cos(t), radius * np.sin(t), np.zeros(n)], axis=1)
    elif plane == "xz":
        pts = np.stack([radius * np.cos(t), np.zeros(n), radius * np.sin(t)], axis=1)
    else:
        raise ValueError(plane)
    return pts + np.asarray(center, dtype=float)


def random_rotation(rng):
    """Uniform-ish rotation matrix from a random quaternion."""
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )
