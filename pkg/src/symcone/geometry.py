"""Coordinates and the linear symplectic structure of R^{2n}.

Points are numpy arrays of length 2n ordered (x_1..x_n, y_1..y_n); all
operations also broadcast over leading batch axes.  The radial coordinate
`r` is the squared norm |x|^2 + |y|^2 (units of action), so the Liouville
flow z -> e^{t/2} z multiplies r by e^t.
"""
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, DomainError

UNIT_SPHERE_TOL = 1e-12


def as_phase(z, n=None):
    """Validate and return a phase-space point (or batch) as a float array."""
    z = np.asarray(z, dtype=float)
    if z.shape[-1] % 2 != 0 or z.shape[-1] == 0:
        raise DimensionMismatchError(f"phase vector length {z.shape[-1]} is not even")
    if n is not None and z.shape[-1] != 2 * n:
        raise DimensionMismatchError(f"expected length {2 * n}, got {z.shape[-1]}")
    if not np.all(np.isfinite(z)):
        raise DomainError("phase vector has non-finite entries")
    return z


def half_dim(z):
    return np.asarray(z).shape[-1] // 2


@dataclass(frozen=True)
class PolarPoint:
    """Squared radius r > 0 and a unit direction theta."""

    r: float
    theta: np.ndarray

    def __post_init__(self):
        if not self.r > 0:
            raise DomainError(f"polar radius must be positive, got {self.r}")
        nrm = float(np.linalg.norm(self.theta))
        if abs(nrm - 1.0) > UNIT_SPHERE_TOL:
            raise DomainError(f"|theta| = {nrm} is not 1 within {UNIT_SPHERE_TOL}")


@dataclass(frozen=True)
class SplitCoordinates:
    u: float
    v: float
    angle_ratio: float
    k: int


def polar_decompose(z) -> PolarPoint:
    z = as_phase(z)
    r = float(np.dot(z, z))
    if r == 0.0:
        raise DomainError("origin excluded")
    return PolarPoint(r=r, theta=z / np.sqrt(r))


def polar_compose(p: PolarPoint):
    return np.sqrt(p.r) * p.theta


def liouville_field(z):
    """The radial scaling field: value z/2 at z."""
    return 0.5 * as_phase(z)


def symplectic_pairing(a, b):
    a = as_phase(a)
    b = as_phase(b, n=half_dim(a))
    n = half_dim(a)
    return np.sum(
        a[..., :n] * b[..., n:] - a[..., n:] * b[..., :n], axis=-1
    )


def omega_matrix(n: int):
    eye = np.eye(n)
    return np.block([[np.zeros((n, n)), eye], [-eye, np.zeros((n, n))]])


def split_uv(z, k: int):
    """Batched (u, v): u collects |x|^2 plus the first n-k y's squared,
    v the last k y's squared."""
    z = as_phase(z)
    n = half_dim(z)
    if not 1 <= k <= n:
        raise DomainError(f"k = {k} outside 1..{n}")
    sq = np.square(z)
    v = np.sum(sq[..., 2 * n - k:], axis=-1)
    u = np.sum(sq, axis=-1) - v
    return u, v


def angle_ratio_of(z, k: int):
    u, v = split_uv(z, k)
    with np.errstate(divide="ignore", invalid="ignore"):
        rho = np.where(u > 0.0, v / np.where(u > 0.0, u, 1.0), np.inf)
    return rho


def split_coordinates(z, k: int) -> SplitCoordinates:
    z = as_phase(z)
    if float(np.dot(z, z)) == 0.0:
        raise DomainError("origin excluded")
    u, v = split_uv(z, k)
    u, v = float(u), float(v)
    rho = v / u if u > 0.0 else np.inf
    return SplitCoordinates(u=u, v=v, angle_ratio=rho, k=k)
