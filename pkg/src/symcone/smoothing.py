"""Lifting sphere isotopies to R^{2n} and taming them near the origin.

A sphere map phi with conformal factor c lifts to the homogeneous map
(r, theta) -> (r / c(theta), phi(theta)), which is singular at 0.  The
smoothed version flows the ambient Hamiltonian chi(r) * r * K_t(theta)
instead: the radial switch chi vanishes on a small ball (so the flow is
exactly the identity there) and equals 1 far enough out that trajectories
of the homogeneous flow never see the transition band — agreement outside
a certified multiple of the ball is then a consequence of ODE uniqueness,
not of any error estimate.
"""
from dataclasses import dataclass

import numpy as np

from .blends import cutoff, cutoff_deriv, plateau_bump
from .contact import ContactIsotopy
from .errors import AuditError, DomainError, IntegrationError
from .geometry import PolarPoint, omega_matrix
from . import sampling


def symplectize_many(iso: ContactIsotopy, rs, thetas):
    """Homogeneous lift applied to a batch of polar pairs."""
    ends, logc, _ = iso.flow_many(np.atleast_2d(thetas), 0.0, 1.0)
    return np.asarray(rs, dtype=float) / np.exp(logc), ends


def symplectize(iso: ContactIsotopy, p: PolarPoint) -> PolarPoint:
    rs, ends = symplectize_many(iso, np.array([p.r]), p.theta[None, :])
    return PolarPoint(r=float(rs[0]), theta=ends[0])


def symplectize_ambient(iso: ContactIsotopy, zs):
    """Same lift in cartesian coordinates (rows of nonzero points)."""
    zs = np.atleast_2d(np.asarray(zs, dtype=float))
    r = np.sum(zs * zs, axis=1)
    if np.any(r == 0.0):
        raise DomainError("origin excluded from the homogeneous lift")
    th = zs / np.sqrt(r)[:, None]
    r_new, th_new = symplectize_many(iso, r, th)
    return np.sqrt(r_new)[:, None] * th_new


@dataclass(frozen=True)
class SmoothingCertificate:
    """(M, m) bound the conformal factor over the whole isotopy;
    outside squared radius K_factor * eps the smoothed map provably equals
    the homogeneous lift, and inside eps it is the identity."""

    M: float
    m: float
    K_factor: float
    eps: float
    chi_zero_below: float
    chi_one_above: float


def _conformal_envelope(iso: ContactIsotopy, probes: int = 512, seed: int = 7,
                        chunks: int = 50):
    """Sampled (min, max) of the conformal factor along the isotopy."""
    th = sampling.sphere_points(iso.n, probes, seed)
    logc = np.zeros(probes)
    lo, hi = 0.0, 0.0
    for i in range(chunks):
        t0, t1 = i / chunks, (i + 1) / chunks
        th, dlc, _ = iso.flow_many(th, t0, t1)
        logc = logc + dlc
        lo = min(lo, float(np.min(logc)))
        hi = max(hi, float(np.max(logc)))
    return np.exp(lo), np.exp(hi)


def _rate_envelope(iso: ContactIsotopy, grid: int = 4096, t_samples: int = 9,
                   seed: int = 7, slack: float = 0.25):
    """Bound (min, max) of the conformal factor from the generator's rate.

    log c is the time integral of dK_t(R), so a sup bound on that rate over
    the sphere bounds the factor itself uniformly over all trajectories —
    no dependence on which trajectories happen to get sampled.  The grid
    sup is inflated by `slack` to cover between-node variation.
    """
    from .contact import reeb_derivative

    th = sampling.sphere_points(iso.n, grid, seed)
    lo, hi = 0.0, 0.0
    for t in np.linspace(0.0, 1.0, t_samples):
        rate = reeb_derivative(iso.hamiltonian_at(t), th)
        lo = min(lo, float(np.min(rate)))
        hi = max(hi, float(np.max(rate)))
    return np.exp((1.0 + slack) * lo), np.exp((1.0 + slack) * hi)


class SmoothedSymplectization:
    """Time-1 map of the cutoff Hamiltonian flow, with its certificate."""

    def __init__(self, iso: ContactIsotopy, eps: float, step: float = 1e-3,
                 envelope_probes: int = 512, seed: int = 7):
        if not eps > 0:
            raise DomainError("eps must be positive")
        m, M = _rate_envelope(iso)
        # sampled trajectories must sit inside the rate-derived envelope;
        # if they do not, the grid missed structure and the certificate
        # would be built on sand
        m_samp, M_samp = _conformal_envelope(iso, envelope_probes, seed)
        if M_samp > M or m_samp < m:
            raise AuditError("sampled conformal factor escapes its bound",
                             {"bound": (m, M), "sampled": (m_samp, M_samp)})
        self.iso = iso
        self.eps = float(eps)
        self.certificate = SmoothingCertificate(
            M=M, m=m, K_factor=4.0 * M / m, eps=float(eps),
            chi_zero_below=float(eps), chi_one_above=4.0 * eps / m,
        )
        self.step = step

    def _field(self, t, zs):
        cert = self.certificate
        r = np.sum(zs * zs, axis=1)
        out = np.zeros_like(zs)
        live = r > cert.chi_zero_below  # chi = 0 there: field vanishes exactly
        if not np.any(live):
            return out
        z = zs[live]
        rl = r[live]
        sq = np.sqrt(rl)
        th = z / sq[:, None]
        K = self.iso.hamiltonian_at(t)
        Kv = np.asarray(K.eval_fn(th), dtype=float)
        g = np.atleast_2d(K.ambient_grad(th))
        tang = g - np.sum(g * th, axis=1, keepdims=True) * th
        chi = cutoff(rl, cert.chi_zero_below, cert.chi_one_above)
        chi_d = cutoff_deriv(rl, cert.chi_zero_below, cert.chi_one_above)
        w = chi * rl
        w_d = chi_d * rl + chi
        grad = (2.0 * w_d * Kv)[:, None] * z + (w / sq)[:, None] * tang
        n = zs.shape[1] // 2
        f = np.empty_like(grad)
        f[:, :n] = -grad[:, n:]
        f[:, n:] = grad[:, :n]
        out[live] = f
        return out

    def __call__(self, zs, t_final: float = 1.0):
        zs = np.array(np.atleast_2d(np.asarray(zs, dtype=float)))
        n_steps = max(1, int(round(abs(t_final) / self.step)))
        h = t_final / n_steps
        z = zs
        for i in range(n_steps):
            t = i * h
            k1 = self._field(t, z)
            k2 = self._field(t + 0.5 * h, z + 0.5 * h * k1)
            k3 = self._field(t + 0.5 * h, z + 0.5 * h * k2)
            k4 = self._field(t + h, z + h * k3)
            z = z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if not np.all(np.isfinite(z)):
                raise IntegrationError("smoothed flow diverged", {"step_index": i})
        return z


def smoothed_symplectization(iso: ContactIsotopy, eps: float, **kw):
    return SmoothedSymplectization(iso, eps, **kw)


def symplecticity_defect(map_fn, zs, fd_step: float = 3e-4):
    """Max-norm defect of J^T Omega J - Omega for finite-difference
    Jacobians of map_fn (five-point stencil), one value per input row."""
    zs = np.atleast_2d(np.asarray(zs, dtype=float))
    npts, dim = zs.shape
    Omega = omega_matrix(dim // 2)
    probes = []
    for j in range(dim):
        e = np.zeros(dim)
        e[j] = 1.0
        for c in (-2.0, -1.0, 1.0, 2.0):
            probes.append(zs + c * fd_step * e)
    stacked = np.concatenate(probes, axis=0)
    images = map_fn(stacked)
    cols = []
    for j in range(dim):
        base = 4 * j * npts
        m2 = images[base:base + npts]
        m1 = images[base + npts:base + 2 * npts]
        p1 = images[base + 2 * npts:base + 3 * npts]
        p2 = images[base + 3 * npts:base + 4 * npts]
        cols.append((8.0 * (p1 - m1) - (p2 - m2)) / (12.0 * fd_step))
    J = np.stack(cols, axis=-1)  # (npts, dim, dim): J[p, i, j] = dF_i/dz_j
    defect = np.einsum("pji,jk,pkl->pil", J, Omega, J) - Omega
    return np.max(np.abs(defect), axis=(1, 2))


@dataclass(frozen=True)
class SqueezeWitness:
    tau: float
    scale: float
    grid_points: int
    violations: int
    max_excess: float


def radial_step_bump(r1: float, r2: float):
    """C^4 function of a point of R^d: 1 on |p| <= r1, 0 on |p| >= r2."""
    if not 0 < r1 < r2:
        raise DomainError("need 0 < r1 < r2")

    def H(p):
        p = np.atleast_2d(np.asarray(p, dtype=float))
        return plateau_bump(np.linalg.norm(p, axis=1), r1, r2)

    return H


def liouville_squeeze_witness(H, r1: float, r2: float, dim: int = 3,
                              grid_points: int = 10_000, tau: float = None,
                              box_pad: float = 1.05) -> SqueezeWitness:
    """Contract H through the model contracting flow and certify the
    pointwise inequality Ad H <= scale * H on a lattice.

    The flow scales the first coordinate by e^{-2 tau} and the remaining
    2n of them by e^{-tau}; its conformal factor is the constant e^{-2 tau}.
    With tau at least log(r2/r1), the preimage of any support point of H
    lies in the plateau ball, which forces the inequality everywhere.
    """
    if not r2 > r1 > 0:
        raise DomainError("geometry infeasible: need r2 > r1 > 0")
    if dim % 2 == 0 or dim < 3:
        raise DomainError("dim must be odd and at least 3")
    if tau is None:
        tau = float(np.log(r2 / r1))
    elif tau < np.log(r2 / r1) - 1e-12:
        raise DomainError("tau below log(r2/r1) certifies nothing")
    scale = float(np.exp(-2.0 * tau))

    per_axis = int(np.ceil(grid_points ** (1.0 / dim)))
    axes = [np.linspace(-box_pad * r2, box_pad * r2, per_axis)] * dim
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, dim)

    pre = mesh.copy()
    pre[:, 0] *= np.exp(2.0 * tau)
    pre[:, 1:] *= np.exp(tau)
    ad_vals = scale * np.asarray(H(pre), dtype=float)
    h_vals = np.asarray(H(mesh), dtype=float)
    excess = ad_vals - scale * h_vals
    bad = excess > 1e-12
    return SqueezeWitness(tau=tau, scale=scale, grid_points=mesh.shape[0],
                          violations=int(np.sum(bad)),
                          max_excess=float(np.max(excess)))
