"""Hamiltonian kinematics on the unit sphere of R^{2n}.

Functions on the sphere generate flows through their 1-homogeneous
extensions: a function K on S^{2n-1} extends to Hext(z) = r K(theta) with
r = |z|^2, and the tangential part of the ambient Hamiltonian field of
Hext is the sphere field Y_K.  This realizes the correspondence between
sphere kinematics and homogeneous ambient kinematics exactly for the
round form alpha(v) = omega(theta, v) / 2, with no frame choices.

Sign convention used throughout: the ambient field of H is
(xdot, ydot) = (-dH/dy, +dH/dx), so the squared-norm function |z|^2
generates the counterclockwise rotation (-2y, 2x) of period pi.
"""
from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional

import numpy as np

from .errors import AuditError, DomainError, IntegrationError
from .geometry import as_phase, half_dim, angle_ratio_of
from . import sampling

FD_STEP = 1e-5


def _batched(theta):
    theta = np.asarray(theta, dtype=float)
    single = theta.ndim == 1
    return (theta[None, :] if single else theta), single


def reeb_field(theta, tol=1e-10):
    """Rotation field (-2y, 2x); unit pairing against the contact form."""
    th, single = _batched(theta)
    nrm = np.linalg.norm(th, axis=-1)
    if np.any(np.abs(nrm - 1.0) > tol):
        raise DomainError("reeb_field requires unit vectors")
    n = half_dim(th)
    out = np.empty_like(th)
    out[..., :n] = -2.0 * th[..., n:]
    out[..., n:] = 2.0 * th[..., :n]
    return out[0] if single else out


def contact_form(theta, v):
    """alpha at theta evaluated on an ambient vector v (tangential part used)."""
    th, s1 = _batched(theta)
    vv, _ = _batched(v)
    n = half_dim(th)
    val = 0.5 * np.sum(th[..., :n] * vv[..., n:] - th[..., n:] * vv[..., :n], axis=-1)
    return float(val[0]) if s1 else val


@dataclass(frozen=True)
class SupportMeta:
    """Certified envelope data for a sphere Hamiltonian.

    M bounds the function from above everywhere; the function vanishes
    wherever the angle ratio exceeds rho1; m is a positive lower bound on
    the region {angle ratio <= rho0}.
    """

    M: float
    m: float
    rho0: float
    rho1: float

    def scaled(self, s: float):
        return SupportMeta(M=self.M * s, m=self.m * s, rho0=self.rho0, rho1=self.rho1)


class ContactHamiltonian:
    """A function on S^{2n-1}, vanishing past angle-ratio rho1 of the
    k-indexed coordinate split, with certified support metadata."""

    def __init__(self, eval_fn: Callable, k: int, n: int, meta: SupportMeta,
                 grad_fn: Optional[Callable] = None, label: str = ""):
        self.eval_fn = eval_fn
        self.k = int(k)
        self.n = int(n)
        self.meta = meta
        self.grad_fn = grad_fn
        self.label = label

    def __call__(self, theta):
        th, single = _batched(theta)
        vals = np.asarray(self.eval_fn(th), dtype=float)
        return float(vals[0]) if single else vals

    def ambient_grad(self, theta):
        """Gradient of the ambient 0-homogeneous-in-direction extension,
        i.e. of K as a function of the unnormalized argument restricted to
        the sphere; analytic when available, else central differences."""
        th, single = _batched(theta)
        if self.grad_fn is not None:
            g = np.asarray(self.grad_fn(th), dtype=float)
        else:
            g = np.empty_like(th)
            for i in range(th.shape[-1]):
                e = np.zeros(th.shape[-1])
                e[i] = FD_STEP
                hi = np.asarray(self.eval_fn(_renorm(th + e)), dtype=float)
                lo = np.asarray(self.eval_fn(_renorm(th - e)), dtype=float)
                g[:, i] = (hi - lo) / (2.0 * FD_STEP)
        return g[0] if single else g

    def scaled(self, s: float):
        if s <= 0:
            raise DomainError("scale must be positive")
        ev = self.eval_fn
        gr = self.grad_fn
        return ContactHamiltonian(
            eval_fn=lambda th: s * np.asarray(ev(th), dtype=float),
            k=self.k, n=self.n, meta=self.meta.scaled(s),
            grad_fn=None if gr is None else (lambda th: s * np.asarray(gr(th), dtype=float)),
            label=f"{s:g}*{self.label}" if self.label else "",
        )

    def audit(self, samples: int = 10_000, seed: int = 0, zero_tol: float = 1e-12):
        """Sampled contract check of the metadata; raises AuditError."""
        thetas = sampling.sphere_points(self.n, samples, seed)
        vals = self(thetas)
        if np.any(vals < -zero_tol):
            raise AuditError(f"negative value {vals.min():.3e} found")
        if np.max(vals) > self.meta.M + 1e-6:
            raise AuditError(f"sampled sup {np.max(vals):.6g} exceeds M={self.meta.M}")
        rho = angle_ratio_of(thetas, self.k)
        outside = rho >= self.meta.rho1
        if np.any(np.abs(vals[outside]) > zero_tol):
            raise AuditError("support leaks past rho1")
        if not self.meta.m > 0:
            raise AuditError("m must be positive")
        inner = sampling.sphere_points_with_angle_ratio(
            self.n, self.k, samples // 4, seed + 1, rho_max=self.meta.rho0)
        inner_vals = self(inner)
        if np.min(inner_vals) < self.meta.m - 1e-12:
            raise AuditError(
                f"m={self.meta.m} is not a lower bound on the inner region "
                f"(sampled min {np.min(inner_vals):.6g})")
        return True


def _renorm(th):
    return th / np.linalg.norm(th, axis=-1, keepdims=True)


def ambient_hamiltonian_field(K: ContactHamiltonian, theta):
    """Field of the 1-homogeneous extension r*K at unit-sphere points."""
    th, single = _batched(theta)
    n = half_dim(th)
    Kv = np.asarray(K.eval_fn(th), dtype=float)[..., None]
    g_amb = K.ambient_grad(th)
    if g_amb.ndim == 1:
        g_amb = g_amb[None, :]
    tangential = g_amb - np.sum(g_amb * th, axis=-1, keepdims=True) * th
    grad = 2.0 * Kv * th + tangential
    out = np.empty_like(grad)
    out[..., :n] = -grad[..., n:]
    out[..., n:] = grad[..., :n]
    return out[0] if single else out


def contact_vector_field(K: ContactHamiltonian, theta):
    """Sphere field Y_K: tangential projection of the homogeneous field."""
    th, single = _batched(theta)
    X = ambient_hamiltonian_field(K, th)
    Y = X - np.sum(X * th, axis=-1, keepdims=True) * th
    return Y[0] if single else Y


def reeb_derivative(K: ContactHamiltonian, theta):
    """dK evaluated on the rotation field (a tangent direction)."""
    th, single = _batched(theta)
    g = K.ambient_grad(th)
    if g.ndim == 1:
        g = g[None, :]
    val = np.sum(g * reeb_field(th), axis=-1)
    return float(val[0]) if single else val


@dataclass
class ConformalFactorRecord:
    value: float
    log_derivative_trace: np.ndarray = dc_field(default_factory=lambda: np.empty(0))

    def __post_init__(self):
        if not self.value > 0:
            raise DomainError("conformal factor must be positive")


class ContactIsotopy:
    """A path of sphere Hamiltonians on [0, 1] and its flow.

    `generator` is either a single ContactHamiltonian (autonomous case) or
    a callable t -> ContactHamiltonian.  The flow integrates the sphere
    field with a fixed-step fourth-order scheme, renormalizing to the
    sphere each step, and carries log of the conformal factor along every
    trajectory as one extra scalar.
    """

    def __init__(self, generator, step: float = 1e-3):
        if isinstance(generator, ContactHamiltonian):
            const = generator
            self.hamiltonian_at = lambda t: const
            self.k, self.n = const.k, const.n
        else:
            self.hamiltonian_at = generator
            probe = generator(0.0)
            self.k, self.n = probe.k, probe.n
        if not step > 0:
            raise IntegrationError("step underflow", {"step": step})
        self.step = step

    def _rhs(self, t, thetas):
        K = self.hamiltonian_at(t)
        return contact_vector_field(K, thetas), reeb_derivative(K, thetas)

    def flow_many(self, thetas, t_from: float = 0.0, t_to: float = 1.0,
                  keep_trace: bool = False):
        """Integrate a batch from t_from to t_to (either direction).

        Returns (endpoints, log_conformal, trace) where log_conformal is
        the accumulated log-derivative integral along each trajectory.
        """
        th = _renorm(np.atleast_2d(np.asarray(thetas, dtype=float)))
        span = t_to - t_from
        n_steps = max(1, int(round(abs(span) / self.step)))
        h = span / n_steps
        logc = np.zeros(th.shape[0])
        trace = [] if keep_trace else None
        for i in range(n_steps):
            t = t_from + i * h
            f1, c1 = self._rhs(t, th)
            f2, c2 = self._rhs(t + 0.5 * h, _renorm(th + 0.5 * h * f1))
            f3, c3 = self._rhs(t + 0.5 * h, _renorm(th + 0.5 * h * f2))
            f4, c4 = self._rhs(t + h, _renorm(th + h * f3))
            th = _renorm(th + (h / 6.0) * (f1 + 2.0 * f2 + 2.0 * f3 + f4))
            logc += (h / 6.0) * (c1 + 2.0 * c2 + 2.0 * c3 + c4)
            if keep_trace:
                trace.append(c1)
            if not np.all(np.isfinite(th)):
                raise IntegrationError("flow diverged", {"step_index": i})
        return th, logc, (np.asarray(trace) if keep_trace else None)

    def flow(self, theta, t: float = 1.0):
        """Endpoint of one trajectory plus its conformal factor record."""
        th, single = _batched(theta)
        ends, logc, trace = self.flow_many(th, 0.0, t, keep_trace=True)
        rec = ConformalFactorRecord(value=float(np.exp(logc[0])),
                                    log_derivative_trace=trace[:, 0])
        return (ends[0] if single else ends), rec

    def inverse_images(self, thetas, t: float = 1.0):
        """psi_t^{-1}(theta) together with c_{psi_t} evaluated there.

        One backward pass: running the ODE from t down to 0 lands on the
        preimage, and the log-derivative integral accumulated along that
        same path (sign restored) is log c at the preimage.
        """
        th = np.atleast_2d(np.asarray(thetas, dtype=float))
        pre, logc_back, _ = self.flow_many(th, t, 0.0)
        return pre, np.exp(-logc_back)


def concatenate_isotopies(second: ContactIsotopy, first: ContactIsotopy):
    """Isotopy whose time-1 map is (time-1 of second) o (time-1 of first)."""
    if (second.k, second.n) != (first.k, first.n):
        raise DomainError("isotopies act on different splits")

    def gen(t):
        if t < 0.5:
            return first.hamiltonian_at(2.0 * t).scaled(2.0)
        return second.hamiltonian_at(2.0 * t - 1.0).scaled(2.0)

    return ContactIsotopy(gen, step=min(second.step, first.step) / 2.0)


def identity_isotopy(n: int, k: int, step: float = 1e-3):
    meta = SupportMeta(M=0.0, m=1.0, rho0=0.1, rho1=1.0)
    zero = ContactHamiltonian(lambda th: np.zeros(th.shape[0]), k=k, n=n, meta=meta,
                              grad_fn=lambda th: np.zeros_like(th), label="0")
    return ContactIsotopy(zero, step=step)


def adjoint_action(iso: ContactIsotopy, K: ContactHamiltonian,
                   meta_samples: int = 2000, seed: int = 0) -> ContactHamiltonian:
    """Pull K back through the time-1 map with its conformal weight.

    The value at theta is c(pre) * K(pre) with pre the time-1 preimage of
    theta; metadata is re-estimated by sampling and inflated, to be
    re-audited by the caller when it matters.
    """
    if (iso.k, iso.n) != (K.k, K.n):
        raise DomainError("isotopy and Hamiltonian act on different splits")

    def ev(th):
        pre, c = iso.inverse_images(th)
        return c * np.asarray(K.eval_fn(pre), dtype=float)

    probe = sampling.sphere_points(K.n, meta_samples, seed)
    vals = ev(probe)
    rho = angle_ratio_of(probe, K.k)
    support_rho = rho[np.abs(vals) > 1e-12]
    rho1_new = K.meta.rho1 if support_rho.size == 0 else max(
        K.meta.rho1, 1.1 * float(np.max(support_rho)) + 0.1)
    inner = sampling.sphere_points_with_angle_ratio(
        K.n, K.k, meta_samples // 2, seed + 3, rho_max=K.meta.rho0)
    m_new = 0.75 * float(np.min(ev(inner)))
    M_new = 1.05 * float(np.max(vals)) + 1e-9
    meta = SupportMeta(M=M_new, m=m_new, rho0=K.meta.rho0, rho1=rho1_new)
    return ContactHamiltonian(ev, k=K.k, n=K.n, meta=meta,
                              label=f"Ad[{K.label}]" if K.label else "")


def lie_bracket(H: ContactHamiltonian, K: ContactHamiltonian, theta):
    """Bracket value dK(Y_H) - K dH(R) at theta."""
    th, single = _batched(theta)
    gK = np.atleast_2d(K.ambient_grad(th))
    YH = np.atleast_2d(contact_vector_field(H, th))
    term1 = np.sum(gK * YH, axis=-1)
    Kv = np.asarray(K.eval_fn(th), dtype=float)
    term2 = Kv * np.atleast_1d(reeb_derivative(H, th))
    val = term1 - term2
    return float(val[0]) if single else val


def model_field_contracting(k: int, z):
    """Linear field -x_j d/dx_j + y_j d/dy_j over the last k index pairs;
    generated by the sum of the last k products x_j y_j."""
    z = as_phase(z)
    n = half_dim(z)
    if not 1 <= k <= n:
        raise DomainError(f"k = {k} outside 1..{n}")
    out = np.zeros_like(z)
    out[..., n - k:n] = -z[..., n - k:n]
    out[..., 2 * n - k:] = z[..., 2 * n - k:]
    return out


def model_field_expanding(k: int, z):
    """Linear field x_j d/dx_j - y_j d/dy_j over the first 2n-k index pairs."""
    z = as_phase(z)
    n = half_dim(z)
    if not n <= k <= 2 * n - 1:
        raise DomainError(f"k = {k} outside {n}..{2 * n - 1}")
    j = 2 * n - k
    out = np.zeros_like(z)
    out[..., :j] = z[..., :j]
    out[..., n:n + j] = -z[..., n:n + j]
    return out
