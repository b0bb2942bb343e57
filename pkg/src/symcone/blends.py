"""Polynomial blend profiles.

Every construction in the package that needs a smooth transition between
two exact closed-form branches goes through one of these profiles, so the
regularity of the whole artifact is decided in one place.  All profiles
are C^4: high enough that fourth-order integrators and five-point
finite-difference stencils see smooth data.
"""
import numpy as np


def smoothstep(u):
    """C^4 monotone step: 0 for u <= 0, 1 for u >= 1 (degree-9 polynomial)."""
    u = np.clip(u, 0.0, 1.0)
    u4 = u * u * u * u
    return u4 * u * (126.0 + u * (-420.0 + u * (540.0 + u * (-315.0 + u * 70.0))))


def smoothstep_deriv(u):
    u = np.asarray(u, dtype=float)
    inside = (u > 0.0) & (u < 1.0)
    uc = np.clip(u, 0.0, 1.0)
    u3 = uc * uc * uc
    d = u3 * uc * (630.0 + uc * (-2520.0 + uc * (3780.0 + uc * (-2520.0 + uc * 630.0))))
    return np.where(inside, d, 0.0)


# C^3 step and its antiderivative; the antiderivative is the C^4 profile
# used by smoothed_relu.
def _step7(u):
    return u ** 4 * (35.0 + u * (-84.0 + u * (70.0 - 20.0 * u)))


def _step7_integral(u):
    return u ** 5 * (7.0 + u * (-14.0 + u * (10.0 - 2.5 * u)))


def smoothed_relu(d, half_width):
    """C^4 overestimate of max(d, 0), exact outside [-half_width, half_width].

    Satisfies max(d, 0) <= value <= max(d, 0) + 0.137 * half_width, with the
    two branches returned verbatim outside the band (bitwise, not just to
    rounding).
    """
    d = np.asarray(d, dtype=float)
    u = np.clip((d + half_width) / (2.0 * half_width), 0.0, 1.0)
    mid = 2.0 * half_width * _step7_integral(u)
    return np.where(d >= half_width, d, np.where(d <= -half_width, 0.0, mid))


def smoothed_relu_deriv(d, half_width):
    d = np.asarray(d, dtype=float)
    u = np.clip((d + half_width) / (2.0 * half_width), 0.0, 1.0)
    return np.where(d >= half_width, 1.0, np.where(d <= -half_width, 0.0, _step7(u)))


def cutoff(r, r_lo, r_hi):
    """C^4 radial switch: exactly 0 for r <= r_lo, exactly 1 for r >= r_hi."""
    if not r_lo < r_hi:
        raise ValueError("cutoff needs r_lo < r_hi")
    return smoothstep((np.asarray(r, dtype=float) - r_lo) / (r_hi - r_lo))


def cutoff_deriv(r, r_lo, r_hi):
    return smoothstep_deriv((np.asarray(r, dtype=float) - r_lo) / (r_hi - r_lo)) / (r_hi - r_lo)


def plateau_bump(t, t_flat, t_zero):
    """C^4 decreasing profile: 1 on [0, t_flat], 0 on [t_zero, inf)."""
    if not 0.0 <= t_flat < t_zero:
        raise ValueError("plateau_bump needs 0 <= t_flat < t_zero")
    return 1.0 - smoothstep((np.asarray(t, dtype=float) - t_flat) / (t_zero - t_flat))


def plateau_bump_deriv(t, t_flat, t_zero):
    return -smoothstep_deriv((np.asarray(t, dtype=float) - t_flat) / (t_zero - t_flat)) / (
        t_zero - t_flat
    )
