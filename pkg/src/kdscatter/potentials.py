"""Radial symbols, the conformal factor, and the matrix potentials.

Everything here is a pure evaluator over an immutable geometry.  The matrix
potentials enter a self-adjoint Hamiltonian, so each assembled 4x4 value is
Hermitian by construction; tests enforce this at sampled points.

Conventions:

* ``g(r*) = sqrt(Delta_r) / (Xi (r^2+a^2))`` and
  ``f(r*) = a p / (r^2+a^2) - a p / (r_e^2+a^2)`` (rotated frame, so f
  vanishes at the double horizon and tends to ``c_plus * p`` at the
  cosmological one).
* ``rho_e^2 = r_e^2 + a^2 cos^2(theta)`` (the square of rho evaluated on the
  double horizon).
* theta grids are staggered, never touching the poles; evaluators raise
  :class:`PoleProximity` when ``sin(theta) < 1e-12``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateFit, InsufficientSamples, NotBlockDiagonal, PoleProximity
from .geometry import ExtremeKdSParams, TortoiseMap

# fixed matrices -----------------------------------------------------------

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

_I2 = np.eye(2, dtype=complex)
GAMMA0 = 1.0j * np.block([[np.zeros((2, 2)), _I2], [-_I2, np.zeros((2, 2))]])
GAMMA1 = np.diag([-1.0, 1.0, 1.0, -1.0]).astype(complex)
GAMMA2 = np.block([[-PAULI_X, np.zeros((2, 2))], [np.zeros((2, 2)), PAULI_X]])
GAMMA3 = np.block([[PAULI_Y, np.zeros((2, 2))], [np.zeros((2, 2)), -PAULI_Y]])
GAMMA_TILDE = np.block([[PAULI_X, np.zeros((2, 2))], [np.zeros((2, 2)), PAULI_X]])


def boxtimes(c, mat):
    """Multiply the upper 2x2 block of a block-diagonal matrix by c and the
    lower one by conj(c)."""
    mat = np.asarray(mat, dtype=complex)
    if mat.shape[-2:] != (4, 4):
        raise NotBlockDiagonal("expected a 4x4 matrix")
    if np.max(np.abs(mat[..., :2, 2:])) > 1e-14 or np.max(np.abs(mat[..., 2:, :2])) > 1e-14:
        raise NotBlockDiagonal("off-diagonal 2x2 blocks must vanish")
    out = np.array(mat, dtype=complex, copy=True)
    out[..., :2, :2] = c * mat[..., :2, :2]
    out[..., 2:, 2:] = np.conj(c) * mat[..., 2:, 2:]
    return out


def is_half_integer(x, tol=1e-12) -> bool:
    return abs(x - (math.floor(x) + 0.5)) <= tol


# radial symbols ------------------------------------------------------------


@dataclass(frozen=True)
class RadialSymbolSet:
    """The two radial symbols of the comparison operator, at fixed azimuthal
    number p and mass m."""

    tmap: TortoiseMap
    p: float
    mass_field: float = 0.0

    def __post_init__(self):
        if not is_half_integer(self.p):
            raise ValueError(f"p must be half-integer, got {self.p}")

    @property
    def params(self) -> ExtremeKdSParams:
        return self.tmap.params

    @property
    def c0(self) -> float:
        p = self.params
        return p.a / (p.r_double**2 + p.a**2)

    @property
    def c_plus(self) -> float:
        p = self.params
        return p.a / (p.r_plus**2 + p.a**2) - p.a / (p.r_double**2 + p.a**2)

    # -- pointwise in r ---------------------------------------------------

    def g_of_r(self, r):
        p = self.params
        return np.sqrt(p.delta_r(r)) / (p.xi * (r * r + p.a**2))

    def f_of_r(self, r):
        p = self.params
        return self.p * (p.a / (r * r + p.a**2) - p.a / (p.r_double**2 + p.a**2))

    # -- pointwise in r* --------------------------------------------------

    def g(self, rstar: float) -> float:
        """sqrt(Delta_r)/(Xi (r^2+a^2)), robust at both ends via gap charts."""
        p = self.params
        gc = self.tmap.inverse_gap(rstar)
        l2 = p.l**2
        if gc.side == "cosmo":
            # Delta_r = l^2 (r-r_-)(r-r_e)^2 (r_+-r) with r = r_+ - gap
            if gc.log_gap < -600.0:
                return 0.0
            g_ = gc.gap if gc.gap > 0.0 else math.exp(gc.log_gap)
            r = p.r_plus - g_
            dr = l2 * (r - p.r_minus) * (r - p.r_double) ** 2 * g_
        else:
            d = gc.gap
            r = p.r_double + d
            dr = l2 * (r - p.r_minus) * d * d * (p.r_plus - r)
        return math.sqrt(dr) / (p.xi * (r * r + p.a**2))

    def f(self, rstar: float) -> float:
        p = self.params
        gc = self.tmap.inverse_gap(rstar)
        if gc.side == "cosmo":
            r = p.r_plus - gc.gap
            return self.f_of_r(r)
        # near the double horizon subtract in a cancellation-free form:
        # a/(r^2+a^2) - a/(r_e^2+a^2) = -a d (r + r_e) / ((r^2+a^2)(r_e^2+a^2))
        d = gc.gap
        r = p.r_double + d
        num = -p.a * d * (r + p.r_double)
        return self.p * num / ((r * r + p.a**2) * (p.r_double**2 + p.a**2))

    def g_array(self, rstar):
        return np.array([self.g(x) for x in np.atleast_1d(rstar)])

    def f_array(self, rstar):
        return np.array([self.f(x) for x in np.atleast_1d(rstar)])


def radial_symbols(symbols: RadialSymbolSet, rstar: float):
    """The (g, f) pair at one r*."""
    return symbols.g(rstar), symbols.f(rstar)


# matrix potentials ---------------------------------------------------------


@dataclass(frozen=True)
class MatrixPotentialSet:
    """Evaluators for the matrix potentials of the full per-mode operator.

    All methods broadcast over numpy arrays of r and theta and return
    arrays with trailing shape (4, 4).
    """

    params: ExtremeKdSParams
    p: float
    mass_field: float = 0.0
    pole_tol: float = 1e-12

    # -- scalar building blocks -------------------------------------------

    def _check_theta(self, theta):
        if np.min(np.sin(theta)) < self.pole_tol:
            raise PoleProximity("theta too close to a coordinate pole")

    def rho2(self, r, theta):
        return r * r + self.params.a**2 * np.cos(theta) ** 2

    def sigma2(self, r, theta):
        p = self.params
        return p.delta_theta(theta) * (r * r + p.a**2) ** 2 - p.delta_r(r) * p.a**2 * np.sin(theta) ** 2

    def q2(self, r, theta):
        p = self.params
        return (p.delta_theta(theta) * (r * r + p.a**2) - p.delta_r(r)) / self.rho2(r, theta)

    def h(self, r, theta):
        p = self.params
        return p.delta_theta(theta) ** 0.25 * np.sqrt(
            (r * r + p.a**2) / np.sqrt(self.sigma2(r, theta))
        )

    def h2_minus_1(self, r, theta):
        # h^2 - 1 = Delta_r a^2 sin^2 / (sigma (sigma + sqrt(Dth) (r^2+a^2)))
        p = self.params
        sig = np.sqrt(self.sigma2(r, theta))
        sdth = np.sqrt(p.delta_theta(theta))
        return p.delta_r(r) * p.a**2 * np.sin(theta) ** 2 / (sig * (sig + sdth * (r * r + p.a**2)))

    def dh_dtheta(self, r, theta):
        # h * [Dth'/(4 Dth) - sigma2_theta/(4 sigma2)]
        p = self.params
        dth = p.delta_theta(theta)
        dthp = -(p.a * p.l) ** 2 * np.sin(2.0 * theta)
        s2 = self.sigma2(r, theta)
        s2th = dthp * (r * r + p.a**2) ** 2 - p.delta_r(r) * p.a**2 * np.sin(2.0 * theta)
        return self.h(r, theta) * (dthp / (4.0 * dth) - s2th / (4.0 * s2))

    def dh_dr(self, r, theta):
        p = self.params
        s2 = self.sigma2(r, theta)
        s2r = 4.0 * r * p.delta_theta(theta) * (r * r + p.a**2) - p.delta_r_prime(r) * p.a**2 * np.sin(theta) ** 2
        return self.h(r, theta) * (r / (r * r + p.a**2) - s2r / (4.0 * s2))

    def dh_drstar(self, r, theta):
        p = self.params
        return p.delta_r(r) / (p.xi * (r * r + p.a**2)) * self.dh_dr(r, theta)

    # -- matrix potentials -------------------------------------------------

    def v_c(self, r, theta):
        """Coulomb-type terms at the double horizon."""
        self._check_theta(theta)
        p = self.params
        r, theta = np.broadcast_arrays(np.asarray(r, float), np.asarray(theta, float))
        dth = p.delta_theta(theta)
        dr = p.delta_r(r)
        sig = np.sqrt(self.sigma2(r, theta))
        rho = np.sqrt(self.rho2(r, theta))
        sroot = np.sqrt(dr * dth)
        c_g3 = sroot / (sig * np.sin(theta)) * (rho * rho / sig - np.sqrt(dth) / p.xi) * self.p
        c_g0 = sroot / (p.xi * sig) * rho * self.mass_field
        c_gt = p.a * np.sqrt(dr) * np.sin(theta) * r * dth / (2.0 * rho * rho * sig * p.xi)
        return (
            c_g3[..., None, None] * GAMMA3
            + c_g0[..., None, None] * GAMMA0
            - c_gt[..., None, None] * GAMMA_TILDE
        )

    def v_s(self, r, theta):
        """Short-range terms at the double horizon."""
        self._check_theta(theta)
        p = self.params
        r, theta = np.broadcast_arrays(np.asarray(r, float), np.asarray(theta, float))
        a = p.a
        dth = p.delta_theta(theta)
        dr = p.delta_r(r)
        drp = p.delta_r_prime(r)
        s2 = self.sigma2(r, theta)
        sig = np.sqrt(s2)
        rho2 = self.rho2(r, theta)
        r2a2 = r * r + a * a
        scal = (
            -a * self.p * np.sqrt(dth) / sig
            + a * dth * r2a2 * self.p / s2
            - a * dr * self.p / s2
            + a * self.p * self.h2_minus_1(r, theta) / (p.r_double**2 + a * a)
        )
        # +i[(i c5) boxtimes G2] = c5 * gamma_tilde
        c5 = a * dth * np.sqrt(dr) * (2.0 * r * dr - 0.5 * drp * r2a2) / (2.0 * s2 * sig * p.xi)
        # -i[(i c6) boxtimes G1] = c6 * diag(-1, 1, -1, 1)
        c6 = dr * np.sqrt(dth) * a * np.cos(theta) / (2.0 * rho2 * sig * p.xi) - a * dr * np.sqrt(
            dth
        ) * r2a2 * np.cos(theta) / (2.0 * s2 * sig)
        diag_b = np.diag([-1.0, 1.0, -1.0, 1.0]).astype(complex)
        eye = np.eye(4, dtype=complex)
        return (
            scal[..., None, None] * eye
            + c5[..., None, None] * GAMMA_TILDE
            + c6[..., None, None] * diag_b
        )

    def theta_big(self, r, theta):
        """The bounded matrix with V_C = g h^2 * theta_big."""
        self._check_theta(theta)
        p = self.params
        r, theta = np.broadcast_arrays(np.asarray(r, float), np.asarray(theta, float))
        dth = p.delta_theta(theta)
        sig = np.sqrt(self.sigma2(r, theta))
        rho = np.sqrt(self.rho2(r, theta))
        c_g3 = p.xi / np.sin(theta) * (rho * rho / sig - np.sqrt(dth) / p.xi) * self.p
        c_g0 = rho * self.mass_field
        c_gt = p.a * np.sin(theta) * r * np.sqrt(dth) / (2.0 * rho * rho)
        return (
            c_g3[..., None, None] * GAMMA3
            + c_g0[..., None, None] * GAMMA0
            - c_gt[..., None, None] * GAMMA_TILDE
        )

    def theta_matrix(self, theta, a5_convention: str = "from_theta"):
        """The double-horizon angular potential (theta_big on the horizon).

        a5_convention "from_theta" keeps the factor r_e in the gamma_tilde
        term; "from_a5_display" drops it for comparison runs.
        """
        self._check_theta(theta)
        p = self.params
        theta = np.asarray(theta, float)
        dth = p.delta_theta(theta)
        rho_e2 = p.r_double**2 + p.a**2 * np.cos(theta) ** 2
        c_g3 = (
            p.a**2
            * np.sin(theta)
            / np.sqrt(dth)
            * ((p.l**2 * p.r_double**2 - 1.0) / (p.r_double**2 + p.a**2))
            * self.p
        )
        c_g0 = np.sqrt(rho_e2) * self.mass_field
        fac = p.r_double if a5_convention == "from_theta" else 1.0
        c_gt = p.a * np.sin(theta) * fac * np.sqrt(dth) / (2.0 * rho_e2)
        return (
            c_g3[..., None, None] * GAMMA3
            + c_g0[..., None, None] * GAMMA0
            - c_gt[..., None, None] * GAMMA_TILDE
        )

    # -- first-order-frame potential --------------------------------------

    def log_alpha_derivatives(self, r, theta):
        """(d/dr, d/dtheta) of log alpha, the spinor-density weight."""
        p = self.params
        a = p.a
        dr = p.delta_r(r)
        drp = p.delta_r_prime(r)
        dth = p.delta_theta(theta)
        dthp = -(a * p.l) ** 2 * np.sin(2.0 * theta)
        rho2 = self.rho2(r, theta)
        s2 = self.sigma2(r, theta)
        s2r = 4.0 * r * dth * (r * r + a * a) - drp * a * a * np.sin(theta) ** 2
        s2th = dthp * (r * r + a * a) ** 2 - dr * a * a * np.sin(2.0 * theta)
        dlnadr = 0.25 * (4.0 * r / (r * r + a * a) - drp / dr - 2.0 * r / rho2 - s2r / s2)
        dlnadth = 0.25 * (dthp / dth + a * a * np.sin(2.0 * theta) / rho2 - s2th / s2)
        return dlnadr, dlnadth

    def f_g_tilde(self, r, theta):
        """The two scalar potentials of the first-order frame terms."""
        self._check_theta(theta)
        p = self.params
        a = p.a
        r, theta = np.broadcast_arrays(np.asarray(r, float), np.asarray(theta, float))
        dr = p.delta_r(r)
        drp = p.delta_r_prime(r)
        dth = p.delta_theta(theta)
        rho2 = self.rho2(r, theta)
        rho = np.sqrt(rho2)
        s2 = self.sigma2(r, theta)
        rtil = r + 1.0j * a * np.cos(theta)
        sqrt2_f = (0.5 * drp * rho2 + dr * rtil) / (2.0 * np.sqrt(dr) * rho2 * rho)
        sqrt2_g = (
            1.0j * a * dth * np.sin(theta) ** 2 * rtil
            + np.cos(theta) * rho2 * (1.0 + (a * p.l) ** 2 * np.cos(2.0 * theta))
        ) / (2.0 * np.sqrt(dth) * np.sin(theta) * rho2 * rho)
        f_r = (
            a
            * np.sin(theta)
            * np.sqrt(dth)
            / (2.0 * s2 * np.sqrt(dr))
            * (-0.5 * drp * (r * r + a * a) + 2.0 * r * dr)
        )
        f_th = -a * np.sqrt(dr) * (r * r + a * a) * np.cos(theta) * p.xi / (2.0 * s2 * np.sqrt(dth))
        dlnadr, dlnadth = self.log_alpha_derivatives(r, theta)
        f_tilde = sqrt2_f + 1.0j * np.sqrt(dth) / rho * f_th + np.sqrt(dr) / rho * dlnadr
        g_tilde = sqrt2_g - 1.0j * np.sqrt(dr) / rho * f_r + np.sqrt(dth) / rho * dlnadth
        return f_tilde, g_tilde

    def v1_tilde(self, r, theta):
        """F~ boxtimes Gamma1 + (G~ - cot(theta) sqrt(Dth)/(2 rho)) boxtimes Gamma2."""
        p = self.params
        r, theta = np.broadcast_arrays(np.asarray(r, float), np.asarray(theta, float))
        f_tilde, g_tilde = self.f_g_tilde(r, theta)
        rho = np.sqrt(self.rho2(r, theta))
        g_red = g_tilde - np.cos(theta) / np.sin(theta) * np.sqrt(p.delta_theta(theta)) / (2.0 * rho)
        out = np.zeros(np.shape(r) + (4, 4), dtype=complex)
        # c boxtimes Gamma1 = diag(-c, c, cbar, -cbar)
        out[..., 0, 0] = -f_tilde
        out[..., 1, 1] = f_tilde
        out[..., 2, 2] = np.conj(f_tilde)
        out[..., 3, 3] = -np.conj(f_tilde)
        # c boxtimes Gamma2: upper block c*(-sx), lower block cbar*sx
        out[..., 0, 1] += -g_red
        out[..., 1, 0] += -g_red
        out[..., 2, 3] += np.conj(g_red)
        out[..., 3, 2] += np.conj(g_red)
        return out


def matrix_potentials(pots: MatrixPotentialSet, r, theta):
    """(V_C, V_S, h) at one point, per the module contract."""
    return pots.v_c(r, theta), pots.v_s(r, theta), pots.h(r, theta)


# decay fits ----------------------------------------------------------------


def decay_fit(rstar, values, end: str, kappa: float | None = None):
    """Fit the decay exponent of |values| toward one of the horizons.

    At the plus end fits ln|v| = -m kappa r* + b and returns m (needs kappa);
    at the minus end fits ln|v| = -n ln|r*| + b and returns n.  The residual
    is the RMS of the fit.
    """
    rstar = np.asarray(rstar, float)
    vals = np.abs(np.asarray(values, float))
    if rstar.size < 20:
        raise InsufficientSamples(f"need >= 20 samples, got {rstar.size}")
    order = np.argsort(rstar)
    rstar, vals = rstar[order], vals[order]
    if np.any(vals <= 0.0) or np.any(~np.isfinite(np.log(vals))):
        raise DegenerateFit("values underflow; cannot fit a decay law")
    logv = np.log(vals)
    if end == "plus":
        if kappa is None:
            raise ValueError("plus-end fit needs kappa")
        if rstar[0] <= 0:
            raise InsufficientSamples("plus-end fit needs r* > 0 samples")
        coeff = np.polyfit(rstar, logv, 1)
        m = -coeff[0] / kappa
        resid = float(np.sqrt(np.mean((np.polyval(coeff, rstar) - logv) ** 2)))
        return m, resid
    if end == "minus":
        if rstar[-1] >= 0:
            raise InsufficientSamples("minus-end fit needs r* < 0 samples")
        x = np.log(np.abs(rstar))
        coeff = np.polyfit(x, logv, 1)
        n = -coeff[0]
        resid = float(np.sqrt(np.mean((np.polyval(coeff, x) - logv) ** 2)))
        return n, resid
    raise ValueError(f"unknown end {end!r}")
