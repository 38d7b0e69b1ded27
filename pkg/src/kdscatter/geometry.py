"""Extreme Kerr-de Sitter geometry: parameters, horizon roots, tortoise coordinate.

The extreme family is parametrised by the spin ``a`` and ``l = sqrt(Lambda/3)``.
The mass is *derived*: a double inner root of the horizon polynomial exists
exactly when ``|a| l < 2 - sqrt(3)`` and ``M`` takes the closed-form value
computed in :func:`build_extreme_params`.  All lengths are carried raw, in
units where ``M`` is O(1); nothing is rescaled behind the caller's back.

The tortoise coordinate ``r*`` (``dr*/dr = Xi (r^2+a^2) / Delta_r``) maps the
block between the double horizon ``r_e`` and the cosmological horizon ``r_+``
to the whole real line.  It is evaluated in closed form from the partial
fraction decomposition of the integrand, with a normalisation constant fixed
so that ``r_+ - r ~ exp(-2 kappa r*)`` holds with unit prefactor.

Near the two ends a plain float radius loses all precision (the gap to the
horizon underflows), so the map also speaks in *gap coordinates*: the distance
to the nearest horizon, optionally in log space on the cosmological side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import (
    ConvergenceFailure,
    ExtremalityViolated,
    NonPositiveCosmologicalConstant,
    OutOfDomain,
)

EXTREMALITY_BOUND = 2.0 - math.sqrt(3.0)


@dataclass(frozen=True)
class ExtremeKdSParams:
    """Black-hole parameters with derived roots and constants.

    Attributes
    ----------
    a, l : float
        Angular momentum per unit mass and sqrt(Lambda/3).
    mass : float
        Derived mass, positive square root of the extremality closed form.
    xi : float
        1 + a^2 l^2.
    gamma_disc : float
        (1 - a^2 l^2)^2 - 12 a^2 l^2, nonnegative inside the admissible range.
    r_double : float
        Double root r_e of Delta_r (the merged inner horizons).
    r_minus, r_plus : float
        Negative simple root and cosmological root.
    """

    a: float
    l: float
    mass: float
    xi: float
    gamma_disc: float
    r_double: float
    r_minus: float
    r_plus: float

    def delta_r(self, r):
        return r * r - 2.0 * self.mass * r + self.a**2 - self.l**2 * r * r * (r * r + self.a**2)

    def delta_r_prime(self, r):
        return 2.0 * r - 2.0 * self.mass - 4.0 * self.l**2 * r**3 - 2.0 * self.l**2 * self.a**2 * r

    def delta_theta(self, theta):
        import numpy as np

        return 1.0 + (self.a * self.l) ** 2 * np.cos(theta) ** 2


@dataclass(frozen=True)
class DeltaValues:
    delta_r: float
    delta_r_prime: float


def build_extreme_params(a: float, l: float) -> ExtremeKdSParams:
    """Construct the extreme-family parameters for a given (a, l).

    Raises
    ------
    NonPositiveCosmologicalConstant
        If l <= 0.
    ExtremalityViolated
        If a == 0 or |a| l >= 2 - sqrt(3): no double inner root exists.
    """
    if l <= 0.0:
        raise NonPositiveCosmologicalConstant(f"need l > 0, got {l}")
    if a == 0.0:
        raise ExtremalityViolated("a = 0 admits no double inner horizon")
    x = (a * l) ** 2
    if abs(a) * l >= EXTREMALITY_BOUND:
        raise ExtremalityViolated(
            f"|a| l = {abs(a) * l:.6g} >= 2 - sqrt(3) = {EXTREMALITY_BOUND:.6g}"
        )
    gamma_disc = (1.0 - x) ** 2 - 12.0 * x
    # stable form of M^2 = [(1-x)(x^2+34x+1) - gamma^{3/2}] / (54 l^2):
    # the numerator times its conjugate is exactly 108 x (1+x)^4
    big_a = (1.0 - x) * (x * x + 34.0 * x + 1.0)
    m2 = 2.0 * x * (1.0 + x) ** 4 / (l * l * (big_a + gamma_disc**1.5))
    mass = math.sqrt(m2)
    # stable form of r_e: 1 - x - sqrt(gamma) = 12 x / (1 - x + sqrt(gamma))
    sg = math.sqrt(gamma_disc)
    r_double = (2.0 * x / (3.0 * mass * l * l)) * (1.0 + (1.0 - x) / (1.0 - x + sg))
    # remaining roots from X^2 + 2 r_e X - a^2/(l^2 r_e^2)
    s = math.sqrt(r_double**2 + a * a / (l * l * r_double * r_double))
    r_plus = -r_double + s
    r_minus = -r_double - s
    return ExtremeKdSParams(
        a=float(a),
        l=float(l),
        mass=mass,
        xi=1.0 + x,
        gamma_disc=gamma_disc,
        r_double=r_double,
        r_minus=r_minus,
        r_plus=r_plus,
    )


def delta_eval(params: ExtremeKdSParams, r: float) -> DeltaValues:
    """Horizon polynomial and its exact r-derivative at ``r``."""
    return DeltaValues(params.delta_r(r), params.delta_r_prime(r))


@dataclass(frozen=True)
class TortoiseCoefficients:
    """Partial-fraction data of Xi (r^2+a^2)/Delta_r and derived constants.

    alpha/beta/gamma_pf/delta are the residues of
    (r^2+a^2) / ((r-r_-)(r-r_e)^2 (r-r_+)); the integrand carries an extra
    factor Xi * (-1/l^2) because Delta_r = -l^2 (r-r_-)(r-r_e)^2 (r-r_+).
    kappa is the exponential approach rate at the simple (cosmological)
    horizon; r0_norm makes that approach hold with unit constant.
    """

    alpha: float
    beta: float
    gamma_pf: float
    delta: float
    eta_minus: float
    eta_plus: float
    kappa: float
    r0_norm: float
    # closed-form building blocks of r*(r), premultiplied by Xi * (-1/l^2)
    a_minus: float = field(repr=False, default=0.0)   # coefficient of ln(r - r_-)
    a_plus: float = field(repr=False, default=0.0)    # coefficient of -ln(r_+ - r)
    a_double: float = field(repr=False, default=0.0)  # coefficient of ln(r - r_e)
    c_double: float = field(repr=False, default=0.0)  # coefficient of 1/(r - r_e)


def tortoise_coefficients(params: ExtremeKdSParams) -> TortoiseCoefficients:
    """Closed-form partial-fraction coefficients and the normalisation R0."""
    a, l, m = params.a, params.l, params.mass
    re, rm, rp, xi = params.r_double, params.r_minus, params.r_plus, params.xi
    sq = math.sqrt(re / m)
    alpha = -(l / 2.0) * sq * (rm * rm + a * a) / (re - rm) ** 2
    beta = (l / 2.0) * sq * (rp * rp + a * a) / (rp - re) ** 2
    delta = l * l * re * re * (re * re + a * a) / (3.0 * m * re - 4.0 * a * a)
    gamma_pf = -2.0 * l * l * re**3 * (2.0 * re * re - 7.0 * m * re + 6.0 * a * a) / (
        3.0 * m * re - 4.0 * a * a
    ) ** 2
    eta_minus = (rm * rm + a * a) / (re - rm) ** 2
    eta_plus = (rp * rp + a * a) / (re - rp) ** 2
    kappa = l / (xi * eta_plus) * math.sqrt(m / re)

    pref = -xi / (l * l)
    a_minus = pref * alpha
    a_plus = -pref * beta
    a_double = pref * gamma_pf
    c_double = -pref * delta
    # r* = a_minus ln(r-r_-) - a_plus ln(r_+-r) + a_double ln(r-r_e)
    #      + c_double/(r-r_e) + r0_norm ;  a_plus = 1/(2 kappa).
    # unit constant at the simple horizon: the non-log terms vanish at r_+
    r0_norm = -(
        a_minus * math.log(rp - rm)
        + a_double * math.log(rp - re)
        + c_double / (rp - re)
    )
    return TortoiseCoefficients(
        alpha=alpha,
        beta=beta,
        gamma_pf=gamma_pf,
        delta=delta,
        eta_minus=eta_minus,
        eta_plus=eta_plus,
        kappa=kappa,
        r0_norm=r0_norm,
        a_minus=a_minus,
        a_plus=a_plus,
        a_double=a_double,
        c_double=c_double,
    )


@dataclass(frozen=True)
class GapCoordinate:
    """A radius expressed as distance to the nearest horizon.

    side is "double" (gap = r - r_e) or "cosmo" (gap = r_+ - r).  log_gap
    stays meaningful when the gap itself underflows.
    """

    side: str
    gap: float
    log_gap: float


@dataclass(frozen=True)
class TortoiseMap:
    """Bidirectional r <-> r* map for one extreme geometry."""

    params: ExtremeKdSParams
    coeffs: TortoiseCoefficients
    tol: float = 1e-13
    max_iter: int = 200

    # -- forward ---------------------------------------------------------

    def forward(self, r: float) -> float:
        """Closed-form r*(r) on the open block (r_e, r_+)."""
        p, c = self.params, self.coeffs
        if not (p.r_double < r < p.r_plus):
            raise OutOfDomain(f"r = {r} outside ({p.r_double}, {p.r_plus})")
        return (
            c.a_minus * math.log(r - p.r_minus)
            - c.a_plus * math.log(p.r_plus - r)
            + c.a_double * math.log(r - p.r_double)
            + c.c_double / (r - p.r_double)
            + c.r0_norm
        )

    def forward_gap(self, gc: GapCoordinate) -> float:
        """r*(r) evaluated from a gap coordinate; exact near the horizons."""
        p, c = self.params, self.coeffs
        if gc.side == "double":
            d = gc.gap if gc.gap > 0.0 else math.exp(gc.log_gap)
            if d <= 0.0 or d >= p.r_plus - p.r_double:
                raise OutOfDomain(f"double-side gap {d} out of range")
            return (
                c.a_minus * math.log(d + (p.r_double - p.r_minus))
                - c.a_plus * math.log((p.r_plus - p.r_double) - d)
                + c.a_double * math.log(d)
                + c.c_double / d
                + c.r0_norm
            )
        if gc.side == "cosmo":
            # analytic in the gap g; the log term is exact in log space
            g = gc.gap  # may underflow to 0; the smooth part tends to 0
            if g < 0.0 or g >= p.r_plus - p.r_double:
                raise OutOfDomain(f"cosmo-side gap {g} out of range")
            smooth = (
                self._smooth_cosmo(g) if g > 0.0 else 0.0
            )
            return -c.a_plus * gc.log_gap + smooth
        raise OutOfDomain(f"unknown side {gc.side!r}")

    def _smooth_cosmo(self, g: float) -> float:
        # r*(r_+ - g) + a_plus * ln g : analytic at g = 0 and 0 there
        p, c = self.params, self.coeffs
        return (
            c.a_minus * math.log(p.r_plus - g - p.r_minus)
            + c.a_double * math.log(p.r_plus - g - p.r_double)
            + c.c_double / (p.r_plus - g - p.r_double)
            + c.r0_norm
        )

    def drstar_dr(self, r: float) -> float:
        """Exact derivative Xi (r^2 + a^2) / Delta_r."""
        p = self.params
        return p.xi * (r * r + p.a**2) / p.delta_r(r)

    # -- inverse ---------------------------------------------------------

    def inverse(self, rstar: float) -> float:
        """Radius for a given r*; collapses to the horizon when the gap underflows."""
        gc = self.inverse_gap(rstar)
        p = self.params
        if gc.side == "double":
            return p.r_double + gc.gap
        return p.r_plus - gc.gap

    def inverse_gap(self, rstar: float) -> GapCoordinate:
        """Invert r* to a gap coordinate via bracketed, safeguarded Newton.

        Asymptotic initial guesses take over once |r*| exceeds
        50 * max(1/kappa, M); plain bisection stalls in the flat log/pole
        regions out there.
        """
        if not math.isfinite(rstar):
            raise OutOfDomain("r* must be finite")
        p, c = self.params, self.coeffs
        width = p.r_plus - p.r_double
        # Hand off to the asymptotic charts once the float radius would lose
        # the gap: on the cosmological side that happens around 8/kappa
        # (gap ~ e^{-2 kappa r*} meets the 1e-16 r_+ rounding floor well
        # before the 50/kappa mark one would naively pick).
        big = 8.0 / c.kappa
        if rstar > big:
            return self._inverse_cosmo_tail(rstar)
        if rstar < -big:
            return self._inverse_double_tail(rstar)
        # bisection bracket on (r_e, r_+), refined by Newton on r
        lo = p.r_double + 1e-14 * width
        hi = p.r_plus - 1e-14 * width
        flo = self.forward(lo) - rstar
        fhi = self.forward(hi) - rstar
        if flo > 0.0:
            return self._inverse_double_tail(rstar)
        if fhi < 0.0:
            return self._inverse_cosmo_tail(rstar)
        r = 0.5 * (lo + hi)
        for _ in range(self.max_iter):
            f = self.forward(r) - rstar
            if f > 0.0:
                hi = r
            else:
                lo = r
            step = f / self.drstar_dr(r)
            rn = r - step
            if not (lo < rn < hi):
                rn = 0.5 * (lo + hi)
            if abs(rn - r) <= self.tol * (abs(r) + p.mass):
                r = rn
                break
            r = rn
        else:
            raise ConvergenceFailure(f"tortoise inversion stalled at r* = {rstar}")
        side = "double" if (r - p.r_double) < (p.r_plus - r) else "cosmo"
        gap = r - p.r_double if side == "double" else p.r_plus - r
        return GapCoordinate(side=side, gap=gap, log_gap=math.log(gap))

    def _inverse_double_tail(self, rstar: float) -> GapCoordinate:
        # Newton in the gap d = r - r_e, seeded by d ~ c_double / r*
        p, c = self.params, self.coeffs
        width = p.r_plus - p.r_double
        d = c.c_double / rstar
        if not (0.0 < d < width):
            d = 0.5 * width
        lo, hi = 0.0, width
        for _ in range(self.max_iter):
            f = self.forward_gap(GapCoordinate("double", d, math.log(d))) - rstar
            if f > 0.0:
                hi = d
            else:
                lo = d
            r = p.r_double + d
            dn = d - f / self.drstar_dr(r)
            if not (lo < dn < hi):
                dn = 0.5 * (lo + hi)
            if abs(dn - d) <= self.tol * d:
                d = dn
                break
            d = dn
        else:
            raise ConvergenceFailure(f"double-horizon inversion stalled at r* = {rstar}")
        return GapCoordinate("double", d, math.log(d))

    def _inverse_cosmo_tail(self, rstar: float) -> GapCoordinate:
        # Newton on w = ln g;  r* = -a_plus * w + smooth(e^w)
        p, c = self.params, self.coeffs
        w = -rstar / c.a_plus  # unit-constant asymptotics
        for _ in range(self.max_iter):
            g = math.exp(w)
            f = (-c.a_plus * w + (self._smooth_cosmo(g) if g > 0.0 else 0.0)) - rstar
            # d f / d w = -g * dr*/dr(r_+ - g), which tends to -a_plus as g -> 0;
            # below ~1e-13 of the block width, r_+ - g rounds onto the horizon
            if g > 1e-13 * (p.r_plus - p.r_double):
                dfdw = -g * self.drstar_dr(p.r_plus - g)
            else:
                dfdw = -c.a_plus
            wn = w - f / dfdw
            if abs(wn - w) <= 1e-15 * (1.0 + abs(w)):
                w = wn
                break
            w = wn
        else:
            raise ConvergenceFailure(f"cosmological inversion stalled at r* = {rstar}")
        g = math.exp(w)
        return GapCoordinate("cosmo", g, w)


def build_tortoise_map(params: ExtremeKdSParams, tol: float = 1e-13, max_iter: int = 200) -> TortoiseMap:
    return TortoiseMap(params=params, coeffs=tortoise_coefficients(params), tol=tol, max_iter=max_iter)
