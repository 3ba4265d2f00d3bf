"""Closed-form steady states and limiting forms.

All formulas assume resonance, so every time-dependent phase factor is 1.
Matrices are returned in the basis they are naturally written in (coupled basis
for the full solutions and weak-field expansions, product basis for the
strong-field and far-apart limits).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .algebra import BasisTag, DensityMatrix4
from .errors import ConfigurationError, MissingInitialPopulationError, UnsupportedDetuningError
from .master import ModelParams

F_MIN = -0.2237
F_MAX = 2.0 / 3.0
SQRT2 = math.sqrt(2.0)

# coupled-basis indices
S11, S10, S1M1, S00 = range(4)


def _check_f(f12: float) -> None:
    if not F_MIN - 5e-4 <= f12 <= F_MAX + 1e-12:
        warnings.warn(f"F12={f12!r} lies outside the range the coupling function can reach", stacklevel=3)


def _resonant(p: ModelParams) -> None:
    if p.delta_lbar != 0.0:
        raise UnsupportedDetuningError("closed forms are for the resonant case only")


def _horner(coeffs, z):
    acc = 0.0
    for c in coeffs:
        acc = acc * z + c
    return acc


@dataclass(frozen=True)
class G2ZeroCoefficients:
    kappa: float
    mu_plus: float
    mu_minus: float
    nu_plus: float
    nu_minus: float
    eta_plus: float
    eta_minus: float


def g2zero_coefficients(g1bar: float, f12: float) -> G2ZeroCoefficients:
    f = f12
    f2 = f * f
    z = g1bar * g1bar
    kappa = _horner(
        (
            2048.0 + 1152.0 * f2,
            2560.0 + 5184.0 * f2 - 1296.0 * f2 * f2,
            864.0 + 144.0 * f2 + 486.0 * f2 * f2,
            9.0 / 8.0 * (2 + 3 * f) ** 2 * (2 - 3 * f) ** 2 * (4 - f2),
        ),
        z,
    )
    return G2ZeroCoefficients(
        kappa=kappa,
        mu_plus=32.0 * (16 + 12 * f + 9 * f2),
        mu_minus=32.0 * (16 - 12 * f + 9 * f2),
        nu_plus=18.0 * (32 + 48 * f + 68 * f2 - 9 * f2 * f2),
        nu_minus=18.0 * (32 - 48 * f + 68 * f2 - 9 * f2 * f2),
        eta_plus=9.0 * (2 + 3 * f) ** 2 * (4 - f2),
        eta_minus=9.0 * (2 - 3 * f) ** 2 * (4 - f2),
    )


def g2zero_matrix(g1bar: float, f12: float) -> np.ndarray:
    """Coupled-basis steady state for an undriven second atom, as a bare array."""
    g, f = g1bar, f12
    f2, f3, f4 = f * f, f ** 3, f ** 4
    z = g * g
    c = g2zero_coefficients(g, f)
    k = c.kappa

    p11 = 18.0 / k * z * z * (16 * f2 * z + 9 * (4 - f2) * f2)
    p10 = z * _horner((c.mu_minus, c.nu_minus, c.eta_minus), z) / k
    p00 = z * _horner((c.mu_plus, c.nu_plus, c.eta_plus), z) / k
    p1m1 = 1.0 - p11 - p10 - p00

    r = np.zeros((4, 4), dtype=complex)
    r[S11, S11], r[S10, S10], r[S1M1, S1M1], r[S00, S00] = p11, p10, p1m1, p00

    pre3 = 9.0 * SQRT2 / k * g * z * f
    r[S00, S11] = 1j * pre3 * (3 * (2 + 3 * f) * (4 - f2) + 8 * (4 + 2 * f - 3 * f2) * z)
    r[S10, S11] = 1j * pre3 * (3 * (2 - 3 * f) * (4 - f2) + 8 * (4 - 2 * f - 3 * f2) * z)

    pre1 = -1j * SQRT2 / (4.0 * k) * g
    r[S1M1, S10] = pre1 * _horner(
        (
            32 * (32 - 12 * f - 18 * f2 + 27 * f3),
            36 * (32 - 24 * f - 4 * f2 + 54 * f3 - 9 * f4),
            9 * (2 - 3 * f) ** 2 * (2 + 3 * f) * (4 - f2),
        ),
        z,
    )
    # Mirror image (F -> -F) of the entry above; the F^4 term carries -9.
    r[S1M1, S00] = pre1 * _horner(
        (
            32 * (32 + 12 * f - 18 * f2 - 27 * f3),
            36 * (32 + 24 * f - 4 * f2 - 54 * f3 - 9 * f4),
            9 * (2 + 3 * f) ** 2 * (2 - 3 * f) * (4 - f2),
        ),
        z,
    )
    r[S1M1, S11] = 1.5 / k * f * z * _horner((-256.0, -576.0 * f2, 9 * (16 - 40 * f2 + 9 * f4)), z)
    r[S00, S10] = z / k * _horner((512.0, 36 * (16 + 16 * f2 - 9 * f4), 9 * (16 - 40 * f2 + 9 * f4)), z)

    for i, j in ((S00, S11), (S10, S11), (S1M1, S10), (S1M1, S00), (S1M1, S11), (S00, S10)):
        r[j, i] = np.conj(r[i, j])
    return r


def steady_g2zero(p: ModelParams) -> DensityMatrix4:
    if p.g2bar != 0.0:
        raise ConfigurationError(f"this closed form needs g2bar = 0, got {p.g2bar!r}")
    _resonant(p)
    return DensityMatrix4(g2zero_matrix(p.g1bar, p.f12), BasisTag.TRIPLET_SINGLET)


@dataclass(frozen=True)
class EqualGCoefficients:
    kappa2: float
    kappa3: float
    p00: float = 0.0


def equal_g_coefficients(g1bar: float, f12: float, p00: float = 0.0) -> EqualGCoefficients:
    z = g1bar * g1bar
    return EqualGCoefficients(
        kappa2=_horner((16.0, 4.0, 0.25 * (1 + 1.5 * f12) ** 2), z),
        kappa3=_horner((12.0, 4.0, 1.0), z),
        p00=p00,
    )


def _equal_g_numerators(g: float, f: float) -> np.ndarray:
    z = g * g
    s = 1.0 + 1.5 * f
    r = np.zeros((4, 4), dtype=complex)
    r[S11, S11] = 4 * z * z
    r[S11, S10] = 2j * SQRT2 * g * z
    r[S11, S1M1] = -s * z
    r[S10, S10] = 4 * z * z + 2 * z
    r[S10, S1M1] = 1j * SQRT2 / 2.0 * g * (s + 4 * z)
    r[S1M1, S1M1] = 4 * z * z + 2 * z + 0.25 * s * s
    r[S00, S00] = 4 * z * z
    for i, j in ((S11, S10), (S11, S1M1), (S10, S1M1)):
        r[j, i] = np.conj(r[i, j])
    return r


def equal_g_matrix(g1bar: float, f12: float) -> np.ndarray:
    c = equal_g_coefficients(g1bar, f12)
    return _equal_g_numerators(g1bar, f12) / c.kappa2


def coincident_equal_g_matrix(g1bar: float, p00: float) -> np.ndarray:
    """Zero-separation steady state: singlet is dark and keeps its initial weight."""
    c = equal_g_coefficients(g1bar, F_MAX, p00)
    rho1 = _equal_g_numerators(g1bar, F_MAX)
    rho1[S00, S00] = 0.0
    rho1 /= c.kappa3
    dark = np.zeros((4, 4), dtype=complex)
    dark[S00, S00] = 1.0
    return (1.0 - p00) * rho1 + p00 * dark


def steady_equal_g(p: ModelParams, p00: float | None = None) -> DensityMatrix4:
    if p.g1bar != p.g2bar:
        raise ConfigurationError(f"this closed form needs g1bar = g2bar, got {p.g1bar!r} and {p.g2bar!r}")
    _resonant(p)
    if p.x == 0.0:
        if p00 is None:
            raise MissingInitialPopulationError("coincident atoms need the initial singlet population p00")
        m = coincident_equal_g_matrix(p.g1bar, p00)
    else:
        m = equal_g_matrix(p.g1bar, p.f12)
    return DensityMatrix4(m, BasisTag.TRIPLET_SINGLET)


def limit_xstate_g2zero(f12: float) -> DensityMatrix4:
    """Strong-drive limit of the one-driven-atom steady state (product basis)."""
    _check_f(f12)
    y = 16.0 + 9.0 * f12 * f12
    low = 2.25 * f12 * f12 / y
    coh = -3.0 * f12 / y
    m = np.zeros((4, 4), dtype=complex)
    m[0, 0] = m[2, 2] = low
    m[1, 1] = m[3, 3] = 0.5 - low
    m[0, 3] = m[3, 0] = m[1, 2] = m[2, 1] = coh
    return DensityMatrix4(m)


def xstate_coupled_populations(f12: float) -> tuple[float, float, float, float]:
    y = 16.0 + 9.0 * f12 * f12
    low = 2.25 * f12 * f12 / y
    shift = 3.0 * f12 / y
    return low, 0.25 - shift, 0.5 - low, 0.25 + shift


def limit_far_apart_g2zero(g1bar: float) -> DensityMatrix4:
    if g1bar < 0:
        raise ValueError("g1bar must be non-negative")
    g = g1bar
    d = 1.0 + 8.0 * g * g
    m = np.zeros((4, 4), dtype=complex)
    m[1, 1] = 4.0 * g * g / d
    m[3, 3] = (1.0 + 4.0 * g * g) / d
    m[1, 3] = 2j * g / d
    m[3, 1] = -2j * g / d
    return DensityMatrix4(m)


def weak_field_g2zero_bound(f12: float) -> float:
    a = 1.5 * f12
    return 0.25 * (1 - a) ** 2 * (1 + a) ** 2 / (1 + a * a)


def weak_field_g2zero(g1bar: float, f12: float) -> tuple[DensityMatrix4, bool]:
    """Second-order expansion in the drive; not positive in general.

    ``valid`` reports whether g1bar^2 is within the bound that keeps the two
    excited populations below one.
    """
    _check_f(f12)
    g, a = g1bar, 1.5 * f12
    z = g * g
    r = np.zeros((4, 4), dtype=complex)
    r[S11, S1M1] = r[S1M1, S11] = 3 * f12 * z / (1 - a * a)
    r[S10, S10] = 2 * z / (1 + a) ** 2
    r[S10, S1M1] = 1j * SQRT2 * g / (1 + a)
    r[S1M1, S10] = -r[S10, S1M1]
    r[S10, S00] = r[S00, S10] = 2 * z / (1 - a * a)
    r[S1M1, S1M1] = 1 - 2 * z / (1 + a) ** 2 - 2 * z / (1 - a) ** 2
    r[S1M1, S00] = -1j * SQRT2 * g / (1 - a)
    r[S00, S1M1] = -r[S1M1, S00]
    r[S00, S00] = 2 * z / (1 - a) ** 2
    valid = z <= weak_field_g2zero_bound(f12)
    return DensityMatrix4(r, BasisTag.TRIPLET_SINGLET), bool(valid)


def weak_field_equal_g_bound(f12: float) -> float:
    return (2 + 3 * f12) ** 2 / 32.0


def weak_field_equal_g(g1bar: float, f12: float) -> tuple[DensityMatrix4, bool]:
    _check_f(f12)
    g = g1bar
    z = g * g
    d = 2 + 3 * f12
    r = np.zeros((4, 4), dtype=complex)
    r[S11, S1M1] = r[S1M1, S11] = -8 * z / d
    r[S10, S10] = 32 * z / d ** 2
    r[S10, S1M1] = 4j * SQRT2 * g / d
    r[S1M1, S10] = -r[S10, S1M1]
    r[S1M1, S1M1] = 1 - 32 * z / d ** 2
    valid = z <= weak_field_equal_g_bound(f12)
    return DensityMatrix4(r, BasisTag.TRIPLET_SINGLET), bool(valid)


def weak_concurrence_g2zero(g1bar: float, f12: float) -> float:
    rho, _ = weak_field_g2zero(g1bar, f12)
    return 1.5 * abs(f12) * (rho.population(S00) + rho.population(S10))


def weak_concurrence_equal_g(g1bar: float, f12: float) -> float:
    rho, _ = weak_field_equal_g(g1bar, f12)
    return max(0.0, -1.5 * f12 * rho.population(S10))


@dataclass(frozen=True)
class AsymptoticScalars:
    qmi: float
    geo_discord_2: float
    linear_entropy: float
    weak_concurrence_coeff: float


def _xlog2(v: float) -> float:
    return 0.0 if v <= 0.0 else v * math.log2(v)


def asymptotic_scalars_g2zero(f12: float) -> AsymptoticScalars:
    """Strong-drive mutual information, right geometric discord and linear entropy."""
    _check_f(f12)
    y = 16.0 + 9.0 * f12 * f12
    ry = math.sqrt(y)
    q = 4.5 * f12 * f12
    qmi = (
        (ry - 4.0) / (2 * ry) * _log2_or_zero(ry - 4.0)
        - _xlog2(q) / y
        + 0.5 * math.log2(y)
        - _xlog2(16.0 + q) / y
        + (4.0 + ry) / (2 * ry) * math.log2(4.0 + ry)
        - 1.0
    )
    return AsymptoticScalars(
        qmi=qmi,
        geo_discord_2=36.0 * f12 * f12 / (y * y),
        linear_entropy=0.75 - 4.0 / y,
        weak_concurrence_coeff=1.5 * abs(f12),
    )


def _log2_or_zero(v: float) -> float:
    # coefficient (sqrt(y) - 4) vanishes with its argument, so the product tends to 0
    return 0.0 if v <= 0.0 else math.log2(v)
