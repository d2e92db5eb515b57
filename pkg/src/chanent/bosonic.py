"""Entropies of single-mode bosonic Gaussian channels.

Thermal (transmissivity ``eta``, noise ``N_B``), amplifier (gain ``G``, noise
``N_B``) and additive-noise (variance ``xi``) channels, with or without a
mean photon-number constraint ``N_S`` on the input. All formulas are scalar.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import DomainError, ValidationError

LN2 = math.log(2.0)
FAMILIES = ("thermal", "amplifier", "additive_noise")


def g2(x: float) -> float:
    """Entropy of a thermal state with mean photon number ``x``, in bits.

    Written as ``log2(x + 1) + x log2(1 + 1/x)``, which avoids the cancellation
    of the textbook form for large ``x``; below 1 the second term is expanded
    so that subnormal ``x`` stays finite. Round-off negatives down to
    ``-1e-12`` are treated as zero.

    Raises:
        DomainError: If ``x`` is negative.
    """
    x = float(x)
    if x < 0:
        if x < -1e-12:
            raise DomainError(f"g2 needs x >= 0, got {x}")
        x = 0.0
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return math.inf
    # x log(1 + 1/x) = x (log1p(x) - log x) avoids 1/x overflowing for tiny x
    tail = x * math.log1p(1.0 / x) if x >= 1.0 else x * (math.log1p(x) - math.log(x))
    return (math.log1p(x) + tail) / LN2


@dataclass(frozen=True)
class BosonicChannelParams:
    """Parameters of one of the three channel families.

    Attributes:
        family: ``thermal``, ``amplifier`` or ``additive_noise``.
        eta: Transmissivity in ``(0, 1)`` (thermal).
        gain: Gain ``G > 1`` (amplifier).
        xi: Noise variance ``xi >= 0`` (additive noise).
        n_b: Environment mean photon number ``N_B >= 0``.
        n_s: Optional input mean photon-number constraint ``N_S >= 0``.
    """

    family: str
    eta: Optional[float] = None
    gain: Optional[float] = None
    xi: Optional[float] = None
    n_b: float = 0.0
    n_s: Optional[float] = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValidationError(f"unknown bosonic family {self.family!r}; expected one of {FAMILIES}")
        if self.family == "thermal" and not (self.eta is not None and 0.0 < self.eta < 1.0):
            raise ValidationError(f"thermal channel needs 0 < eta < 1, got {self.eta}")
        if self.family == "amplifier" and not (self.gain is not None and self.gain > 1.0):
            raise ValidationError(f"amplifier channel needs G > 1, got {self.gain}")
        if self.family == "additive_noise" and not (self.xi is not None and self.xi >= 0.0):
            raise ValidationError(f"additive-noise channel needs xi >= 0, got {self.xi}")
        if not self.n_b >= 0.0:
            raise ValidationError(f"N_B must be non-negative, got {self.n_b}")
        if self.n_s is not None and not self.n_s >= 0.0:
            raise ValidationError(f"N_S must be non-negative, got {self.n_s}")


def _pair(d: float, c: float, d2_minus_c2: float) -> tuple[float, float]:
    """Return ``(d + c, d - c)`` using ``d^2 - c^2`` for whichever side cancels."""
    if c >= 0:
        plus = d + c
        return plus, d2_minus_c2 / plus
    minus = d - c
    return d2_minus_c2 / minus, minus


def _terms(p: BosonicChannelParams, n_s: float) -> tuple[float, float]:
    """The two output-side arguments ``(D + c - 1)/2`` and ``(D - c - 1)/2`` of ``g2``."""
    u, v = n_s, p.n_b
    if p.family == "thermal":
        eta = p.eta
        d = math.sqrt(((eta + 1) * u + (1 - eta) * v + 1) ** 2 - 4 * eta * u * (u + 1))
        c = (1 - eta) * (u - v)
        prod = 2 * (1 - eta) * (u + 2 * u * v + v) + 1
    elif p.family == "amplifier":
        g = p.gain
        d = math.sqrt(((g + 1) * u + (g - 1) * (v + 1) + 1) ** 2 - 4 * g * u * (u + 1))
        c = (g - 1) * (u + v + 1)
        prod = 2 * (g - 1) * (2 * u * v + u + v + 1) + 1
    else:
        xi = p.xi
        d = math.sqrt((xi + 1) ** 2 + 4 * xi * u)
        c = xi
        prod = 2 * xi + 1 + 4 * xi * u
    plus, minus = _pair(d, c, prod)
    return (plus - 1) / 2, (minus - 1) / 2


def constrained_entropy(p: BosonicChannelParams, n_s: float | None = None) -> float:
    """Entropy of the channel under the input constraint ``<n> <= N_S``.

    Args:
        p: Channel parameters.
        n_s: Overrides ``p.n_s`` when given.

    Raises:
        ValidationError: If no ``N_S`` is available or it is negative.
    """
    n_s = p.n_s if n_s is None else float(n_s)
    if n_s is None:
        raise ValidationError("constrained entropy needs N_S")
    if n_s < 0:
        raise ValidationError(f"N_S must be non-negative, got {n_s}")
    a, b = _terms(p, n_s)
    return g2(a) + g2(b) - g2(n_s)


def unconstrained_entropy(p: BosonicChannelParams) -> float:
    """Limit of :func:`constrained_entropy` as ``N_S -> inf``.

    Returns ``-inf`` for the noiseless additive channel (``xi = 0``).
    """
    if p.family == "thermal":
        return math.log2(1 - p.eta) + g2(p.n_b)
    if p.family == "amplifier":
        return math.log2(p.gain - 1) + g2(p.n_b)
    if p.xi == 0.0:
        return -math.inf
    return math.log2(p.xi) + 1.0 / LN2
