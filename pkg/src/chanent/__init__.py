"""Entropies of quantum channels.

Finite-dimensional channels are :class:`KrausChannel` objects; every
optimized quantity returns a report with its certificate. The numeric
kernels use a compiled extension when available and numpy otherwise (see
:func:`chanent.linalg.use_backend`).
"""
from .bosonic import BosonicChannelParams, constrained_entropy, g2, unconstrained_entropy
from .channels import (
    ChoiOperator,
    KrausChannel,
    StinespringIsometry,
    Superchannel,
    apply_adjoint,
    apply_channel,
    choi_to_kraus,
    complementary,
    covariance_check,
    kraus_to_choi,
    make_superchannel,
    random_channel,
    standard_channel,
    stinespring,
    superchannel_apply,
    tensor_channels,
    validate_channel,
)
from .divergence import (
    ChannelDivergenceResult,
    adversarial_choi_divergence,
    adversarial_divergence,
    choi_divergence,
    choi_entropy_suite,
    generalized_channel_divergence,
)
from .entropy import (
    cb_one_to_alpha_norm,
    channel_entropy,
    channel_entropy_covariant,
    closed_form_entropy,
    entropy_from_cb_norm,
    extended_min_entropy,
    merging_capacity,
    min_entropy_channel,
    renyi_channel_entropy,
)
from .errors import ChanentError, DomainError, NumericalError, PreconditionError, ValidationError
from .linalg import backend_name, use_backend
from .optimize import NumericPolicy, OptimizationReport
from .spec_io import SpecError, channel_from_spec, dump_channel, load_channel

__version__ = "0.1.0"

__all__ = [
    "BosonicChannelParams",
    "ChanentError",
    "ChannelDivergenceResult",
    "ChoiOperator",
    "DomainError",
    "KrausChannel",
    "NumericPolicy",
    "NumericalError",
    "OptimizationReport",
    "PreconditionError",
    "SpecError",
    "StinespringIsometry",
    "Superchannel",
    "ValidationError",
    "adversarial_choi_divergence",
    "adversarial_divergence",
    "apply_adjoint",
    "apply_channel",
    "backend_name",
    "cb_one_to_alpha_norm",
    "channel_entropy",
    "channel_entropy_covariant",
    "channel_from_spec",
    "choi_divergence",
    "choi_entropy_suite",
    "choi_to_kraus",
    "closed_form_entropy",
    "complementary",
    "constrained_entropy",
    "covariance_check",
    "dump_channel",
    "entropy_from_cb_norm",
    "extended_min_entropy",
    "g2",
    "generalized_channel_divergence",
    "kraus_to_choi",
    "load_channel",
    "make_superchannel",
    "merging_capacity",
    "min_entropy_channel",
    "random_channel",
    "renyi_channel_entropy",
    "standard_channel",
    "stinespring",
    "superchannel_apply",
    "tensor_channels",
    "unconstrained_entropy",
    "use_backend",
    "validate_channel",
]
