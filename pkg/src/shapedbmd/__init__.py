"""Achievable rates for bit-metric decoding with shaped, dependent bit-levels."""

from .channel import (
    AwgnChannel,
    DiscreteChannel,
    QuadratureRule,
    bit_conditional_density,
    conditional_density,
    erase_all_channel_2bit,
    identity_channel_2bit,
    make_quadrature,
)
from .constellation import Constellation, ask_brgc, average_power, delta_for_power
from .distmodel import (
    BitMarginal,
    JointDistribution,
    entropy,
    marginal,
    maxwell_boltzmann,
    product_of_marginals,
)
from .rates import (
    RateReport,
    bit_conditional_entropy,
    mutual_information,
    q_bmd,
    rate_bmd,
    rate_bmd_independent,
    rate_generic,
    rate_lm_instance,
    rate_report,
    rate_sgmi,
)

__version__ = "0.1.0"

__all__ = [
    "AwgnChannel",
    "BitMarginal",
    "Constellation",
    "DiscreteChannel",
    "JointDistribution",
    "QuadratureRule",
    "RateReport",
    "ask_brgc",
    "average_power",
    "bit_conditional_density",
    "bit_conditional_entropy",
    "conditional_density",
    "delta_for_power",
    "entropy",
    "erase_all_channel_2bit",
    "identity_channel_2bit",
    "make_quadrature",
    "marginal",
    "maxwell_boltzmann",
    "mutual_information",
    "product_of_marginals",
    "q_bmd",
    "rate_bmd",
    "rate_bmd_independent",
    "rate_generic",
    "rate_lm_instance",
    "rate_report",
    "rate_sgmi",
]
