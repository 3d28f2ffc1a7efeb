"""Monte Carlo first-passage times of Brownian motion with alternating drift and variance."""

from .bounds import (
    BoundCurve,
    bound_curve,
    cdf_lower_bound,
    cdf_upper_bound,
    one_switch_density,
    pdf_lower_bound,
)
from .density import (
    DensityEstimate,
    default_bandwidth,
    empirical_cdf,
    epanechnikov,
    estimate_cdf,
    estimate_density,
)
from .engine import AlternatingParams, Censored, Crossed, OutcomeBatch, simulate_batch, simulate_fpt
from .errors import DomainError, HypothesisError, PreconditionError, RejectionLimitError
from .laws import Exponential, GeneralizedPareto, InverseGaussian, law_cdf, law_sample
from .samplers import (
    Tolerances,
    sample_avoiding_state,
    sample_crossing_time,
    sample_truncated_std_normal,
)
from .scenarios import ScenarioConfig, geometric_to_additive, preset
from .wiener import Barrier, WienerRegime, avoiding_pdf, crossing_cdf, crossing_pdf, pdf_mode

__version__ = "0.1.0"
