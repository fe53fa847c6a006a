"""Continuous-aperture ISAC over fading channels: spectra, gain laws, closed-form metrics."""

__version__ = "0.1.0"

from .config import ConfigError, SystemConfig, load_config, rx_interval, tx_interval
from .fading import (ChannelModel, GainDistribution, SeriesConvergenceError, build_channel_model,
                     gain_cdf, gain_distribution, gain_pdf, q_spectrum, xi_capital,
                     xi_coefficients)
from .metrics import avg_sr_cc, ecr_cc, ecr_sc, op_cc, op_sc, sr_sc
from .montecarlo import McEstimate, estimate
from .pareto import pareto_weights, region_sweep, subspace_rep
from .spectral import build_spectrum, polarization_census
