"""Space-time max-stable random fields: simulation, F-madogram dependence
estimation, NLS fitting, model selection, and marginal preprocessing."""

__version__ = "0.1.0"

from .errors import (BudgetExceeded, ConfigError, DegenerateLag,
                     IndivisibleBlocks, InsufficientLags, InvalidArgs,
                     LengthMismatch, NoConvergence, NonIntegerShift, NotPSD,
                     StmaxstabError, SupportViolation, UnrealizableLag,
                     UnsupportedLag)
from .fields import SpaceTimeField, read_field_csv, write_field_csv
from .fit import (AICReport, FitResult, Weights, aic_nls, family_estimates,
                  fit_scheme1, fit_scheme2, fitted_vs_empirical, nls_minimize,
                  psi_named, select_model)
from .lattice import (DEFAULT_H, DEFAULT_K, GridSpec, LagSets,
                      count_pairs, count_spacetime_pairs, direction_classes,
                      enumerate_oriented_pairs, enumerate_spacetime_pairs,
                      enumerate_spatial_pairs, squared_lag)
from .madogram import (EstimateSet, MadogramEstimate, compute_estimates,
                       empirical_spatial_fmadogram, empirical_st_fmadogram,
                       empirical_temporal_fmadogram,
                       empirical_vector_fmadogram, frechet_cdf,
                       write_madogram_csv)
from .margins import (GevParams, GumbelParams, block_maxima, choose_margin,
                      deseasonalize, fit_gev, fit_gumbel, fit_margins_field,
                      pit_to_frechet, pit_to_gumbel, qq_data)
from .models import (BRInnovation, BRParams, ExtremalTInnovation, MarParams,
                     ModelSpec, SchlatherInnovation, SepSchlatherParams,
                     SmithInnovation, bivariate_cdf, exponent_V,
                     fbm_semivariogram, fmadogram_model, fmadogram_to_theta,
                     lambda_madogram, model_from_dict, model_to_dict, theta,
                     theta_to_fmadogram, theta_vec)
from .permtest import (PermBand, dependence_range, spatial_perm_band,
                       temporal_perm_band, write_band_csv)
from .simulate import (SimConfig, simulate_br, simulate_gaussian_field,
                       simulate_mar, simulate_spatial_innovation)
