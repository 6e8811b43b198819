"""Numerical laboratory for skew-product transformations on products of tori.

Instantiates triangular skew products on (T^n)^d, computes commutator
fields of the twisted Koopman operators exactly on trigonometric
polynomials, and measures unique-ergodicity, mixing and spectral-density
diagnostics with reproducible quadrature.
"""

from .torus import (FrequencyVector, TorusPoint, TrigPolynomial, char_eval,
                    torus_translate, trig_algebra, trig_eval, trig_integral)
from .flow import (FlowDirection, flow_apply, generator_apply,
                   subgroup_direction, translation_apply)
from .dynamics import (Diagnostic, SystemConfig, apply_T, apply_T_inverse,
                       cocycle_eval, config_digest, config_from_json_dict,
                       config_to_json_dict, orbit, phi_eval, validate_config)
from .commutator import (CommutatorField, adaptive_mourre_N, dini_profile,
                         g_birkhoff_eval, g_function, mourre_bound,
                         verify_commutator, xi_chi)
from .sampling import Sampler, integrate
from .analysis import (CorrelationSeries, SpectralDensityEstimate,
                       affine_oracle_correlation, affine_oracle_series,
                       birkhoff_partial, correlation_series, ergodicity_gap,
                       ergodicity_gaps, require_mixing_subspace,
                       spectral_density, wiener_statistic)

__version__ = "0.1.0"
