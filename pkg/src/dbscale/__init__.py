"""dbscale: desk-scale numerics for reproducing-kernel spaces of entire
functions, canonical selfadjoint extensions of multiplication, the attached
Hilbert scales, and their rank-one singular perturbation formulas."""

from .errors import (ConfigError, DbscaleError, DegenerateDenominator,
                     EmptyDictionary, EmptySampleSet, LevelMismatch,
                     NonConvergence, OverflowGuard, RemovabilityViolation,
                     SpectralPoint, StepTooCoarse)
from .fncore import (AtomE, AtomESharp, AtomKernel, AtomS, DbSpace,
                     DiffQuotient, EntireFn, HbRealization, LinComb,
                     MulAffine, PaleyWiener, Shifted, UserFn, diff_quotient,
                     fn_deriv, fn_eval, hb_verify, kernel, kernel_via_s,
                     lincomb, s_gamma, sharp, standard_hb_grid)
from .numerics import (AdaptiveQuadrature, RootWindow, SamplingSeries,
                       find_zeros, inner_B, interlaces, norm_B, quad_inner)
from .operator import (ExtensionHandle, GammaDomainElement, StarDomainElement,
                       apply_S_gamma, cayley_apply, defect_direction,
                       dom_S_element, eigen_element, extension,
                       quotient_kernel_identity_check, resolvent_apply,
                       star_apply, star_convert, star_from_gamma,
                       star_from_kernel)
from .scale import (AssocFunction, DualFunctional, ScaleNorms, assoc_from_B,
                    assoc_from_s, assoc_roundtrip, counterexample_run,
                    dual_from_s, inner_plus2, inner_plusF, kernel_plus2,
                    minus2_lower, minusF_lower, nondensity_gap, norm_plus2,
                    norm_plusF, pairing_F, pairing_minus2, scale_norms,
                    sharp_isometry_checks)
from .perturbation import (KreinData, PerturbedDomainElement,
                           boundary_functional, cyclicity_check,
                           dom_gamma_decompose, krein_diff_check,
                           lambda_of_gamma, pairing_s0_F,
                           perturbation_direction, qfunc, rhat_on_s0,
                           s_tilde_gamma_pairing_check)
from .checks import CheckRecord, run_suite

__version__ = "0.1.0"
