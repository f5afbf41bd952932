"""Curvature engine for invariant (alpha,beta)-Finsler metrics on compact
homogeneous spaces: flag curvature and S-curvature from first principles,
the vanishing-S-curvature criterion, and the classification case list."""

from .catalog import CatalogCase, CaseRealization, build_case
from .catalog import catalog as case_catalog
from .chartcurv import (ChartContext, bh_density, flag_curvature,
                        geodesic_integrate, pullback_norm, riemann_op,
                        riemannian_localization_check, s_curvature_chart,
                        spray_coeffs)
from .flags import MinimizerConfig, minimize_over_flags
from .homspace import (CosetSpace, InvariantABMetric, RiemannianHomMetric,
                       commuting_pair_sectional, k_subalgebra, kvcl_check,
                       localize_gv, randers_perturb,
                       s_curvature_hom, submersion_norm, u_tensor,
                       vanishing_s_equivalence)
from .jets import Jet, JetSpace, jet_eval
from .liealg import (LieAlgebra, ReductiveSplit, RootPlaneDecomp, Subalgebra,
                     ad_invariance_check, bracket, build_algebra,
                     maximal_ideal_in, rank, reductive_split,
                     root_plane_decomposition)
from .linalg import ad_transport, eigh, solve
from .minkowski import (ABNormData, FundamentalTensor, PhiFunction, ab_eval,
                        hessian, inner_y, is_riemannian_phi, phi_polynomial,
                        phi_randers, phi_riemannian, phi_sqrt_quadratic,
                        positivity_check, q_delta_phi)
from .report import CurvatureReport, RunConfig

__version__ = "0.1.0"
