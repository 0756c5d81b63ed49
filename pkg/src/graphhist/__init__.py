"""F-degree histograms of graphs and max-entropy bounds on how many graphs share one."""

__version__ = "0.1.0"

from .graph import (Graph, RootedPattern, FDegreeVector, SizeCapError, automorphism_count,
                    merge_at_root, rooted_copy_counts, f_degree_distribution, extremal_counts,
                    subgraph_density, subgraph_density_exact, named_pattern)
from .distributions import (PiecewiseDensity, Empirical, ks_distance, wasserstein1, concentration,
                            moments, c_coefficients, phi_vector, ks_upper_bound, gamma_radii,
                            beta_radii, sandwich_radii)
from .szemeredi import (Partition, SzemerediType, UniformityVerdict, KCapExceeded, pair_density,
                        uniformity_check, partition_energy, refine_step, regular_decompose,
                        mean_density, type_membership)
from .maxent import (ConstraintSpec, MaxEntSolution, SizeBoundsReport, InfeasibleError, entropy,
                     solve_max_entropy, density_jacobian, effective_radius, scalar_shift,
                     continuity_bound, combinatorial_bounds, densities_size_bounds,
                     hist_size_bounds)
from .oracle import (EnumerationScope, CapExceeded, enumerate_graphs, exact_hist_count,
                     exact_densities_count, sandwich_check, counting_lemma_audit, block_sample)
from .kernels import BACKEND
