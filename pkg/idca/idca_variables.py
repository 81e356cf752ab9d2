# MODEL
# Auto eta is the spectral bound of the chosen variant plus this margin
auto_eta_margin = 1.0
# default inertial weight, as a fraction of the admissible bound rho/2 (0.9 * rho/2 = 0.45 * rho)
default_gamma_fraction = 0.9
# tolerance on Q - Q^T before we flag the input as asymmetric and symmetrize it
symmetry_tolerance = 0.0

# SPECTRAL
jacobi_tolerance = 1e-12
jacobi_max_sweeps = 30
# off-symmetry beyond this raises NonSymmetricError
spectral_symmetry_tolerance = 1e-12

# GEOMETRY / LP kernel
activity_tolerance = 1e-9
feasibility_tolerance = 1e-9
pivot_tolerance = 1e-10
# pseudo-face enumeration is 2^m, QC checking is desk scale
enumeration_cap = 20
# slack maximization, a pseudo-face is nonempty iff the optimal slack exceeds this
strict_slack_tolerance = 1e-9

# QP SOLVER
multiplier_tolerance = 1e-10
qp_kkt_tolerance = 1e-8
# working set changes allowed are cycle_guard_factor * (m + n)
cycle_guard_factor = 10

# ENGINE
default_tol = 1e-8
default_max_iter = 100000
divergence_norm_cap = 1e12
inclusion_tolerance = 1e-8
diagnostic_tolerance = 1e-8

# CERTIFY
kkt_tolerance = 1e-6
# activity used by kkt_certificate, looser than the solver so trace end points certify robustly
kkt_activity_tolerance = 1e-7
strong_convexity_tolerance = 1e-9
component_distance_threshold = 1e-6
component_objective_window = 10
component_objective_spread = 1e-8
qc_witness_tolerance = 1e-8
separation_max_iterations = 500

# CLI exit codes
exit_ok = 0
exit_failed_check = 1
exit_usage = 2
exit_numerical = 3

# DC decomposition variants, (a) projection: Q1 = eta I and (b) proximal: Q1 = Q + eta I
variant_projection = 'projection_a'
variant_proximal = 'proximal_b'
variants = [variant_projection, variant_proximal]
