#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "cavcool/params.hpp"

namespace cavcool {

/// Truncation and sampling of the brute-force master-equation model.
/// t_final / sample_dt of 0 are filled in from the perturbative cooling rate.
struct OracleConfig {
  int n_max = 1;
  int m_max = 8;
  int ld_order = 2;
  double t_final = 0.0;
  double sample_dt = 0.0;
  std::size_t max_dim = 120;
  // Time windows chosen automatically span this many perturbative 1/Gamma.
  double horizon = 8.0;
  std::size_t samples = 100;
};

using SparseOp = Eigen::SparseMatrix<cplx>;

/// Lindblad generator on vec(rho) (column-major stacking) together with the
/// Hilbert-space operators it was built from. Basis index of |atom, n, m> is
/// (atom (n_max+1) + n)(m_max+1) + m with atom 0 = g1, 1 = g2, 2 = e.
struct Liouvillian {
  int n_max = 0;
  int m_max = 0;
  std::size_t dim = 0;
  SparseOp H;
  std::vector<SparseOp> jumps;
  SparseOp L;

  std::size_t index(int atom, int n, int m) const;
};

/// Throws DimensionError when 3 (n_max+1)(m_max+1) exceeds cfg.max_dim or
/// the truncation is degenerate, ParamError for an unsupported ld_order.
Liouvillian build_generator(const SystemParams& p, const OracleConfig& cfg);

/// Hilbert-space operators of the truncated model.
SparseOp phonon_number_op(const Liouvillian& L);
SparseOp photon_number_op(const Liouvillian& L);
SparseOp excited_projector(const Liouvillian& L);

Eigen::VectorXcd apply(const Liouvillian& L, const Eigen::MatrixXcd& rho);
Eigen::MatrixXcd unvec(const Liouvillian& L, const Eigen::VectorXcd& v);

/// |g2,0> (internal) times a truncated thermal phonon state.
Eigen::MatrixXcd initial_state(const Liouvillian& L, double mean_phonons);

struct OracleSample {
  double t = 0.0;
  double mean_m = 0.0;
  double mean_n_photon = 0.0;
  double pop_e = 0.0;
  double trace = 0.0;
  double min_eigenvalue = 0.0;
  double hermiticity_error = 0.0;
};

struct MasterTrajectory {
  std::vector<OracleSample> samples;
  double step = 0.0;
  double max_trace_drift = 0.0;
  double min_eigenvalue = 0.0;
  double max_hermiticity_error = 0.0;
};

/// L-stable two-stage SDIRK with a single sparse LU of (1 - g h L) reused for
/// every step, one step per sample interval. The first sample follows a
/// backward-Euler start-up step of length g h, so sample times are
/// g h + k h. Throws IntegrationError when the
/// factorization fails or the state stops being finite.
MasterTrajectory evolve_master(const Liouvillian& L, const Eigen::MatrixXcd& rho0,
                               const OracleConfig& cfg);

/// Stationary state from the null space of L with a trace constraint.
Eigen::MatrixXcd steady_state_direct(const Liouvillian& L);

double expectation(const Eigen::MatrixXcd& rho, const SparseOp& op);

struct CoolingFit {
  double Gamma = 0.0;
  double m_inf = 0.0;
  double m0 = 0.0;
  double r_squared = 0.0;
  double rms_residual = 0.0;
};

/// Least-squares fit of m(t) = m_inf + (m0 - m_inf) exp(-Gamma t). Throws
/// FitError when fewer than four samples are given or R^2 < min_r_squared.
CoolingFit extract_cooling_rate(std::span<const double> t, std::span<const double> m,
                                double min_r_squared = 0.99);
CoolingFit extract_cooling_rate(const MasterTrajectory& traj,
                                double min_r_squared = 0.99);

struct ValidationPoint {
  std::string name;
  SystemParams params;
};

/// EIT regime, strong coupling at Delta = nu, and a point off three-photon
/// resonance, all at eta = 0.05 and |epsilon|^2 <= 0.01.
std::vector<ValidationPoint> default_validation_points();

struct ValidationResult {
  std::string point;
  double Gamma_pert = 0.0;
  double m_st_pert = 0.0;
  double Gamma_fit = 0.0;
  double m_inf_fit = 0.0;
  double r_squared = 0.0;
  double Gamma_fit_coarse = 0.0;
  bool converged = false;
  bool pass = false;
  double max_trace_drift = 0.0;
  double min_eigenvalue = 0.0;
  std::optional<std::string> error;
};

struct ValidationOptions {
  OracleConfig fine{2, 12};
  OracleConfig coarse{1, 8};
  double tolerance = 0.15;
  double m_abs_tolerance = 0.05;
  double convergence_tolerance = 0.02;
  double initial_mean_m = 1.0;
};

ValidationResult run_validation(const ValidationPoint& point,
                                const ValidationOptions& options = {});

}  // namespace cavcool
