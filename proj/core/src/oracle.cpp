#include "cavcool/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/UmfPackSupport>
#include <boost/math/tools/minima.hpp>
#include <fmt/format.h>
#include <unsupported/Eigen/KroneckerProduct>

#include "cavcool/errors.hpp"
#include "cavcool/phonons.hpp"
#include "cavcool/rates.hpp"

namespace cavcool {

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr int kAtomG1 = 0;
constexpr int kAtomG2 = 1;
constexpr int kAtomE = 2;

using Triplets = std::vector<Eigen::Triplet<cplx>>;

SparseOp identity(std::size_t n) {
  SparseOp I(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  I.setIdentity();
  return I;
}

SparseOp lowering(int cutoff) {
  const int n = cutoff + 1;
  Triplets t;
  for (int k = 1; k < n; ++k) t.emplace_back(k - 1, k, std::sqrt(static_cast<double>(k)));
  SparseOp a(n, n);
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

SparseOp number(int cutoff) {
  const int n = cutoff + 1;
  Triplets t;
  for (int k = 0; k < n; ++k) t.emplace_back(k, k, static_cast<double>(k));
  SparseOp N(n, n);
  N.setFromTriplets(t.begin(), t.end());
  return N;
}

SparseOp atom_op(int row, int col) {
  SparseOp s(3, 3);
  s.insert(row, col) = 1.0;
  return s;
}

SparseOp kron3(const SparseOp& atom, const SparseOp& photon, const SparseOp& phonon) {
  SparseOp inner = Eigen::kroneckerProduct(photon, phonon);
  SparseOp out = Eigen::kroneckerProduct(atom, inner);
  out.makeCompressed();
  return out;
}

SparseOp dagger(const SparseOp& op) { return SparseOp(op.adjoint()); }

// vec(A rho B) = (B^T kron A) vec(rho)
SparseOp left(const SparseOp& A, const SparseOp& I) {
  return SparseOp(Eigen::kroneckerProduct(I, A));
}
SparseOp right(const SparseOp& B, const SparseOp& I) {
  return SparseOp(Eigen::kroneckerProduct(SparseOp(B.transpose()), I));
}

double realified(cplx z) { return z.real(); }

}  // namespace

std::size_t Liouvillian::index(int atom, int n, int m) const {
  return static_cast<std::size_t>((atom * (n_max + 1) + n) * (m_max + 1) + m);
}

Liouvillian build_generator(const SystemParams& p, const OracleConfig& cfg) {
  check_well_formed(p);
  if (cfg.n_max < 1 || cfg.m_max < 0)
    throw DimensionError(fmt::format("truncation n_max = {}, m_max = {} is degenerate",
                                     cfg.n_max, cfg.m_max));
  const std::size_t dim = 3u * static_cast<std::size_t>(cfg.n_max + 1) *
                          static_cast<std::size_t>(cfg.m_max + 1);
  if (dim > cfg.max_dim)
    throw DimensionError(fmt::format("Hilbert-space dimension {} exceeds the limit {}",
                                     dim, cfg.max_dim));
  if (cfg.ld_order != 1 && cfg.ld_order != 2)
    throw ParamError(fmt::format("ld_order must be 1 or 2, got {}", cfg.ld_order));

  Liouvillian out;
  out.n_max = cfg.n_max;
  out.m_max = cfg.m_max;
  out.dim = dim;

  const DerivedParams d = derive(p);
  const SparseOp Ia = identity(3);
  const SparseOp In = identity(static_cast<std::size_t>(cfg.n_max + 1));
  const SparseOp Im = identity(static_cast<std::size_t>(cfg.m_max + 1));
  const SparseOp a = lowering(cfg.n_max);
  const SparseOp b = lowering(cfg.m_max);
  const SparseOp X = SparseOp(b + dagger(b));
  const SparseOp X2 = SparseOp(X * X);
  const bool second = cfg.ld_order == 2;

  const SparseOp Pe = atom_op(kAtomE, kAtomE);
  const SparseOp Pg1 = atom_op(kAtomG1, kAtomG1);
  const SparseOp Pg2 = atom_op(kAtomG2, kAtomG2);
  const SparseOp s1 = atom_op(kAtomG1, kAtomE);  // |g1><e|
  const SparseOp s2 = atom_op(kAtomG2, kAtomE);  // |g2><e|

  // Internal and free parts in the frame rotating with the pump.
  SparseOp H = kron3(Ia, In, number(cfg.m_max)) * cplx(p.nu);
  H += kron3(Pe, In, Im) * cplx(-p.delta_c2);
  H += kron3(Pg1, In, Im) * cplx(Delta0(p));
  H += kron3(Pg2, In, Im) * cplx(p.Delta);
  H += kron3(Ia, number(cfg.n_max), Im) * cplx(-p.Delta);
  H += kron3(Ia, SparseOp(a + dagger(a)), Im) * cplx(0.5 * p.omega_P);

  // Control laser with its recoil expanded in eta_L.
  SparseOp laser_motion = SparseOp(Im + cplx(kI * d.eta_L) * X);
  if (second) laser_motion = SparseOp(laser_motion + cplx(-0.5 * d.eta_L * d.eta_L) * X2);
  const SparseOp laser = kron3(dagger(s1), In, laser_motion) * cplx(0.5 * p.omega_L);
  H += laser + dagger(laser);

  // Cavity coupling g cos(eta_C X + varphi) expanded in eta_C.
  const double c = std::cos(p.varphi);
  const double s = std::sin(p.varphi);
  SparseOp mode = SparseOp(Im * cplx(c) + X * cplx(-s * d.eta_C));
  if (second) mode = SparseOp(mode + X2 * cplx(-0.5 * c * d.eta_C * d.eta_C));
  const SparseOp cavity = kron3(dagger(s2), a, mode) * cplx(p.g);
  H += cavity + dagger(cavity);
  H.makeCompressed();
  out.H = H;

  if (p.kappa > 0.0) out.jumps.push_back(kron3(Ia, a, Im) * cplx(std::sqrt(2.0 * p.kappa)));
  if (p.gamma1 > 0.0) out.jumps.push_back(kron3(s1, In, Im) * cplx(std::sqrt(p.gamma1)));
  const double recoil = p.W2 * p.eta * p.eta;
  if (recoil >= 1.0)
    throw ParamError(fmt::format("W2 * eta^2 = {} leaves no recoilless emission", recoil));
  out.jumps.push_back(kron3(s2, In, Im) * cplx(std::sqrt(p.gamma2 * (1.0 - recoil))));
  if (recoil > 0.0)
    out.jumps.push_back(kron3(s2, In, X) * cplx(std::sqrt(p.gamma2 * p.W2) * p.eta));

  const SparseOp I = identity(dim);
  SparseOp L = left(H, I) * cplx(-kI) + right(H, I) * kI;
  for (const SparseOp& J : out.jumps) {
    const SparseOp JdJ = SparseOp(dagger(J) * J);
    L += SparseOp(Eigen::kroneckerProduct(SparseOp(J.conjugate()), J));
    L -= left(JdJ, I) * cplx(0.5);
    L -= right(JdJ, I) * cplx(0.5);
  }
  L.prune(cplx(0.0));
  L.makeCompressed();
  out.L = std::move(L);
  return out;
}

SparseOp phonon_number_op(const Liouvillian& L) {
  return kron3(identity(3), identity(static_cast<std::size_t>(L.n_max + 1)),
               number(L.m_max));
}

SparseOp photon_number_op(const Liouvillian& L) {
  return kron3(identity(3), number(L.n_max),
               identity(static_cast<std::size_t>(L.m_max + 1)));
}

SparseOp excited_projector(const Liouvillian& L) {
  return kron3(atom_op(kAtomE, kAtomE), identity(static_cast<std::size_t>(L.n_max + 1)),
               identity(static_cast<std::size_t>(L.m_max + 1)));
}

Eigen::VectorXcd apply(const Liouvillian& L, const Eigen::MatrixXcd& rho) {
  const Eigen::Map<const Eigen::VectorXcd> v(rho.data(), rho.size());
  return L.L * v;
}

Eigen::MatrixXcd unvec(const Liouvillian& L, const Eigen::VectorXcd& v) {
  const auto n = static_cast<Eigen::Index>(L.dim);
  return Eigen::Map<const Eigen::MatrixXcd>(v.data(), n, n);
}

Eigen::MatrixXcd initial_state(const Liouvillian& L, double mean_phonons) {
  const PhononDistribution th = PhononDistribution::thermal(mean_phonons, L.m_max);
  const auto n = static_cast<Eigen::Index>(L.dim);
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(n, n);
  for (int m = 0; m <= L.m_max; ++m) {
    const auto i = static_cast<Eigen::Index>(L.index(kAtomG2, 0, m));
    rho(i, i) = th[static_cast<std::size_t>(m)];
  }
  return rho;
}

double expectation(const Eigen::MatrixXcd& rho, const SparseOp& op) {
  cplx s = 0.0;
  for (Eigen::Index k = 0; k < op.outerSize(); ++k)
    for (SparseOp::InnerIterator it(op, k); it; ++it) s += it.value() * rho(it.col(), it.row());
  return realified(s);
}

namespace {

OracleSample observe(double t, const Eigen::MatrixXcd& rho, const SparseOp& Nb,
                     const SparseOp& Na, const SparseOp& Pe) {
  OracleSample s;
  s.t = t;
  s.trace = rho.trace().real();
  s.mean_m = expectation(rho, Nb);
  s.mean_n_photon = expectation(rho, Na);
  s.pop_e = expectation(rho, Pe);
  const Eigen::MatrixXcd herm = 0.5 * (rho + rho.adjoint());
  s.hermiticity_error = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
  s.min_eigenvalue = es.eigenvalues().minCoeff();
  return s;
}

}  // namespace

MasterTrajectory evolve_master(const Liouvillian& L, const Eigen::MatrixXcd& rho0,
                               const OracleConfig& cfg) {
  if (!(cfg.t_final > 0.0) || !(cfg.sample_dt > 0.0))
    throw IntegrationError("evolve_master needs positive t_final and sample_dt");
  const auto n = static_cast<Eigen::Index>(L.dim);
  if (rho0.rows() != n || rho0.cols() != n)
    throw DimensionError(fmt::format("initial state is {}x{}, generator expects {}x{}",
                                     rho0.rows(), rho0.cols(), n, n));
  if (std::abs(rho0.trace() - cplx(1.0)) > 1e-9)
    throw IntegrationError("initial state must have unit trace");

  const auto steps = static_cast<std::size_t>(std::ceil(cfg.t_final / cfg.sample_dt - 1e-9));
  const double h = cfg.t_final / static_cast<double>(steps);
  const double g = 1.0 - 1.0 / std::sqrt(2.0);

  SparseOp A = identity(L.L.rows());
  A -= L.L * cplx(g * h);
  A.makeCompressed();
  Eigen::UmfPackLU<SparseOp> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success)
    throw IntegrationError(fmt::format("factorization of 1 - {:.3g} L failed", g * h));

  const SparseOp Nb = phonon_number_op(L);
  const SparseOp Na = photon_number_op(L);
  const SparseOp Pe = excited_projector(L);

  MasterTrajectory traj;
  traj.step = h;
  Eigen::VectorXcd y = Eigen::Map<const Eigen::VectorXcd>(rho0.data(), rho0.size());
  const auto record = [&](double t) {
    const Eigen::MatrixXcd rho = unvec(L, y);
    const OracleSample s = observe(t, rho, Nb, Na, Pe);
    traj.max_trace_drift = std::max(traj.max_trace_drift, std::abs(s.trace - 1.0));
    traj.max_hermiticity_error = std::max(traj.max_hermiticity_error, s.hermiticity_error);
    traj.min_eigenvalue = traj.samples.empty() ? s.min_eigenvalue
                                               : std::min(traj.min_eigenvalue, s.min_eigenvalue);
    traj.samples.push_back(s);
  };
  record(0.0);

  // The resolvent (1 - g h L)^-1 is itself completely positive, so a single
  // backward-Euler step damps the initial fast transients without breaking
  // positivity. SDIRK steps follow on the shifted grid.
  y = lu.solve(y);
  if (lu.info() != Eigen::Success || !y.allFinite())
    throw IntegrationError("start-up step produced a non-finite state");
  const double t0 = g * h;
  record(t0);

  for (std::size_t k = 1; k < steps; ++k) {
    const Eigen::VectorXcd Y1 = lu.solve(y);
    const Eigen::VectorXcd k1 = (Y1 - y) / (g * h);
    const Eigen::VectorXcd rhs = y + ((1.0 - g) * h) * k1;
    y = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !y.allFinite())
      throw IntegrationError(fmt::format("SDIRK step {} produced a non-finite state", k));
    record(t0 + h * static_cast<double>(k));
  }
  return traj;
}

Eigen::MatrixXcd steady_state_direct(const Liouvillian& L) {
  const auto n = static_cast<Eigen::Index>(L.dim);
  // Replace the first equation (the <0|.|0> population balance) by Tr rho = 1.
  Triplets t;
  t.reserve(static_cast<std::size_t>(L.L.nonZeros()) + L.dim);
  for (Eigen::Index k = 0; k < L.L.outerSize(); ++k)
    for (SparseOp::InnerIterator it(L.L, k); it; ++it)
      if (it.row() != 0) t.emplace_back(it.row(), it.col(), it.value());
  for (Eigen::Index i = 0; i < n; ++i) t.emplace_back(0, i * n + i, 1.0);
  SparseOp A(L.L.rows(), L.L.cols());
  A.setFromTriplets(t.begin(), t.end());
  A.makeCompressed();

  Eigen::UmfPackLU<SparseOp> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success)
    throw IntegrationError("steady-state system is singular");
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(L.L.rows());
  rhs(0) = 1.0;
  const Eigen::VectorXcd v = lu.solve(rhs);
  Eigen::MatrixXcd rho = unvec(L, v);
  return 0.5 * (rho + rho.adjoint());
}

CoolingFit extract_cooling_rate(std::span<const double> t, std::span<const double> m,
                                double min_r_squared) {
  if (t.size() != m.size()) throw FitError("time and value series differ in length");
  if (t.size() < 4) throw FitError("need at least four samples to fit an exponential");
  const std::size_t N = t.size();
  const double t_span = t.back() - t.front();
  if (!(t_span > 0.0)) throw FitError("time samples must span a positive interval");

  // For fixed Gamma the model a + b exp(-Gamma t) is linear in (a, b).
  struct Linear {
    double a, b, sse;
  };
  const auto solve_linear = [&](double G) {
    double s_e = 0.0, s_ee = 0.0, s_y = 0.0, s_ey = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double e = std::exp(-G * (t[i] - t.front()));
      s_e += e;
      s_ee += e * e;
      s_y += m[i];
      s_ey += e * m[i];
    }
    const double det = static_cast<double>(N) * s_ee - s_e * s_e;
    Linear r{0.0, 0.0, std::numeric_limits<double>::infinity()};
    if (!(std::abs(det) > 0.0)) return r;
    r.b = (static_cast<double>(N) * s_ey - s_e * s_y) / det;
    r.a = (s_y - r.b * s_e) / static_cast<double>(N);
    r.sse = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double res = m[i] - r.a - r.b * std::exp(-G * (t[i] - t.front()));
      r.sse += res * res;
    }
    return r;
  };

  // Coarse scan in log Gamma then Brent refinement around the best bracket.
  const double lo = std::log(1e-3 / t_span);
  const double hi = std::log(1e3 / t_span);
  constexpr int kScan = 121;
  int best = 0;
  double best_sse = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kScan; ++i) {
    const double x = lo + (hi - lo) * i / (kScan - 1);
    const double sse = solve_linear(std::exp(x)).sse;
    if (sse < best_sse) {
      best_sse = sse;
      best = i;
    }
  }
  const double step = (hi - lo) / (kScan - 1);
  const double x_lo = lo + step * std::max(0, best - 1);
  const double x_hi = lo + step * std::min(kScan - 1, best + 1);
  const auto [x_best, sse_best] = boost::math::tools::brent_find_minima(
      [&](double x) { return solve_linear(std::exp(x)).sse; }, x_lo, x_hi, 52);
  (void)sse_best;

  CoolingFit fit;
  fit.Gamma = std::exp(x_best);
  const Linear lin = solve_linear(fit.Gamma);
  fit.m_inf = lin.a;
  fit.m0 = lin.a + lin.b;
  double mean = 0.0;
  for (double v : m) mean += v;
  mean /= static_cast<double>(N);
  double sst = 0.0;
  for (double v : m) sst += (v - mean) * (v - mean);
  fit.r_squared = sst > 0.0 ? 1.0 - lin.sse / sst : (lin.sse == 0.0 ? 1.0 : 0.0);
  fit.rms_residual = std::sqrt(lin.sse / static_cast<double>(N));
  if (!std::isfinite(fit.Gamma) || !(fit.r_squared >= min_r_squared))
    throw FitError(fmt::format("single-exponential fit rejected: R^2 = {:.6f} < {}",
                               fit.r_squared, min_r_squared));
  return fit;
}

CoolingFit extract_cooling_rate(const MasterTrajectory& traj, double min_r_squared) {
  std::vector<double> t, m;
  t.reserve(traj.samples.size());
  m.reserve(traj.samples.size());
  for (const auto& s : traj.samples) {
    t.push_back(s.t);
    m.push_back(s.mean_m);
  }
  return extract_cooling_rate(t, m, min_r_squared);
}

std::vector<ValidationPoint> default_validation_points() {
  std::vector<ValidationPoint> pts;

  // Bare EIT cooling: weak cavity coupling, pump off the cavity sidebands.
  SystemParams eit;
  eit.gamma2 = 10.0;
  eit.kappa = 2.0;
  eit.g = 1.0;
  eit.omega_L = 2.0 * std::sqrt(7.0);
  eit.delta1 = 6.0;
  eit.Delta = 3.0;
  eit.delta_c2 = eit.delta1 - eit.Delta;
  eit.omega_P = 0.32;
  eit.eta = 0.05;
  pts.push_back({"eit", eit});

  // Strong coupling with the pump on the blue cavity sideband.
  SystemParams sc;
  sc.gamma2 = 10.0;
  sc.kappa = 0.1;
  sc.g = 10.0;
  sc.omega_L = 12.0;
  sc.varphi = std::numbers::pi / 3.0;
  sc.Delta = 1.0;
  sc.delta1 = 0.25 * sc.omega_L * sc.omega_L + 0.5 * 25.0 - 1.0;
  sc.delta_c2 = sc.delta1 - 1.0;
  sc.omega_P = 0.08;
  sc.eta = 0.05;
  pts.push_back({"strong_coupling", sc});

  // Generic point away from three-photon resonance.
  SystemParams off;
  off.gamma2 = 10.0;
  off.kappa = 2.0;
  off.g = 5.0;
  off.omega_L = 8.0;
  off.varphi = std::numbers::pi / 4.0;
  off.delta1 = 12.0;
  off.delta_c2 = 10.0;
  off.Delta = 2.5;
  off.omega_P = 0.3;
  off.eta = 0.05;
  pts.push_back({"off_resonance", off});
  return pts;
}

namespace {

OracleConfig with_window(OracleConfig cfg, double Gamma) {
  if (!(cfg.t_final > 0.0)) cfg.t_final = cfg.horizon / Gamma;
  if (!(cfg.sample_dt > 0.0)) cfg.sample_dt = cfg.t_final / static_cast<double>(cfg.samples);
  return cfg;
}

CoolingFit fit_oracle(const SystemParams& p, const OracleConfig& cfg, double m0,
                      ValidationResult& out, bool primary) {
  const Liouvillian L = build_generator(p, cfg);
  const MasterTrajectory traj = evolve_master(L, initial_state(L, m0), cfg);
  if (primary) {
    out.max_trace_drift = traj.max_trace_drift;
    out.min_eigenvalue = traj.min_eigenvalue;
  }
  return extract_cooling_rate(traj);
}

}  // namespace

ValidationResult run_validation(const ValidationPoint& point,
                                const ValidationOptions& options) {
  ValidationResult out;
  out.point = point.name;
  try {
    const RateSet r = transition_rates(point.params);
    out.Gamma_pert = r.Gamma;
    if (!(r.Gamma > 0.0))
      throw HeatingError(fmt::format("validation point '{}' is not cooling", point.name));
    out.m_st_pert = *r.m_st;

    const OracleConfig fine = with_window(options.fine, r.Gamma);
    const OracleConfig coarse = with_window(options.coarse, r.Gamma);
    const CoolingFit f = fit_oracle(point.params, fine, options.initial_mean_m, out, true);
    out.Gamma_fit = f.Gamma;
    out.m_inf_fit = f.m_inf;
    out.r_squared = f.r_squared;
    const CoolingFit fc = fit_oracle(point.params, coarse, options.initial_mean_m, out, false);
    out.Gamma_fit_coarse = fc.Gamma;
    out.converged = std::abs(fc.Gamma - f.Gamma) <= options.convergence_tolerance * f.Gamma;

    const bool gamma_ok =
        std::abs(out.Gamma_fit - out.Gamma_pert) <= options.tolerance * out.Gamma_pert;
    const double m_tol = std::max(options.tolerance * out.m_st_pert, options.m_abs_tolerance);
    const bool m_ok = std::abs(out.m_inf_fit - out.m_st_pert) <= m_tol;
    out.pass = gamma_ok && m_ok && out.converged;
  } catch (const Error& e) {
    out.error = e.what();
    out.pass = false;
  }
  return out;
}

}  // namespace cavcool
