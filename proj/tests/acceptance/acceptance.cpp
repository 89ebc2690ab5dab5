#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <fmt/core.h>

#include "cavcool/dynamics.hpp"
#include "cavcool/errors.hpp"
#include "cavcool/oracle.hpp"
#include "cavcool/rates.hpp"
#include "cavcool/resolvent.hpp"
#include "cavcool/scan.hpp"
#include "cavcool/spectra.hpp"
#include "oracles.hpp"
#include "presets.hpp"

using namespace cavcool;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

double rel(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

// 1. Roots of f and the resolvent inverse over random draws.
Outcome resolvent_identity() {
  oracles::Sampler s(1001);
  double worst_f = 0.0, worst_cubic = 0.0, worst_inv = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const auto p = s.draw();
    const auto c = oracles::cubic_coefficients(oracles::manifold(p));
    for (cplx z : dressed_states(p).omega_eff) {
      worst_f = std::max(worst_f, std::abs(char_poly(p, z)));
      worst_cubic = std::max(worst_cubic, std::abs(oracles::eval_cubic(c, z)));
    }
    const cplx z(s.uniform(-60.0, 60.0), s.log_uniform(0.01, 10.0));
    const Eigen::Matrix3cd prod =
        resolvent_block(p, z).matrix() * (z * Eigen::Matrix3cd::Identity() - oracles::manifold(p));
    worst_inv = std::max(worst_inv, (prod - Eigen::Matrix3cd::Identity()).cwiseAbs().maxCoeff());
  }
  return {worst_f < 1e-8 && worst_cubic < 1e-8 && worst_inv < 1e-10,
          fmt::format("max |f(root)| = {:.2e}, max |det(root - M)| = {:.2e}, "
                      "max |G (z - M) - 1| = {:.2e}",
                      worst_f, worst_cubic, worst_inv)};
}

// 2. Atomic excitation and diffusion vanish at Delta0.
Outcome three_photon_transparency() {
  oracles::Sampler s(1002);
  double worst_s = 0.0, worst_d = 0.0, worst_oracle = 0.0;
  int evaluated = 0, guarded = 0;
  while (evaluated < 100) {
    auto p = s.draw();
    const double d0 = p.delta1 - p.delta_c2;
    double peak = 0.0, oracle_peak = 0.0;
    for (int i = 0; i <= 4000; ++i) {
      const double x = -120.0 + 0.06 * i;
      try {
        peak = std::max(peak, excitation_rate(p, x, Channel::atom));
      } catch (const PoleError&) {
      }
      oracle_peak = std::max(oracle_peak, std::norm(oracles::dense_resolvent(p, x)(0, 2)));
    }
    for (cplx z : dressed_states(p).omega_eff) {
      try {
        peak = std::max(peak, excitation_rate(p, z.real(), Channel::atom));
      } catch (const PoleError&) {
      }
    }
    double s_ratio = 0.0, d = 0.0;
    try {
      s_ratio = excitation_rate(p, d0, Channel::atom) / peak;
      p.Delta = d0;
      d = diffusion(p);
    } catch (const PoleError&) {
      ++guarded;
      continue;
    }
    ++evaluated;
    worst_s = std::max(worst_s, s_ratio);
    worst_d = std::max(worst_d, d);
    worst_oracle =
        std::max(worst_oracle, std::norm(oracles::dense_resolvent(p, d0)(0, 2)) / oracle_peak);
  }
  return {worst_s < 1e-20 && worst_d == 0.0 && worst_oracle < 1e-20 && guarded < 10,
          fmt::format("max S_atom(Delta0)/peak = {:.2e}, max D(Delta0) = {:.2e}, "
                      "dense |G_e,g2|^2 ratio = {:.2e}, {} draws redrawn at a pole guard",
                      worst_s, worst_d, worst_oracle, guarded)};
}

// 3. Amplitude assembly against the closed form and the matrix-chain oracle.
Outcome dual_path() {
  oracles::Sampler s(1003);
  double worst_cf = 0.0, worst_oracle = 0.0;
  int skipped = 0;
  for (int k = 0; k < 1000; ++k) {
    auto p = s.draw();
    p.gamma1 = 0.0;
    p.delta_c2 = p.delta1 - p.Delta;
    try {
      const auto r = transition_rates(p);
      const auto c = closed_form_tpr(p);
      const auto o = oracles::matrix_rates(p);
      worst_cf = std::max({worst_cf, rel(r.A_plus, c.A_plus), rel(r.A_minus, c.A_minus)});
      worst_oracle = std::max({worst_oracle, rel(r.A_plus, o.A_plus), rel(r.A_minus, o.A_minus)});
    } catch (const PoleError&) {
      ++skipped;
    }
  }
  return {worst_cf < 1e-8 && worst_oracle < 1e-8 && skipped < 10,
          fmt::format("max rel. gap closed form = {:.2e}, matrix chain = {:.2e}, skipped {}",
                      worst_cf, worst_oracle, skipped)};
}

// 4. Asymptotic limits of the closed form.
Outcome limit_collapse() {
  Outcome out;
  auto p = presets::map_moderate_decay();
  p.Delta = 0.3;
  p.delta1 = 30.0;
  p.delta_c2 = p.delta1 - p.Delta;
  std::vector<double> gaps;
  for (double C : {1e-2, 1e-3, 1e-4}) {
    p.varphi = std::acos(std::sqrt(C * 0.5 * p.kappa * p.gamma()) / p.g);
    const auto exact = closed_form_tpr(p);
    const auto approx = closed_form_limits(p, Regime::small_cooperativity);
    gaps.push_back(std::max(rel(exact.A_plus, approx.A_plus), rel(exact.A_minus, approx.A_minus)));
  }
  const double slope1 = std::log10(gaps[0] / gaps[1]);
  const double slope2 = std::log10(gaps[1] / gaps[2]);
  const bool linear = std::abs(slope1 - 1.0) < 0.1 && std::abs(slope2 - 1.0) < 0.1;

  oracles::Sampler s(1004);
  double worst_rd = 0.0;
  for (int k = 0; k < 100; ++k) {
    auto q = s.draw();
    q.gamma1 = 0.0;
    q.Delta = 0.0;
    q.delta_c2 = q.delta1;
    const auto rd = closed_form_limits(q, Regime::resonant_drive);
    const auto exact = closed_form_tpr(q);
    worst_rd = std::max({worst_rd, rel(rd.A_plus, exact.A_plus), rel(rd.A_minus, exact.A_minus)});
  }

  auto e = presets::map_moderate_decay();
  e.delta1 = 20.0;
  e.omega_L = 2.0 * std::sqrt(e.nu * (e.nu + e.delta1));
  e.Delta = 0.0;
  e.delta_c2 = e.delta1;
  const double eit_ref = std::pow(e.gamma() / (4.0 * e.delta1), 2);
  const auto eit_m = closed_form_limits(e, Regime::eit).m_st();
  const double eit_gap = eit_m ? rel(*eit_m, eit_ref) : 1.0;

  auto r = presets::map_moderate_decay();
  r.kappa = 0.2;
  r.Delta = 0.0;
  const double C0 = 1e4;
  const double C = C0 * (r.kappa * r.kappa + 1.0) / (r.kappa * r.kappa);
  r.g = std::sqrt(C * 0.5 * r.kappa * r.gamma()) / std::cos(r.varphi);
  r.delta1 = 0.25 * r.omega_L * r.omega_L - 1.0 + r.gamma() * C0 / (2.0 * r.kappa);
  r.delta_c2 = r.delta1;
  const auto rd_m = closed_form_limits(r, Regime::resonant_drive).m_st();
  const double rd_gap = rd_m ? rel(*rd_m, 0.25 * r.kappa * r.kappa) : 1.0;

  out.pass = linear && worst_rd < 1e-10 && eit_gap < 1e-6 && rd_gap < 0.01;
  out.detail = fmt::format(
      "C-gaps {:.2e}/{:.2e}/{:.2e} (log slopes {:.3f}, {:.3f}), Delta=0 gap {:.2e}, "
      "EIT optimum gap {:.2e}, resonant drive (kappa/2)^2 gap {:.2e}",
      gaps[0], gaps[1], gaps[2], slope1, slope2, worst_rd, eit_gap, rd_gap);
  return out;
}

// 5. Strong-coupling sideband point.
Outcome strong_coupling_figures() {
  const auto p = presets::strong_coupling();
  double best = -1.0, best_Delta = 0.0;
  for (int i = 0; i <= 100; ++i) {
    auto q = p;
    q.Delta = 0.02 * i;
    const double a = transition_rates(q).A_minus;
    if (a > best) {
      best = a;
      best_Delta = q.Delta;
    }
  }
  const auto r = transition_rates(p);
  const double ratio = r.A_minus / r.A_plus;
  double pole_Delta = std::nan("");
  for (cplx z : dressed_states(p).omega_eff)
    if (std::isnan(pole_Delta) || std::abs(z.real() - 2.0 * p.nu) < std::abs(pole_Delta - p.nu))
      pole_Delta = z.real() - p.nu;

  auto o = p;
  o.delta1 = derive(o).delta_opt;
  o.delta_c2 = o.delta1 - o.nu;
  const auto d = derive(o);
  const auto ro = transition_rates(o);
  const double m_ref = (1.0 + d.C_minus) / d.C;
  const double m_gap = ro.m_st ? rel(*ro.m_st, m_ref) : 1.0;

  return {std::abs(best_Delta - p.nu) <= 0.02 + 1e-12 && ratio > 20.0 && m_gap < 0.3,
          fmt::format("A- peak at Delta = {:.2f} (dressed red sideband at {:.3f}), A-/A+ = "
                      "{:.1f}, m_st(delta_opt) = {:.4f} vs (1+C-)/C = {:.4f} (gap {:.1f}%)",
                      best_Delta, pole_Delta, ratio, ro.m_st.value_or(std::nan("")), m_ref, 100.0 * m_gap)};
}

// Largest 4-connected set of heating cells.
std::size_t largest_heating_region(const ScanResult& r) {
  std::vector<char> seen(r.points.size(), 0);
  std::size_t best = 0;
  for (std::size_t k = 0; k < r.points.size(); ++k) {
    if (seen[k] || r.points[k].status != PointStatus::heating) continue;
    std::size_t size = 0;
    std::vector<std::size_t> stack{k};
    seen[k] = 1;
    while (!stack.empty()) {
      const std::size_t c = stack.back();
      stack.pop_back();
      ++size;
      const std::size_t i = c / r.n2, j = c % r.n2;
      const auto visit = [&](std::size_t a, std::size_t b) {
        const std::size_t q = a * r.n2 + b;
        if (!seen[q] && r.points[q].status == PointStatus::heating) {
          seen[q] = 1;
          stack.push_back(q);
        }
      };
      if (i > 0) visit(i - 1, j);
      if (i + 1 < r.n1) visit(i + 1, j);
      if (j > 0) visit(i, j - 1);
      if (j + 1 < r.n2) visit(i, j + 1);
    }
    best = std::max(best, size);
  }
  return best;
}

// Whether (Delta, delta1) lies within one cell of the optimal-delta1 curve.
bool near_curve(const SystemParams& base, double Delta, double delta1, double hD, double hd) {
  auto p = base;
  for (int k = -20; k <= 20; ++k) {
    p.Delta = Delta + hD * k / 20.0;
    if (std::abs(tpr_optimal_delta1(p) - delta1) <= hd) return true;
  }
  return false;
}

// 6. Maps over (Delta, delta1).
Outcome scan_reproduction() {
  Outcome out;
  ScanSpec m;
  m.base = presets::map_moderate_decay();
  m.axis1 = {"Delta", -4.0, 4.0, 101};
  m.axis2 = Axis{"delta1", -60.0, 100.0, 101};
  m.constraint = Constraint::tpr_via_delta_c2;
  m.quantity = Quantity::Gamma;
  const auto r = run_scan(m, 4);
  const double hD = 8.0 / 100.0, hd = 160.0 / 100.0;

  int tested = 0, on_ridge = 0;
  for (std::size_t i = 0; i < r.n1; ++i) {
    auto p = m.base;
    p.Delta = m.axis1.value(i);
    const double pred = tpr_optimal_delta1(p);
    p.delta1 = pred;
    p.delta_c2 = pred - p.Delta;
    const double half_width = 0.5 * p.gamma() * (1.0 + derive(p).C_minus);
    if (pred - half_width < m.axis2->lo || pred + half_width > m.axis2->hi) continue;
    std::size_t best = 0;
    for (std::size_t j = 1; j < r.n2; ++j)
      if (r.at(i, j).value > r.at(i, best).value) best = j;
    if (!(r.at(i, best).value > 0.0)) continue;
    ++tested;
    if (near_curve(m.base, p.Delta, m.axis2->value(best), hD, hd)) ++on_ridge;
  }
  const bool ridge_ok = tested >= static_cast<int>(r.n1) / 2 && on_ridge == tested;

  std::size_t gi = 0, gj = 0;
  for (std::size_t i = 0; i < r.n1; ++i)
    for (std::size_t j = 0; j < r.n2; ++j)
      if (r.at(i, j).value > r.at(gi, gj).value) {
        gi = i;
        gj = j;
      }
  const double gD = m.axis1.value(gi), gd = m.axis2->value(gj);
  const bool max_ok = std::abs(gD) <= hD + 1e-12 && near_curve(m.base, gD, gd, hD, hd);

  const std::size_t region = largest_heating_region(r);
  const bool heat_ok = region * 10 >= r.points.size();

  ScanSpec n = m;
  n.base = presets::map_narrow_cavity();
  n.axis1 = {"Delta", -4.0, 4.0, 201};
  const auto rn = run_scan(n, 4);
  const std::size_t inu = 125;
  int cooling_rows = 0, bounded_rows = 0;
  for (std::size_t j = 0; j < rn.n2; ++j) {
    if (rn.at(inu, j).status != PointStatus::ok) continue;
    ++cooling_rows;
    std::size_t hi = inu;
    while (hi + 1 < rn.n1 && rn.at(hi + 1, j).status == PointStatus::ok) ++hi;
    if (n.axis1.value(hi) <= n.base.nu + 0.5) ++bounded_rows;
  }
  const bool stripe_ok = cooling_rows == static_cast<int>(rn.n2) &&
                         bounded_rows * 10 >= static_cast<int>(rn.n2) * 9;

  ScanSpec f;
  f.base = presets::interference();
  f.axis1 = {"Delta", -3.0, 3.0, 601};
  f.axis2 = Axis{"delta1", 19.5, 20.5, 5};
  f.quantity = Quantity::Gamma;
  const auto rf = run_scan(f, 4);
  int min_changes = 1 << 30;
  for (std::size_t j = 0; j < rf.n2; ++j) {
    const double d0 = f.axis2->value(j) - f.base.delta_c2;
    int changes = 0;
    double last = 0.0;
    for (std::size_t i = 0; i < rf.n1; ++i) {
      const auto& pt = rf.at(i, j);
      if (pt.status == PointStatus::resonant || std::abs(f.axis1.value(i) - d0) > 2.0) continue;
      if (last != 0.0 && pt.value * last < 0.0) ++changes;
      if (pt.value != 0.0) last = pt.value;
    }
    min_changes = std::min(min_changes, changes);
  }
  const bool bands_ok = min_changes >= 2;

  out.pass = ridge_ok && max_ok && heat_ok && stripe_ok && bands_ok;
  out.detail = fmt::format(
      "ridge {}/{} columns on curve; max at (Delta, delta1) = ({:.2f}, {:.1f}); heating region "
      "{} of {} cells; Delta=nu stripe cools in {}/{} rows, bounded in {}; inset min sign "
      "changes {}",
      on_ridge, tested, gD, gd, region, r.points.size(), cooling_rows, rn.n2, bounded_rows,
      min_changes);
  return out;
}

// 7. Phonon rate equation.
Outcome rate_equation_fidelity() {
  double worst = 0.0, worst_balance = 0.0;
  for (const auto& p : {presets::strong_coupling(), presets::map_moderate_decay()}) {
    const auto r = transition_rates(p);
    const auto p0 = PhononDistribution::thermal(2.0, 100);
    std::vector<double> times;
    for (int i = 0; i <= 200; ++i) times.push_back(10.0 / r.Gamma * i / 200.0);
    const auto traj = evolve(r, p0, times);
    for (const auto& pt : traj.points)
      worst = std::max(worst, std::abs(pt.mean_m - mean_m_closed_form(r, p0.mean(), pt.t).mean_m));
    const auto st = steady_state(r, 60);
    for (int m = 0; m < 60; ++m) {
      const double lhs = r.A_minus * st.distribution[m + 1];
      const double rhs = r.A_plus * st.distribution[m];
      if (rhs > 0.0) worst_balance = std::max(worst_balance, std::abs(lhs - rhs) / rhs);
    }
  }
  return {worst < 1e-6 && worst_balance < 1e-9,
          fmt::format("max |<m> - closed form| = {:.2e}, max balance residual = {:.2e}", worst,
                      worst_balance)};
}

// 8. Master-equation oracle against perturbative rates.
Outcome oracle_agreement() {
  Outcome out;
  const auto points = default_validation_points();
  const ValidationOptions opt;
  for (const auto& pt : points) {
    const auto r = run_validation(pt, opt);
    const double eps2 = std::norm(derive(pt.params).epsilon);
    const bool ok = r.pass && pt.params.eta == 0.05 && eps2 <= 0.01 && r.min_eigenvalue > -1e-8 &&
                    opt.fine.n_max == 2 && opt.fine.m_max == 12;
    out.pass = out.pass && ok;
    if (!out.detail.empty()) out.detail += "; ";
    if (r.error) {
      out.detail += fmt::format("{}: {}", pt.name, *r.error);
      continue;
    }
    out.detail += fmt::format(
        "{}: Gamma_fit/Gamma = {:.3f}, m_inf = {:.4f} vs {:.4f}, coarse gap {:.2f}%, "
        "|eps|^2 = {:.1e}, min eig {:.1e}",
        pt.name, r.Gamma_fit / r.Gamma_pert, r.m_inf_fit, r.m_st_pert,
        100.0 * std::abs(r.Gamma_fit_coarse - r.Gamma_fit) / r.Gamma_fit, eps2, r.min_eigenvalue);
  }
  if (points.size() < 3) out.pass = false;
  return out;
}

// 9. Oracle steady state at eta = 0 against the analytic dark state.
Outcome dark_state_contract() {
  double worst_pe = 0.0, worst_fid = 0.0, worst_damped = 0.0;
  for (double Delta : {2.5, -3.0, 4.0}) {
    auto p = presets::strong_coupling();
    p.eta = 0.0;
    p.omega_P = 0.02;
    p.Delta = Delta;
    p.delta_c2 = p.delta1 - Delta;
    OracleConfig cfg;
    cfg.n_max = 8;
    cfg.m_max = 0;
    const auto L = build_generator(p, cfg);
    const Eigen::MatrixXcd rho = steady_state_direct(L);
    worst_pe = std::max(worst_pe, std::abs(expectation(rho, excited_projector(L))));

    const auto overlap = [&](cplx alpha, cplx c1, cplx c2) {
      Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(L.dim));
      cplx coef = 1.0;
      for (int k = 0; k <= cfg.n_max; ++k) {
        if (k > 0) coef *= alpha / std::sqrt(static_cast<double>(k));
        v(static_cast<Eigen::Index>(L.index(0, k, 0))) = c1 * coef;
        v(static_cast<Eigen::Index>(L.index(1, k, 0))) = c2 * coef;
      }
      v.normalize();
      return 1.0 - std::real(v.dot(rho * v));
    };
    const auto w = *dark_state_weights(p).three_photon;
    worst_fid = std::max(worst_fid, overlap(*derive(p).epsilon_prime, w[0], w[1]));
    const cplx eps = derive(p).epsilon;
    worst_damped = std::max(
        worst_damped, overlap(eps, eps * p.g * std::cos(p.varphi), -0.5 * p.omega_L));
  }
  return {worst_pe < 1e-10 && worst_fid < 1e-6,
          fmt::format("max excited population {:.1e}, max 1 - F = {:.1e} "
                      "(damped-amplitude form {:.1e})",
                      worst_pe, worst_fid, worst_damped)};
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> check;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "resolvent identity", 1.0, resolvent_identity},
      {2, "three-photon transparency", 1.0, three_photon_transparency},
      {3, "dual-path rate identity", 1.0, dual_path},
      {4, "limit collapse", 1.0, limit_collapse},
      {5, "strong-coupling figures", 5.0, strong_coupling_figures},
      {6, "scan reproduction", 60.0, scan_reproduction},
      {7, "rate-equation fidelity", 1.0, rate_equation_fidelity},
      {8, "oracle agreement", 1800.0, oracle_agreement},
      {9, "dark-state contract", 60.0, dark_state_contract},
  };
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  int failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, fmt::format("threw: {}", e.what())};
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = o.pass && dt < c.budget_s;
    failures += pass ? 0 : 1;
    fmt::print("{} criterion {} ({}): {} [{:.2f} s of {:.0f} s]\n", pass ? "PASS" : "FAIL", c.id,
               c.name, o.detail, dt, c.budget_s);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
