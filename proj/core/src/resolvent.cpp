#include "cavcool/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "cavcool/errors.hpp"

namespace cavcool {

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr double kResonanceTol = 1e-9;

}  // namespace

Eigen::Matrix3cd ResolventBlock::matrix() const {
  Eigen::Matrix3cd m;
  m(kE0, kE0) = ee;
  m(kG1_0, kG1_0) = g1g1;
  m(kG2_1, kG2_1) = g2g2;
  m(kE0, kG1_0) = m(kG1_0, kE0) = g1e;
  m(kE0, kG2_1) = m(kG2_1, kE0) = g2e;
  m(kG1_0, kG2_1) = m(kG2_1, kG1_0) = g1g2;
  return m;
}

Eigen::Matrix3cd manifold_generator(const SystemParams& p) {
  const double gc = p.g_eff();
  Eigen::Matrix3cd m = Eigen::Matrix3cd::Zero();
  m(kE0, kE0) = cplx(-p.delta_c2, -0.5 * p.gamma());
  m(kG1_0, kG1_0) = Delta0(p);
  m(kG2_1, kG2_1) = cplx(0.0, -p.kappa);
  m(kE0, kG1_0) = m(kG1_0, kE0) = 0.5 * p.omega_L;
  m(kE0, kG2_1) = m(kG2_1, kE0) = gc;
  return m;
}

cplx char_poly(const SystemParams& p, cplx zeta) {
  const double gc = p.g_eff();
  const cplx cav = kI * p.kappa + zeta;
  const cplx exc = p.delta_c2 + zeta + kI * (0.5 * p.gamma());
  const cplx tp = zeta - Delta0(p);
  return cav * (exc * tp - 0.25 * p.omega_L * p.omega_L) - gc * gc * tp;
}

DressedSpectrum dressed_states(const SystemParams& p) {
  Eigen::ComplexEigenSolver<Eigen::Matrix3cd> solver(manifold_generator(p),
                                                     /*computeEigenvectors=*/false);
  DressedSpectrum s;
  for (int i = 0; i < 3; ++i) {
    // Newton polish on the cubic; f'(z) = (iκ+z)(e+t) + e t - W²/4 - g²c².
    cplx z = solver.eigenvalues()[i];
    for (int k = 0; k < 2; ++k) {
      const cplx cav = kI * p.kappa + z;
      const cplx exc = p.delta_c2 + z + kI * (0.5 * p.gamma());
      const cplx tp = z - Delta0(p);
      const cplx df = cav * (exc + tp) + exc * tp - 0.25 * p.omega_L * p.omega_L -
                      p.g_eff() * p.g_eff();
      const cplx f = char_poly(p, z);
      if (df == cplx(0.0) || f == cplx(0.0)) break;
      const cplx next = z - f / df;
      if (!(std::abs(char_poly(p, next)) < std::abs(f))) break;
      z = next;
    }
    s.omega_eff[i] = z;
  }
  std::sort(s.omega_eff.begin(), s.omega_eff.end(), [](cplx a, cplx b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() < b.imag();
  });
  return s;
}

ResolventBlock resolvent_block(const SystemParams& p, cplx zeta) {
  const cplx f = char_poly(p, zeta);
  const double scale = std::max(1.0, std::pow(std::abs(zeta), 3));
  if (std::abs(f) < 1e-12 * scale)
    throw PoleError("f(zeta)",
                    fmt::format("resolvent evaluated at a pole: |f({}{:+}i)| = {:.3g}",
                                zeta.real(), zeta.imag(), std::abs(f)));

  const double gc = p.g_eff();
  const double half_omega = 0.5 * p.omega_L;
  const cplx cav = kI * p.kappa + zeta;
  const cplx exc = p.delta_c2 + kI * (0.5 * p.gamma()) + zeta;
  const cplx tp = zeta - Delta0(p);

  ResolventBlock b;
  b.ee = tp * cav / f;
  b.g2g2 = (exc * tp - half_omega * half_omega) / f;
  b.g1g1 = (exc * cav - gc * gc) / f;
  b.g1g2 = gc * half_omega / f;
  b.g1e = cav * half_omega / f;
  b.g2e = gc * tp / f;
  return b;
}

DarkStateWeights dark_state_weights(const SystemParams& p) {
  DarkStateWeights w;
  const double gc = p.g_eff();
  const double half_omega = 0.5 * p.omega_L;

  const auto normalized = [](double a, double b) -> std::array<double, 2> {
    const double n = std::hypot(a, b);
    if (n == 0.0) return {1.0, 0.0};
    return {a / n, b / n};
  };

  if (p.Delta != 0.0) {
    const double eps_prime = p.omega_P / (2.0 * p.Delta);
    w.three_photon = normalized(eps_prime * gc, -half_omega);
  }
  w.two_photon = normalized(gc, -half_omega);
  w.three_photon_resonant = std::abs(three_photon_detuning(p)) < kResonanceTol * p.nu;
  w.two_photon_resonant = std::abs(p.delta1 - p.delta_c2) < kResonanceTol * p.nu;
  return w;
}

DressedSpectrum match_by_proximity(const DressedSpectrum& previous,
                                   const DressedSpectrum& next) {
  std::array<int, 3> perm{0, 1, 2};
  std::array<int, 3> best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (int i = 0; i < 3; ++i)
      cost += std::abs(previous.omega_eff[i] - next.omega_eff[perm[i]]);
    if (cost < best_cost) {
      best_cost = cost;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  DressedSpectrum out;
  for (int i = 0; i < 3; ++i) out.omega_eff[i] = next.omega_eff[best[i]];
  return out;
}

std::vector<DressedSpectrum> track_dressed_states(
    SystemParams p, std::span<const double> delta1_values) {
  std::vector<DressedSpectrum> out;
  out.reserve(delta1_values.size());
  for (double d1 : delta1_values) {
    p.delta1 = d1;
    auto s = dressed_states(p);
    out.push_back(out.empty() ? s : match_by_proximity(out.back(), s));
  }
  return out;
}

}  // namespace cavcool
