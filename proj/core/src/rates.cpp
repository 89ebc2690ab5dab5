#include "cavcool/rates.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>

#include "cavcool/errors.hpp"
#include "cavcool/resolvent.hpp"
#include "pole_guard.hpp"

namespace cavcool {

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr double kRatesPoleTol = 1e-6;
constexpr double kResonanceTol = 1e-9;

// Upper sign of the paper-style "+-" for heating.
double sign_of(Sideband s) { return s == Sideband::heating ? 1.0 : -1.0; }

struct Responses {
  cplx f;
  cplx F_gamma;
  cplx F_kappa;
};

Responses responses_at(const SystemParams& p, double zeta, const char* factor) {
  Responses r;
  r.f = detail::guarded_char_poly(p, zeta, factor, kRatesPoleTol);
  const double tp = zeta - Delta0(p);
  r.F_gamma = p.g * tp / r.f;
  r.F_kappa = (tp * cplx(p.delta_c2 + zeta, 0.5 * p.gamma2) -
               0.25 * p.omega_L * p.omega_L) /
              r.f;
  return r;
}

void require_tpr(const SystemParams& p, std::string_view what) {
  const double d = three_photon_detuning(p);
  if (!(std::abs(d) < kResonanceTol * p.nu))
    throw PreconditionError(
        fmt::format("{} requires three-photon resonance, got delta_TP = {:.3g}", what, d));
}

double eit_denominator(const SystemParams& p, double width, double bracket) {
  return p.nu * p.nu * 0.25 * width * width + bracket * bracket;
}

}  // namespace

std::optional<double> RatePair::m_st() const {
  const double G = Gamma();
  if (!(G > 0.0)) return std::nullopt;
  return A_plus / G;
}

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::small_cooperativity: return "small_cooperativity";
    case Regime::eit: return "eit";
    case Regime::eit_modified: return "eit_modified";
    case Regime::resonant_drive: return "resonant_drive";
    case Regime::strong_coupling: return "strong_coupling";
  }
  return "unknown";
}

std::optional<Regime> regime_from_string(std::string_view s) {
  for (Regime r : {Regime::small_cooperativity, Regime::eit, Regime::eit_modified,
                   Regime::resonant_drive, Regime::strong_coupling})
    if (to_string(r) == s) return r;
  return std::nullopt;
}

AmplitudeSet amplitudes(const SystemParams& p, Sideband s) {
  const DerivedParams d = derive(p);
  const double sn = sign_of(s) * p.nu;
  const double c = std::cos(p.varphi);
  const double sphi = std::sin(p.varphi);
  const double half_P = 0.5 * p.omega_P;
  const double omega_sq_4 = 0.25 * p.omega_L * p.omega_L;
  const double gc = p.g * c;

  const Responses r0 = responses_at(p, p.Delta, "f(Delta)");
  const double zeta1 = p.Delta - sn;
  const Responses r1 = responses_at(
      p, zeta1, s == Sideband::heating ? "f(Delta-nu)" : "f(Delta+nu)");
  const cplx cav1 = kI * p.kappa + zeta1;
  const cplx ff = r1.f * r0.f;

  AmplitudeSet a;
  a.T_D = -kI * p.eta * half_P * c * r0.F_gamma;
  a.T_L_gamma = -kI * d.eta_L * half_P * omega_sq_4 * sn * cav1 * gc / ff;
  a.T_L_kappa = -kI * d.eta_L * half_P * omega_sq_4 * sn * gc * gc / ff;
  a.T_C_gamma = -d.eta_C * half_P * sphi * r1.F_gamma *
                (gc * c * r0.F_gamma + cav1 * r0.F_kappa);
  a.T_C_kappa = -d.eta_C * half_P * 0.5 * std::sin(2.0 * p.varphi) * p.g *
                (r1.F_gamma * r0.F_kappa + r0.F_gamma * r1.F_kappa);
  return a;
}

double diffusion(const SystemParams& p) {
  const double c = std::cos(p.varphi);
  const Responses r0 = responses_at(p, p.Delta, "f(Delta)");
  const cplx T_D = -kI * p.eta * (0.5 * p.omega_P) * c * r0.F_gamma;
  return p.gamma() * p.W2 * std::norm(T_D);
}

RateSet transition_rates(const SystemParams& p) {
  RateSet r;
  const AmplitudeSet hp = amplitudes(p, Sideband::heating);
  const AmplitudeSet cm = amplitudes(p, Sideband::cooling);
  r.D = p.gamma() * p.W2 * std::norm(hp.T_D);
  const auto assemble = [&](const AmplitudeSet& a) {
    return r.D + p.gamma2 * std::norm(a.T_L_gamma + a.T_C_gamma) +
           2.0 * p.kappa * std::norm(a.T_L_kappa + a.T_C_kappa);
  };
  r.A_plus = assemble(hp);
  r.A_minus = assemble(cm);
  r.Gamma = r.A_minus - r.A_plus;
  if (r.Gamma > 0.0) r.m_st = r.A_plus / r.Gamma;
  if (p.gamma1 > 0.0)
    r.warnings.emplace_back(
        "gamma1 > 0: rates keep only the |e> -> |g2> emission branch");
  return r;
}

RatePair closed_form_tpr(const SystemParams& p) {
  require_tpr(p, "closed_form_tpr");
  const DerivedParams d = derive(p);
  const double gamma = p.gamma();
  const double pre = std::norm(d.epsilon) * d.eta_tilde_sq * p.g * p.g * gamma;
  const auto rate = [&](double sign, double Cs) {
    const double bracket = p.omega_L * p.omega_L / (4.0 * p.nu) - p.nu +
                           sign * p.delta1 +
                           gamma / (2.0 * p.kappa) * Cs * (p.nu - sign * p.Delta);
    const double w = 1.0 + Cs;
    return pre * w / (0.25 * gamma * gamma * w * w + bracket * bracket);
  };
  return {rate(1.0, d.C_plus), rate(-1.0, d.C_minus)};
}

RatePair closed_form_limits(const SystemParams& p, Regime regime) {
  require_tpr(p, to_string(regime));
  const DerivedParams d = derive(p);
  const double gamma = p.gamma();
  const double nu = p.nu;
  const double gc2 = p.g * p.g * std::cos(p.varphi) * std::cos(p.varphi);
  const double pre = std::norm(d.epsilon) * d.eta_tilde_sq;
  const double omega_sq_4 = 0.25 * p.omega_L * p.omega_L;
  const double bare = gamma * p.g * p.g * nu * nu;

  RatePair out;
  switch (regime) {
    case Regime::small_cooperativity: {
      for (double sign : {1.0, -1.0}) {
        const double dm = p.Delta - sign * nu;
        const double shift = 0.5 * gamma * p.kappa * d.C * nu * (nu - sign * p.Delta) /
                             (p.kappa * p.kappa + dm * dm);
        const double bracket = omega_sq_4 - nu * (nu - sign * p.delta1) + shift;
        (sign > 0 ? out.A_plus : out.A_minus) =
            pre * bare / eit_denominator(p, gamma, bracket);
      }
      break;
    }
    case Regime::eit: {
      for (double sign : {1.0, -1.0}) {
        const double bracket = omega_sq_4 - nu * (nu - sign * p.delta1);
        (sign > 0 ? out.A_plus : out.A_minus) =
            pre * bare / eit_denominator(p, gamma, bracket);
      }
      break;
    }
    case Regime::eit_modified: {
      for (double sign : {1.0, -1.0}) {
        const double detuning = nu - sign * p.Delta;
        if (!(p.kappa < std::abs(detuning)))
          throw PreconditionError(fmt::format(
              "eit_modified requires kappa << |Delta {} nu|, got kappa = {}, |Delta {} nu| = {}",
              sign > 0 ? '-' : '+', p.kappa, sign > 0 ? '-' : '+', std::abs(detuning)));
        const double bracket =
            omega_sq_4 + nu * gc2 / detuning - nu * (nu - sign * p.delta1);
        (sign > 0 ? out.A_plus : out.A_minus) =
            pre * bare / eit_denominator(p, gamma, bracket);
      }
      break;
    }
    case Regime::resonant_drive: {
      if (!(std::abs(p.Delta) < kResonanceTol * nu))
        throw PreconditionError(
            fmt::format("resonant_drive requires Delta = 0, got Delta = {}", p.Delta));
      const double C0 = d.C * p.kappa * p.kappa / (p.kappa * p.kappa + nu * nu);
      // Effective linewidth gamma (1 + C0); the Rabi shift carries gamma C0.
      const double gamma_prime = gamma * (1.0 + C0);
      const double shift = nu * nu / p.kappa * 0.5 * gamma * C0;
      for (double sign : {1.0, -1.0}) {
        const double bracket = omega_sq_4 - nu * (nu - sign * p.delta1) + shift;
        (sign > 0 ? out.A_plus : out.A_minus) =
            pre * gamma_prime * p.g * p.g * nu * nu /
            eit_denominator(p, gamma_prime, bracket);
      }
      break;
    }
    case Regime::strong_coupling: {
      if (!(std::abs(p.Delta - nu) < kResonanceTol * nu))
        throw PreconditionError(
            fmt::format("strong_coupling requires Delta = nu, got Delta = {}", p.Delta));
      if (!(p.kappa < nu))
        throw PreconditionError(
            fmt::format("strong_coupling requires kappa << nu, got kappa = {}", p.kappa));
      if (!(d.C > 1.0))
        throw PreconditionError(
            fmt::format("strong_coupling requires C >> 1, got C = {}", d.C));
      out.A_plus = pre * 4.0 * p.g * p.g / (d.C * gamma);
      const double w = 1.0 + d.C_minus;
      const double off = p.delta1 - d.delta_opt;
      out.A_minus = pre * p.g * p.g * gamma * w / (0.25 * gamma * gamma * w * w + off * off);
      break;
    }
  }
  return out;
}

RatePair cavity_dominated_rates(const SystemParams& p) {
  const auto assemble = [&](const AmplitudeSet& a) {
    return p.gamma2 * std::norm(a.T_C_gamma) + 2.0 * p.kappa * std::norm(a.T_C_kappa);
  };
  return {assemble(amplitudes(p, Sideband::heating)),
          assemble(amplitudes(p, Sideband::cooling))};
}

PhononSteadyState steady_state(const RateSet& r, int m_max) {
  if (!(r.Gamma > 0.0))
    throw HeatingError(fmt::format(
        "no steady state: Gamma = A- - A+ = {:.6g} is not positive", r.Gamma));
  const double ratio = r.A_plus / r.A_minus;
  PhononSteadyState s;
  s.distribution = PhononDistribution::geometric(ratio, m_max);
  s.m_st = r.A_plus / (r.A_minus - r.A_plus);
  s.tail_mass = std::pow(ratio, m_max + 1);
  return s;
}

double tpr_optimal_delta1(const SystemParams& p) {
  const double gc2 = p.g * p.g * std::cos(p.varphi) * std::cos(p.varphi);
  const double dp = p.Delta + p.nu;
  return p.omega_L * p.omega_L / (4.0 * p.nu) - p.nu +
         dp * gc2 / (p.kappa * p.kappa + dp * dp);
}

std::vector<double> sideband_real_roots(const SystemParams& p, double lo, double hi,
                                        Sideband s, std::size_t samples) {
  if (!(hi > lo) || samples < 2)
    throw ParamError(fmt::format("invalid root search range [{}, {}]", lo, hi));
  const double shift = s == Sideband::cooling ? p.nu : -p.nu;
  const auto re_f = [&](double Delta) { return char_poly(p, Delta + shift).real(); };

  std::vector<double> roots;
  const double step = (hi - lo) / static_cast<double>(samples - 1);
  double x0 = lo;
  double f0 = re_f(x0);
  for (std::size_t i = 1; i < samples; ++i) {
    const double x1 = i + 1 == samples ? hi : lo + step * static_cast<double>(i);
    const double f1 = re_f(x1);
    if (f0 == 0.0) {
      roots.push_back(x0);
    } else if (f0 * f1 < 0.0) {
      const auto tol = [](double a, double b) {
        return std::abs(b - a) < 1e-13 * std::max(1.0, std::abs(a));
      };
      const auto [a, b] = boost::math::tools::bisect(re_f, x0, x1, tol);
      roots.push_back(0.5 * (a + b));
    }
    x0 = x1;
    f0 = f1;
  }
  if (f0 == 0.0) roots.push_back(x0);
  if (roots.empty())
    throw NoRootError(fmt::format("Re f(Delta {} nu) has no real root in [{}, {}]",
                                  s == Sideband::cooling ? '+' : '-', lo, hi));
  return roots;
}

std::vector<double> optimal_detunings(const SystemParams& p, DetuningMode mode,
                                      double lo, double hi) {
  if (mode == DetuningMode::tpr_max_cooling) return {tpr_optimal_delta1(p)};
  return sideband_real_roots(p, lo, hi, Sideband::cooling);
}

}  // namespace cavcool
