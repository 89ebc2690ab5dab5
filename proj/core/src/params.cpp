#include "cavcool/params.hpp"

#include <array>
#include <cmath>
#include <fmt/format.h>

#include "cavcool/errors.hpp"

namespace cavcool {

namespace {

struct FieldEntry {
  std::string_view name;
  double SystemParams::*member;
};

constexpr std::array<FieldEntry, 15> kFields{{
    {"nu", &SystemParams::nu},
    {"gamma1", &SystemParams::gamma1},
    {"gamma2", &SystemParams::gamma2},
    {"kappa", &SystemParams::kappa},
    {"g", &SystemParams::g},
    {"omega_L", &SystemParams::omega_L},
    {"omega_P", &SystemParams::omega_P},
    {"delta1", &SystemParams::delta1},
    {"delta_c2", &SystemParams::delta_c2},
    {"Delta", &SystemParams::Delta},
    {"eta", &SystemParams::eta},
    {"phi_L", &SystemParams::phi_L},
    {"phi_C", &SystemParams::phi_C},
    {"varphi", &SystemParams::varphi},
    {"W2", &SystemParams::W2},
}};

constexpr std::array<std::string_view, kFields.size()> kNames = [] {
  std::array<std::string_view, kFields.size()> names{};
  for (std::size_t i = 0; i < kFields.size(); ++i) names[i] = kFields[i].name;
  return names;
}();

const FieldEntry* find_field(std::string_view name) {
  for (const auto& f : kFields)
    if (f.name == name) return &f;
  return nullptr;
}

}  // namespace

double SystemParams::g_eff() const { return g * std::cos(varphi); }

double Delta0(const SystemParams& p) noexcept { return p.delta1 - p.delta_c2; }

double three_photon_detuning(const SystemParams& p) noexcept {
  return p.Delta - Delta0(p);
}

DerivedParams derive(const SystemParams& p) {
  DerivedParams d;
  d.eta_L = p.eta * std::cos(p.phi_L);
  d.eta_C = p.eta * std::cos(p.phi_C);
  const double c = std::cos(p.varphi);
  const double s = std::sin(p.varphi);
  d.eta_tilde_sq = d.eta_L * d.eta_L * c * c + d.eta_C * d.eta_C * s * s;
  d.epsilon = cplx(0.5 * p.omega_P) / cplx(p.Delta, p.kappa);
  if (p.Delta != 0.0) d.epsilon_prime = p.omega_P / (2.0 * p.Delta);

  const double g2c2 = p.g * p.g * c * c;
  d.C = g2c2 / (0.5 * p.kappa * p.gamma());
  const double k2 = p.kappa * p.kappa;
  const double dp = p.Delta - p.nu;
  const double dm = p.Delta + p.nu;
  d.C_plus = d.C * k2 / (k2 + dp * dp);
  d.C_minus = d.C * k2 / (k2 + dm * dm);

  d.Delta0 = Delta0(p);
  d.delta_TP = three_photon_detuning(p);
  d.delta_opt =
      p.omega_L * p.omega_L / (4.0 * p.nu) + g2c2 / (2.0 * p.nu) - p.nu;
  d.alpha = p.eta * p.eta * p.omega_P * p.omega_P / p.nu;
  return d;
}

ValidationReport validate(const SystemParams& p, double m_expected,
                          ValidationThresholds thresholds) {
  ValidationReport r;
  r.lamb_dicke = p.eta * std::sqrt(2.0 * m_expected + 1.0);
  r.lamb_dicke_ok = r.lamb_dicke < thresholds.lamb_dicke;
  r.photon_number = std::norm(derive(p).epsilon);
  r.weak_pump_ok = r.photon_number < thresholds.photon_number;

  if (!r.lamb_dicke_ok)
    r.warnings.push_back(fmt::format(
        "Lamb-Dicke condition violated: eta*sqrt(2m+1) = {:.4g} >= {:.4g}",
        r.lamb_dicke, thresholds.lamb_dicke));
  if (!r.weak_pump_ok)
    r.warnings.push_back(fmt::format(
        "weak-pump condition violated: |epsilon|^2 = {:.4g} >= {:.4g}",
        r.photon_number, thresholds.photon_number));
  if (p.Delta == 0.0)
    r.warnings.push_back(
        "Delta = 0: displaced-state amplitude epsilon' = Omega_P/(2 Delta) is "
        "undefined");
  if (p.gamma1 > 0.0)
    r.warnings.push_back(
        "gamma1 > 0: analytic rates keep only the |e> -> |g2> emission branch");
  if (p.eta >= 1.0)
    r.warnings.push_back("eta >= 1: outside the Lamb-Dicke expansion");
  return r;
}

void check_well_formed(const SystemParams& p) {
  for (const auto& f : kFields) {
    if (!std::isfinite(p.*(f.member)))
      throw ParamError(fmt::format("parameter '{}' is not finite", f.name));
  }
  const auto non_negative = [&](std::string_view name, double v) {
    if (v < 0.0)
      throw ParamError(fmt::format("parameter '{}' must be non-negative, got {}",
                                   name, v));
  };
  non_negative("gamma1", p.gamma1);
  non_negative("gamma2", p.gamma2);
  non_negative("kappa", p.kappa);
  non_negative("g", p.g);
  non_negative("omega_L", p.omega_L);
  non_negative("omega_P", p.omega_P);
  non_negative("eta", p.eta);
  non_negative("W2", p.W2);
  if (p.nu <= 0.0)
    throw ParamError(fmt::format("parameter 'nu' must be positive, got {}", p.nu));
  if (p.gamma2 <= 0.0)
    throw ParamError("parameter 'gamma2' must be positive");
  if (p.eta >= 1.0)
    throw ParamError(fmt::format("parameter 'eta' must be < 1, got {}", p.eta));
}

std::span<const std::string_view> field_names() { return kNames; }

bool is_field(std::string_view name) { return find_field(name) != nullptr; }

double get_field(const SystemParams& p, std::string_view name) {
  const auto* f = find_field(name);
  if (!f) throw ParamError(fmt::format("unknown parameter '{}'", name));
  return p.*(f->member);
}

void set_field(SystemParams& p, std::string_view name, double value) {
  const auto* f = find_field(name);
  if (!f) throw ParamError(fmt::format("unknown parameter '{}'", name));
  p.*(f->member) = value;
}

}  // namespace cavcool
