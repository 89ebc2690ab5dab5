#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cavcool {

using cplx = std::complex<double>;

/// Physical inputs of the pumped cavity + Lambda atom + harmonic trap model.
///
/// All frequencies and rates are expressed in units of the trap frequency
/// `nu`, which defaults to 1. `kappa` is the cavity *field* decay rate, so
/// the bare cavity linewidth is 2*kappa. `gamma1`/`gamma2` are the partial
/// decay rates of |e> into |g1>/|g2>.
struct SystemParams {
  double nu = 1.0;
  double gamma1 = 0.0;
  double gamma2 = 10.0;
  double kappa = 2.0;
  double g = 20.0;
  double omega_L = 12.0;
  double omega_P = 0.2;
  double delta1 = 10.0;
  double delta_c2 = 20.0;
  double Delta = 0.0;
  double eta = 0.05;
  double phi_L = 0.0;
  double phi_C = 0.0;
  double varphi = 0.0;
  double W2 = 1.0;

  double gamma() const noexcept { return gamma1 + gamma2; }
  /// Position-projected vacuum Rabi frequency g*cos(varphi).
  double g_eff() const;

  bool operator==(const SystemParams&) const = default;
};

struct DerivedParams {
  double eta_L = 0.0;
  double eta_C = 0.0;
  double eta_tilde_sq = 0.0;
  cplx epsilon{};
  std::optional<double> epsilon_prime;  // empty when Delta == 0
  double C = 0.0;
  double C_plus = 0.0;
  double C_minus = 0.0;
  double delta_TP = 0.0;
  double Delta0 = 0.0;
  double delta_opt = 0.0;
  double alpha = 0.0;
};

struct ValidationReport {
  double lamb_dicke = 0.0;  // eta * sqrt(2 m + 1)
  bool lamb_dicke_ok = true;
  double photon_number = 0.0;  // |epsilon|^2
  bool weak_pump_ok = true;
  std::vector<std::string> warnings;
};

struct ValidationThresholds {
  double lamb_dicke = 0.1;
  double photon_number = 0.1;
};

/// Three-photon detuning delta_c2 + Delta - delta1, evaluated as
/// Delta - Delta0 so that it is exactly zero iff Delta == Delta0.
double three_photon_detuning(const SystemParams& p) noexcept;
double Delta0(const SystemParams& p) noexcept;

DerivedParams derive(const SystemParams& p);

/// Regime diagnostics only: never throws, callers decide what to do.
ValidationReport validate(const SystemParams& p, double m_expected,
                          ValidationThresholds thresholds = {});

/// Hard well-formedness gate used by the I/O layer. Throws ParamError.
void check_well_formed(const SystemParams& p);

// Name-based field access, used by parameter files, `--set` overrides and
// scan axes. Names are exactly the member names above.
std::span<const std::string_view> field_names();
bool is_field(std::string_view name);
double get_field(const SystemParams& p, std::string_view name);
void set_field(SystemParams& p, std::string_view name, double value);

}  // namespace cavcool
