#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cavcool/params.hpp"
#include "cavcool/phonons.hpp"

namespace cavcool {

/// Motional sideband of a scattering process: `heating` raises the phonon
/// number by one (the "+" amplitudes), `cooling` lowers it (the "-" ones).
enum class Sideband { heating, cooling };

/// First-order Lamb-Dicke scattering amplitudes (dimensionless, nu = 1):
/// T_D carries the recoil of the spontaneously emitted photon, T_L and T_C
/// the mechanical effect of the control laser and of the cavity photon,
/// each terminated either by atomic (gamma) or cavity (kappa) emission.
struct AmplitudeSet {
  cplx T_D{};
  cplx T_L_gamma{};
  cplx T_L_kappa{};
  cplx T_C_gamma{};
  cplx T_C_kappa{};
};

struct RateSet {
  double D = 0.0;
  double A_plus = 0.0;
  double A_minus = 0.0;
  double Gamma = 0.0;
  std::optional<double> m_st;  // only when Gamma > 0
  std::vector<std::string> warnings;
};

struct RatePair {
  double A_plus = 0.0;
  double A_minus = 0.0;

  double Gamma() const noexcept { return A_minus - A_plus; }
  std::optional<double> m_st() const;
};

/// Asymptotic rate formulas around three-photon resonance.
enum class Regime {
  small_cooperativity,  // C_pm << 1, cavity shift kept in the bracket
  eit,                  // C -> 0 or far-detuned pump: bare EIT cooling
  eit_modified,         // kappa << |Delta -+ nu|: EIT with shifted Rabi frequency
  resonant_drive,       // Delta = 0: EIT with modified linewidth
  strong_coupling,      // Delta = nu, kappa << nu, C >> 1
};

std::string_view to_string(Regime r);
std::optional<Regime> regime_from_string(std::string_view s);

/// Throws PoleError when f(Delta) or f(Delta -+ nu) is inside the guard band.
AmplitudeSet amplitudes(const SystemParams& p, Sideband s);

double diffusion(const SystemParams& p);

/// Coherent assembly of heating/cooling rates from `amplitudes`.
RateSet transition_rates(const SystemParams& p);

/// Closed form valid on the three-photon resonance. Throws PreconditionError
/// unless |delta_TP| < 1e-9 nu.
RatePair closed_form_tpr(const SystemParams& p);

RatePair closed_form_limits(const SystemParams& p, Regime regime);

/// Rates when the mechanical effect is carried by the cavity photon only.
RatePair cavity_dominated_rates(const SystemParams& p);

struct PhononSteadyState {
  PhononDistribution distribution;
  double m_st = 0.0;       // untruncated closed form A+/(A- - A+)
  double tail_mass = 0.0;  // probability beyond m_max before renormalization
};

/// Throws HeatingError when Gamma <= 0.
PhononSteadyState steady_state(const RateSet& r, int m_max);

enum class DetuningMode { tpr_max_cooling, sideband_real_root };

/// delta1 that puts |g2,0> on the red sideband of the dressed state at
/// three-photon resonance, for the pump detuning p.Delta.
double tpr_optimal_delta1(const SystemParams& p);

/// All Delta in [lo, hi] with Re f(Delta + s nu) = 0, s = +1 for `cooling`
/// (maximizes A-) and -1 for `heating`. Throws NoRootError if none.
std::vector<double> sideband_real_roots(const SystemParams& p, double lo, double hi,
                                        Sideband s = Sideband::cooling,
                                        std::size_t samples = 4000);

/// Dispatcher: `tpr_max_cooling` returns {delta1}; `sideband_real_root`
/// returns the Delta roots on [lo, hi].
std::vector<double> optimal_detunings(const SystemParams& p, DetuningMode mode,
                                      double lo = -50.0, double hi = 50.0);

}  // namespace cavcool
