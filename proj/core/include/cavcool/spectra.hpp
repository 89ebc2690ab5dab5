#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "cavcool/params.hpp"

namespace cavcool {

enum class Channel { atom, cavity };

std::string_view to_string(Channel c);

/// Fano response of the atomic channel, g (zeta - Delta0) / f(zeta).
cplx response_gamma(const SystemParams& p, double zeta);

/// Fano response of the cavity channel. The numerator carries the partial
/// width gamma2 while the denominator f carries the total width.
cplx response_kappa(const SystemParams& p, double zeta);

/// Excitation rate (units of nu) at probe detuning `Delta`:
/// atom:   (Omega_P/2)^2 gamma2 |F_gamma|^2
/// cavity: (Omega_P/2)^2 2 kappa |F_kappa|^2
double excitation_rate(const SystemParams& p, double Delta, Channel channel);

std::vector<double> excitation_spectrum(const SystemParams& p,
                                        std::span<const double> Delta_grid,
                                        Channel channel);

struct DarkFeature {
  double Delta = 0.0;
  Channel channel = Channel::atom;
  // Spectrum value at the minimum relative to the largest value in range.
  double depth = 0.0;
};

struct DarkFeatureOptions {
  std::size_t samples = 4001;
  double tolerance = 1e-6;
};

/// Local minima of both excitation spectra on [lo, hi], refined below the
/// sampling grid. The exact atomic zero at Delta0 is always reported when it
/// lies in range.
std::vector<DarkFeature> locate_dark_features(const SystemParams& p, double lo,
                                              double hi,
                                              DarkFeatureOptions options = {});

}  // namespace cavcool
