#include "cavcool/spectra.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/tools/minima.hpp>

#include "pole_guard.hpp"

namespace cavcool {

namespace {

constexpr double kSpectraPoleTol = 1e-12;

}  // namespace

std::string_view to_string(Channel c) {
  return c == Channel::atom ? "atom" : "cavity";
}

cplx response_gamma(const SystemParams& p, double zeta) {
  const cplx f = detail::guarded_char_poly(p, zeta, "f(Delta)", kSpectraPoleTol);
  return p.g * (zeta - Delta0(p)) / f;
}

cplx response_kappa(const SystemParams& p, double zeta) {
  const cplx f = detail::guarded_char_poly(p, zeta, "f(Delta)", kSpectraPoleTol);
  const cplx num = (zeta - Delta0(p)) * cplx(p.delta_c2 + zeta, 0.5 * p.gamma2) -
                   0.25 * p.omega_L * p.omega_L;
  return num / f;
}

double excitation_rate(const SystemParams& p, double Delta, Channel channel) {
  const double pump = 0.25 * p.omega_P * p.omega_P;
  if (channel == Channel::atom)
    return pump * p.gamma2 * std::norm(response_gamma(p, Delta));
  return pump * 2.0 * p.kappa * std::norm(response_kappa(p, Delta));
}

std::vector<double> excitation_spectrum(const SystemParams& p,
                                        std::span<const double> Delta_grid,
                                        Channel channel) {
  std::vector<double> out;
  out.reserve(Delta_grid.size());
  for (double d : Delta_grid) out.push_back(excitation_rate(p, d, channel));
  return out;
}

std::vector<DarkFeature> locate_dark_features(const SystemParams& p, double lo,
                                              double hi,
                                              DarkFeatureOptions options) {
  std::vector<DarkFeature> features;
  if (!(hi > lo) || options.samples < 3) return features;

  const std::size_t n = options.samples;
  const double step = (hi - lo) / static_cast<double>(n - 1);
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) grid[i] = lo + step * static_cast<double>(i);

  const double d0 = Delta0(p);
  const bool d0_in_range = d0 >= lo && d0 <= hi;

  for (Channel ch : {Channel::atom, Channel::cavity}) {
    const auto s = excitation_spectrum(p, grid, ch);
    const double peak = *std::max_element(s.begin(), s.end());
    const auto rel = [peak](double v) { return peak > 0.0 ? v / peak : 0.0; };

    std::vector<DarkFeature> found;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (!(s[i] <= s[i - 1] && s[i] < s[i + 1])) continue;
      // Golden-section/Brent refinement inside the bracketing cells.
      const auto objective = [&](double x) { return excitation_rate(p, x, ch); };
      const int bits = static_cast<int>(
          std::ceil(-std::log2(options.tolerance / std::max(1.0, std::abs(grid[i])))));
      const auto [x, v] = boost::math::tools::brent_find_minima(
          objective, grid[i - 1], grid[i + 1], std::clamp(bits, 8, 26));
      found.push_back({x, ch, rel(v)});
    }

    if (ch == Channel::atom && d0_in_range) {
      std::erase_if(found, [&](const DarkFeature& f) {
        return std::abs(f.Delta - d0) <= 2.0 * step;
      });
      found.push_back({d0, ch, rel(excitation_rate(p, d0, ch))});
    }
    features.insert(features.end(), found.begin(), found.end());
  }

  std::sort(features.begin(), features.end(),
            [](const DarkFeature& a, const DarkFeature& b) {
              if (a.channel != b.channel) return a.channel < b.channel;
              return a.Delta < b.Delta;
            });
  return features;
}

}  // namespace cavcool
