#include "cavcool/phonons.hpp"

#include <cmath>
#include <numeric>

#include "cavcool/errors.hpp"

namespace cavcool {

PhononDistribution::PhononDistribution(std::vector<double> p) : p_(std::move(p)) {
  if (p_.empty()) throw ParamError("phonon distribution needs at least one level");
  for (double v : p_)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw ParamError("phonon occupations must be finite and non-negative");
}

PhononDistribution PhononDistribution::geometric(double ratio, int m_max) {
  if (m_max < 0) throw ParamError("m_max must be non-negative");
  if (!(ratio >= 0.0 && ratio < 1.0))
    throw ParamError("geometric ratio must lie in [0, 1)");
  std::vector<double> p(static_cast<std::size_t>(m_max) + 1);
  double w = 1.0 - ratio;
  for (auto& v : p) {
    v = w;
    w *= ratio;
  }
  const double norm = std::accumulate(p.begin(), p.end(), 0.0);
  for (auto& v : p) v /= norm;
  return PhononDistribution(std::move(p));
}

PhononDistribution PhononDistribution::thermal(double mean, int m_max) {
  if (!(mean >= 0.0)) throw ParamError("thermal mean must be non-negative");
  return geometric(mean / (mean + 1.0), m_max);
}

PhononDistribution PhononDistribution::fock(int m, int m_max) {
  if (m < 0 || m > m_max) throw ParamError("Fock level outside the ladder");
  std::vector<double> p(static_cast<std::size_t>(m_max) + 1, 0.0);
  p[static_cast<std::size_t>(m)] = 1.0;
  return PhononDistribution(std::move(p));
}

double PhononDistribution::total() const noexcept {
  return std::accumulate(p_.begin(), p_.end(), 0.0);
}

double PhononDistribution::mean() const noexcept {
  double s = 0.0;
  for (std::size_t m = 0; m < p_.size(); ++m) s += static_cast<double>(m) * p_[m];
  return s;
}

}  // namespace cavcool
