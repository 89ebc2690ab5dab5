#pragma once

#include <span>
#include <vector>

namespace cavcool {

/// Occupations p_0..p_{m_max} of a truncated vibrational ladder.
class PhononDistribution {
 public:
  PhononDistribution() = default;
  explicit PhononDistribution(std::vector<double> p);

  /// (1-r) r^m truncated at m_max and renormalized; r = A+/A-.
  static PhononDistribution geometric(double ratio, int m_max);
  /// Thermal state with the given (untruncated) mean, truncated and renormalized.
  static PhononDistribution thermal(double mean, int m_max);
  static PhononDistribution fock(int m, int m_max);

  int m_max() const noexcept { return static_cast<int>(p_.size()) - 1; }
  std::span<const double> p() const noexcept { return p_; }
  double operator[](std::size_t m) const { return p_[m]; }

  double total() const noexcept;
  double mean() const noexcept;
  double tail() const noexcept { return p_.empty() ? 0.0 : p_.back(); }

 private:
  std::vector<double> p_;
};

}  // namespace cavcool
