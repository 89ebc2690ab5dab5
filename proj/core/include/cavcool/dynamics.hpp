#pragma once

#include <span>
#include <vector>

#include "cavcool/phonons.hpp"
#include "cavcool/rates.hpp"

namespace cavcool {

struct EvolveOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  // Largest admissible population of the top ladder level.
  double tail_cap = 1e-8;
};

struct TrajectoryPoint {
  double t = 0.0;
  PhononDistribution p;
  double mean_m = 0.0;
};

struct PhononTrajectory {
  std::vector<TrajectoryPoint> points;
  // Integrated A+ flux out of the top level that the reflecting boundary dropped.
  double dropped_flux = 0.0;
};

/// Integrates the phonon rate equation on the truncated ladder at the given
/// (increasing) sample times. Throws TruncationError when the top level
/// population exceeds options.tail_cap while A_plus > 0. Round-off negatives
/// above -100 abs_tol are zeroed.
PhononTrajectory evolve(const RateSet& r, const PhononDistribution& p0,
                        std::span<const double> times, EvolveOptions options = {});

/// Right-hand side of the rate equation with the reflecting top boundary.
std::vector<double> rate_equation_rhs(const RateSet& r, std::span<const double> p);

struct MeanTrajectoryValue {
  double mean_m = 0.0;
  bool heating = false;  // Gamma <= 0: no relaxation towards m_st
};

/// Solution of d<m>/dt = -Gamma <m> + A+.
MeanTrajectoryValue mean_m_closed_form(const RateSet& r, double m0, double t);

}  // namespace cavcool
