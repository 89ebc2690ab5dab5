#include "cavcool/dynamics.hpp"

#include <cmath>

#include <boost/numeric/odeint.hpp>
#include <fmt/format.h>

#include "cavcool/errors.hpp"

namespace cavcool {

namespace {

using State = std::vector<double>;

void rhs_into(const RateSet& r, const State& p, State& dp) {
  const std::size_t top = p.size() - 1;
  for (std::size_t m = 0; m <= top; ++m) {
    const double mm = static_cast<double>(m);
    double v = -mm * r.A_minus * p[m];
    if (m < top) v += (mm + 1.0) * (r.A_minus * p[m + 1] - r.A_plus * p[m]);
    if (m > 0) v += mm * r.A_plus * p[m - 1];
    dp[m] = v;
  }
}

}  // namespace

std::vector<double> rate_equation_rhs(const RateSet& r, std::span<const double> p) {
  State in(p.begin(), p.end());
  State out(in.size());
  rhs_into(r, in, out);
  return out;
}

PhononTrajectory evolve(const RateSet& r, const PhononDistribution& p0,
                        std::span<const double> times, EvolveOptions options) {
  if (!std::isfinite(r.A_plus) || !std::isfinite(r.A_minus) || r.A_plus < 0.0 ||
      r.A_minus < 0.0)
    throw ParamError("rates must be finite and non-negative");
  if (p0.p().empty() || std::abs(p0.total() - 1.0) > 1e-9)
    throw ParamError("initial phonon distribution must be normalized");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] >= times[i - 1])) throw ParamError("sample times must be non-decreasing");

  PhononTrajectory traj;
  if (times.empty()) return traj;

  State x(p0.p().begin(), p0.p().end());
  const double top = static_cast<double>(x.size() - 1);
  namespace ode = boost::numeric::odeint;
  auto stepper = ode::make_dense_output(options.abs_tol, options.rel_tol,
                                        ode::runge_kutta_dopri5<State>());

  double last_t = times.front();
  double last_tail = x.back();
  const auto observer = [&](const State& s, double t) {
    if (r.A_plus > 0.0 && s.back() > options.tail_cap)
      throw TruncationError(fmt::format(
          "population {:.3g} of the top level m = {} exceeds the cap {:.3g}; raise m_max",
          s.back(), x.size() - 1, options.tail_cap));
    traj.dropped_flux += 0.5 * (last_tail + s.back()) * (top + 1.0) * r.A_plus * (t - last_t);
    last_t = t;
    last_tail = s.back();
    State c(s.begin(), s.end());
    for (double& v : c)
      if (v < 0.0 && v > -100.0 * options.abs_tol) v = 0.0;
    PhononDistribution d(std::move(c));
    const double mean = d.mean();
    traj.points.push_back({t, std::move(d), mean});
  };

  const auto system = [&](const State& s, State& ds, double) { rhs_into(r, s, ds); };
  const double span = times.back() - times.front();
  const double dt0 = span > 0.0 ? span * 1e-6 : 1.0;
  ode::integrate_times(stepper, system, x, times.begin(), times.end(), dt0, observer);
  return traj;
}

MeanTrajectoryValue mean_m_closed_form(const RateSet& r, double m0, double t) {
  const double G = r.A_minus - r.A_plus;
  MeanTrajectoryValue v;
  v.heating = !(G > 0.0);
  if (G == 0.0) {
    v.mean_m = m0 + r.A_plus * t;
    return v;
  }
  const double m_st = r.A_plus / G;
  v.mean_m = m_st + (m0 - m_st) * std::exp(-G * t);
  return v;
}

}  // namespace cavcool
