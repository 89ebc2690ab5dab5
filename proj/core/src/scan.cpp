#include "cavcool/scan.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <ostream>
#include <thread>

#include <fmt/format.h>

#include "cavcool/errors.hpp"
#include "cavcool/params_io.hpp"
#include "cavcool/rates.hpp"
#include "cavcool/spectra.hpp"

namespace cavcool {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_axis(const Axis& a, std::string_view label) {
  if (!is_field(a.name))
    throw ParamError(fmt::format("unknown parameter '{}' for {}", a.name, label));
  if (!std::isfinite(a.lo) || !std::isfinite(a.hi))
    throw ParamError(fmt::format("{} range for '{}' is not finite", label, a.name));
  if (a.points == 0) throw ParamError(fmt::format("{} needs at least one point", label));
}

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  return fmt::format("{:.17g}", v);
}

}  // namespace

std::string_view to_string(Quantity q) {
  switch (q) {
    case Quantity::Gamma_over_alpha: return "Gamma_over_alpha";
    case Quantity::Gamma: return "Gamma";
    case Quantity::m_st: return "m_st";
    case Quantity::A_plus: return "A_plus";
    case Quantity::A_minus: return "A_minus";
    case Quantity::D: return "D";
    case Quantity::S_atom: return "S_atom";
    case Quantity::S_cavity: return "S_cavity";
  }
  return "unknown";
}

std::optional<Quantity> quantity_from_string(std::string_view s) {
  for (Quantity q : {Quantity::Gamma_over_alpha, Quantity::Gamma, Quantity::m_st,
                     Quantity::A_plus, Quantity::A_minus, Quantity::D, Quantity::S_atom,
                     Quantity::S_cavity})
    if (to_string(q) == s) return q;
  return std::nullopt;
}

std::string_view to_string(Constraint c) {
  switch (c) {
    case Constraint::none: return "none";
    case Constraint::tpr_via_delta_c2: return "delta_TP=0";
    case Constraint::tpr_via_Delta: return "delta_TP=0:Delta";
    case Constraint::delta_c2_sideband: return "delta_c2=delta1-nu";
  }
  return "unknown";
}

std::optional<Constraint> constraint_from_string(std::string_view s) {
  for (Constraint c : {Constraint::none, Constraint::tpr_via_delta_c2,
                       Constraint::tpr_via_Delta, Constraint::delta_c2_sideband})
    if (to_string(c) == s) return c;
  if (s.empty()) return Constraint::none;
  return std::nullopt;
}

std::optional<std::string_view> constrained_field(Constraint c) {
  switch (c) {
    case Constraint::none: return std::nullopt;
    case Constraint::tpr_via_delta_c2: return "delta_c2";
    case Constraint::tpr_via_Delta: return "Delta";
    case Constraint::delta_c2_sideband: return "delta_c2";
  }
  return std::nullopt;
}

void apply_constraint(SystemParams& p, Constraint c) {
  switch (c) {
    case Constraint::none: break;
    case Constraint::tpr_via_delta_c2: p.delta_c2 = p.delta1 - p.Delta; break;
    case Constraint::tpr_via_Delta: p.Delta = p.delta1 - p.delta_c2; break;
    case Constraint::delta_c2_sideband: p.delta_c2 = p.delta1 - p.nu; break;
  }
}

double Axis::value(std::size_t i) const {
  if (points <= 1) return lo;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
}

void validate_spec(const ScanSpec& s) {
  check_well_formed(s.base);
  check_axis(s.axis1, "axis1");
  if (s.axis2) {
    check_axis(*s.axis2, "axis2");
    if (s.axis2->name == s.axis1.name)
      throw ParamError(fmt::format("both axes scan '{}'", s.axis1.name));
  }
  if (const auto fixed = constrained_field(s.constraint)) {
    if (s.axis1.name == *fixed || (s.axis2 && s.axis2->name == *fixed))
      throw ParamError(fmt::format("constraint '{}' overwrites the scanned parameter '{}'",
                                   to_string(s.constraint), *fixed));
  }
}

std::string_view to_string(PointStatus s) {
  switch (s) {
    case PointStatus::ok: return "ok";
    case PointStatus::heating: return "heating";
    case PointStatus::resonant: return "resonant";
  }
  return "unknown";
}

ScanPoint evaluate_point(const SystemParams& p, Quantity q) {
  ScanPoint pt;
  try {
    switch (q) {
      case Quantity::S_atom: pt.value = excitation_rate(p, p.Delta, Channel::atom); return pt;
      case Quantity::S_cavity: pt.value = excitation_rate(p, p.Delta, Channel::cavity); return pt;
      case Quantity::D: pt.value = diffusion(p); return pt;
      default: break;
    }
    const RateSet r = transition_rates(p);
    if (!(r.Gamma > 0.0)) pt.status = PointStatus::heating;
    switch (q) {
      case Quantity::Gamma_over_alpha: {
        const double alpha = derive(p).alpha;
        pt.value = alpha > 0.0 ? r.Gamma / alpha : kNaN;
        break;
      }
      case Quantity::Gamma: pt.value = r.Gamma; break;
      case Quantity::m_st: pt.value = r.m_st ? *r.m_st : kNaN; break;
      case Quantity::A_plus: pt.value = r.A_plus; break;
      case Quantity::A_minus: pt.value = r.A_minus; break;
      default: break;
    }
  } catch (const PoleError&) {
    pt.value = kNaN;
    pt.status = PointStatus::resonant;
  }
  return pt;
}

ScanResult run_scan(const ScanSpec& s, unsigned workers) {
  validate_spec(s);
  ScanResult res;
  res.spec = s;
  res.n1 = s.axis1.points;
  res.n2 = s.axis2 ? s.axis2->points : 1;
  const std::size_t total = res.n1 * res.n2;
  res.points.resize(total);

  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t k = next++; k < total; k = next++) {
      const std::size_t i1 = k / res.n2;
      const std::size_t i2 = k % res.n2;
      SystemParams p = s.base;
      const double x1 = s.axis1.value(i1);
      set_field(p, s.axis1.name, x1);
      double x2 = 0.0;
      if (s.axis2) {
        x2 = s.axis2->value(i2);
        set_field(p, s.axis2->name, x2);
      }
      apply_constraint(p, s.constraint);
      ScanPoint pt = evaluate_point(p, s.quantity);
      pt.x1 = x1;
      pt.x2 = x2;
      res.points[k] = pt;
    }
  };

  const unsigned n = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(total)));
  if (n == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n);
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(work);
  }
  return res;
}

void write_csv(std::ostream& out, const ScanResult& r) {
  const std::string a2 = r.spec.axis2 ? r.spec.axis2->name : "axis2";
  out << r.spec.axis1.name << ',' << a2 << ',' << to_string(r.spec.quantity) << ",status\n";
  for (const auto& pt : r.points)
    out << number(pt.x1) << ',' << number(pt.x2) << ',' << number(pt.value) << ','
        << to_string(pt.status) << '\n';
}

nlohmann::json to_json(const ScanResult& r) {
  nlohmann::json j;
  j["base"] = to_json(r.spec.base);
  const auto axis = [](const Axis& a) {
    return nlohmann::json{{"name", a.name}, {"lo", a.lo}, {"hi", a.hi}, {"points", a.points}};
  };
  j["axis1"] = axis(r.spec.axis1);
  j["axis2"] = r.spec.axis2 ? axis(*r.spec.axis2) : nlohmann::json();
  j["constraint"] = to_string(r.spec.constraint);
  j["quantity"] = to_string(r.spec.quantity);
  j["shape"] = {r.n1, r.n2};
  nlohmann::json values = nlohmann::json::array();
  nlohmann::json status = nlohmann::json::array();
  for (const auto& pt : r.points) {
    values.push_back(std::isnan(pt.value) ? nlohmann::json() : nlohmann::json(pt.value));
    status.push_back(to_string(pt.status));
  }
  j["values"] = std::move(values);
  j["status"] = std::move(status);
  return j;
}

void write_gnuplot_matrix(std::ostream& out, const ScanResult& r) {
  out << r.n2;
  for (std::size_t i2 = 0; i2 < r.n2; ++i2) out << ' ' << number(r.at(0, i2).x2);
  out << '\n';
  for (std::size_t i1 = 0; i1 < r.n1; ++i1) {
    out << number(r.at(i1, 0).x1);
    for (std::size_t i2 = 0; i2 < r.n2; ++i2) out << ' ' << number(r.at(i1, i2).value);
    out << '\n';
  }
}

}  // namespace cavcool
