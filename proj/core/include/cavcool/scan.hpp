#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cavcool/params.hpp"

namespace cavcool {

enum class Quantity { Gamma_over_alpha, Gamma, m_st, A_plus, A_minus, D, S_atom, S_cavity };

std::string_view to_string(Quantity q);
std::optional<Quantity> quantity_from_string(std::string_view s);

/// Per-point coupling rules applied before evaluation.
enum class Constraint {
  none,
  tpr_via_delta_c2,  // "delta_TP=0": delta_c2 = delta1 - Delta
  tpr_via_Delta,     // "delta_TP=0:Delta": Delta = delta1 - delta_c2
  delta_c2_sideband  // "delta_c2=delta1-nu"
};

std::string_view to_string(Constraint c);
std::optional<Constraint> constraint_from_string(std::string_view s);

/// Parameter fixed by a constraint, or empty for `none`.
std::optional<std::string_view> constrained_field(Constraint c);
void apply_constraint(SystemParams& p, Constraint c);

struct Axis {
  std::string name;
  double lo = 0.0;
  double hi = 0.0;
  std::size_t points = 1;

  double value(std::size_t i) const;
};

struct ScanSpec {
  SystemParams base;
  Axis axis1;
  std::optional<Axis> axis2;
  Constraint constraint = Constraint::none;
  Quantity quantity = Quantity::Gamma_over_alpha;
};

/// Throws ParamError for unknown axis names, empty or non-finite ranges, or a
/// constraint that would overwrite an axis parameter.
void validate_spec(const ScanSpec& s);

enum class PointStatus { ok, heating, resonant };
std::string_view to_string(PointStatus s);

struct ScanPoint {
  double x1 = 0.0;
  double x2 = 0.0;
  double value = 0.0;  // NaN when undefined at this point
  PointStatus status = PointStatus::ok;
};

struct ScanResult {
  ScanSpec spec;
  std::size_t n1 = 0;
  std::size_t n2 = 1;
  std::vector<ScanPoint> points;  // row-major: index i1 * n2 + i2

  const ScanPoint& at(std::size_t i1, std::size_t i2 = 0) const {
    return points[i1 * n2 + i2];
  }
};

/// Evaluates one quantity at one parameter point (constraint already applied).
ScanPoint evaluate_point(const SystemParams& p, Quantity q);

ScanResult run_scan(const ScanSpec& s, unsigned workers = 1);

void write_csv(std::ostream& out, const ScanResult& r);
nlohmann::json to_json(const ScanResult& r);
/// gnuplot "nonuniform matrix" layout: first row holds axis2 values, each
/// following row starts with the axis1 value.
void write_gnuplot_matrix(std::ostream& out, const ScanResult& r);

}  // namespace cavcool
