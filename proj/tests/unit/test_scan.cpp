#include <cmath>
#include <sstream>
#include <string>

#include <doctest.h>

#include "cavcool/errors.hpp"
#include "cavcool/rates.hpp"
#include "cavcool/scan.hpp"
#include "cavcool/spectra.hpp"
#include "presets.hpp"

using namespace cavcool;

namespace {

ScanSpec map_spec(std::size_t n1, std::size_t n2) {
  ScanSpec s;
  s.base = presets::map_moderate_decay();
  s.axis1 = {"Delta", -4.0, 4.0, n1};
  s.axis2 = Axis{"delta1", -60.0, 100.0, n2};
  s.constraint = Constraint::tpr_via_delta_c2;
  s.quantity = Quantity::Gamma;
  return s;
}

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_SUITE("scan") {
  TEST_CASE("single-point scan equals the direct call") {
    ScanSpec s;
    s.base = presets::strong_coupling();
    s.axis1 = {"Delta", 1.0, 1.0, 1};
    s.quantity = Quantity::A_minus;
    const auto r = run_scan(s);
    REQUIRE(r.points.size() == 1);
    CHECK(r.at(0).value == transition_rates(s.base).A_minus);
    CHECK(r.at(0).status == PointStatus::ok);

    s.quantity = Quantity::S_cavity;
    CHECK(run_scan(s).at(0).value == excitation_rate(s.base, 1.0, Channel::cavity));
  }

  TEST_CASE("axis sampling includes both ends") {
    Axis a{"Delta", -1.0, 3.0, 5};
    CHECK(a.value(0) == -1.0);
    CHECK(a.value(4) == 3.0);
    CHECK(a.value(2) == 1.0);
  }

  TEST_CASE("results do not depend on the worker count") {
    const auto s = map_spec(23, 17);
    const auto a = run_scan(s, 1);
    const auto b = run_scan(s, 4);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
      const double x = a.points[i].value;
      const double y = b.points[i].value;
      CHECK(((std::isnan(x) && std::isnan(y)) || x == y));
      CHECK(a.points[i].status == b.points[i].status);
    }
  }

  TEST_CASE("three-photon constraint holds at every grid point") {
    auto s = map_spec(9, 7);
    s.quantity = Quantity::D;
    const auto r = run_scan(s);
    for (const auto& pt : r.points) CHECK(pt.value == 0.0);
  }

  TEST_CASE("constraints") {
    SystemParams p = presets::map_moderate_decay();
    p.delta1 = 5.0;
    p.Delta = 0.5;
    apply_constraint(p, Constraint::tpr_via_delta_c2);
    CHECK(three_photon_detuning(p) == 0.0);
    p.delta_c2 = 2.0;
    apply_constraint(p, Constraint::tpr_via_Delta);
    CHECK(p.Delta == 3.0);
    apply_constraint(p, Constraint::delta_c2_sideband);
    CHECK(p.delta_c2 == 4.0);
    for (Constraint c : {Constraint::none, Constraint::tpr_via_delta_c2, Constraint::tpr_via_Delta,
                         Constraint::delta_c2_sideband})
      CHECK(constraint_from_string(to_string(c)) == c);
    CHECK(constraint_from_string("delta_TP=0") == Constraint::tpr_via_delta_c2);
  }

  TEST_CASE("spec validation") {
    auto s = map_spec(3, 3);
    CHECK_NOTHROW(validate_spec(s));
    s.axis1.name = "bogus";
    CHECK_THROWS_AS(validate_spec(s), ParamError);
    s = map_spec(3, 3);
    s.axis2->name = "delta_c2";
    CHECK_THROWS_AS(validate_spec(s), ParamError);
    s = map_spec(3, 3);
    s.axis1.points = 0;
    CHECK_THROWS_AS(validate_spec(s), ParamError);
    s = map_spec(3, 3);
    s.axis1.hi = std::nan("");
    CHECK_THROWS_AS(validate_spec(s), ParamError);
  }

  TEST_CASE("heating and resonant points are encoded, not clipped") {
    SystemParams p = presets::interference();
    p.Delta = 4.5;
    const auto heat = evaluate_point(p, Quantity::Gamma);
    if (heat.status == PointStatus::heating) CHECK(heat.value <= 0.0);

    SystemParams q = presets::dressed_reference();
    q.omega_L = 0.0;
    q.g = 0.0;
    q.Delta = q.delta1 - q.delta_c2 - 1.0;
    const auto pole = evaluate_point(q, Quantity::Gamma);
    CHECK(pole.status == PointStatus::resonant);
    CHECK(std::isnan(pole.value));

    auto s = map_spec(41, 41);
    const auto r = run_scan(s);
    bool any_heating = false;
    for (const auto& pt : r.points)
      if (pt.status == PointStatus::heating) {
        any_heating = true;
        CHECK(pt.value <= 0.0);
      }
    CHECK(any_heating);
  }

  TEST_CASE("CSV, JSON and gnuplot writers") {
    const auto r = run_scan(map_spec(4, 3));
    std::ostringstream csv;
    write_csv(csv, r);
    CHECK(csv.str().rfind("Delta,delta1,Gamma,status\n", 0) == 0);
    CHECK(count_lines(csv.str()) == 1 + 12);

    const auto j = to_json(r);
    CHECK(j["values"].size() == 12);
    CHECK(j["status"].size() == 12);
    CHECK(j["shape"][0] == 4);
    CHECK(j["shape"][1] == 3);

    std::ostringstream gp;
    write_gnuplot_matrix(gp, r);
    CHECK(count_lines(gp.str()) == 1 + 4);
    std::istringstream first(gp.str());
    std::string head;
    std::getline(first, head);
    std::istringstream cells(head);
    int n = 0;
    for (double v; cells >> v;) ++n;
    CHECK(n == 1 + 3);
  }

  TEST_CASE("quantity names round trip") {
    for (Quantity q : {Quantity::Gamma_over_alpha, Quantity::Gamma, Quantity::m_st,
                       Quantity::A_plus, Quantity::A_minus, Quantity::D, Quantity::S_atom,
                       Quantity::S_cavity})
      CHECK(quantity_from_string(to_string(q)) == q);
  }
}
