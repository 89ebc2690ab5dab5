#include "cavcool_cli/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <limits>
#include <locale>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "cavcool/dynamics.hpp"
#include "cavcool/errors.hpp"
#include "cavcool/oracle.hpp"
#include "cavcool/params_io.hpp"
#include "cavcool/rates.hpp"
#include "cavcool/resolvent.hpp"
#include "cavcool/scan.hpp"
#include "cavcool/spectra.hpp"

namespace cavcool::cli {

namespace {

using nlohmann::json;

struct Globals {
  std::string params_file;
  std::vector<std::string> sets;
  std::string out_file;
  std::string format = "csv";
  unsigned workers = 1;
  bool gamma_units = false;
};

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  return fmt::format("{:.17g}", v);
}

json num_json(double v) { return std::isfinite(v) ? json(v) : json(); }

json num_json(const std::optional<double>& v) { return v ? num_json(*v) : json(); }

SystemParams load(const Globals& g) {
  SystemParams p;
  if (!g.params_file.empty()) p = load_params_file(g.params_file);
  for (const auto& s : g.sets) apply_override(p, s);
  check_well_formed(p);
  return p;
}

Axis parse_axis(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.size() != 4)
    throw ParamError(fmt::format("axis '{}' must be name:lo:hi:points", text));
  Axis a;
  a.name = parts[0];
  if (!is_field(a.name)) throw ParamError(fmt::format("unknown parameter '{}'", a.name));
  a.lo = parse_value(a.name, parts[1]);
  a.hi = parse_value(a.name, parts[2]);
  const double n = parse_value("points", parts[3]);
  if (!(n >= 1.0) || n != std::floor(n))
    throw ParamError(fmt::format("axis '{}' needs a positive integer point count", a.name));
  a.points = static_cast<std::size_t>(n);
  return a;
}

Constraint parse_constraint(const std::string& s) {
  const auto c = constraint_from_string(s);
  if (!c) throw ParamError(fmt::format("unknown constraint '{}'", s));
  return *c;
}

// dressed ---------------------------------------------------------------

struct DressedOptions {
  double lo = -50.0;
  double hi = 50.0;
};

void cmd_dressed(const Globals& g, const DressedOptions& o, std::ostream& out) {
  const SystemParams p = load(g);
  const DressedSpectrum s = dressed_states(p);
  const DarkStateWeights w = dark_state_weights(p);
  const auto features = locate_dark_features(p, o.lo, o.hi);

  if (g.format == "json") {
    json j;
    j["params"] = to_json(p);
    json roots = json::array();
    for (const cplx& z : s.omega_eff) roots.push_back({{"re", z.real()}, {"im", z.imag()}});
    j["roots"] = roots;
    j["dark_weights"] = {
        {"three_photon", w.three_photon ? json(*w.three_photon) : json()},
        {"two_photon", w.two_photon},
        {"three_photon_resonant", w.three_photon_resonant},
        {"two_photon_resonant", w.two_photon_resonant}};
    json feats = json::array();
    for (const auto& f : features)
      feats.push_back({{"Delta", f.Delta}, {"channel", to_string(f.channel)}, {"depth", f.depth}});
    j["dark_features"] = feats;
    out << j.dump(2) << '\n';
    return;
  }
  out << "type,index,x,y\n";
  for (std::size_t i = 0; i < 3; ++i)
    out << "root," << i << ',' << num(s.omega_eff[i].real()) << ','
        << num(s.omega_eff[i].imag()) << '\n';
  if (w.three_photon)
    out << "dark_three_photon,0," << num((*w.three_photon)[0]) << ','
        << num((*w.three_photon)[1]) << '\n';
  out << "dark_two_photon,0," << num(w.two_photon[0]) << ',' << num(w.two_photon[1]) << '\n';
  for (std::size_t i = 0; i < features.size(); ++i)
    out << "dark_feature_" << to_string(features[i].channel) << ',' << i << ','
        << num(features[i].Delta) << ',' << num(features[i].depth) << '\n';
}

// spectra ---------------------------------------------------------------

struct SpectraOptions {
  double lo = -20.0;
  double hi = 20.0;
  std::size_t points = 401;
};

void cmd_spectra(const Globals& g, const SpectraOptions& o, std::ostream& out) {
  const SystemParams p = load(g);
  if (o.points < 2 || !(o.hi > o.lo)) throw ParamError("spectra needs hi > lo and points >= 2");
  std::vector<double> grid(o.points);
  for (std::size_t i = 0; i < o.points; ++i)
    grid[i] = o.lo + (o.hi - o.lo) * static_cast<double>(i) / static_cast<double>(o.points - 1);
  const auto at = [&](double Delta, Channel c) {
    try {
      return excitation_rate(p, Delta, c);
    } catch (const PoleError&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
  if (g.format == "json") {
    json j;
    j["params"] = to_json(p);
    json rows = json::array();
    for (double d : grid)
      rows.push_back({{"Delta", d},
                      {"S_atom", num_json(at(d, Channel::atom))},
                      {"S_cavity", num_json(at(d, Channel::cavity))}});
    j["spectrum"] = rows;
    out << j.dump(2) << '\n';
    return;
  }
  out << "Delta,S_atom,S_cavity\n";
  for (double d : grid)
    out << num(d) << ',' << num(at(d, Channel::atom)) << ',' << num(at(d, Channel::cavity))
        << '\n';
}

// rates -----------------------------------------------------------------

struct RatesOptions {
  std::string sweep;
  std::string constraint = "none";
};

json rates_json(const SystemParams& p, const RateSet& r) {
  const DerivedParams d = derive(p);
  json j;
  j["params"] = to_json(p);
  j["derived"] = to_json(d);
  j["rates"] = {{"D", r.D},
                {"A_plus", r.A_plus},
                {"A_minus", r.A_minus},
                {"Gamma", r.Gamma},
                {"Gamma_over_alpha", d.alpha > 0.0 ? json(r.Gamma / d.alpha) : json()},
                {"m_st", num_json(r.m_st)},
                {"warnings", r.warnings}};
  return j;
}

void cmd_rates(const Globals& g, const RatesOptions& o, std::ostream& out) {
  const SystemParams base = load(g);
  const Constraint c = parse_constraint(o.constraint);
  std::vector<SystemParams> points;
  if (o.sweep.empty()) {
    SystemParams p = base;
    apply_constraint(p, c);
    points.push_back(p);
  } else {
    const Axis a = parse_axis(o.sweep);
    for (std::size_t i = 0; i < a.points; ++i) {
      SystemParams p = base;
      set_field(p, a.name, a.value(i));
      apply_constraint(p, c);
      points.push_back(p);
    }
  }
  std::vector<RateSet> rates;
  rates.reserve(points.size());
  for (const auto& p : points) rates.push_back(transition_rates(p));

  if (g.format == "json") {
    if (points.size() == 1) {
      out << rates_json(points[0], rates[0]).dump(2) << '\n';
    } else {
      json arr = json::array();
      for (std::size_t i = 0; i < points.size(); ++i) arr.push_back(rates_json(points[i], rates[i]));
      out << arr.dump(2) << '\n';
    }
    return;
  }
  out << "Delta,delta1,D,A_plus,A_minus,Gamma,Gamma_over_alpha,m_st\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    const auto& r = rates[i];
    const double alpha = derive(p).alpha;
    out << num(p.Delta) << ',' << num(p.delta1) << ',' << num(r.D) << ',' << num(r.A_plus)
        << ',' << num(r.A_minus) << ',' << num(r.Gamma) << ','
        << num(alpha > 0.0 ? r.Gamma / alpha : std::nan("")) << ','
        << num(r.m_st ? *r.m_st : std::nan("")) << '\n';
  }
}

// cool ------------------------------------------------------------------

struct CoolOptions {
  double m0 = 2.0;
  int m_max = 60;
  double t_final = 0.0;
  std::size_t samples = 101;
  int levels = 5;
};

void cmd_cool(const Globals& g, const CoolOptions& o, std::ostream& out) {
  const SystemParams p = load(g);
  const RateSet r = transition_rates(p);
  double t_final = o.t_final;
  if (!(t_final > 0.0)) {
    if (!(r.Gamma > 0.0))
      throw HeatingError(fmt::format(
          "Gamma = {:.6g} <= 0: pass --t-final to follow the heating trajectory", r.Gamma));
    t_final = 10.0 / r.Gamma;
  }
  if (o.samples < 2) throw ParamError("cool needs at least two samples");
  std::vector<double> times(o.samples);
  for (std::size_t i = 0; i < o.samples; ++i)
    times[i] = t_final * static_cast<double>(i) / static_cast<double>(o.samples - 1);
  const auto traj = evolve(r, PhononDistribution::thermal(o.m0, o.m_max), times);
  const double alpha = derive(p).alpha;
  const int k = std::clamp(o.levels, 0, o.m_max);

  if (g.format == "json") {
    json j;
    j["params"] = to_json(p);
    j["Gamma"] = r.Gamma;
    j["m_st"] = num_json(r.m_st);
    j["dropped_flux"] = traj.dropped_flux;
    json rows = json::array();
    for (const auto& pt : traj.points) {
      json row{{"t", pt.t}, {"mean_m", pt.mean_m}};
      if (g.gamma_units) row["t_alpha"] = pt.t * alpha;
      std::vector<double> pk(pt.p.p().begin(), pt.p.p().begin() + k + 1);
      row["p"] = pk;
      rows.push_back(row);
    }
    j["trajectory"] = rows;
    out << j.dump(2) << '\n';
    return;
  }
  out << "t";
  if (g.gamma_units) out << ",t_alpha";
  out << ",mean_m";
  for (int m = 0; m <= k; ++m) out << ",p_" << m;
  out << '\n';
  for (const auto& pt : traj.points) {
    out << num(pt.t);
    if (g.gamma_units) out << ',' << num(pt.t * alpha);
    out << ',' << num(pt.mean_m);
    for (int m = 0; m <= k; ++m) out << ',' << num(pt.p[static_cast<std::size_t>(m)]);
    out << '\n';
  }
}

// scan ------------------------------------------------------------------

struct ScanOptions {
  std::string x;
  std::string y;
  std::string quantity = "Gamma_over_alpha";
  std::string constraint = "none";
  std::string gnuplot;
};

void cmd_scan(const Globals& g, const ScanOptions& o, std::ostream& out) {
  ScanSpec s;
  s.base = load(g);
  s.axis1 = parse_axis(o.x);
  if (!o.y.empty()) s.axis2 = parse_axis(o.y);
  s.constraint = parse_constraint(o.constraint);
  const auto q = quantity_from_string(o.quantity);
  if (!q) throw ParamError(fmt::format("unknown quantity '{}'", o.quantity));
  s.quantity = *q;
  const ScanResult r = run_scan(s, g.workers);
  if (g.format == "json")
    out << to_json(r).dump(2) << '\n';
  else
    write_csv(out, r);
  if (!o.gnuplot.empty()) {
    std::ofstream f(o.gnuplot);
    if (!f) throw ParamError(fmt::format("cannot write gnuplot file '{}'", o.gnuplot));
    write_gnuplot_matrix(f, r);
  }
}

// validate --------------------------------------------------------------

struct ValidateOptions {
  std::vector<std::string> points;
  bool custom = false;
};

void cmd_validate(const Globals& g, const ValidateOptions& o, std::ostream& out) {
  std::vector<ValidationPoint> pts;
  if (o.custom || !g.params_file.empty() || !g.sets.empty()) {
    pts.push_back({"custom", load(g)});
  } else {
    for (auto& vp : default_validation_points())
      if (o.points.empty() ||
          std::find(o.points.begin(), o.points.end(), vp.name) != o.points.end())
        pts.push_back(vp);
    if (pts.empty()) throw ParamError("no validation point matches --point");
  }

  std::vector<ValidationResult> results(pts.size());
  const unsigned workers = std::max(1u, g.workers);
  for (std::size_t start = 0; start < pts.size(); start += workers) {
    std::vector<std::future<ValidationResult>> batch;
    for (std::size_t i = start; i < std::min(pts.size(), start + workers); ++i)
      batch.push_back(std::async(std::launch::async, [&pts, i] { return run_validation(pts[i]); }));
    for (std::size_t i = 0; i < batch.size(); ++i) results[start + i] = batch[i].get();
  }

  json report = json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    json row{{"point", r.point},
             {"Gamma_pert", r.Gamma_pert},
             {"Gamma_fit", r.Gamma_fit},
             {"Gamma_fit_coarse", r.Gamma_fit_coarse},
             {"m_st_pert", r.m_st_pert},
             {"m_inf_fit", r.m_inf_fit},
             {"r_squared", r.r_squared},
             {"converged", r.converged},
             {"max_trace_drift", r.max_trace_drift},
             {"min_eigenvalue", r.min_eigenvalue},
             {"pass", r.pass}};
    if (g.gamma_units) {
      const double alpha = derive(pts[i].params).alpha;
      row["Gamma_pert_over_alpha"] = r.Gamma_pert / alpha;
      row["Gamma_fit_over_alpha"] = r.Gamma_fit / alpha;
    }
    if (r.error) row["error"] = *r.error;
    report.push_back(row);
  }
  if (g.format == "json") {
    out << report.dump(2) << '\n';
    return;
  }
  out << "point,Gamma_pert,Gamma_fit,m_st_pert,m_inf_fit,converged,pass\n";
  for (const auto& r : results)
    out << r.point << ',' << num(r.Gamma_pert) << ',' << num(r.Gamma_fit) << ','
        << num(r.m_st_pert) << ',' << num(r.m_inf_fit) << ',' << (r.converged ? 1 : 0) << ','
        << (r.pass ? 1 : 0) << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cavity-EIT cooling of a trapped atom: spectra, rates, dynamics and a "
               "master-equation oracle"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--params", g.params_file, "JSON parameter file");
  app.add_option("--set", g.sets, "Override key=value (repeatable)");
  app.add_option("--out", g.out_file, "Output file (default stdout)");
  app.add_option("--format", g.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--workers", g.workers, "Worker threads for scans and validation");
  app.add_flag("--gamma-units", g.gamma_units, "Also report rates and times scaled by alpha");

  DressedOptions dressed;
  auto* c_dressed = app.add_subcommand("dressed", "Dressed-state roots, dark-state weights and dark features");
  c_dressed->add_option("--lo", dressed.lo, "Lower Delta bound of the dark-feature search");
  c_dressed->add_option("--hi", dressed.hi, "Upper Delta bound of the dark-feature search");

  SpectraOptions spectra;
  auto* c_spectra = app.add_subcommand("spectra", "Atomic and cavity excitation spectra");
  c_spectra->add_option("--lo", spectra.lo, "First Delta");
  c_spectra->add_option("--hi", spectra.hi, "Last Delta");
  c_spectra->add_option("--points", spectra.points, "Number of Delta samples");

  RatesOptions rates;
  auto* c_rates = app.add_subcommand("rates", "Heating and cooling rates");
  c_rates->add_option("--sweep", rates.sweep, "Sweep one parameter, name:lo:hi:points");
  c_rates->add_option("--constraint", rates.constraint,
                      "none, delta_TP=0, delta_TP=0:Delta or delta_c2=delta1-nu");

  CoolOptions cool;
  auto* c_cool = app.add_subcommand("cool", "Phonon rate-equation trajectory");
  c_cool->add_option("--m0", cool.m0, "Initial thermal mean phonon number");
  c_cool->add_option("--m-max", cool.m_max, "Ladder truncation");
  c_cool->add_option("--t-final", cool.t_final, "Final time (default 10/Gamma)");
  c_cool->add_option("--samples", cool.samples, "Number of output times");
  c_cool->add_option("--levels", cool.levels, "Print p_0..p_k");

  ScanOptions scan;
  auto* c_scan = app.add_subcommand("scan", "One- or two-dimensional parameter scan");
  c_scan->add_option("--x", scan.x, "First axis, name:lo:hi:points")->required();
  c_scan->add_option("--y", scan.y, "Second axis, name:lo:hi:points");
  c_scan->add_option("--quantity", scan.quantity,
                     "Gamma_over_alpha, Gamma, m_st, A_plus, A_minus, D, S_atom or S_cavity");
  c_scan->add_option("--constraint", scan.constraint,
                     "none, delta_TP=0, delta_TP=0:Delta or delta_c2=delta1-nu");
  c_scan->add_option("--gnuplot", scan.gnuplot, "Also write a gnuplot matrix file");

  ValidateOptions validate;
  auto* c_validate = app.add_subcommand("validate", "Compare rates against the master-equation oracle");
  c_validate->add_option("--point", validate.points, "Run only the named default point(s)");
  c_validate->add_flag("--custom", validate.custom, "Validate the loaded parameter set");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitParam;
  }

  std::ofstream file;
  std::ostream* sink = &out;
  if (!g.out_file.empty()) {
    file.open(g.out_file);
    if (!file) {
      err << "error: cannot open output file '" << g.out_file << "'\n";
      return kExitParam;
    }
    sink = &file;
  }
  sink->imbue(std::locale::classic());

  try {
    if (c_dressed->parsed()) cmd_dressed(g, dressed, *sink);
    else if (c_spectra->parsed()) cmd_spectra(g, spectra, *sink);
    else if (c_rates->parsed()) cmd_rates(g, rates, *sink);
    else if (c_cool->parsed()) cmd_cool(g, cool, *sink);
    else if (c_scan->parsed()) cmd_scan(g, scan, *sink);
    else if (c_validate->parsed()) cmd_validate(g, validate, *sink);
  } catch (const ParamError& e) {
    err << "error: " << e.what() << '\n';
    return kExitParam;
  } catch (const PoleError& e) {
    err << "error: " << e.what() << " [" << e.factor() << "]\n";
    return kExitFatal;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitFatal;
  }
  return kExitOk;
}

}  // namespace cavcool::cli
