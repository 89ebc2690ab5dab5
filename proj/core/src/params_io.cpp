#include "cavcool/params_io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>

#include <fmt/format.h>

#include "cavcool/errors.hpp"

namespace cavcool {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool parse_number(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

nlohmann::json to_json(const SystemParams& p) {
  nlohmann::json j = nlohmann::json::object();
  for (std::string_view name : field_names()) j[std::string(name)] = get_field(p, name);
  return j;
}

nlohmann::json to_json(const DerivedParams& d) {
  nlohmann::json j;
  j["eta_L"] = d.eta_L;
  j["eta_C"] = d.eta_C;
  j["eta_tilde_sq"] = d.eta_tilde_sq;
  j["epsilon"] = {{"re", d.epsilon.real()}, {"im", d.epsilon.imag()}};
  j["epsilon_sq"] = std::norm(d.epsilon);
  j["epsilon_prime"] = d.epsilon_prime ? nlohmann::json(*d.epsilon_prime) : nlohmann::json();
  j["C"] = d.C;
  j["C_plus"] = d.C_plus;
  j["C_minus"] = d.C_minus;
  j["delta_TP"] = d.delta_TP;
  j["Delta0"] = d.Delta0;
  j["delta_opt"] = d.delta_opt;
  j["alpha"] = d.alpha;
  return j;
}

SystemParams params_from_json(const nlohmann::json& doc, SystemParams base) {
  const nlohmann::json* obj = &doc;
  if (doc.is_object() && doc.contains("params")) obj = &doc.at("params");
  if (!obj->is_object()) throw ParamError("parameter document must be a JSON object");
  for (const auto& [key, value] : obj->items()) {
    if (!is_field(key)) throw ParamError(fmt::format("unknown parameter '{}'", key));
    double v = 0.0;
    if (value.is_number())
      v = value.get<double>();
    else if (value.is_string())
      v = parse_value(key, value.get<std::string>());
    else
      throw ParamError(fmt::format("parameter '{}' must be a number", key));
    set_field(base, key, v);
  }
  return base;
}

SystemParams load_params_file(const std::filesystem::path& path, SystemParams base) {
  std::ifstream in(path);
  if (!in) throw ParamError(fmt::format("cannot open parameter file '{}'", path.string()));
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParamError(fmt::format("parameter file '{}' is not valid JSON: {}", path.string(),
                                 e.what()));
  }
  return params_from_json(doc, base);
}

double parse_value(std::string_view key, std::string_view text) {
  const std::string_view s = trim(text);
  double v = 0.0;
  if (parse_number(s, v)) return v;

  const auto pos = s.find("pi");
  if (pos != std::string_view::npos) {
    std::string_view coeff = trim(s.substr(0, pos));
    std::string_view rest = trim(s.substr(pos + 2));
    double a = 1.0;
    double div = 1.0;
    bool ok = true;
    if (!coeff.empty()) {
      if (coeff.back() == '*') coeff = trim(coeff.substr(0, coeff.size() - 1));
      if (coeff == "-")
        a = -1.0;
      else
        ok = parse_number(coeff, a);
    }
    if (ok && !rest.empty()) ok = rest.front() == '/' && parse_number(rest.substr(1), div);
    if (ok && div != 0.0) return a * std::numbers::pi / div;
  }
  throw ParamError(fmt::format("malformed value '{}' for parameter '{}'", text, key));
}

void apply_override(SystemParams& p, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw ParamError(fmt::format("override '{}' is not of the form key=value", assignment));
  const std::string key(trim(assignment.substr(0, eq)));
  if (!is_field(key)) throw ParamError(fmt::format("unknown parameter '{}'", key));
  set_field(p, key, parse_value(key, assignment.substr(eq + 1)));
}

}  // namespace cavcool
