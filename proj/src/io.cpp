#include "thermoshield/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace thermoshield::io {

namespace {

double number(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw std::invalid_argument(std::string("json: missing numeric field '") + key + "'");
  return j.at(key).get<double>();
}

double number_or(const json& j, const char* key, double fallback) {
  return j.contains(key) ? number(j, key) : fallback;
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

DissipationLaw law_from_json(const json& j) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string())
    throw std::invalid_argument("law json: expected an object with a string 'type'");
  const std::string type = j.at("type").get<std::string>();
  if (type == "convection") return DissipationLaw::convection(number(j, "beta"));
  if (type == "radiation") return DissipationLaw::radiation(number(j, "gamma"));
  if (type == "linear") return DissipationLaw::linear(number(j, "c"));
  if (type == "power") return DissipationLaw::power(number(j, "c"), number(j, "alpha"));
  if (type == "surface_cost")
    return DissipationLaw::surface_cost(number(j, "c1"), number(j, "c2"), number(j, "alpha"));
  if (type == "tabulated") {
    if (!j.contains("knots") || !j.at("knots").is_array())
      throw std::invalid_argument("law json: tabulated law needs a 'knots' array");
    std::vector<std::pair<double, double>> knots;
    for (const json& k : j.at("knots")) {
      if (!k.is_array() || k.size() != 2 || !k[0].is_number() || !k[1].is_number())
        throw std::invalid_argument("law json: knots must be [u, value] pairs");
      knots.emplace_back(k[0].get<double>(), k[1].get<double>());
    }
    return DissipationLaw::tabulated(std::move(knots));
  }
  throw std::invalid_argument("law json: unknown type '" + type + "'");
}

json to_json(const DissipationLaw& law) {
  return std::visit(
      Overloaded{
          [](const DissipationLaw::Convection& v) { return json{{"type", "convection"}, {"beta", v.beta}}; },
          [](const DissipationLaw::Radiation& v) { return json{{"type", "radiation"}, {"gamma", v.gamma}}; },
          [](const DissipationLaw::Linear& v) { return json{{"type", "linear"}, {"c", v.c}}; },
          [](const DissipationLaw::Power& v) { return json{{"type", "power"}, {"c", v.c}, {"alpha", v.alpha}}; },
          [](const DissipationLaw::SurfaceCost& v) {
            return json{{"type", "surface_cost"}, {"c1", v.c1}, {"c2", v.c2}, {"alpha", v.alpha}};
          },
          [](const DissipationLaw::Tabulated& v) {
            json knots = json::array();
            for (const auto& [u, t] : v.knots) knots.push_back({u, t});
            return json{{"type", "tabulated"}, {"knots", knots}};
          }},
      law.variant());
}

json to_json(const EnergyBreakdown& e) {
  return {{"dirichlet", e.dirichlet}, {"boundary", e.boundary}, {"penalty", e.penalty},
          {"total", e.total}, {"trace", e.trace}};
}

json to_json(const radial::RegimeReport& r) {
  json j{{"regime", std::string(1, radial::regime_label(r.regime))},
         {"critical_radius", r.critical_radius},
         {"threshold_radius", nullptr},
         {"optimal_radius", r.optimal_radius},
         {"optimal_energy", r.optimal_energy},
         {"tie", r.tie}};
  if (r.threshold_radius) j["threshold_radius"] = *r.threshold_radius;
  return j;
}

FourierRadius radius_from_json(const json& j) {
  if (j.is_number()) return FourierRadius::circle(j.get<double>());
  if (!j.is_object()) throw std::invalid_argument("radius json: expected a number or an object");
  const auto list = [&](const char* key) {
    std::vector<double> out;
    if (!j.contains(key)) return out;
    if (!j.at(key).is_array()) throw std::invalid_argument(std::string("radius json: '") + key + "' must be an array");
    for (const json& v : j.at(key)) {
      if (!v.is_number()) throw std::invalid_argument("radius json: coefficients must be numbers");
      out.push_back(v.get<double>());
    }
    return out;
  };
  std::vector<double> c = list("cos"), s = list("sin");
  const std::size_t m = std::max(c.size(), s.size());
  c.resize(m, 0.0);
  s.resize(m, 0.0);
  return FourierRadius(number(j, "a0"), std::move(c), std::move(s));
}

json to_json(const FourierRadius& r) {
  std::vector<double> c, s;
  for (int k = 1; k <= r.order(); ++k) {
    c.push_back(r.cos_coeff(k));
    s.push_back(r.sin_coeff(k));
  }
  return {{"a0", r.a0()}, {"cos", c}, {"sin", s}};
}

StarPair pair_from_json(const json& j) {
  if (!j.is_object() || !j.contains("inner") || !j.contains("outer"))
    throw std::invalid_argument("pair json: expected {\"inner\": ..., \"outer\": ...}");
  return StarPair(radius_from_json(j.at("inner")), radius_from_json(j.at("outer")));
}

json to_json(const StarPair& p) {
  return {{"inner", to_json(p.inner())}, {"outer", to_json(p.outer())}, {"gap", p.gap()}};
}

json parse_argument(const std::string& text) {
  std::string body = text;
  std::error_code ec;
  if (!text.empty() && text.front() != '{' && text.front() != '[' && std::filesystem::is_regular_file(text, ec)) {
    std::ifstream in(text);
    std::stringstream ss;
    ss << in.rdbuf();
    body = ss.str();
  }
  try {
    return json::parse(body);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("invalid json: ") + e.what());
  }
}

std::string axis_name(SweepAxis a) {
  switch (a) {
    case SweepAxis::beta:
      return "beta";
    case SweepAxis::R:
      return "R";
    case SweepAxis::lambda:
      return "lambda";
    case SweepAxis::gamma:
      return "gamma";
    case SweepAxis::M:
      return "M";
  }
  return "?";
}

SweepSpec sweep_from_json(const json& j) {
  if (!j.is_object() || !j.contains("axis") || !j.at("axis").is_string())
    throw std::invalid_argument("sweep json: missing 'axis'");
  const std::string axis = j.at("axis").get<std::string>();
  SweepAxis a;
  if (axis == "beta") a = SweepAxis::beta;
  else if (axis == "R") a = SweepAxis::R;
  else if (axis == "lambda") a = SweepAxis::lambda;
  else if (axis == "gamma") a = SweepAxis::gamma;
  else if (axis == "M") a = SweepAxis::M;
  else throw std::invalid_argument("sweep json: unknown axis '" + axis + "'");

  const std::string scale = j.contains("scale") ? j.at("scale").get<std::string>() : "linear";
  if (scale != "linear" && scale != "log") throw std::invalid_argument("sweep json: scale must be linear or log");
  if (!j.contains("count") || !j.at("count").is_number_integer())
    throw std::invalid_argument("sweep json: 'count' must be an integer");
  DissipationLaw law = j.contains("law") ? law_from_json(j.at("law")) : DissipationLaw::convection(1.0);
  SweepSpec spec{a,
                 number(j, "lo"),
                 number(j, "hi"),
                 j.at("count").get<int>(),
                 scale == "log",
                 static_cast<int>(number_or(j, "n", 2)),
                 number_or(j, "R", 2.0),
                 number_or(j, "lambda", 0.0),
                 std::move(law)};
  if (!(spec.lo < spec.hi)) throw std::invalid_argument("sweep json: need lo < hi");
  if (spec.count < 2) throw std::invalid_argument("sweep json: need count >= 2");
  if (spec.log_scale && !(spec.lo > 0.0)) throw std::invalid_argument("sweep json: log scale needs lo > 0");
  return spec;
}

}  // namespace thermoshield::io
