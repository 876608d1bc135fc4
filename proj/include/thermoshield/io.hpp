#pragma once

#include <string>

#include <json.hpp>

#include "thermoshield/dissipation.hpp"
#include "thermoshield/fourier.hpp"
#include "thermoshield/radial_engine.hpp"

namespace thermoshield::io {

using nlohmann::json;

/// {"type": "convection", "beta": b}, {"type": "radiation", "gamma": g},
/// {"type": "linear", "c": c}, {"type": "power", "c": c, "alpha": a},
/// {"type": "surface_cost", "c1": c1, "c2": c2, "alpha": a},
/// {"type": "tabulated", "knots": [[u, v], ...]}.
/// Throws std::invalid_argument on unknown types or missing fields.
DissipationLaw law_from_json(const json& j);
json to_json(const DissipationLaw& law);

json to_json(const EnergyBreakdown& e);
json to_json(const radial::RegimeReport& r);

/// A radius function is either a number (circle) or
/// {"a0": a0, "cos": [a_1..a_m], "sin": [b_1..b_m]}.
FourierRadius radius_from_json(const json& j);
json to_json(const FourierRadius& r);

/// {"inner": <radius>, "outer": <radius>}.
StarPair pair_from_json(const json& j);
json to_json(const StarPair& p);

/// Parses a JSON document given inline or, when the text names a readable
/// file, from that file.
json parse_argument(const std::string& text);

enum class SweepAxis { beta, R, lambda, gamma, M };

struct SweepSpec {
  SweepAxis axis;
  double lo;
  double hi;
  int count;
  bool log_scale;
  int n;
  double R;
  double lambda;
  DissipationLaw law;
};

/// {"axis": "beta|R|lambda|gamma|M", "lo": x, "hi": y, "count": k,
///  "scale": "linear|log", "n": 2, "R": 2, "lambda": 0, "law": {...}}.
/// Requires lo < hi and count >= 2 (lo > 0 for log).
SweepSpec sweep_from_json(const json& j);
std::string axis_name(SweepAxis a);

}  // namespace thermoshield::io
