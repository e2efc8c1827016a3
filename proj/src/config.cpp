#include "quadrop/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "quadrop/errors.hpp"

namespace quadrop {

namespace {

using njson = nlohmann::ordered_json;

void reject_unknown(const njson& obj, const std::set<std::string>& allowed,
                    const std::string& path) {
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key))
      throw SchemaError("unknown key '" + path + key + "'");
}

double get_number(const njson& obj, const std::string& key, const std::string& path) {
  if (!obj.contains(key)) throw SchemaError("missing field '" + path + key + "'");
  const auto& v = obj.at(key);
  if (!v.is_number()) throw SchemaError("field '" + path + key + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw SchemaError("field '" + path + key + "' must be finite");
  return d;
}

rmat get_matrix(const njson& obj, const std::string& key, const std::string& path) {
  if (!obj.contains(key)) throw SchemaError("missing field '" + path + key + "'");
  const auto& v = obj.at(key);
  if (!v.is_array() || v.empty()) throw SchemaError("field '" + path + key + "' must be a nonempty matrix");
  const size_t rows = v.size();
  const size_t cols = v.at(0).is_array() ? v.at(0).size() : 0;
  if (cols == 0) throw SchemaError("field '" + path + key + "' must be a matrix of rows");
  rmat m(rows, cols);
  for (size_t r = 0; r < rows; ++r) {
    if (!v.at(r).is_array() || v.at(r).size() != cols)
      throw SchemaError("field '" + path + key + "' has ragged rows");
    for (size_t c = 0; c < cols; ++c) {
      if (!v.at(r).at(c).is_number())
        throw SchemaError("field '" + path + key + "' must contain numbers");
      m(r, c) = v.at(r).at(c).get<double>();
      if (!std::isfinite(m(r, c)))
        throw SchemaError("field '" + path + key + "' must be finite");
    }
  }
  return m;
}

ThickSet parse_omega(const njson& o) {
  reject_unknown(o, {"cell", "boxes", "gamma", "carveouts"}, "omega.");
  if (!o.contains("cell") || !o.at("cell").is_array())
    throw SchemaError("field 'omega.cell' must be an array");
  const int n = static_cast<int>(o.at("cell").size());
  rvec cell(n);
  for (int d = 0; d < n; ++d) cell(d) = o.at("cell").at(d).get<double>();

  const auto parse_boxes = [&](const njson& arr, const std::string& what) {
    std::vector<Box> boxes;
    for (const auto& b : arr) {
      if (!b.is_array() || b.size() != 2)
        throw SchemaError("field 'omega." + what + "' entries must be [lo, hi] pairs");
      Box box;
      box.lo = rvec(n);
      box.hi = rvec(n);
      for (int d = 0; d < n; ++d) {
        box.lo(d) = b.at(0).at(d).get<double>();
        box.hi(d) = b.at(1).at(d).get<double>();
      }
      boxes.push_back(box);
    }
    return boxes;
  };
  if (!o.contains("boxes")) throw SchemaError("missing field 'omega.boxes'");
  const std::vector<Box> pattern = parse_boxes(o.at("boxes"), "boxes");
  std::vector<Box> carveouts;
  if (o.contains("carveouts")) carveouts = parse_boxes(o.at("carveouts"), "carveouts");
  const double gamma = get_number(o, "gamma", "omega.");
  try {
    return make_thick_set(n, cell, pattern, gamma, carveouts);
  } catch (const Error& e) {
    throw SchemaError(std::string("omega: ") + e.what());
  }
}

RunConfig parse_json(const njson& j) {
  if (!j.is_object()) throw SchemaError("config root must be an object");
  reject_unknown(j, {"operator", "discretization", "tolerances", "t_grid", "omega",
                     "T", "seed", "out_dir"},
                 "");
  if (!j.contains("operator")) throw SchemaError("missing field 'operator'");
  const njson& op = j.at("operator");
  reject_unknown(op, {"mode", "n", "Q", "R", "B", "re", "im", "a"}, "operator.");
  if (!op.contains("mode") || !op.at("mode").is_string())
    throw SchemaError("field 'operator.mode' must be a string");

  RunConfig cfg;
  cfg.mode = op.at("mode").get<std::string>();
  try {
    if (cfg.mode == "gou") {
      const int n = static_cast<int>(get_number(op, "n", "operator."));
      GOUSpec spec;
      spec.n = n;
      spec.Q = get_matrix(op, "Q", "operator.");
      spec.R = get_matrix(op, "R", "operator.");
      spec.B = get_matrix(op, "B", "operator.");
      const GOUSymbol built = gou_symbol(spec);
      cfg.symbol = built.symbol;
      cfg.gou = spec;
    } else if (cfg.mode == "symbol") {
      const rmat re = get_matrix(op, "re", "operator.");
      rmat im = rmat::Zero(re.rows(), re.cols());
      if (op.contains("im")) im = get_matrix(op, "im", "operator.");
      if (im.rows() != re.rows() || im.cols() != re.cols())
        throw SchemaError("fields 'operator.re' and 'operator.im' must have equal shape");
      cfg.symbol = build_symbol(re.cast<cdouble>() + cdouble(0.0, 1.0) * im.cast<cdouble>());
    } else if (cfg.mode == "kfp") {
      const int n = static_cast<int>(get_number(op, "n", "operator."));
      cfg.kfp_a = op.contains("a") ? get_number(op, "a", "operator.") : 0.0;
      cfg.symbol = kfp_symbol(n, cfg.kfp_a);
    } else {
      throw SchemaError("field 'operator.mode' must be one of gou|symbol|kfp");
    }
  } catch (const SchemaError&) {
    throw;
  } catch (const NotAccretive& e) {
    // Name the offending matrix for gou configs.
    if (cfg.mode == "gou") throw SchemaError(std::string("operator.Q/operator.R: ") + e.what());
    throw SchemaError(e.what());
  } catch (const Error& e) {
    throw SchemaError(e.what());
  }

  if (j.contains("discretization")) {
    const njson& d = j.at("discretization");
    reject_unknown(d, {"N", "L", "M"}, "discretization.");
    if (d.contains("N")) cfg.N = static_cast<int>(get_number(d, "N", "discretization."));
    if (d.contains("L")) cfg.L = get_number(d, "L", "discretization.");
    if (d.contains("M")) cfg.M = static_cast<int>(get_number(d, "M", "discretization."));
  }
  if (j.contains("tolerances")) {
    const njson& t = j.at("tolerances");
    reject_unknown(t, {"rank_tol"}, "tolerances.");
    if (t.contains("rank_tol")) cfg.rank_tol = get_number(t, "rank_tol", "tolerances.");
  }
  if (j.contains("t_grid")) {
    if (!j.at("t_grid").is_array()) throw SchemaError("field 't_grid' must be an array");
    for (const auto& v : j.at("t_grid")) {
      const double t = v.get<double>();
      if (!(t > 0.0) || !std::isfinite(t)) throw SchemaError("field 't_grid' must contain positive times");
      cfg.t_grid.push_back(t);
    }
  }
  if (j.contains("omega")) cfg.omega = parse_omega(j.at("omega"));
  if (j.contains("T")) {
    cfg.T = get_number(j, "T", "");
    if (cfg.T <= 0.0) throw SchemaError("field 'T' must be positive");
  }
  if (!j.contains("seed")) throw SchemaError("missing field 'seed' (randomized routines need it)");
  cfg.seed = j.at("seed").get<unsigned long>();
  if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();

  cfg.raw = j;
  return cfg;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  njson j;
  try {
    j = njson::parse(text);
  } catch (const std::exception& e) {
    throw SchemaError(std::string("invalid JSON: ") + e.what());
  }
  return parse_json(j);
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFound("config file not found: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string config_hash(const RunConfig& cfg) {
  const std::string canon = cfg.raw.dump();
  unsigned long long h = 1469598103934665603ull;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", h);
  return std::string(buf);
}

}  // namespace quadrop
