#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "quadrop/symbol.hpp"
#include "quadrop/thick_set.hpp"

namespace quadrop {

// Parsed and validated run configuration. Operators come either as
// generalized Ornstein-Uhlenbeck data (mode "gou"), as explicit coefficient
// matrices (mode "symbol"), or as the Kramers-Fokker-Planck family with
// potential parameter a (mode "kfp").
struct RunConfig {
  std::string mode;            // gou | symbol | kfp
  QuadraticSymbol symbol;
  std::optional<GOUSpec> gou;  // present for mode == gou
  double kfp_a = 0.0;

  int N = 32;        // Hermite modes per dimension
  double L = 12.0;   // grid half-width
  int M = 256;       // grid points per dimension
  double rank_tol = 0.0;  // 0 = default

  std::vector<double> t_grid;
  std::optional<ThickSet> omega;
  double T = 1.0;
  unsigned long seed = 0;
  std::string out_dir = "out";

  nlohmann::ordered_json raw;  // canonical parsed form (for hashing)
};

// Throws FileNotFound / SchemaError (message carries the field path).
RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text);

// FNV-1a hash of the canonical serialized config, as fixed-width hex.
std::string config_hash(const RunConfig& cfg);

}  // namespace quadrop
