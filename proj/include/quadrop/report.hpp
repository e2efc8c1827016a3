#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace quadrop {

// Machine-readable command output: one JSON summary plus named CSV tables,
// all byte-stable for a fixed config and seed.
struct Report {
  std::string command;
  std::string config_hash;
  nlohmann::ordered_json summary;
  std::vector<std::pair<std::string, std::string>> csv_files;  // name -> content
  bool all_pass = true;
};

// Fixed-width decimal formatting used everywhere a number reaches a file.
std::string fmt_double(double v);

// Writes summary.json (and the CSV tables) into dir; creates it if needed.
// Throws IoError on write failure. Returns the list of files written.
std::vector<std::string> emit_report(const Report& r, const std::string& dir,
                                     bool json = true, bool csv = true);

}  // namespace quadrop
