#include "quadrop/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "quadrop/errors.hpp"

namespace quadrop {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

std::vector<std::string> emit_report(const Report& r, const std::string& dir,
                                     bool json, bool csv) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir);

  std::vector<std::string> written;
  const auto write_file = [&](const std::string& name, const std::string& content) {
    const std::string path = dir + "/" + name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << content;
    if (!out) throw IoError("write failed for " + path);
    written.push_back(path);
  };

  if (json) {
    nlohmann::ordered_json root;
    root["command"] = r.command;
    root["config_hash"] = r.config_hash;
    root["all_pass"] = r.all_pass;
    root["summary"] = r.summary;
    write_file("summary.json", root.dump(2) + "\n");
  }
  if (csv)
    for (const auto& [name, content] : r.csv_files) write_file(name, content);
  return written;
}

}  // namespace quadrop
