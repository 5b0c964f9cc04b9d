#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "wfsep/errors.hpp"
#include "wfsep/sde.hpp"

namespace wfsep::io {

// Shortest round-trip representation is not required; 17 significant digits
// always round-trips a double and keeps files byte-stable.
inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_path_csv(std::ostream& os, const SamplePath& p) {
  os << "t,x\n";
  for (std::size_t i = 0; i < p.size(); ++i) os << fmt(p.times[i]) << ',' << fmt(p.values[i]) << '\n';
}

inline nlohmann::json path_metadata(const SamplePath& p) {
  nlohmann::json j;
  j["hit0"] = p.hit0 ? nlohmann::json(*p.hit0) : nlohmann::json(nullptr);
  j["hit1"] = p.hit1 ? nlohmann::json(*p.hit1) : nlohmann::json(nullptr);
  j["hits0"] = p.hits0;
  j["hits1"] = p.hits1;
  j["absorbed"] = p.absorbed;
  j["descents"] = nlohmann::json::array();
  for (const auto& d : p.descents) {
    nlohmann::json r;
    r["index"] = d.index;
    r["endpoint"] = d.endpoint;
    r["clock"] = d.clock;
    r["elapsed"] = d.elapsed;
    r["final_log"] = d.final_log;
    r["hit"] = d.hit;
    r["tail"] = d.tail;
    j["descents"].push_back(r);
  }
  return j;
}

inline void apply_metadata(SamplePath& p, const nlohmann::json& j) {
  if (j.contains("hit0") && !j["hit0"].is_null()) p.hit0 = j["hit0"].get<double>();
  if (j.contains("hit1") && !j["hit1"].is_null()) p.hit1 = j["hit1"].get<double>();
  if (j.contains("hits0")) p.hits0 = j["hits0"].get<std::vector<double>>();
  if (j.contains("hits1")) p.hits1 = j["hits1"].get<std::vector<double>>();
  if (j.contains("absorbed")) p.absorbed = j["absorbed"].get<bool>();
  if (j.contains("descents"))
    for (const auto& r : j["descents"]) {
      DescentRecord d;
      d.index = r["index"].get<std::size_t>();
      d.endpoint = r["endpoint"].get<int>();
      d.clock = r["clock"].get<double>();
      d.elapsed = r["elapsed"].get<double>();
      d.final_log = r["final_log"].get<double>();
      d.hit = r["hit"].get<bool>();
      d.tail = r["tail"].get<std::vector<std::pair<double, double>>>();
      p.descents.push_back(std::move(d));
    }
}

// Reads a `t,x` CSV (header optional). Hit annotations come from the metadata
// file when one is given.
inline SamplePath read_path_csv(std::istream& is) {
  SamplePath p;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw InvalidArgument("path csv line " + std::to_string(lineno) + ": expected t,x");
    const std::string a = line.substr(0, comma), b = line.substr(comma + 1);
    if (lineno == 1 && (a == "t" || a == "time")) continue;
    try {
      std::size_t ea = 0, eb = 0;
      const double t = std::stod(a, &ea), x = std::stod(b, &eb);
      if (ea != a.size() || eb != b.size()) throw std::invalid_argument("trailing characters");
      p.times.push_back(t);
      p.values.push_back(x);
    } catch (const std::exception&) {
      throw InvalidArgument("path csv line " + std::to_string(lineno) + ": not a number");
    }
  }
  p.validate();
  return p;
}

inline SamplePath read_path_files(const std::string& csv, const std::string& meta = {}) {
  std::ifstream f(csv);
  if (!f) throw InvalidArgument("cannot open path file " + csv);
  SamplePath p = read_path_csv(f);
  if (!meta.empty()) {
    std::ifstream m(meta);
    if (!m) throw InvalidArgument("cannot open metadata file " + meta);
    apply_metadata(p, nlohmann::json::parse(m));
  }
  return p;
}

}  // namespace wfsep::io
