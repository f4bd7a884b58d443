#include "skinrig/control/trace.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <string>

#include <json.hpp>

#include "skinrig/errors.hpp"

namespace skinrig::control {

double ScriptedContact::force_at(double t) const {
  if (knots.empty() || t < knots.front().first || t > knots.back().first) return 0.0;
  for (std::size_t k = 1; k < knots.size(); ++k) {
    const auto& [t0, f0] = knots[k - 1];
    const auto& [t1, f1] = knots[k];
    if (t <= t1) return f0 + (f1 - f0) * (t - t0) / (t1 - t0);
  }
  return knots.back().second;
}

ContactTrace parse_trace(std::istream& in) {
  ContactTrace trace;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "trace line " + std::to_string(line_no) + ": ";
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw TraceFormatError(where + e.what());
    }
    if (rec.contains("kind") && !rec.contains("t")) continue;
    try {
      ScriptedContact key;
      key.link = rec.at("link").get<int>();
      if (rec.contains("cell_id")) {
        key.cell_id = rec.at("cell_id").get<int>();
      } else if (rec.contains("local_point")) {
        const auto& p = rec.at("local_point");
        key.local_point = Vec3(p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>());
      } else {
        throw TraceFormatError(where + "needs cell_id or local_point");
      }
      const double t = rec.at("t").get<double>();
      const double f = rec.at("force").get<double>();
      if (!(f >= 0.0)) throw TraceFormatError(where + "force must be non-negative");
      auto it = std::find_if(trace.contacts.begin(), trace.contacts.end(), [&](const auto& c) {
        return c.link == key.link && c.cell_id == key.cell_id && c.local_point == key.local_point;
      });
      if (it == trace.contacts.end()) {
        trace.contacts.push_back(key);
        it = trace.contacts.end() - 1;
      }
      if (!it->knots.empty() && !(t > it->knots.back().first)) {
        throw TraceFormatError(where + "times must increase per contact");
      }
      it->knots.emplace_back(t, f);
    } catch (const nlohmann::json::exception& e) {
      throw TraceFormatError(where + e.what());
    }
  }
  return trace;
}

ContactTrace load_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw TraceFormatError("cannot open trace " + path.string());
  return parse_trace(in);
}

}  // namespace skinrig::control
