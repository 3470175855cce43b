// report_io.hpp: JSON and CSV rendering of RunReport.
//
// CSV columns, in order: section,name,value,target,target_label,delta,check,pass
// Empty target/target_label/delta cells mean the row has no reference value.

#pragma once

#include <ostream>
#include <string>

#include <json.hpp>

#include "experiments.hpp"

namespace spinwitness {

inline nlohmann::ordered_json to_json(const ReportRow& r) {
  nlohmann::ordered_json j;
  j["section"] = r.section;
  j["name"] = r.name;
  j["value"] = r.value;
  if (r.target) {
    j["target"] = r.target->value;
    j["target_label"] = r.target->label;
    j["delta"] = *r.delta();
  } else {
    j["target"] = nullptr;
    j["target_label"] = nullptr;
    j["delta"] = nullptr;
  }
  j["check"] = to_string(r.check);
  if (r.check == CheckKind::near) j["tolerance"] = r.upper;
  if (r.check == CheckKind::at_least || r.check == CheckKind::range) j["lower"] = r.lower;
  if (r.check == CheckKind::at_most || r.check == CheckKind::range) j["upper"] = r.upper;
  j["pass"] = r.pass;
  return j;
}

inline nlohmann::ordered_json to_json(const RunReport& rep) {
  nlohmann::ordered_json j;
  j["command"] = rep.command;
  j["seed"] = rep.seed;
  auto& params = j["parameters"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : rep.parameters) params[k] = v;
  auto& rows = j["results"] = nlohmann::ordered_json::array();
  for (const auto& r : rep.rows) rows.push_back(to_json(r));
  j["notes"] = rep.notes;
  j["pass"] = rep.passed();
  if (rep.runtime_seconds) j["runtime_seconds"] = *rep.runtime_seconds;
  return j;
}

inline void write_json(std::ostream& os, const RunReport& rep) { os << to_json(rep).dump(2) << '\n'; }

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline void write_csv(std::ostream& os, const RunReport& rep) {
  os << "section,name,value,target,target_label,delta,check,pass\n";
  for (const auto& r : rep.rows) {
    os << csv_escape(r.section) << ',' << csv_escape(r.name) << ',' << fmt_double(r.value) << ',';
    if (r.target) os << fmt_double(r.target->value) << ',' << csv_escape(r.target->label) << ',' << fmt_double(*r.delta());
    else os << ",,";
    os << ',' << to_string(r.check) << ',' << (r.pass ? "true" : "false") << '\n';
  }
}

}  // namespace spinwitness
