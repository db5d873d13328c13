#include "penaltylab/report.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <json.hpp>

#include "penaltylab/errors.hpp"

namespace penaltylab {

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

std::string Report::lookup(const std::string& field) const {
  for (const auto& [k, v] : summary)
    if (k == field) return v;
  if (!rows.empty()) {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == field) return rows.front()[i];
  }
  return "";
}

void Report::add_row(const Fields& row) {
  if (rows.empty() && columns.empty()) {
    for (const auto& [k, v] : row) columns.push_back(k);
  }
  if (row.size() != columns.size()) throw UsageError("row does not match the report columns");
  std::vector<std::string> cells;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (row[i].first != columns[i]) throw UsageError("row column '" + row[i].first + "' out of order");
    cells.push_back(row[i].second);
  }
  rows.push_back(std::move(cells));
}

std::string cell(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);
  return buf;
}

std::string cell(const Vec& x) {
  std::string out;
  for (Eigen::Index i = 0; i < x.size(); ++i) out += (i ? ";" : "") + cell(x[i]);
  return out;
}

std::string cell(bool b) { return b ? "true" : "false"; }

std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string to_csv(const Report& r) {
  std::string out;
  out += "# command: " + r.command + "\n";
  out += "# version: " + std::string(kToolVersion) + "\n";
  out += "# inputs_digest: " + r.inputs_digest + "\n";
  for (const std::string& n : r.notes) out += "# note: " + n + "\n";
  for (const auto& [k, v] : r.summary) out += "# " + k + ": " + v + "\n";
  for (std::size_t i = 0; i < r.columns.size(); ++i) out += (i ? "," : "") + csv_escape(r.columns[i]);
  if (!r.columns.empty()) out += "\n";
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_escape(row[i]);
    out += "\n";
  }
  return out;
}

std::string to_json(const Report& r) {
  nlohmann::ordered_json j;
  j["command"] = r.command;
  j["version"] = kToolVersion;
  j["inputs_digest"] = r.inputs_digest;
  j["notes"] = r.notes;
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.summary) summary[k] = v;
  j["summary"] = summary;
  j["columns"] = r.columns;
  j["rows"] = r.rows;
  return j.dump(2) + "\n";
}

Report report_from_json(const std::string& text) {
  Report r;
  try {
    const auto j = nlohmann::ordered_json::parse(text);
    r.command = j.at("command").get<std::string>();
    r.inputs_digest = j.value("inputs_digest", "");
    r.notes = j.value("notes", std::vector<std::string>{});
    for (const auto& [k, v] : j.at("summary").items()) r.summary.emplace_back(k, v.get<std::string>());
    r.columns = j.at("columns").get<std::vector<std::string>>();
    r.rows = j.at("rows").get<std::vector<std::vector<std::string>>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed report: ") + e.what(), 0);
  }
  return r;
}

}  // namespace penaltylab
