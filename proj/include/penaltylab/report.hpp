#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "penaltylab/types.hpp"

namespace penaltylab {

inline constexpr const char* kToolVersion = "penaltylab 0.1.0";

using Fields = std::vector<std::pair<std::string, std::string>>;

/// Result of one command: summary fields plus a table of rows sharing
/// `columns`. All cells are text so reruns compare byte for byte.
struct Report {
  std::string command;
  std::string inputs_digest;
  std::vector<std::string> notes;
  Fields summary;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  /// Summary field first, then the column of the first row. Empty if absent.
  std::string lookup(const std::string& field) const;
  /// Appends a row given as (column, value) pairs; columns are fixed by the first row.
  void add_row(const Fields& row);
};

/// Numbers in reports: %.12g, with inf, -inf and nan spelled out.
std::string cell(double v);
std::string cell(const Vec& x);  // coordinates joined by ';'
std::string cell(bool b);

/// 64-bit FNV-1a, as 16 hex digits.
std::string fnv1a_hex(std::string_view data);

/// Comment lines (`# key: value`) for command, version, digest, notes and
/// summary, then a header row and the data rows.
std::string to_csv(const Report& r);
std::string to_json(const Report& r);
/// Inverse of to_json, used by the plot-data emitter.
Report report_from_json(const std::string& text);

}  // namespace penaltylab
