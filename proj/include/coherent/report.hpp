#ifndef COHERENT_REPORT_HPP
#define COHERENT_REPORT_HPP

#include "json.hpp"

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace coherent {

inline constexpr const char* kToolVersion = "coherent-markets 0.1.0";

/// Named curve sampled on a grid, for CSV/SVG output.
struct Curve {
  std::string name;
  std::vector<double> t;
  std::vector<double> y;
};

struct Report {
  explicit Report(std::string name = {}) : command(std::move(name)) {}

  std::string command;
  nlohmann::json arguments = nlohmann::json::object();
  nlohmann::json results = nlohmann::json::object();
  std::vector<std::string> warnings;
  std::map<std::string, std::string> input_digests;  // path -> sha256 hex
  std::vector<Curve> curves;
};

enum class Format { json, csv, svg };

/// Canonical JSON: sorted keys, floats printed with 12 significant digits,
/// non-finite numbers as the strings "inf", "-inf" and "nan".
std::string canonical_json(const nlohmann::json& value);

/// Serializes a report. CSV has a `t` column followed by one column per
/// curve; SVG draws one polyline per curve.
std::string emit(const Report& report, Format format);

/// Rounds to 12 significant digits, the precision used in reports.
double report_number(double x);

std::string sha256_hex(std::string_view bytes);

}  // namespace coherent

#endif  // COHERENT_REPORT_HPP
