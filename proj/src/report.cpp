#include "coherent/report.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <stdexcept>

namespace coherent {

using nlohmann::json;

namespace {

std::string format_double(double x, int digits) {
  if (std::isnan(x)) return "\"nan\"";
  if (std::isinf(x)) return x > 0 ? "\"inf\"" : "\"-inf\"";
  if (x == 0.0) return "0";  // folds -0
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

void write(const json& v, std::string& out) {
  switch (v.type()) {
    case json::value_t::object: {
      out += '{';
      bool first = true;
      for (const auto& [key, item] : v.items()) {  // object_t is a std::map: sorted
        if (!first) out += ',';
        first = false;
        out += json(key).dump();
        out += ':';
        write(item, out);
      }
      out += '}';
      break;
    }
    case json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        write(v[i], out);
      }
      out += ']';
      break;
    }
    case json::value_t::number_float:
      out += format_double(v.get<double>(), 12);
      break;
    default:
      out += v.dump();
  }
}

std::string csv_number(double x) {
  const std::string s = format_double(x, 12);
  return s.front() == '"' ? s.substr(1, s.size() - 2) : s;
}

std::string emit_json(const Report& r) {
  json doc;
  doc["command"] = r.command;
  doc["arguments"] = r.arguments;
  doc["results"] = r.results;
  doc["warnings"] = r.warnings;
  json prov;
  prov["tool_version"] = kToolVersion;
  prov["inputs"] = json::object();
  for (const auto& [path, digest] : r.input_digests) prov["inputs"][path] = "sha256:" + digest;
  doc["provenance"] = prov;
  return canonical_json(doc) + "\n";
}

std::string emit_csv(const Report& r) {
  if (r.curves.empty()) throw std::invalid_argument("report has no curves to emit as CSV");
  std::set<double> grid;
  for (const auto& c : r.curves) grid.insert(c.t.begin(), c.t.end());
  std::string out = "t";
  for (const auto& c : r.curves) out += "," + c.name;
  out += "\n";
  for (double t : grid) {
    out += csv_number(t);
    for (const auto& c : r.curves) {
      out += ",";
      auto it = std::find(c.t.begin(), c.t.end(), t);
      if (it != c.t.end()) out += csv_number(c.y[static_cast<std::size_t>(it - c.t.begin())]);
    }
    out += "\n";
  }
  return out;
}

std::string emit_svg(const Report& r) {
  if (r.curves.empty()) throw std::invalid_argument("report has no curves to emit as SVG");
  constexpr double width = 640, height = 400, margin = 40;
  double tmin = std::numeric_limits<double>::infinity(), tmax = -tmin, ymin = tmin, ymax = -tmin;
  for (const auto& c : r.curves) {
    for (std::size_t i = 0; i < c.t.size(); ++i) {
      if (!std::isfinite(c.t[i]) || !std::isfinite(c.y[i])) continue;
      tmin = std::min(tmin, c.t[i]);
      tmax = std::max(tmax, c.t[i]);
      ymin = std::min(ymin, c.y[i]);
      ymax = std::max(ymax, c.y[i]);
    }
  }
  if (!(tmax > tmin)) tmax = tmin + 1;
  if (!(ymax > ymin)) ymax = ymin + 1;
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  char buf[160];
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" viewBox=\"0 0 640 400\">\n";
  std::snprintf(buf, sizeof buf, "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" stroke=\"#999\"/>\n",
                margin, margin, width - 2 * margin, height - 2 * margin);
  out += buf;
  for (std::size_t k = 0; k < r.curves.size(); ++k) {
    const auto& c = r.curves[k];
    out += "<polyline fill=\"none\" stroke=\"";
    out += colors[k % 5];
    out += "\" data-name=\"" + c.name + "\" points=\"";
    for (std::size_t i = 0; i < c.t.size(); ++i) {
      if (!std::isfinite(c.t[i]) || !std::isfinite(c.y[i])) continue;
      const double x = margin + (c.t[i] - tmin) / (tmax - tmin) * (width - 2 * margin);
      const double y = height - margin - (c.y[i] - ymin) / (ymax - ymin) * (height - 2 * margin);
      std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", i ? " " : "", x, y);
      out += buf;
    }
    out += "\"/>\n";
    std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" font-size=\"12\" fill=\"%s\">", margin + 8,
                  margin + 16 + 14 * static_cast<double>(k), colors[k % 5]);
    out += buf;
    out += c.name + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace

double report_number(double x) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

std::string canonical_json(const json& value) {
  std::string out;
  write(value, out);
  return out;
}

std::string emit(const Report& report, Format format) {
  switch (format) {
    case Format::json:
      return emit_json(report);
    case Format::csv:
      return emit_csv(report);
    case Format::svg:
      return emit_svg(report);
  }
  return {};
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

}  // namespace coherent
