#include "fairlens/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fairlens/error.hpp"
#include "fairlens/rng.hpp"

namespace fairlens {

namespace {

// Metric names rendered x100 under --paper-scale.
const std::set<std::string>& paper_scaled_names() {
  static const std::set<std::string> names = {
      "lic", "lic_d", "lic_m", "error", "biasamp", "gender_mention_rate",
      "chair_s", "chair_i", "hr_object", "hr_gender",
  };
  return names;
}

std::string format_value(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

std::string emit_report(const MetricReport& report, ReportFormat format, bool paper_scale) {
  if (format == ReportFormat::Json) {
    nlohmann::json doc;  // lexicographic key order
    doc["tool_version"] = report.tool_version;
    doc["subcommand"] = report.subcommand;
    if (report.timestamp) {
      doc["timestamp"] = *report.timestamp;
    } else {
      doc["timestamp"] = nullptr;
    }
    doc["config"] = report.config;
    doc["config"]["inputs"] = report.input_digests;
    for (const auto& [family, values] : report.metrics) {
      for (const auto& [name, value] : values) {
        if (std::isnan(value)) {
          doc["metrics"][family][name] = nullptr;
        } else if (std::isinf(value)) {
          doc["metrics"][family][name] = value > 0 ? "inf" : "-inf";
        } else {
          doc["metrics"][family][name] = value;
        }
      }
    }
    for (const auto& [key, value] : report.notes) {
      doc["notes"][key] = value;
    }
    if (!report.warnings.empty()) {
      doc["warnings"] = report.warnings;
    }
    return doc.dump(2) + "\n";
  }

  // table format
  std::ostringstream out;
  out << report.tool_version << " — " << report.subcommand << "\n";
  if (report.timestamp) out << "timestamp: " << *report.timestamp << "\n";
  std::size_t width = 12;
  for (const auto& [family, values] : report.metrics) {
    for (const auto& [name, value] : values) {
      width = std::max(width, family.size() + name.size() + 1);
    }
  }
  for (const auto& [family, values] : report.metrics) {
    out << "\n[" << family << "]\n";
    for (const auto& [name, value] : values) {
      double shown = value;
      if (paper_scale && paper_scaled_names().count(name)) shown = value * 100.0;
      std::string label = name;
      out << "  " << label;
      for (std::size_t i = label.size(); i < width; ++i) out << ' ';
      out << "  " << format_value(shown) << "\n";
    }
  }
  if (!report.notes.empty()) {
    out << "\n[notes]\n";
    for (const auto& [key, value] : report.notes) {
      out << "  " << key << ": " << value << "\n";
    }
  }
  if (!report.warnings.empty()) {
    out << "\n[warnings]\n";
    for (const auto& w : report.warnings) out << "  " << w << "\n";
  }
  return out.str();
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open file for digest: " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 14];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    h = fnv1a(std::string_view(buf, static_cast<std::size_t>(in.gcount())), h);
  }
  char hex[32];
  std::snprintf(hex, sizeof(hex), "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return hex;
}

}  // namespace fairlens
