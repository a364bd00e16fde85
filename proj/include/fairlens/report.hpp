#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fairlens {

inline constexpr const char* kToolVersion = "fairlens 0.1.0";

// One run's output: every value traceable to a single module operation,
// with enough config echo (flags, seed, input digests) to reproduce the
// run bit-exactly.
struct MetricReport {
  std::string tool_version = kToolVersion;
  std::string subcommand;
  // Unset by default so identical runs emit identical bytes; the CLI
  // fills it only when asked (--timestamp).
  std::optional<std::string> timestamp;
  std::map<std::string, std::string> config;         // flag -> value echo
  std::map<std::string, std::string> input_digests;  // path -> fnv1a64 hex
  std::map<std::string, std::map<std::string, double>> metrics;  // family -> name -> value
  std::map<std::string, std::string> notes;  // non-numeric results (labels, lists)
  std::vector<std::string> warnings;
};

enum class ReportFormat { Json, Table };

// json: stable key order, byte-identical across identical runs.
// table: aligned text; with paper_scale, proportion-style caption metrics
// (lic*, error, biasamp, gender mention rate, chair, hit ratios) render
// multiplied by 100. Scaling affects rendering only, never stored values.
std::string emit_report(const MetricReport& report, ReportFormat format,
                        bool paper_scale = false);

// FNV-1a 64 over the file bytes, hex encoded; used for the config echo.
std::string file_digest(const std::string& path);

}  // namespace fairlens
