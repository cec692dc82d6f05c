#pragma once

// Report rendering. Every JSON document carries the same envelope:
// {"kind", "provider", "is_quantum", ...}.

#include <string>

#include "qrechacha/analysis.hpp"
#include "qrechacha/battery.hpp"

namespace qrechacha {

enum class ReportFormat { json, csv, text };

ReportFormat parse_report_format(const std::string& text);
/// Format implied by a file extension (.json, .csv, anything else text).
ReportFormat format_for_path(const std::string& path);

std::string battery_to_json(const BatteryReport& report);
/// Table with one line per test row: pass count, proportion, uniformity P.
std::string battery_to_text(const BatteryReport& report);
std::string battery_to_csv(const BatteryReport& report);
std::string render(const BatteryReport& report, ReportFormat format);

struct ProviderInfo {
  std::string provider;
  bool is_quantum = false;
};

std::string avalanche_to_json(const AvalancheReport& report, const ProviderInfo& source);
std::string avalanche_to_text(const AvalancheReport& report, const ProviderInfo& source);
std::string diff_to_json(const DiffEstimate& estimate, const DiffSpec& spec,
                         const ProviderInfo& source);
std::string diff_to_text(const DiffEstimate& estimate, const DiffSpec& spec,
                         const ProviderInfo& source);

}  // namespace qrechacha
