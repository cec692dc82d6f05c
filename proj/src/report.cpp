#include "qrechacha/report.hpp"

#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "qrechacha/error.hpp"

namespace qrechacha {

namespace {

using nlohmann::json;

std::string hex_words(const StateMatrix& s) {
  std::ostringstream os;
  for (int i = 0; i < 16; ++i)
    os << (i ? "," : "") << std::hex << std::setw(8) << std::setfill('0') << s[i];
  return os.str();
}

const char* mode_name(QrnMode mode) { return mode == QrnMode::fixed ? "fixed" : "resampled"; }

}  // namespace

ReportFormat parse_report_format(const std::string& text) {
  if (text == "json") return ReportFormat::json;
  if (text == "csv") return ReportFormat::csv;
  if (text == "text") return ReportFormat::text;
  throw Error(Errc::usage, "unknown report format '" + text + "' (json|csv|text)");
}

ReportFormat format_for_path(const std::string& path) {
  auto ends_with = [&](const char* ext) {
    const std::string e(ext);
    return path.size() >= e.size() && path.compare(path.size() - e.size(), e.size(), e) == 0;
  };
  if (ends_with(".json")) return ReportFormat::json;
  if (ends_with(".csv")) return ReportFormat::csv;
  return ReportFormat::text;
}

std::string battery_to_json(const BatteryReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"id", r.id},
                    {"suite", r.suite},
                    {"test", r.label},
                    {"pass_count", r.pass_count},
                    {"not_applicable", r.not_applicable},
                    {"total", r.total},
                    {"proportion", r.proportion},
                    {"interval", {r.interval_low, r.interval_high}},
                    {"uniformity_p", r.uniformity_p},
                    {"proportion_ok", r.proportion_ok},
                    {"uniformity_ok", r.uniformity_ok}});
  }
  json doc = {{"kind", "randomness_battery"},
              {"provider", report.provider},
              {"is_quantum", report.is_quantum},
              {"suite", suite_name(report.suite)},
              {"alpha", report.alpha},
              {"alpha_uniformity", report.alpha_uniformity},
              {"sequences", report.sequences},
              {"bits_per_sequence", report.bits_per_sequence},
              {"passed", report.passed()},
              {"tests", rows}};
  return doc.dump(2);
}

std::string battery_to_text(const BatteryReport& report) {
  std::ostringstream os;
  os << "provider: " << report.provider << (report.is_quantum ? " (quantum)" : " (NOT quantum)")
     << "\n"
     << "sequences: " << report.sequences << " x " << report.bits_per_sequence
     << " bits, alpha " << report.alpha << ", uniformity alpha " << report.alpha_uniformity
     << "\n";
  if (!report.rows.empty())
    os << std::fixed << std::setprecision(4) << "proportion interval: ["
       << report.rows.front().interval_low << ", " << report.rows.front().interval_high << "]\n";
  os << "\n"
     << std::left << std::setw(6) << "suite" << std::setw(34) << "test" << std::right
     << std::setw(8) << "pass" << std::setw(8) << "n/a" << std::setw(12) << "proportion"
     << std::setw(12) << "P-value" << "  result\n";
  for (const auto& r : report.rows) {
    os << std::left << std::setw(6) << r.suite << std::setw(34) << r.label << std::right
       << std::setw(8) << r.pass_count << std::setw(8) << r.not_applicable << std::setw(12)
       << std::setprecision(4) << r.proportion << std::setw(12) << std::setprecision(6)
       << r.uniformity_p << "  " << (r.passed() ? "PASS" : "FAIL") << "\n";
  }
  os << "\noverall: " << (report.passed() ? "PASS" : "FAIL") << "\n";
  return os.str();
}

std::string battery_to_csv(const BatteryReport& report) {
  std::ostringstream os;
  os << "suite,id,test,pass_count,not_applicable,total,proportion,interval_low,interval_high,"
        "uniformity_p,passed,provider,is_quantum\n"
     << std::setprecision(9);
  for (const auto& r : report.rows)
    os << r.suite << "," << r.id << ",\"" << r.label << "\"," << r.pass_count << ","
       << r.not_applicable << "," << r.total << "," << r.proportion << "," << r.interval_low
       << "," << r.interval_high << "," << r.uniformity_p << "," << (r.passed() ? 1 : 0) << ","
       << report.provider << "," << (report.is_quantum ? 1 : 0) << "\n";
  return os.str();
}

std::string render(const BatteryReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::json: return battery_to_json(report);
    case ReportFormat::csv: return battery_to_csv(report);
    case ReportFormat::text: return battery_to_text(report);
  }
  return battery_to_text(report);
}

std::string avalanche_to_json(const AvalancheReport& r, const ProviderInfo& source) {
  json doc = {{"kind", "avalanche"},
              {"provider", source.provider},
              {"is_quantum", source.is_quantum},
              {"note", "empirical diffusion measurement, not a security bound"},
              {"rounds", r.rounds},
              {"trials", r.trials},
              {"target", r.target.to_string()},
              {"mean_flip_fraction", r.mean},
              {"half_width", r.half_width},
              {"aggregate_half_width", r.aggregate_half_width},
              {"max_deviation", r.max_deviation},
              {"bits_outside_band", r.bits_outside_band},
              {"per_bit", r.per_bit}};
  return doc.dump(2);
}

std::string avalanche_to_text(const AvalancheReport& r, const ProviderInfo& source) {
  std::ostringstream os;
  os << "provider: " << source.provider << (source.is_quantum ? " (quantum)" : " (NOT quantum)")
     << "\nrounds " << r.rounds << ", trials " << r.trials << ", flip " << r.target.to_string()
     << "\n"
     << std::fixed << std::setprecision(6) << "mean flip fraction: " << r.mean << " +- "
     << r.aggregate_half_width << "\nper-bit band: 0.5 +- " << r.half_width
     << ", bits outside: " << r.bits_outside_band << "/512, max deviation " << r.max_deviation
     << "\n";
  return os.str();
}

std::string diff_to_json(const DiffEstimate& e, const DiffSpec& spec, const ProviderInfo& source) {
  json doc = {{"kind", "differential_estimate"},
              {"provider", source.provider},
              {"is_quantum", source.is_quantum},
              {"note", "Monte-Carlo estimate, not a trail-search bound"},
              {"rounds", spec.rounds},
              {"input_diff", hex_words(spec.input_diff)},
              {"output_diff", hex_words(spec.output_diff)},
              {"mode", mode_name(e.mode)},
              {"samples", e.samples},
              {"hits", e.hits},
              {"probability", e.probability},
              {"half_width", e.half_width},
              {"rejected_masks", e.rejected_masks}};
  return doc.dump(2);
}

std::string diff_to_text(const DiffEstimate& e, const DiffSpec& spec, const ProviderInfo& source) {
  std::ostringstream os;
  os << "provider: " << source.provider << (source.is_quantum ? " (quantum)" : " (NOT quantum)")
     << "\nrounds " << spec.rounds << ", mode " << mode_name(e.mode) << ", samples " << e.samples
     << "\nhits " << e.hits << ", probability " << std::scientific << std::setprecision(6)
     << e.probability << " +- " << e.half_width << ", rejected masks " << e.rejected_masks
     << "\n";
  return os.str();
}

}  // namespace qrechacha
