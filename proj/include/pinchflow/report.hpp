#pragma once

#include <nlohmann/json.hpp>
#include <ostream>
#include <string>
#include <vector>

namespace pinchflow {

using json = nlohmann::json;

// ============================================================================
// Run records and deterministic file emission (CSV / JSON / SVG)
// ============================================================================

struct RunRecord {
    json config;     ///< flat object of string/number fields, echoed into outputs
    std::string tool_version;
    double wall_time_s = 0.0;
    json payload;
    std::vector<std::string> warnings;

    json to_json() const;
    static RunRecord from_json(const json& j);
    bool operator==(const RunRecord& o) const;
};

std::string tool_version();

/// Format a double with 17 significant digits, '.' decimal separator.
std::string format_g17(double v);

/// CSV with leading "# key=value" config lines, LF endings; byte-identical
/// for identical inputs.
void write_csv(std::ostream& out, const json& config, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);
void write_csv_file(const std::string& path, const json& config,
                    const std::vector<std::string>& header,
                    const std::vector<std::vector<double>>& rows);

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// Standalone line-plot SVG, optional log10 y-axis, two-series overlays
/// supported; deterministic markup for identical input.
void emit_plot(std::ostream& out, const json& config, const std::vector<PlotSeries>& series,
               const std::string& title, bool log_y);
void emit_plot_file(const std::string& path, const json& config,
                    const std::vector<PlotSeries>& series, const std::string& title, bool log_y);

} // namespace pinchflow
