#include "pinchflow/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "pinchflow/errors.hpp"

namespace pinchflow {

std::string tool_version() { return "pinchflow 1.0.0"; }

json RunRecord::to_json() const {
    return json{{"config", config},
                {"tool_version", tool_version},
                {"wall_time_s", wall_time_s},
                {"payload", payload},
                {"warnings", warnings}};
}

RunRecord RunRecord::from_json(const json& j) {
    RunRecord r;
    r.config = j.at("config");
    r.tool_version = j.at("tool_version").get<std::string>();
    r.wall_time_s = j.at("wall_time_s").get<double>();
    r.payload = j.at("payload");
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    return r;
}

bool RunRecord::operator==(const RunRecord& o) const {
    return config == o.config && tool_version == o.tool_version &&
           wall_time_s == o.wall_time_s && payload == o.payload && warnings == o.warnings;
}

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

void write_config_comments(std::ostream& out, const json& config) {
    if (!config.is_object()) return;
    for (auto it = config.begin(); it != config.end(); ++it) {
        out << "# " << it.key() << "=";
        if (it.value().is_string()) out << it.value().get<std::string>();
        else out << it.value().dump();
        out << "\n";
    }
}

} // namespace

void write_csv(std::ostream& out, const json& config, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    write_config_comments(out, config);
    for (size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
    out << "\n";
    for (const auto& row : rows) {
        if (row.size() != header.size())
            throw ValidationError("write_csv: row width does not match header");
        for (size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_g17(row[c]);
        out << "\n";
    }
}

void write_csv_file(const std::string& path, const json& config,
                    const std::vector<std::string>& header,
                    const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path, std::ios::binary); // binary keeps LF endings everywhere
    if (!out) throw ValidationError("write_csv_file: cannot open " + path);
    write_csv(out, config, header, rows);
}

// ----------------------------------------------------------------------------
// SVG line plots
// ----------------------------------------------------------------------------

namespace {

std::string fmt4(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::string fmt_tick(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

const char* kSeriesColor[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

} // namespace

void emit_plot(std::ostream& out, const json& config, const std::vector<PlotSeries>& series,
               const std::string& title, bool log_y) {
    if (series.empty()) throw ValidationError("EmptySeries: nothing to plot");
    for (const auto& s : series) {
        if (s.x.empty() || s.x.size() != s.y.size())
            throw ValidationError("EmptySeries: series must carry matching nonempty x/y");
    }

    const double W = 640, H = 420, ml = 70, mr = 20, mt = 40, mb = 50;
    double xmin = series[0].x[0], xmax = xmin;
    double ymin = 0, ymax = 0;
    bool first = true;
    for (const auto& s : series)
        for (size_t q = 0; q < s.x.size(); ++q) {
            double yv = s.y[q];
            if (log_y) {
                if (!(yv > 0.0)) continue; // log plot skips nonpositive samples
                yv = std::log10(yv);
            }
            if (first) { ymin = ymax = yv; first = false; }
            xmin = std::min(xmin, s.x[q]);
            xmax = std::max(xmax, s.x[q]);
            ymin = std::min(ymin, yv);
            ymax = std::max(ymax, yv);
        }
    if (first) throw ValidationError("EmptySeries: no plottable points (log of nonpositive data)");
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) { ymax += 0.5; ymin -= 0.5; }

    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
    auto py = [&](double yv) {
        if (log_y) yv = std::log10(yv);
        return H - mb - (yv - ymin) / (ymax - ymin) * (H - mt - mb);
    };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\" "
           "viewBox=\"0 0 640 420\">\n";
    out << "<!-- config: " << config.dump() << " -->\n";
    out << "<rect width=\"640\" height=\"420\" fill=\"white\"/>\n";
    out << "<text x=\"" << fmt4(W / 2) << "\" y=\"24\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"15\">"
        << title << "</text>\n";
    // axes
    out << "<line x1=\"" << fmt4(ml) << "\" y1=\"" << fmt4(H - mb) << "\" x2=\"" << fmt4(W - mr)
        << "\" y2=\"" << fmt4(H - mb) << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << fmt4(ml) << "\" y1=\"" << fmt4(mt) << "\" x2=\"" << fmt4(ml)
        << "\" y2=\"" << fmt4(H - mb) << "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 5; ++t) {
        const double fx = xmin + (xmax - xmin) * t / 5.0;
        out << "<text x=\"" << fmt4(px(fx)) << "\" y=\"" << fmt4(H - mb + 18)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << fmt_tick(fx) << "</text>\n";
        const double fy = ymin + (ymax - ymin) * t / 5.0;
        const double yval = log_y ? std::pow(10.0, fy) : fy;
        const double ypix = H - mb - (fy - ymin) / (ymax - ymin) * (H - mt - mb);
        out << "<text x=\"" << fmt4(ml - 6) << "\" y=\"" << fmt4(ypix + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << fmt_tick(yval) << "</text>\n";
    }
    int idx = 0;
    for (const auto& s : series) {
        out << "<polyline fill=\"none\" stroke=\"" << kSeriesColor[idx % 4]
            << "\" stroke-width=\"1.5\" points=\"";
        bool any = false;
        for (size_t q = 0; q < s.x.size(); ++q) {
            if (log_y && !(s.y[q] > 0.0)) continue;
            out << (any ? " " : "") << fmt4(px(s.x[q])) << "," << fmt4(py(s.y[q]));
            any = true;
        }
        out << "\"/>\n";
        out << "<text x=\"" << fmt4(W - mr - 8) << "\" y=\"" << fmt4(mt + 16 + 16 * idx)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" fill=\""
            << kSeriesColor[idx % 4] << "\">" << s.label << "</text>\n";
        ++idx;
    }
    out << "</svg>\n";
}

void emit_plot_file(const std::string& path, const json& config,
                    const std::vector<PlotSeries>& series, const std::string& title,
                    bool log_y) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("emit_plot_file: cannot open " + path);
    emit_plot(out, config, series, title, log_y);
}

} // namespace pinchflow
