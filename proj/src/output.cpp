#include "mrls/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "mrls/errors.hpp"

namespace mrls::output {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(line);
    while (std::getline(in, cur, sep)) parts.push_back(cur);
    return parts;
}

double parse_double(const std::string& s, std::size_t line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        // stod rejects "inf"/"-inf" spellings from some printf variants
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        throw ArgumentError("tracking csv line " + std::to_string(line) + ": bad number '" + s + "'");
    }
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void settle() {
        if (!(lo <= hi)) {
            lo = 0.0;
            hi = 1.0;
        }
        if (hi - lo < 1e-12) {
            lo -= 0.5;
            hi += 0.5;
        }
    }
};

}  // namespace

std::string tracking_csv(const MetricsSeries& s) {
    std::string out = kTrackingHeader;
    out += '\n';
    for (std::size_t n = 0; n < s.mse_rls.size(); ++n) {
        out += std::to_string(n) + ',' + num(to_db(s.mse_rls[n])) + ',' +
               num(to_db(s.mse_mrls[n])) + ',' + num(s.lopt_bar[n]) + '\n';
    }
    return out;
}

std::string sweep_csv(const std::vector<SweepPoint>& points) {
    std::string out = kSweepHeader;
    out += '\n';
    for (const auto& p : points)
        out += num(p.snr_db) + ',' + num(to_db(p.mse_rls)) + ',' + num(to_db(p.mse_mrls)) + ',' +
               num(p.lopt_bar) + '\n';
    return out;
}

std::string uncertainty_csv(const std::vector<UncertaintyPoint>& points) {
    std::string out = kUncertaintyHeader;
    out += '\n';
    for (const auto& p : points)
        out += num(p.u) + ',' + num(p.snr_db) + ',' + num(to_db(p.mse_rls)) + ',' +
               num(to_db(p.mse_mrls)) + ',' + num(p.lopt_bar) + '\n';
    return out;
}

std::string acf_csv(const std::vector<theory::AcfCurve>& curves) {
    std::string out = "m";
    std::size_t len = 0;
    for (const auto& c : curves) {
        out += ",phi_" + std::to_string(c.layer);
        len = std::max(len, c.values.size());
    }
    out += '\n';
    for (std::size_t m = 0; m < len; ++m) {
        out += std::to_string(m);
        for (const auto& c : curves) {
            out += ',';
            if (m < c.values.size()) out += num(c.values[m]);
        }
        out += '\n';
    }
    return out;
}

std::vector<TrackingRow> parse_tracking_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kTrackingHeader)
        throw ArgumentError("tracking csv: unexpected header '" + line + "'");
    std::vector<TrackingRow> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 4)
            throw ArgumentError("tracking csv line " + std::to_string(lineno) + ": expected 4 fields");
        TrackingRow r;
        r.n = static_cast<std::size_t>(parse_double(f[0], lineno));
        r.mse_rls_db = parse_double(f[1], lineno);
        r.mse_mrls_db = parse_double(f[2], lineno);
        r.lopt_bar = parse_double(f[3], lineno);
        rows.push_back(r);
    }
    return rows;
}

std::string svg_line_plot(const Plot& plot) {
    constexpr double W = 720, H = 440, left = 70, right = 160, top = 40, bottom = 50;
    const double pw = W - left - right, ph = H - top - bottom;
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

    Range xr, yr;
    for (const auto& s : plot.series) {
        for (double v : s.x) xr.add(v);
        for (double v : s.y) yr.add(v);
    }
    xr.settle();
    yr.settle();
    const auto px = [&](double x) { return left + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
    const auto py = [&](double y) { return top + (yr.hi - y) / (yr.hi - yr.lo) * ph; };

    std::ostringstream o;
    o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << xml_escape(plot.title) << "</text>\n"
      << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";

    for (int i = 0; i <= 5; ++i) {
        const double xv = xr.lo + (xr.hi - xr.lo) * i / 5.0;
        const double yv = yr.lo + (yr.hi - yr.lo) * i / 5.0;
        o << "<line x1=\"" << px(xv) << "\" y1=\"" << top << "\" x2=\"" << px(xv) << "\" y2=\""
          << top + ph << "\" stroke=\"#ddd\"/>\n"
          << "<text x=\"" << px(xv) << "\" y=\"" << top + ph + 16
          << "\" text-anchor=\"middle\">" << num(std::round(xv * 100) / 100) << "</text>\n"
          << "<line x1=\"" << left << "\" y1=\"" << py(yv) << "\" x2=\"" << left + pw << "\" y2=\""
          << py(yv) << "\" stroke=\"#ddd\"/>\n"
          << "<text x=\"" << left - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">"
          << num(std::round(yv * 100) / 100) << "</text>\n";
    }
    o << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">"
      << xml_escape(plot.x_label) << "</text>\n"
      << "<text transform=\"translate(18 " << top + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
      << xml_escape(plot.y_label) << "</text>\n";

    for (std::size_t k = 0; k < plot.series.size(); ++k) {
        const auto& s = plot.series[k];
        const char* color = colors[k % std::size(colors)];
        o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        const std::size_t n = std::min(s.x.size(), s.y.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            o << num(px(s.x[i])) << ',' << num(py(s.y[i])) << ' ';
        }
        o << "\"/>\n";
        const double ly = top + 14 + 18.0 * static_cast<double>(k);
        o << "<line x1=\"" << left + pw + 10 << "\" y1=\"" << ly - 4 << "\" x2=\"" << left + pw + 30
          << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
          << "<text x=\"" << left + pw + 36 << "\" y=\"" << ly << "\">" << xml_escape(s.name)
          << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

Plot mse_vs_n_plot(const MetricsSeries& s) {
    Plot p{"MSE vs. time", "n", "MSE (dB)", {}};
    PlotSeries rls{"RLS", {}, {}}, mrls{"m-RLS", {}, {}};
    for (std::size_t n = 0; n < s.mse_rls.size(); ++n) {
        rls.x.push_back(static_cast<double>(n));
        rls.y.push_back(to_db(s.mse_rls[n]));
        mrls.x.push_back(static_cast<double>(n));
        mrls.y.push_back(to_db(s.mse_mrls[n]));
    }
    p.series = {std::move(rls), std::move(mrls)};
    return p;
}

Plot lopt_vs_n_plot(const MetricsSeries& s) {
    Plot p{"Average selected layer count", "n", "mean L_opt", {}};
    PlotSeries l{"m-RLS", {}, s.lopt_bar};
    for (std::size_t n = 0; n < s.lopt_bar.size(); ++n) l.x.push_back(static_cast<double>(n));
    p.series = {std::move(l)};
    return p;
}

Plot mse_vs_snr_plot(const std::vector<SweepPoint>& points) {
    Plot p{"Steady-state MSE vs. SNR", "SNR (dB)", "MSE (dB)", {}};
    PlotSeries rls{"RLS", {}, {}}, mrls{"m-RLS", {}, {}};
    for (const auto& pt : points) {
        rls.x.push_back(pt.snr_db);
        rls.y.push_back(to_db(pt.mse_rls));
        mrls.x.push_back(pt.snr_db);
        mrls.y.push_back(to_db(pt.mse_mrls));
    }
    p.series = {std::move(rls), std::move(mrls)};
    return p;
}

std::filesystem::path write_text(const std::filesystem::path& dir, const std::string& name,
                                 const std::string& text) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << text;
    out.close();
    if (!out) throw IoError("write failed for " + path.string());
    return path;
}

}  // namespace mrls::output
