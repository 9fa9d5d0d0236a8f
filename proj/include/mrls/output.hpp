#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mrls/harness.hpp"

namespace mrls::output {

inline constexpr const char* kTrackingHeader = "n,mse_rls_db,mse_mrls_db,lopt_bar";
inline constexpr const char* kSweepHeader = "snr_db,mse_rls_db,mse_mrls_db,lopt_bar";
inline constexpr const char* kUncertaintyHeader = "u,snr_db,mse_rls_db,mse_mrls_db,lopt_bar";

std::string tracking_csv(const MetricsSeries& s);
std::string sweep_csv(const std::vector<SweepPoint>& points);
std::string uncertainty_csv(const std::vector<UncertaintyPoint>& points);
/// m,phi_1,...,phi_K
std::string acf_csv(const std::vector<theory::AcfCurve>& curves);

struct TrackingRow {
    std::size_t n = 0;
    double mse_rls_db = 0.0;
    double mse_mrls_db = 0.0;
    double lopt_bar = 0.0;
};

/// Parses tracking_csv output. Throws ArgumentError on a bad header or row.
std::vector<TrackingRow> parse_tracking_csv(const std::string& text);

struct PlotSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

struct Plot {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<PlotSeries> series;
};

/// Standalone SVG line chart.
std::string svg_line_plot(const Plot& plot);

Plot mse_vs_n_plot(const MetricsSeries& s);
Plot lopt_vs_n_plot(const MetricsSeries& s);
Plot mse_vs_snr_plot(const std::vector<SweepPoint>& points);

/// Writes text to dir/name, creating dir. Throws IoError naming the path.
std::filesystem::path write_text(const std::filesystem::path& dir, const std::string& name,
                                 const std::string& text);

}  // namespace mrls::output
