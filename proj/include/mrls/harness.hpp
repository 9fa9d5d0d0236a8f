#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "mrls/channel.hpp"
#include "mrls/errors.hpp"
#include "mrls/estimators.hpp"
#include "mrls/theory.hpp"

namespace mrls {

/// Every round of a run hit a numerical breakdown.
struct AllRoundsFailed : NumericalBreakdown {
    using NumericalBreakdown::NumericalBreakdown;
};

double snr_db_to_noise_variance(double snr_db);
double to_db(double linear);

struct RunConfig {
    ChannelSpec channel;
    FilterParams filter;
    std::size_t n_samples = 3000;
    std::size_t rounds = 200;
    std::uint64_t base_seed = 1;
    std::vector<double> snr_db_list;
    double uncertainty = 0.0;
    bool record_effective_irs = false;
    std::filesystem::path output_dir = "out";
    std::size_t threads = 0;  // 0: one per hardware thread

    /// M = 50, lambda = 1 - 1/(2M), L_max = 5, z = 2^-5, delta = 0.01,
    /// N = 200, SNR 20 dB, BPSK input, 3000 samples, 200 rounds.
    static RunConfig defaults();

    /// Copy with the true and the assumed noise power set from an SNR in dB.
    RunConfig with_snr(double snr_db) const;

    /// Copy with the channel tap count and the filter tap count both set to M.
    RunConfig with_taps(std::size_t taps) const;

    void validate() const;

    /// First sample of the steady-state window (the final sixth of the run).
    std::size_t steady_state_begin() const {
        return n_samples - std::max<std::size_t>(1, n_samples / 6);
    }
};

/// Round-averaged learning curves. MSE values are linear, ||h - estimate||^2.
struct MetricsSeries {
    std::vector<double> mse_rls;
    std::vector<double> mse_mrls;
    std::vector<double> lopt_bar;
    /// Steady-state E|d_(l+1)|^2 and E||h_(l+1)||^2, l = 1 .. L_max.
    std::vector<double> layer_residual_power;
    std::vector<double> layer_effective_power;
    std::size_t rounds_requested = 0;
    std::size_t rounds_used = 0;
    std::size_t rounds_excluded = 0;
};

struct SteadyState {
    double mse_rls = 0.0;
    double mse_mrls = 0.0;
    double lopt_bar = 0.0;
    std::size_t window_begin = 0;
    std::size_t window_end = 0;
};

SteadyState steady_state(const MetricsSeries& s, std::size_t begin, std::size_t end);

struct TrackingResult {
    MetricsSeries series;
    SteadyState steady;
};

/// Runs classic RLS and m-RLS side by side on `rounds` independent
/// realizations seeded base_seed + r, and averages in round order.
TrackingResult run_tracking(const RunConfig& config);

struct SweepPoint {
    double snr_db = 0.0;
    double mse_rls = 0.0;
    double mse_mrls = 0.0;
    double lopt_bar = 0.0;
};

/// run_tracking at each entry of snr_db_list (steady-state aggregates).
std::vector<SweepPoint> sweep_snr(const RunConfig& config);

struct UncertaintyPoint {
    double u = 0.0;
    double snr_db = 0.0;
    double mse_mrls = 0.0;
    double mse_rls = 0.0;
    double lopt_bar = 0.0;
};

/// SNR sweep for each uncertainty level. The estimator is handed
/// max(0, 1 + u * randn) * sigma_w^2, drawn once per round; the true noise is unchanged.
std::vector<UncertaintyPoint> run_uncertainty(const RunConfig& config,
                                              const std::vector<double>& levels);

struct ImpulseResult {
    TrackingResult tracking;
    std::size_t event = 0;
    double peak_lopt = 0.0;
    std::size_t peak_index = 0;
    double post_lopt = 0.0;
    double pre_mse_rls = 0.0;
    double pre_mse_mrls = 0.0;
    /// Samples after the event until the MSE is back within 1 dB of its pre-event level.
    std::optional<std::size_t> reconverge_rls;
    std::optional<std::size_t> reconverge_mrls;
};

inline constexpr std::size_t kImpulseWindow = 100;
inline constexpr std::size_t kPreImpulseSpan = 200;

/// Tracking run with an impulsive IR change. Throws ArgumentError when the
/// channel has no impulse configured.
ImpulseResult run_impulse(const RunConfig& config);

struct LayerAcfResult {
    std::vector<theory::AcfCurve> curves;              // h_(1) .. h_(L_max + 1)
    std::vector<std::optional<std::size_t>> crossings;  // first lag with phi <= 0.5
    TrackingResult tracking;
};

/// Sample ACF of the effective IRs h_(l+1) = h_(l) - h_hat_(l), averaged over
/// taps and rounds, measured after the first third of each run. Requires
/// record_effective_irs and n_samples >= 10 * m_max.
LayerAcfResult measure_layer_acf(const RunConfig& config, std::size_t m_max);

}  // namespace mrls
