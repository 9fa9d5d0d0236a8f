#include "mrls/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace mrls {

namespace {

constexpr std::uint64_t kPerturbationStream = 4;

struct RoundResult {
    bool ok = false;
    std::vector<double> mse_rls;
    std::vector<double> mse_mrls;
    std::vector<double> lopt;
    std::vector<double> residual_power;
    std::vector<double> effective_power;
    std::vector<std::vector<double>> acf_sums;  // [layer][lag]
};

struct RoundOptions {
    std::size_t acf_max_lag = 0;  // 0: no effective-IR recording
    std::size_t acf_begin = 0;
};

// Sum over t of Re sum_i conj(h[t][i]) h[t-m][i] for m = 0..max_lag.
std::vector<double> lagged_products(const std::vector<Complex>& flat, std::size_t taps,
                                    std::size_t count, std::size_t max_lag) {
    std::vector<double> out(max_lag + 1, 0.0);
    for (std::size_t m = 0; m <= max_lag && m < count; ++m) {
        double acc = 0.0;
        for (std::size_t t = m; t < count; ++t) {
            const Complex* a = flat.data() + t * taps;
            const Complex* b = flat.data() + (t - m) * taps;
            for (std::size_t i = 0; i < taps; ++i)
                acc += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
        }
        out[m] = acc;
    }
    return out;
}

RoundResult run_round(const RunConfig& config, std::size_t round, const RoundOptions& opts) {
    const std::uint64_t seed = config.base_seed + round;
    const std::size_t n = config.n_samples;
    const std::size_t layers = config.filter.layers_max;
    const std::size_t taps = config.channel.taps;
    const std::size_t ss_begin = config.steady_state_begin();

    FilterParams assumed = config.filter;
    if (config.uncertainty != 0.0) {
        RngStream perturb(seed, kPerturbationStream);
        assumed.noise_variance =
            std::max(0.0, 1.0 + config.uncertainty * perturb.normal()) * config.filter.noise_variance;
    }

    RoundResult res;
    res.mse_rls.resize(n);
    res.mse_mrls.resize(n);
    res.lopt.resize(n);
    res.residual_power.assign(layers, 0.0);
    res.effective_power.assign(layers, 0.0);

    const bool record = opts.acf_max_lag > 0;
    const std::size_t rec_count = record ? n - opts.acf_begin : 0;
    std::vector<std::vector<Complex>> recorded(record ? layers + 1 : 0);
    for (auto& r : recorded) r.reserve(rec_count * taps);

    try {
        Scenario scenario(config.channel, seed);
        RlsEstimator rls(config.filter);
        MRlsEstimator mrls(assumed);
        CVec eff(taps);
        for (std::size_t t = 0; t < n; ++t) {
            const auto s = scenario.next();
            rls.step(s.x, s.d);
            const auto out = mrls.step(s.x, s.d);
            res.mse_rls[t] = squared_distance(s.h, rls.estimate());
            res.mse_mrls[t] = squared_distance(s.h, out.h_tilde);
            res.lopt[t] = static_cast<double>(out.l_opt);

            const bool in_window = t >= ss_begin;
            const bool recording = record && t >= opts.acf_begin;
            if (!in_window && !recording) continue;
            eff = s.h;
            if (recording) recorded[0].insert(recorded[0].end(), eff.begin(), eff.end());
            for (std::size_t l = 0; l < layers; ++l) {
                const CVec& hl = mrls.layers()[l].h_hat;
                for (std::size_t i = 0; i < taps; ++i) eff[i] -= hl[i];
                if (in_window) {
                    res.residual_power[l] += std::norm(out.residuals[l]);
                    res.effective_power[l] += squared_norm(eff);
                }
                if (recording) recorded[l + 1].insert(recorded[l + 1].end(), eff.begin(), eff.end());
            }
        }
    } catch (const NumericalBreakdown&) {
        return RoundResult{};
    }

    const double window = static_cast<double>(n - ss_begin);
    for (auto& v : res.residual_power) v /= window;
    for (auto& v : res.effective_power) v /= window;

    if (record) {
        res.acf_sums.reserve(recorded.size());
        for (const auto& r : recorded)
            res.acf_sums.push_back(lagged_products(r, taps, rec_count, opts.acf_max_lag));
    }
    res.ok = true;
    return res;
}

std::vector<RoundResult> run_rounds(const RunConfig& config, const RoundOptions& opts) {
    std::vector<RoundResult> results(config.rounds);
    std::size_t threads = config.threads;
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, config.rounds);

    if (threads <= 1) {
        for (std::size_t r = 0; r < config.rounds; ++r) results[r] = run_round(config, r, opts);
        return results;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (std::size_t r = next++; r < config.rounds; r = next++) {
                try {
                    results[r] = run_round(config, r, opts);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    next = config.rounds;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return results;
}

void accumulate(std::vector<double>& into, const std::vector<double>& from) {
    for (std::size_t i = 0; i < into.size(); ++i) into[i] += from[i];
}

void scale(std::vector<double>& v, double s) {
    for (auto& x : v) x *= s;
}

MetricsSeries reduce(const RunConfig& config, const std::vector<RoundResult>& rounds) {
    MetricsSeries s;
    const std::size_t n = config.n_samples;
    const std::size_t layers = config.filter.layers_max;
    s.rounds_requested = rounds.size();
    s.mse_rls.assign(n, 0.0);
    s.mse_mrls.assign(n, 0.0);
    s.lopt_bar.assign(n, 0.0);
    s.layer_residual_power.assign(layers, 0.0);
    s.layer_effective_power.assign(layers, 0.0);
    for (const auto& r : rounds) {
        if (!r.ok) {
            ++s.rounds_excluded;
            continue;
        }
        ++s.rounds_used;
        accumulate(s.mse_rls, r.mse_rls);
        accumulate(s.mse_mrls, r.mse_mrls);
        accumulate(s.lopt_bar, r.lopt);
        accumulate(s.layer_residual_power, r.residual_power);
        accumulate(s.layer_effective_power, r.effective_power);
    }
    if (s.rounds_used == 0)
        throw AllRoundsFailed("all " + std::to_string(s.rounds_requested) +
                              " rounds hit a numerical breakdown");
    const double inv = 1.0 / static_cast<double>(s.rounds_used);
    scale(s.mse_rls, inv);
    scale(s.mse_mrls, inv);
    scale(s.lopt_bar, inv);
    scale(s.layer_residual_power, inv);
    scale(s.layer_effective_power, inv);
    return s;
}

double mean_over(const std::vector<double>& v, std::size_t begin, std::size_t end) {
    double acc = 0.0;
    for (std::size_t i = begin; i < end; ++i) acc += v[i];
    return acc / static_cast<double>(end - begin);
}

}  // namespace

double snr_db_to_noise_variance(double snr_db) {
    return std::pow(10.0, -snr_db / 10.0);
}

double to_db(double linear) {
    return 10.0 * std::log10(linear);
}

RunConfig RunConfig::defaults() {
    RunConfig c;
    c.channel.taps = 50;
    c.channel.coherence = 200.0;
    c.channel.input = InputKind::Bpsk;
    c.filter.taps = 50;
    c.filter.lambda = 1.0 - 1.0 / (2.0 * 50.0);
    c.filter.delta = 0.01;
    c.filter.z = 1.0 / 32.0;
    c.filter.layers_max = 5;
    return c.with_snr(20.0);
}

RunConfig RunConfig::with_snr(double snr_db) const {
    RunConfig c = *this;
    const double s2 = snr_db_to_noise_variance(snr_db);
    c.channel.noise_variance = s2;
    c.filter.noise_variance = s2;
    return c;
}

RunConfig RunConfig::with_taps(std::size_t taps) const {
    RunConfig c = *this;
    c.channel.taps = taps;
    c.filter.taps = taps;
    if (!c.channel.pdp.empty() && c.channel.pdp.size() != taps) c.channel.pdp.clear();
    return c;
}

void RunConfig::validate() const {
    channel.validate();
    filter.validate();
    if (channel.taps != filter.taps)
        throw ArgumentError("config: channel has " + std::to_string(channel.taps) +
                            " taps but the filter has " + std::to_string(filter.taps));
    if (rounds == 0) throw ArgumentError("config: rounds must be >= 1");
    if (n_samples == 0) throw ArgumentError("config: n_samples must be >= 1");
    if (!(uncertainty >= 0.0)) throw ArgumentError("config: uncertainty must be >= 0");
}

SteadyState steady_state(const MetricsSeries& s, std::size_t begin, std::size_t end) {
    SteadyState out;
    out.window_begin = begin;
    out.window_end = end;
    out.mse_rls = mean_over(s.mse_rls, begin, end);
    out.mse_mrls = mean_over(s.mse_mrls, begin, end);
    out.lopt_bar = mean_over(s.lopt_bar, begin, end);
    return out;
}

TrackingResult run_tracking(const RunConfig& config) {
    config.validate();
    TrackingResult out;
    out.series = reduce(config, run_rounds(config, RoundOptions{}));
    out.steady = steady_state(out.series, config.steady_state_begin(), config.n_samples);
    return out;
}

std::vector<SweepPoint> sweep_snr(const RunConfig& config) {
    if (config.snr_db_list.empty()) throw ArgumentError("sweep_snr: empty SNR list");
    std::vector<SweepPoint> out;
    for (double snr : config.snr_db_list) {
        const auto r = run_tracking(config.with_snr(snr));
        out.push_back({snr, r.steady.mse_rls, r.steady.mse_mrls, r.steady.lopt_bar});
    }
    return out;
}

std::vector<UncertaintyPoint> run_uncertainty(const RunConfig& config,
                                              const std::vector<double>& levels) {
    if (config.snr_db_list.empty()) throw ArgumentError("run_uncertainty: empty SNR list");
    std::vector<UncertaintyPoint> out;
    for (double u : levels) {
        if (!(u >= 0.0)) throw ArgumentError("run_uncertainty: uncertainty must be >= 0");
        RunConfig c = config;
        c.uncertainty = u;
        for (double snr : config.snr_db_list) {
            const auto r = run_tracking(c.with_snr(snr));
            out.push_back({u, snr, r.steady.mse_mrls, r.steady.mse_rls, r.steady.lopt_bar});
        }
    }
    return out;
}

ImpulseResult run_impulse(const RunConfig& config) {
    if (!config.channel.impulse) throw ArgumentError("run_impulse: no impulse event configured");
    const std::size_t event = config.channel.impulse->time;
    if (event >= config.n_samples)
        throw ArgumentError("run_impulse: impulse at " + std::to_string(event) +
                            " is beyond the run length");

    ImpulseResult out;
    out.tracking = run_tracking(config);
    out.event = event;
    const auto& s = out.tracking.series;

    const std::size_t lo = event > kImpulseWindow ? event - kImpulseWindow : 0;
    const std::size_t hi = std::min(config.n_samples - 1, event + kImpulseWindow);
    out.peak_index = lo;
    out.peak_lopt = s.lopt_bar[lo];
    for (std::size_t t = lo; t <= hi; ++t)
        if (s.lopt_bar[t] > out.peak_lopt) {
            out.peak_lopt = s.lopt_bar[t];
            out.peak_index = t;
        }
    out.post_lopt = out.tracking.steady.lopt_bar;

    if (event > 0) {
        const std::size_t pre_begin = event > kPreImpulseSpan ? event - kPreImpulseSpan : 0;
        out.pre_mse_rls = mean_over(s.mse_rls, pre_begin, event);
        out.pre_mse_mrls = mean_over(s.mse_mrls, pre_begin, event);
        const double within = std::pow(10.0, 0.1);  // 1 dB
        auto reconverge = [&](const std::vector<double>& mse,
                              double level) -> std::optional<std::size_t> {
            for (std::size_t t = event + 1; t < mse.size(); ++t)
                if (mse[t] <= level * within) return t - event;
            return std::nullopt;
        };
        out.reconverge_rls = reconverge(s.mse_rls, out.pre_mse_rls);
        out.reconverge_mrls = reconverge(s.mse_mrls, out.pre_mse_mrls);
    }
    return out;
}

LayerAcfResult measure_layer_acf(const RunConfig& config, std::size_t m_max) {
    config.validate();
    if (!config.record_effective_irs)
        throw ArgumentError("measure_layer_acf: effective-IR recording is disabled");
    if (m_max == 0) throw ArgumentError("measure_layer_acf: m_max must be >= 1");
    if (config.n_samples < 10 * m_max)
        throw ArgumentError("measure_layer_acf: need n_samples >= 10 * m_max (" +
                            std::to_string(10 * m_max) + ")");

    RoundOptions opts;
    opts.acf_max_lag = m_max;
    opts.acf_begin = config.n_samples / 3;
    const auto rounds = run_rounds(config, opts);

    LayerAcfResult out;
    out.tracking.series = reduce(config, rounds);
    out.tracking.steady =
        steady_state(out.tracking.series, config.steady_state_begin(), config.n_samples);

    const std::size_t layers = config.filter.layers_max + 1;
    const std::size_t count = config.n_samples - opts.acf_begin;
    std::vector<std::vector<double>> sums(layers, std::vector<double>(m_max + 1, 0.0));
    for (const auto& r : rounds) {
        if (!r.ok) continue;
        for (std::size_t l = 0; l < layers; ++l) accumulate(sums[l], r.acf_sums[l]);
    }
    for (std::size_t l = 0; l < layers; ++l) {
        theory::AcfCurve curve;
        curve.layer = l + 1;
        curve.values.resize(m_max + 1);
        for (std::size_t m = 0; m <= m_max; ++m)
            curve.values[m] = sums[l][m] / static_cast<double>(count - m);
        const double zero = curve.values[0];
        for (auto& v : curve.values) v /= zero;
        std::optional<std::size_t> crossing;
        try {
            crossing = theory::coherence_from_acf(curve);
        } catch (const NotFoundError&) {
        }
        out.curves.push_back(std::move(curve));
        out.crossings.push_back(crossing);
    }
    return out;
}

}  // namespace mrls
