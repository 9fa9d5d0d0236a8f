// mrls: Monte Carlo runner for the layered RLS tracker.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mrls/config.hpp"
#include "mrls/errors.hpp"
#include "mrls/harness.hpp"
#include "mrls/output.hpp"
#include "mrls/theory.hpp"

namespace {

using namespace mrls;

enum Exit { kOk = 0, kArgs = 1, kBreakdown = 2, kIo = 3 };

struct Flags {
    std::optional<std::string> config_file;
    std::optional<std::size_t> taps;
    std::optional<double> lambda;
    std::optional<double> coherence;
    std::vector<double> snr_db;
    std::optional<std::size_t> rounds;
    std::optional<std::size_t> samples;
    std::optional<std::size_t> layers_max;
    std::optional<double> z;
    std::optional<double> delta;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> input;
    std::optional<std::string> pdp_file;
    std::optional<std::size_t> impulse_at;
    std::optional<double> impulse_gain;
    std::optional<double> uncertainty;
    std::optional<std::string> out;
    std::optional<std::size_t> threads;
    std::vector<double> levels{0.0, 0.1, 0.2, 0.5};
    std::size_t m_max = 300;
};

RunConfig build_config(const Flags& f) {
    RunConfig c = RunConfig::defaults();
    if (f.config_file) c = config::load(*f.config_file, c);

    if (f.taps) {
        c = c.with_taps(*f.taps);
        if (!f.lambda) c.filter.lambda = 1.0 - 1.0 / (2.0 * static_cast<double>(*f.taps));
    }
    if (f.lambda) c.filter.lambda = *f.lambda;
    if (f.coherence) c.channel.coherence = *f.coherence;
    if (!f.snr_db.empty()) c.snr_db_list = f.snr_db;
    if (f.rounds) c.rounds = *f.rounds;
    if (f.samples) c.n_samples = *f.samples;
    if (f.layers_max) c.filter.layers_max = *f.layers_max;
    if (f.z) c.filter.z = *f.z;
    if (f.delta) c.filter.delta = *f.delta;
    if (f.seed) c.base_seed = *f.seed;
    if (f.input) c.channel.input = input_kind_from_string(*f.input);
    if (f.pdp_file) c.channel.pdp = load_pdp_file(*f.pdp_file).weights;
    if (f.impulse_at) c.channel.impulse = ImpulseEvent{*f.impulse_at, f.impulse_gain.value_or(-1.0)};
    if (f.impulse_gain) {
        if (!c.channel.impulse) throw ArgumentError("--impulse-gain needs --impulse-at");
        c.channel.impulse->gain = *f.impulse_gain;
    }
    if (f.uncertainty) c.uncertainty = *f.uncertainty;
    if (f.out) c.output_dir = *f.out;
    if (f.threads) c.threads = *f.threads;

    if (const auto warn = c.filter.stability_warning()) std::cerr << "warning: " << *warn << '\n';
    return c;
}

// Single-point experiments take the first SNR when a list is given.
RunConfig single_point(const RunConfig& c) {
    if (c.snr_db_list.empty()) return c;
    if (c.snr_db_list.size() > 1)
        std::cerr << "warning: using only the first --snr-db value (" << c.snr_db_list.front() << ")\n";
    return c.with_snr(c.snr_db_list.front());
}

void report_rounds(const MetricsSeries& s) {
    if (s.rounds_excluded > 0)
        std::cerr << "warning: " << s.rounds_excluded << " of " << s.rounds_requested
                  << " rounds hit a numerical breakdown and were excluded\n";
}

void print_steady(const SteadyState& s) {
    std::printf("steady state [%zu, %zu): RLS %.3f dB, m-RLS %.3f dB, gain %.3f dB, mean L_opt %.3f\n",
                s.window_begin, s.window_end, to_db(s.mse_rls), to_db(s.mse_mrls),
                to_db(s.mse_rls) - to_db(s.mse_mrls), s.lopt_bar);
}

void write_series(const RunConfig& c, const MetricsSeries& s) {
    output::write_text(c.output_dir, "tracking.csv", output::tracking_csv(s));
    output::write_text(c.output_dir, "mse_vs_n.svg", output::svg_line_plot(output::mse_vs_n_plot(s)));
    output::write_text(c.output_dir, "lopt_vs_n.svg", output::svg_line_plot(output::lopt_vs_n_plot(s)));
}

int cmd_track(const RunConfig& base) {
    const RunConfig c = single_point(base);
    const auto r = run_tracking(c);
    report_rounds(r.series);
    write_series(c, r.series);
    output::write_text(c.output_dir, "summary.json", config::tracking_summary(c, r).dump(2) + "\n");
    print_steady(r.steady);
    return kOk;
}

int cmd_sweep(RunConfig c) {
    if (c.snr_db_list.empty()) c.snr_db_list = {0, 4, 8, 12, 16, 20, 24, 28};
    const auto pts = sweep_snr(c);
    output::write_text(c.output_dir, "sweep.csv", output::sweep_csv(pts));
    output::write_text(c.output_dir, "mse_vs_snr.svg", output::svg_line_plot(output::mse_vs_snr_plot(pts)));
    output::write_text(c.output_dir, "summary.json", config::sweep_summary(c, pts).dump(2) + "\n");
    std::printf("%8s %12s %12s %9s\n", "snr_db", "rls_db", "mrls_db", "L_opt");
    for (const auto& p : pts)
        std::printf("%8.2f %12.3f %12.3f %9.3f\n", p.snr_db, to_db(p.mse_rls), to_db(p.mse_mrls), p.lopt_bar);
    return kOk;
}

int cmd_impulse(const RunConfig& base) {
    const RunConfig c = single_point(base);
    const auto r = run_impulse(c);
    report_rounds(r.tracking.series);
    write_series(c, r.tracking.series);
    output::write_text(c.output_dir, "summary.json", config::impulse_summary(c, r).dump(2) + "\n");
    print_steady(r.tracking.steady);
    std::printf("event at %zu: peak mean L_opt %.3f at n = %zu, post-transient %.3f\n", r.event,
                r.peak_lopt, r.peak_index, r.post_lopt);
    auto show = [](const char* name, const std::optional<std::size_t>& v) {
        if (v)
            std::printf("%s back within 1 dB after %zu samples\n", name, *v);
        else
            std::printf("%s did not return within 1 dB\n", name);
    };
    show("RLS", r.reconverge_rls);
    show("m-RLS", r.reconverge_mrls);
    return kOk;
}

int cmd_uncertainty(RunConfig c, const Flags& f) {
    if (c.snr_db_list.empty()) c.snr_db_list = {0, 4, 8, 10, 12, 14, 16, 20, 24};
    const std::vector<double> levels = f.uncertainty ? std::vector<double>{*f.uncertainty} : f.levels;
    const auto pts = run_uncertainty(c, levels);
    output::write_text(c.output_dir, "uncertainty.csv", output::uncertainty_csv(pts));
    output::write_text(c.output_dir, "summary.json", config::uncertainty_summary(c, pts).dump(2) + "\n");
    std::printf("%6s %8s %12s %12s %9s\n", "u", "snr_db", "rls_db", "mrls_db", "L_opt");
    for (const auto& p : pts)
        std::printf("%6.2f %8.2f %12.3f %12.3f %9.3f\n", p.u, p.snr_db, to_db(p.mse_rls),
                    to_db(p.mse_mrls), p.lopt_bar);
    return kOk;
}

int cmd_acf(const RunConfig& base, const Flags& f) {
    RunConfig c = single_point(base);
    c.record_effective_irs = true;
    const auto r = measure_layer_acf(c, f.m_max);
    report_rounds(r.tracking.series);
    output::write_text(c.output_dir, "acf.csv", output::acf_csv(r.curves));
    output::write_text(c.output_dir, "summary.json", config::acf_summary(c, r).dump(2) + "\n");

    output::Plot plot{"Effective IR autocorrelation", "lag m", "phi", {}};
    for (const auto& curve : r.curves) {
        output::PlotSeries s{"layer " + std::to_string(curve.layer), {}, curve.values};
        for (std::size_t m = 0; m < curve.values.size(); ++m) s.x.push_back(static_cast<double>(m));
        plot.series.push_back(std::move(s));
    }
    output::write_text(c.output_dir, "acf.svg", output::svg_line_plot(plot));

    for (std::size_t l = 0; l < r.crossings.size(); ++l) {
        if (r.crossings[l])
            std::printf("layer %zu: 0.5 crossing at lag %zu\n", l + 1, *r.crossings[l]);
        else
            std::printf("layer %zu: no 0.5 crossing within %zu lags\n", l + 1, f.m_max);
    }
    return kOk;
}

int cmd_theory(const RunConfig& base) {
    const RunConfig c = single_point(base);
    const auto& p = c.filter;
    const double n = c.channel.coherence;
    const auto k = theory::derive_constants(p, n);
    std::printf("eps %.6g  rho %.6g  psi %.6g  g %.6g  alpha %.6g\n", k.epsilon, k.rho, k.psi, k.g, k.alpha);
    std::printf("RLS steady-state MSE: %.3f dB\n", to_db(theory::rls_mse(p, n)));

    const auto chain = theory::acf_chain(p, n, p.layers_max, 4 * static_cast<std::size_t>(n) + 50);
    const auto approx = theory::coherence_chain(p, static_cast<std::size_t>(n), p.layers_max);
    std::printf("%5s %12s %12s %16s\n", "layer", "N (acf)", "N (approx)", "m-RLS MSE (dB)");
    for (std::size_t l = 0; l < chain.coherences.size(); ++l) {
        const std::span<const std::size_t> prefix(chain.coherences.data(), l + 1);
        std::printf("%5zu %12zu %12zu %16.3f\n", l + 1, chain.coherences[l], approx[l],
                    to_db(theory::mrls_mse_predict(p, prefix)));
    }
    return kOk;
}

int cmd_complexity(const RunConfig& c) {
    const std::size_t m = c.filter.taps, lmax = c.filter.layers_max;
    std::printf("M = %zu, L_max = %zu\n", m, lmax);
    std::printf("%6s %14s %14s %8s %14s %14s\n", "L_opt", "classic mult", "classic add", "div",
                "dcd mult", "dcd add");
    for (std::size_t l = 1; l <= lmax; ++l) {
        const auto a = theory::complexity_counts(m, lmax, l, theory::Implementation::Classic);
        const auto b = theory::complexity_counts(m, lmax, l, theory::Implementation::Dcd);
        std::printf("%6zu %14lld %14lld %8lld %14lld %14lld\n", l, a.mult, a.add, a.div, b.mult, b.add);
    }
    return kOk;
}

void add_common(CLI::App& app, Flags& f) {
    app.add_option("--config", f.config_file, "JSON run configuration (flags override it)");
    app.add_option("--taps", f.taps, "filter and channel length M")->check(CLI::PositiveNumber);
    app.add_option("--lambda", f.lambda, "forgetting factor (default 1 - 1/(2M))");
    app.add_option("--coherence", f.coherence, "channel coherence length N in samples");
    app.add_option("--snr-db", f.snr_db, "SNR in dB (repeatable)")->allow_extra_args(false);
    app.add_option("--rounds", f.rounds, "Monte Carlo rounds")->check(CLI::PositiveNumber);
    app.add_option("--samples", f.samples, "samples per round")->check(CLI::PositiveNumber);
    app.add_option("--layers-max", f.layers_max, "maximum number of layers")->check(CLI::PositiveNumber);
    app.add_option("--z", f.z, "residual-power smoothing factor");
    app.add_option("--delta", f.delta, "initial P = I / delta");
    app.add_option("--seed", f.seed, "base seed; round r uses seed + r");
    app.add_option("--input", f.input, "input signal")->check(CLI::IsMember({"bpsk", "gauss"}));
    app.add_option("--pdp-file", f.pdp_file, "power-delay profile, one weight per line");
    app.add_option("--impulse-at", f.impulse_at, "sample index of an impulsive IR change");
    app.add_option("--impulse-gain", f.impulse_gain, "gain applied to all taps at the impulse");
    app.add_option("--uncertainty", f.uncertainty, "relative std. dev. of the assumed noise power");
    app.add_option("--out", f.out, "output directory");
    app.add_option("--threads", f.threads, "worker threads (0: all cores)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Layered RLS (m-RLS) versus RLS on time-varying channels"};
    app.require_subcommand(1);
    app.fallthrough();
    Flags f;
    add_common(app, f);

    auto* track = app.add_subcommand("track", "learning curves for one configuration");
    auto* sweep = app.add_subcommand("sweep-snr", "steady-state MSE and mean L_opt over SNR");
    auto* impulse = app.add_subcommand("impulse", "tracking through an impulsive IR change");
    auto* uncertainty = app.add_subcommand("uncertainty", "SNR sweep with a misestimated noise power");
    uncertainty->add_option("--levels", f.levels, "uncertainty levels u");
    auto* acf = app.add_subcommand("acf", "measured ACF of each layer's effective IR");
    acf->add_option("--m-max", f.m_max, "largest lag")->check(CLI::PositiveNumber);
    auto* theory_cmd = app.add_subcommand("theory", "analytic steady-state predictions");
    auto* complexity = app.add_subcommand("complexity", "per-sample operation counts");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kArgs;
    }

    try {
        const RunConfig c = build_config(f);
        if (*track) return cmd_track(c);
        if (*sweep) return cmd_sweep(c);
        if (*impulse) return cmd_impulse(c);
        if (*uncertainty) return cmd_uncertainty(c, f);
        if (*acf) return cmd_acf(c, f);
        if (*theory_cmd) return cmd_theory(c);
        if (*complexity) return cmd_complexity(c);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    } catch (const NumericalBreakdown& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kBreakdown;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kArgs;
    }
    return kArgs;
}
