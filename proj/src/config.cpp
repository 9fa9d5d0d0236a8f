#include "mrls/config.hpp"

#include <fstream>
#include <set>
#include <string>

#include "mrls/errors.hpp"

namespace mrls::config {

namespace {

void check_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ArgumentError("config: '" + where + "' must be an object");
    for (const auto& [key, value] : j.items())
        if (!allowed.contains(key)) throw ArgumentError("config: unknown key '" + where + "." + key + "'");
}

template <class T>
void read(const Json& j, const char* key, T& into) {
    if (const auto it = j.find(key); it != j.end()) into = it->template get<T>();
}

Json steady_json(const SteadyState& s) {
    return Json{{"window_begin", s.window_begin},
                {"window_end", s.window_end},
                {"mse_rls", s.mse_rls},
                {"mse_mrls", s.mse_mrls},
                {"mse_rls_db", to_db(s.mse_rls)},
                {"mse_mrls_db", to_db(s.mse_mrls)},
                {"gain_db", to_db(s.mse_rls) - to_db(s.mse_mrls)},
                {"lopt_bar", s.lopt_bar}};
}

Json rounds_json(const MetricsSeries& s) {
    return Json{{"requested", s.rounds_requested},
                {"used", s.rounds_used},
                {"excluded", s.rounds_excluded}};
}

}  // namespace

Json to_json(const RunConfig& c) {
    Json channel{{"taps", c.channel.taps},
                 {"coherence", c.channel.coherence},
                 {"pdp", c.channel.pdp},
                 {"input", to_string(c.channel.input)},
                 {"impulse", nullptr},
                 {"noise_variance", c.channel.noise_variance}};
    if (c.channel.impulse)
        channel["impulse"] = Json{{"time", c.channel.impulse->time}, {"gain", c.channel.impulse->gain}};
    Json filter{{"taps", c.filter.taps},
                {"lambda", c.filter.lambda},
                {"delta", c.filter.delta},
                {"z", c.filter.z},
                {"layers_max", c.filter.layers_max},
                {"noise_variance", c.filter.noise_variance}};
    return Json{{"channel", channel},
                {"filter", filter},
                {"n_samples", c.n_samples},
                {"rounds", c.rounds},
                {"base_seed", c.base_seed},
                {"snr_db_list", c.snr_db_list},
                {"uncertainty", c.uncertainty},
                {"record_effective_irs", c.record_effective_irs},
                {"output_dir", c.output_dir.string()},
                {"threads", c.threads}};
}

RunConfig from_json(const Json& j, RunConfig base) {
    RunConfig c = std::move(base);
    try {
        check_keys(j,
                   {"channel", "filter", "n_samples", "rounds", "base_seed", "snr_db_list",
                    "uncertainty", "record_effective_irs", "output_dir", "threads"},
                   "config");
        if (const auto it = j.find("channel"); it != j.end()) {
            const Json& ch = *it;
            check_keys(ch, {"taps", "coherence", "pdp", "input", "impulse", "noise_variance"}, "channel");
            read(ch, "taps", c.channel.taps);
            read(ch, "coherence", c.channel.coherence);
            read(ch, "pdp", c.channel.pdp);
            read(ch, "noise_variance", c.channel.noise_variance);
            if (const auto in = ch.find("input"); in != ch.end())
                c.channel.input = input_kind_from_string(in->get<std::string>());
            if (const auto imp = ch.find("impulse"); imp != ch.end()) {
                if (imp->is_null()) {
                    c.channel.impulse.reset();
                } else {
                    check_keys(*imp, {"time", "gain"}, "channel.impulse");
                    ImpulseEvent ev;
                    read(*imp, "time", ev.time);
                    read(*imp, "gain", ev.gain);
                    c.channel.impulse = ev;
                }
            }
        }
        if (const auto it = j.find("filter"); it != j.end()) {
            const Json& f = *it;
            check_keys(f, {"taps", "lambda", "delta", "z", "layers_max", "noise_variance"}, "filter");
            read(f, "taps", c.filter.taps);
            read(f, "lambda", c.filter.lambda);
            read(f, "delta", c.filter.delta);
            read(f, "z", c.filter.z);
            read(f, "layers_max", c.filter.layers_max);
            read(f, "noise_variance", c.filter.noise_variance);
        }
        read(j, "n_samples", c.n_samples);
        read(j, "rounds", c.rounds);
        read(j, "base_seed", c.base_seed);
        read(j, "snr_db_list", c.snr_db_list);
        read(j, "uncertainty", c.uncertainty);
        read(j, "record_effective_irs", c.record_effective_irs);
        read(j, "threads", c.threads);
        if (const auto it = j.find("output_dir"); it != j.end())
            c.output_dir = it->get<std::string>();
    } catch (const Json::exception& e) {
        throw ArgumentError(std::string("config: ") + e.what());
    }
    return c;
}

RunConfig load(const std::filesystem::path& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path.string());
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ArgumentError("config file " + path.string() + ": " + e.what());
    }
    return from_json(j, std::move(base));
}

Json tracking_summary(const RunConfig& c, const TrackingResult& r) {
    return Json{{"experiment", "track"},
                {"config", to_json(c)},
                {"rounds", rounds_json(r.series)},
                {"steady_state", steady_json(r.steady)},
                {"layer_residual_power", r.series.layer_residual_power},
                {"layer_effective_power", r.series.layer_effective_power}};
}

Json sweep_summary(const RunConfig& c, const std::vector<SweepPoint>& points) {
    Json pts = Json::array();
    for (const auto& p : points)
        pts.push_back(Json{{"snr_db", p.snr_db},
                           {"mse_rls", p.mse_rls},
                           {"mse_mrls", p.mse_mrls},
                           {"mse_rls_db", to_db(p.mse_rls)},
                           {"mse_mrls_db", to_db(p.mse_mrls)},
                           {"lopt_bar", p.lopt_bar}});
    return Json{{"experiment", "sweep-snr"}, {"config", to_json(c)}, {"points", pts}};
}

Json uncertainty_summary(const RunConfig& c, const std::vector<UncertaintyPoint>& points) {
    Json pts = Json::array();
    for (const auto& p : points)
        pts.push_back(Json{{"u", p.u},
                           {"snr_db", p.snr_db},
                           {"mse_rls", p.mse_rls},
                           {"mse_mrls", p.mse_mrls},
                           {"mse_rls_db", to_db(p.mse_rls)},
                           {"mse_mrls_db", to_db(p.mse_mrls)},
                           {"lopt_bar", p.lopt_bar}});
    return Json{{"experiment", "uncertainty"}, {"config", to_json(c)}, {"points", pts}};
}

Json impulse_summary(const RunConfig& c, const ImpulseResult& r) {
    auto opt = [](const std::optional<std::size_t>& v) { return v ? Json(*v) : Json(nullptr); };
    return Json{{"experiment", "impulse"},
                {"config", to_json(c)},
                {"rounds", rounds_json(r.tracking.series)},
                {"steady_state", steady_json(r.tracking.steady)},
                {"event", r.event},
                {"peak_lopt", r.peak_lopt},
                {"peak_index", r.peak_index},
                {"post_lopt", r.post_lopt},
                {"pre_mse_rls", r.pre_mse_rls},
                {"pre_mse_mrls", r.pre_mse_mrls},
                {"reconverge_rls", opt(r.reconverge_rls)},
                {"reconverge_mrls", opt(r.reconverge_mrls)}};
}

Json acf_summary(const RunConfig& c, const LayerAcfResult& r) {
    Json crossings = Json::array();
    for (const auto& x : r.crossings) crossings.push_back(x ? Json(*x) : Json(nullptr));
    return Json{{"experiment", "acf"},
                {"config", to_json(c)},
                {"rounds", rounds_json(r.tracking.series)},
                {"crossings", crossings}};
}

}  // namespace mrls::config
