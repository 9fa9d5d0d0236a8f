#include "mrls/channel.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "mrls/errors.hpp"

namespace mrls {

std::string to_string(InputKind kind) {
    return kind == InputKind::Bpsk ? "bpsk" : "gauss";
}

InputKind input_kind_from_string(const std::string& s) {
    if (s == "bpsk") return InputKind::Bpsk;
    if (s == "gauss") return InputKind::ComplexGaussian;
    throw ArgumentError("unknown input kind '" + s + "' (expected bpsk or gauss)");
}

std::vector<double> ChannelSpec::resolved_pdp() const {
    if (pdp.empty()) return default_pdp(taps, kDefaultPdpDecay);
    return pdp;
}

void ChannelSpec::validate() const {
    if (taps == 0) throw ArgumentError("channel: tap count must be >= 1");
    if (!(coherence >= 1.0)) throw ArgumentError("channel: coherence length must be >= 1");
    if (!(noise_variance >= 0.0)) throw ArgumentError("channel: noise variance must be >= 0");
    if (!pdp.empty()) {
        if (pdp.size() != taps)
            throw ArgumentError("channel: PDP has " + std::to_string(pdp.size()) +
                                " weights for " + std::to_string(taps) + " taps");
        double sum = 0.0;
        for (double p : pdp) {
            if (!(p >= 0.0)) throw ArgumentError("channel: PDP weights must be nonnegative");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw ArgumentError("channel: PDP must sum to 1 (got " + std::to_string(sum) + ")");
    }
}

std::vector<double> default_pdp(std::size_t taps, double decay) {
    if (taps == 0) throw ArgumentError("default_pdp: tap count must be >= 1");
    if (!(decay >= 0.0)) throw ArgumentError("default_pdp: decay must be >= 0");
    std::vector<double> p(taps);
    for (std::size_t i = 0; i < taps; ++i) p[i] = std::exp(-decay * static_cast<double>(i));
    const double sum = std::accumulate(p.begin(), p.end(), 0.0);
    for (auto& v : p) v /= sum;
    return p;
}

PdpFile load_pdp_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open PDP file " + path.string());
    PdpFile out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ss(line);
        double v = 0.0;
        if (!(ss >> v) || !(v >= 0.0) || !std::isfinite(v))
            throw ArgumentError(path.string() + ":" + std::to_string(lineno) +
                                ": expected a nonnegative number");
        out.weights.push_back(v);
    }
    if (in.bad()) throw IoError("error reading PDP file " + path.string());
    if (out.weights.empty()) throw ArgumentError("PDP file " + path.string() + " is empty");
    out.raw_sum = std::accumulate(out.weights.begin(), out.weights.end(), 0.0);
    if (!(out.raw_sum > 0.0)) throw ArgumentError("PDP file " + path.string() + " sums to zero");
    if (std::abs(out.raw_sum - 1.0) > 1e-6) {
        out.renormalized = true;
        std::cerr << "warning: PDP in " << path.string() << " sums to " << out.raw_sum
                  << "; renormalizing\n";
    }
    for (auto& v : out.weights) v /= out.raw_sum;
    return out;
}

double ar_pole(double coherence) {
    if (!(coherence >= 1.0)) throw ArgumentError("ar_pole: coherence length must be >= 1");
    return std::exp2(-1.0 / coherence);
}

ChannelState::ChannelState(const ChannelSpec& spec, RngStream rng)
    : a_(ar_pole(spec.coherence)), impulse_(spec.impulse), rng_(std::move(rng)) {
    spec.validate();
    const auto pdp = spec.resolved_pdp();
    h_.resize(spec.taps);
    innovation_std_.resize(spec.taps);
    const double drive = 1.0 - a_ * a_;
    for (std::size_t i = 0; i < spec.taps; ++i) {
        h_[i] = rng_.cgauss(pdp[i]);
        innovation_std_[i] = std::sqrt(pdp[i] * drive);
    }
}

const CVec& ChannelState::step() {
    ++n_;
    for (std::size_t i = 0; i < h_.size(); ++i) {
        const Complex g = rng_.cgauss(1.0);
        h_[i] = a_ * h_[i] + innovation_std_[i] * g;
    }
    if (impulse_ && n_ == static_cast<std::int64_t>(impulse_->time))
        for (auto& v : h_) v *= impulse_->gain;
    return h_;
}

Complex desired_signal(std::span<const Complex> h, std::span<const Complex> x, Complex w) {
    return herm_dot(h, x) + w;
}

Scenario::Scenario(const ChannelSpec& spec, std::uint64_t seed)
    : spec_(spec),
      channel_(spec, RngStream(seed, kTaps)),
      input_rng_(seed, kInput),
      noise_rng_(seed, kNoise),
      x_(spec.taps) {
    for (auto& v : x_) v = draw_input();
}

Complex Scenario::draw_input() {
    return spec_.input == InputKind::Bpsk ? input_rng_.bpsk() : input_rng_.cgauss(1.0);
}

Scenario::Sample Scenario::next() {
    const CVec& h = channel_.step();
    for (std::size_t i = x_.size() - 1; i > 0; --i) x_[i] = x_[i - 1];
    x_[0] = draw_input();
    const Complex w = noise_rng_.cgauss(spec_.noise_variance);
    return {h, x_, w, desired_signal(h, x_, w)};
}

}  // namespace mrls
