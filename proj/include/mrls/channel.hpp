#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mrls/numerics.hpp"

namespace mrls {

enum class InputKind { Bpsk, ComplexGaussian };

std::string to_string(InputKind kind);
InputKind input_kind_from_string(const std::string& s);

inline constexpr double kDefaultPdpDecay = 0.1;

struct ImpulseEvent {
    std::size_t time = 0;  // sample index at which taps are scaled
    double gain = -1.0;
};

/// Unknown time-varying system: M taps, each an AR(1) process with coherence
/// length N (normalized ACF 2^(-m/N)), scaled by a power-delay profile.
struct ChannelSpec {
    std::size_t taps = 50;
    double coherence = 200.0;
    std::vector<double> pdp;  // empty => default_pdp(taps, kDefaultPdpDecay)
    InputKind input = InputKind::Bpsk;
    std::optional<ImpulseEvent> impulse;
    double noise_variance = 0.01;

    /// PDP with the empty default expanded. Throws ArgumentError on invalid fields.
    std::vector<double> resolved_pdp() const;
    void validate() const;
};

/// p_i proportional to exp(-decay * i), normalized to sum 1.
std::vector<double> default_pdp(std::size_t taps, double decay);

struct PdpFile {
    std::vector<double> weights;  // normalized
    double raw_sum = 1.0;
    bool renormalized = false;    // raw sum deviated from 1 by more than 1e-6
};

/// One nonnegative real per line. Throws IoError / ArgumentError.
PdpFile load_pdp_file(const std::filesystem::path& path);

/// AR(1) pole for coherence length N: 2^(-1/N), so a^N = 1/2.
double ar_pole(double coherence);

/// True tap trajectory h[n].
///
/// h_i[n] = a h_i[n-1] + sqrt(p_i (1 - a^2)) g_i[n]; h[-1] is drawn from the
/// stationary distribution so h[0] is stationary as well.
class ChannelState {
public:
    ChannelState(const ChannelSpec& spec, RngStream rng);

    /// Advances to the next sample and returns h[n].
    const CVec& step();

    const CVec& taps() const { return h_; }
    double ar_coeff() const { return a_; }
    /// Index of the sample returned by the last step(), or -1 before the first.
    std::int64_t index() const { return n_; }

private:
    CVec h_;
    std::vector<double> innovation_std_;
    double a_;
    std::optional<ImpulseEvent> impulse_;
    RngStream rng_;
    std::int64_t n_ = -1;
};

/// d = h^H x + w
Complex desired_signal(std::span<const Complex> h, std::span<const Complex> x, Complex w);

/// Full system-identification scenario: channel taps, tapped-delay-line input
/// vector x[n] = [x[n], ..., x[n-M+1]], noise w[n] and desired d[n].
///
/// Each source draws from its own substream of `seed`, so two scenarios with
/// the same seed yield identical realizations.
class Scenario {
public:
    enum Stream : std::uint64_t { kTaps = 1, kInput = 2, kNoise = 3 };

    Scenario(const ChannelSpec& spec, std::uint64_t seed);

    struct Sample {
        const CVec& h;
        const CVec& x;
        Complex w;
        Complex d;
    };

    Sample next();

private:
    Complex draw_input();

    ChannelSpec spec_;
    ChannelState channel_;
    RngStream input_rng_;
    RngStream noise_rng_;
    CVec x_;
};

}  // namespace mrls
