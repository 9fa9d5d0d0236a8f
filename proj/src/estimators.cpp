#include "mrls/estimators.hpp"

#include <cmath>

#include "mrls/errors.hpp"

namespace mrls {

double FilterParams::noise_correction(std::size_t layer) const {
    return 2.0 * std::pow(1.0 - epsilon_m(), static_cast<double>(layer)) * noise_variance;
}

std::vector<double> FilterParams::noise_corrections() const {
    std::vector<double> r(layers_max);
    for (std::size_t l = 1; l <= layers_max; ++l) r[l - 1] = noise_correction(l);
    return r;
}

void FilterParams::validate() const {
    if (taps == 0) throw ArgumentError("filter: tap count must be >= 1");
    if (!(delta > 0.0)) throw ArgumentError("filter: delta must be > 0");
    if (!(lambda > 0.0 && lambda <= 1.0)) throw ArgumentError("filter: lambda must be in (0, 1]");
    if (!(z > 0.0 && z < 1.0)) throw ArgumentError("filter: z must be in (0, 1)");
    if (layers_max == 0) throw ArgumentError("filter: L_max must be >= 1");
    if (!(noise_variance >= 0.0)) throw ArgumentError("filter: noise variance must be >= 0");
}

std::optional<std::string> FilterParams::stability_warning() const {
    const double lo = 1.0 - 2.0 / static_cast<double>(taps);
    if (lambda > lo && lambda < 1.0) return std::nullopt;
    return "forgetting factor " + std::to_string(lambda) + " is outside (" + std::to_string(lo) +
           ", 1); steady-state tracking is not guaranteed";
}

SharedGain::SharedGain(std::size_t taps, double delta)
    : k_(taps), P_(CMat::identity(taps, 1.0 / delta)), px_(taps) {}

void SharedGain::update(std::span<const Complex> x, double lambda) {
    T_ = rank1_gain_update_inplace(P_, x, lambda, k_, px_);
    ++updates_;
}

void apply_correction(CVec& h, Complex e, std::span<const Complex> k) {
    const Complex ec = std::conj(e);
    for (std::size_t i = 0; i < h.size(); ++i) h[i] += ec * k[i];
}

RlsEstimator::RlsEstimator(const FilterParams& params)
    : params_(params), gain_(params.taps, params.delta), h_hat_(params.taps) {
    params_.validate();
}

RlsEstimator::Step RlsEstimator::step(std::span<const Complex> x, Complex d) {
    const Complex e = d - herm_dot(h_hat_, x);
    gain_.update(x, params_.lambda);
    apply_correction(h_hat_, e, gain_.k());
    return {h_hat_, e};
}

double pi_update(double pi_prev, Complex d_next, double z) {
    return (1.0 - z) * pi_prev + z * std::norm(d_next);
}

std::size_t layer_select(std::span<const double> pi, std::span<const double> r, double j_init) {
    if (pi.empty() || r.empty()) throw ArgumentError("layer_select: empty input");
    if (pi.size() != r.size()) throw ArgumentError("layer_select: pi and r differ in length");
    double j_min = j_init;
    std::size_t best = 1;
    for (std::size_t l = 0; l < pi.size(); ++l) {
        const double j = pi[l] - r[l];
        if (j < j_min) {
            j_min = j;
            best = l + 1;
        }
    }
    return best;
}

MRlsEstimator::MRlsEstimator(const FilterParams& params)
    : params_(params),
      gain_(params.taps, params.delta),
      desired_(params.layers_max + 1),
      errors_(params.layers_max),
      h_tilde_(params.taps) {
    params_.validate();
    layers_.assign(params_.layers_max, LayerState{CVec(params_.taps), 0.0});
    r_ = params_.noise_corrections();
}

MRlsEstimator::Step MRlsEstimator::step(std::span<const Complex> x, Complex d) {
    gain_.update(x, params_.lambda);
    const CVec& k = gain_.k();
    const Complex T = gain_.T();

    double j_min = 1.0 / params_.delta;
    l_opt_ = 1;
    desired_[0] = d;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        LayerState& layer = layers_[l];
        const Complex e = desired_[l] - herm_dot(layer.h_hat, x);
        apply_correction(layer.h_hat, e, k);
        errors_[l] = e;
        desired_[l + 1] = e * T;
        layer.pi = pi_update(layer.pi, desired_[l + 1], params_.z);
        const double j = layer.pi - r_[l];
        if (j < j_min) {
            j_min = j;
            l_opt_ = l + 1;
        }
    }

    h_tilde_ = layers_[0].h_hat;
    for (std::size_t l = 1; l < l_opt_; ++l) {
        const CVec& hl = layers_[l].h_hat;
        for (std::size_t i = 0; i < h_tilde_.size(); ++i) h_tilde_[i] += hl[i];
    }
    return {h_tilde_, l_opt_, std::span<const Complex>(desired_).subspan(1)};
}

}  // namespace mrls
