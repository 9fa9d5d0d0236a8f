#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mrls/numerics.hpp"

namespace mrls {

/// Scalar hyperparameters shared by RLS and m-RLS.
struct FilterParams {
    std::size_t taps = 50;
    double lambda = 0.99;
    double delta = 0.01;          // P[-1] = I / delta
    double z = 1.0 / 32.0;        // smoothing factor of the residual-power estimate
    std::size_t layers_max = 5;
    double noise_variance = 0.01; // noise power handed to the layer selector

    double epsilon() const { return 1.0 - lambda; }
    double epsilon_m() const { return epsilon() * static_cast<double>(taps); }

    /// r(l) = 2 (1 - eps M)^l sigma_w^2, l >= 1.
    double noise_correction(std::size_t layer) const;
    std::vector<double> noise_corrections() const;

    /// Throws ArgumentError for delta <= 0, z outside (0,1), lambda outside (0,1],
    /// zero taps or zero layers.
    void validate() const;

    /// Message when lambda is outside (1 - 2/M, 1), where the steady-state
    /// contraction factor leaves (0, 1).
    std::optional<std::string> stability_warning() const;
};

/// k[n], P[n] and T[n], computed once per sample and shared by every layer.
class SharedGain {
public:
    SharedGain() = default;
    SharedGain(std::size_t taps, double delta);

    void update(std::span<const Complex> x, double lambda);

    const CVec& k() const { return k_; }
    const CMat& P() const { return P_; }
    Complex T() const { return T_; }
    std::size_t update_count() const { return updates_; }

private:
    CVec k_;
    CMat P_;
    Complex T_{1.0, 0.0};
    CVec px_;
    std::size_t updates_ = 0;
};

/// h += conj(e) k, the coefficient update shared by RLS and each m-RLS layer.
void apply_correction(CVec& h, Complex e, std::span<const Complex> k);

class RlsEstimator {
public:
    explicit RlsEstimator(const FilterParams& params);

    struct Step {
        const CVec& h_hat;
        Complex e_prior;
    };

    Step step(std::span<const Complex> x, Complex d);

    const CVec& estimate() const { return h_hat_; }
    const SharedGain& gain() const { return gain_; }
    const FilterParams& params() const { return params_; }

private:
    FilterParams params_;
    SharedGain gain_;
    CVec h_hat_;
};

struct LayerState {
    CVec h_hat;
    double pi = 0.0;  // smoothed |d_(l+1)|^2
};

/// (1 - z) pi_prev + z |d_next|^2
double pi_update(double pi_prev, Complex d_next, double z);

/// Smallest l (1-based) minimizing pi[l-1] - r[l-1], scanned with a strict
/// less-than against a running minimum seeded with j_init. Returns 1 when no
/// J beats j_init. Throws ArgumentError for empty or mismatched inputs.
std::size_t layer_select(std::span<const double> pi, std::span<const double> r, double j_init);

/// Layered RLS: each layer estimates what the previous layers left in their
/// a-posteriori error, and the output sums the first L_opt layer estimates.
class MRlsEstimator {
public:
    explicit MRlsEstimator(const FilterParams& params);

    struct Step {
        const CVec& h_tilde;
        std::size_t l_opt;
        std::span<const Complex> residuals;  // d_(2) .. d_(L_max + 1)
    };

    Step step(std::span<const Complex> x, Complex d);

    const FilterParams& params() const { return params_; }
    const SharedGain& gain() const { return gain_; }
    const std::vector<LayerState>& layers() const { return layers_; }
    const CVec& combined() const { return h_tilde_; }
    std::size_t l_opt() const { return l_opt_; }
    const std::vector<double>& noise_corrections() const { return r_; }

    /// d_(1) .. d_(L_max + 1) of the last step (d_(1) is the input d).
    std::span<const Complex> layer_desired() const { return desired_; }
    /// e_(1) .. e_(L_max) of the last step.
    std::span<const Complex> layer_errors() const { return errors_; }

private:
    FilterParams params_;
    SharedGain gain_;
    std::vector<LayerState> layers_;
    std::vector<double> r_;
    std::vector<Complex> desired_;
    std::vector<Complex> errors_;
    CVec h_tilde_;
    std::size_t l_opt_ = 1;
};

}  // namespace mrls
