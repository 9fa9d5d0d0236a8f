#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mrls/estimators.hpp"
#include "mrls/numerics.hpp"

namespace mrls::theory {

/// Steady-state constants for BPSK input, where P[n] -> eps I and k[n] -> eps x[n].
struct DerivedConstants {
    double epsilon = 0.0;
    double rho = 0.0;    // 1 - 2 eps + eps^2 M, mean-square contraction of (I - eps x x^H)
    double psi = 0.0;    // eps^2 M / (1 - rho)
    double g = 0.0;      // log(rho / lambda^2)
    double alpha = 0.0;  // log(2) / N
    double lambda = 0.0;
};

DerivedConstants derive_constants(std::size_t taps, double lambda, double coherence);
DerivedConstants derive_constants(const FilterParams& params, double coherence);

/// Lag error plus estimation noise of a single RLS:
/// rho^N + (1 - rho^(N+1)) psi sigma_w^2. Throws DomainError unless 0 < rho < 1.
double rls_mse(const FilterParams& params, double coherence);

/// Normalized autocorrelation of one layer's effective IR, phi[0..m_max].
struct AcfCurve {
    std::vector<double> values;
    std::size_t layer = 1;

    /// phi[|m|], extended past the stored range by an exponential fit to the
    /// last tenth of the curve (0 when that tail is not positive).
    double at(long m) const;
    /// Values for lags 0 .. length-1, using at() beyond the stored range.
    std::vector<double> extended(std::size_t length) const;
};

/// phi[m] = exp(-m log2 / N), m = 0..m_max.
AcfCurve exponential_acf(double coherence, std::size_t m_max);

/// One step of the high-SNR layer recursion:
/// phi_(l+1)[m] = (2 phi[m] - phi[|m - N_l|] - phi[m + N_l]) q[m], renormalized to phi[0] = 1,
/// with q[m] = (lambda^2 / rho)^min(m, N_l). Throws ArgumentError for N_l < 1.
AcfCurve acf_propagate(const AcfCurve& phi, std::size_t coherence, const DerivedConstants& c);

/// Smallest m with phi[m] <= 0.5. Throws NotFoundError when the curve never drops that far.
std::size_t coherence_from_acf(const AcfCurve& phi);

/// Closed-form approximation ceil(N log2 / (N g + 3 log2)).
std::size_t coherence_recursion(std::size_t coherence, const DerivedConstants& c);

struct AcfChain {
    std::vector<AcfCurve> curves;         // layers 1 .. layers+1
    std::vector<std::size_t> coherences;  // N_(1) .. N_(layers+1)
};

/// Iterates acf_propagate + coherence_from_acf from an exponential first-layer ACF.
AcfChain acf_chain(const FilterParams& params, double coherence, std::size_t layers,
                   std::size_t m_max);

/// N_(1) .. N_(layers+1) from repeated coherence_recursion.
std::vector<std::size_t> coherence_chain(const FilterParams& params, std::size_t coherence,
                                         std::size_t layers);

/// How v(1) is seeded in the m-RLS error recursion.
enum class NoiseSeed {
    Consistent,  // v(1) = (1 - rho^(N1+1)) psi sigma_w^2, so L = 1 equals rls_mse
    AsPrinted,   // v(1) = 1 - rho^(N1+1)
};

/// prod_l rho^N_(l) + v(L) with the cross-correlation term u(l) taken as 0.
/// Throws ArgumentError for an empty sequence.
double mrls_mse_predict(const FilterParams& params, std::span<const std::size_t> coherences,
                        NoiseSeed seed = NoiseSeed::Consistent);

/// Offset in E||h_(l+1)||^2 = E|d_(l+1)|^2 + (1 - 2 (1 - eps M)^l) sigma_w^2.
double posteriori_power_offset(std::size_t layer, const FilterParams& params);

/// eps^2 M (1 - rho^N) / (1 - rho) sigma_w^2, the noise-driven part of the RLS error.
double noise_term_power(const FilterParams& params, double coherence);

/// Diagonal of B^H[n] B[n-m] under BPSK input:
/// lambda^(2m) rho^(N-m) for m <= N, lambda^(2N) beyond.
double q_diagonal(std::size_t lag, std::size_t coherence, const FilterParams& params);

/// Monte Carlo estimate of E||Theta_k ... Theta_1 a||^2 / E||a||^2 with
/// Theta = I - eps x x^H, independent BPSK x per factor and a ~ CN(0, I).
double theta_contraction_oracle(std::size_t taps, double lambda, std::size_t trials,
                                std::size_t product_length, RngStream& rng);

enum class Implementation { Classic, Dcd };

struct OpCounts {
    long long mult = 0;
    long long add = 0;
    long long div = 0;
    bool operator==(const OpCounts&) const = default;
};

/// Per-sample arithmetic cost of the layered estimator (closed-form totals).
OpCounts complexity_counts(std::size_t taps, std::size_t layers_max, std::size_t l_opt,
                           Implementation impl, std::size_t dcd_iterations = 4);

}  // namespace mrls::theory
