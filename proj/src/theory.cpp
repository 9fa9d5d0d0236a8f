#include "mrls/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "mrls/errors.hpp"

namespace mrls::theory {

namespace {

struct TailFit {
    double intercept;
    double decay;
};

// Least-squares fit of log(phi[m]) = intercept - decay * m over the last tenth
// of the curve. Empty when any value there is not positive.
std::optional<TailFit> fit_tail(const std::vector<double>& v) {
    if (v.size() < 2) return std::nullopt;
    const std::size_t count = std::max<std::size_t>(2, v.size() / 10);
    const std::size_t first = v.size() - count;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t m = first; m < v.size(); ++m) {
        if (!(v[m] > 0.0)) return std::nullopt;
        const double x = static_cast<double>(m), y = std::log(v[m]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(count);
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double decay = std::max(0.0, -slope);
    // Anchor at the last stored point so the extension is continuous.
    const double last = static_cast<double>(v.size() - 1);
    return TailFit{std::log(v.back()) + decay * last, decay};
}

}  // namespace

DerivedConstants derive_constants(std::size_t taps, double lambda, double coherence) {
    DerivedConstants c;
    const double eps = 1.0 - lambda;
    const double m = static_cast<double>(taps);
    c.epsilon = eps;
    c.lambda = lambda;
    c.rho = 1.0 - 2.0 * eps + eps * eps * m;
    c.psi = eps * eps * m / (1.0 - c.rho);
    c.g = std::log(c.rho / (lambda * lambda));
    c.alpha = std::numbers::ln2 / coherence;
    return c;
}

DerivedConstants derive_constants(const FilterParams& params, double coherence) {
    return derive_constants(params.taps, params.lambda, coherence);
}

double rls_mse(const FilterParams& params, double coherence) {
    const auto c = derive_constants(params, coherence);
    if (!(c.rho > 0.0 && c.rho < 1.0))
        throw DomainError("rls_mse: rho = " + std::to_string(c.rho) + " is outside (0, 1)");
    return std::pow(c.rho, coherence) +
           (1.0 - std::pow(c.rho, coherence + 1.0)) * c.psi * params.noise_variance;
}

double AcfCurve::at(long m) const {
    const auto lag = static_cast<std::size_t>(m < 0 ? -m : m);
    if (lag < values.size()) return values[lag];
    const auto fit = fit_tail(values);
    if (!fit) return 0.0;
    return std::exp(fit->intercept - fit->decay * static_cast<double>(lag));
}

std::vector<double> AcfCurve::extended(std::size_t length) const {
    std::vector<double> out(length, 0.0);
    const std::size_t stored = std::min(length, values.size());
    std::copy_n(values.begin(), stored, out.begin());
    if (length > values.size()) {
        if (const auto fit = fit_tail(values))
            for (std::size_t m = values.size(); m < length; ++m)
                out[m] = std::exp(fit->intercept - fit->decay * static_cast<double>(m));
    }
    return out;
}

AcfCurve exponential_acf(double coherence, std::size_t m_max) {
    AcfCurve c;
    c.values.resize(m_max + 1);
    const double alpha = std::numbers::ln2 / coherence;
    for (std::size_t m = 0; m <= m_max; ++m) c.values[m] = std::exp(-alpha * static_cast<double>(m));
    return c;
}

AcfCurve acf_propagate(const AcfCurve& phi, std::size_t coherence, const DerivedConstants& c) {
    if (coherence < 1) throw ArgumentError("acf_propagate: coherence length must be >= 1");
    if (phi.values.empty()) throw ArgumentError("acf_propagate: empty ACF");
    const std::size_t len = phi.values.size();
    const auto ext = phi.extended(len + coherence);
    const auto n = static_cast<long>(coherence);

    AcfCurve out;
    out.layer = phi.layer + 1;
    out.values.resize(len);
    for (std::size_t m = 0; m < len; ++m) {
        const long lag = static_cast<long>(m);
        const double shape = 2.0 * ext[m] - ext[static_cast<std::size_t>(std::abs(lag - n))] -
                             ext[m + coherence];
        const double q = std::exp(-c.g * static_cast<double>(std::min(m, coherence)));
        out.values[m] = shape * q;
    }
    const double zero = out.values[0];
    if (!(zero > 0.0))
        throw DomainError("acf_propagate: propagated ACF has nonpositive power at lag 0");
    for (auto& v : out.values) v /= zero;
    return out;
}

std::size_t coherence_from_acf(const AcfCurve& phi) {
    // exp(-N log2 / N) can land one ulp above 0.5.
    constexpr double kHalf = 0.5 + 1e-12;
    for (std::size_t m = 0; m < phi.values.size(); ++m)
        if (phi.values[m] <= kHalf) return m;
    throw NotFoundError("coherence_from_acf: ACF stays above 0.5 over " +
                        std::to_string(phi.values.size()) + " lags");
}

std::size_t coherence_recursion(std::size_t coherence, const DerivedConstants& c) {
    if (coherence < 1) throw ArgumentError("coherence_recursion: coherence length must be >= 1");
    const double n = static_cast<double>(coherence);
    const double next = n * std::numbers::ln2 / (n * c.g + 3.0 * std::numbers::ln2);
    return static_cast<std::size_t>(std::ceil(next));
}

AcfChain acf_chain(const FilterParams& params, double coherence, std::size_t layers,
                   std::size_t m_max) {
    const auto c = derive_constants(params, coherence);
    AcfChain chain;
    chain.curves.push_back(exponential_acf(coherence, m_max));
    chain.coherences.push_back(coherence_from_acf(chain.curves.back()));
    for (std::size_t l = 0; l < layers; ++l) {
        chain.curves.push_back(acf_propagate(chain.curves.back(), chain.coherences.back(), c));
        chain.coherences.push_back(coherence_from_acf(chain.curves.back()));
    }
    return chain;
}

std::vector<std::size_t> coherence_chain(const FilterParams& params, std::size_t coherence,
                                         std::size_t layers) {
    const auto c = derive_constants(params, static_cast<double>(coherence));
    std::vector<std::size_t> out{coherence};
    for (std::size_t l = 0; l < layers; ++l) out.push_back(coherence_recursion(out.back(), c));
    return out;
}

double mrls_mse_predict(const FilterParams& params, std::span<const std::size_t> coherences,
                        NoiseSeed seed) {
    if (coherences.empty()) throw ArgumentError("mrls_mse_predict: empty coherence sequence");
    const auto c = derive_constants(params, static_cast<double>(coherences.front()));
    const double noise = c.psi * params.noise_variance;

    double lag = 1.0;
    double v = 0.0;
    for (std::size_t l = 0; l < coherences.size(); ++l) {
        const double n = static_cast<double>(coherences[l]);
        const double rn = std::pow(c.rho, n);
        const double fresh = 1.0 - std::pow(c.rho, n + 1.0);
        lag *= rn;
        if (l == 0)
            v = seed == NoiseSeed::Consistent ? fresh * noise : fresh;
        else
            v = rn * v + fresh * noise;
    }
    return lag + v;
}

double posteriori_power_offset(std::size_t layer, const FilterParams& params) {
    if (layer < 1) throw ArgumentError("posteriori_power_offset: layer must be >= 1");
    return (1.0 - 2.0 * std::pow(1.0 - params.epsilon_m(), static_cast<double>(layer))) *
           params.noise_variance;
}

double noise_term_power(const FilterParams& params, double coherence) {
    const auto c = derive_constants(params, coherence);
    const double em = c.epsilon * c.epsilon * static_cast<double>(params.taps);
    return em * ((1.0 - std::pow(c.rho, coherence)) / (1.0 - c.rho)) * params.noise_variance;
}

double q_diagonal(std::size_t lag, std::size_t coherence, const FilterParams& params) {
    const auto c = derive_constants(params, static_cast<double>(coherence));
    const double l2 = params.lambda * params.lambda;
    if (lag <= coherence)
        return std::pow(l2, static_cast<double>(lag)) *
               std::pow(c.rho, static_cast<double>(coherence - lag));
    return std::pow(l2, static_cast<double>(coherence));
}

double theta_contraction_oracle(std::size_t taps, double lambda, std::size_t trials,
                                std::size_t product_length, RngStream& rng) {
    if (trials == 0) throw ArgumentError("theta_contraction_oracle: trials must be >= 1");
    const double eps = 1.0 - lambda;
    CVec a(taps), b(taps), x(taps);
    double num = 0.0, den = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        for (auto& v : a) v = rng.cgauss(1.0);
        b = a;
        for (std::size_t f = 0; f < product_length; ++f) {
            for (auto& v : x) v = rng.bpsk();
            const Complex proj = eps * herm_dot(x, b);
            for (std::size_t i = 0; i < taps; ++i) b[i] -= proj * x[i];
        }
        num += squared_norm(b);
        den += squared_norm(a);
    }
    return num / den;
}

OpCounts complexity_counts(std::size_t taps, std::size_t layers_max, std::size_t l_opt,
                           Implementation impl, std::size_t dcd_iterations) {
    if (taps == 0 || layers_max == 0 || l_opt == 0 || l_opt > layers_max)
        throw ArgumentError("complexity_counts: need M >= 1 and 1 <= L_opt <= L_max");
    const auto m = static_cast<long long>(taps);
    const auto lmax = static_cast<long long>(layers_max);
    const auto lopt = static_cast<long long>(l_opt);
    OpCounts out;
    if (impl == Implementation::Classic) {
        out.mult = 6 * m * m + (2 * lmax + 5) * m + 5 * lmax + 1;
        out.add = 6 * m * m + (2 * lmax + lopt - 2) * m + 3 * lmax;
        out.div = m;
    } else {
        const auto nitr = static_cast<long long>(dcd_iterations);
        out.mult = (2 * lmax + 2) * m + lmax;
        out.add = ((2 * nitr + 4) * lmax + lopt + 2) * m + 3 * lmax;
        out.div = 0;
    }
    return out;
}

}  // namespace mrls::theory
