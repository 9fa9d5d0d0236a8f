#include "mrls/numerics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mrls/errors.hpp"

namespace mrls {

CMat CMat::identity(std::size_t n, double scale) {
    CMat m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = scale;
    return m;
}

double CMat::hermitian_deviation() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = i; j < n_; ++j)
            worst = std::max(worst, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    return worst;
}

Complex herm_dot(std::span<const Complex> a, std::span<const Complex> b) {
    if (a.size() != b.size())
        throw DimensionError("herm_dot: length " + std::to_string(a.size()) + " vs " +
                             std::to_string(b.size()));
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double ar = a[i].real(), ai = a[i].imag();
        const double br = b[i].real(), bi = b[i].imag();
        re += ar * br + ai * bi;
        im += ar * bi - ai * br;
    }
    return {re, im};
}

double squared_distance(std::span<const Complex> a, std::span<const Complex> b) {
    if (a.size() != b.size()) throw DimensionError("squared_distance: length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::norm(a[i] - b[i]);
    return acc;
}

double squared_norm(std::span<const Complex> a) {
    double acc = 0.0;
    for (const auto& v : a) acc += std::norm(v);
    return acc;
}

Complex rank1_gain_update_inplace(CMat& P, std::span<const Complex> x, double lambda, CVec& k,
                                  CVec& px) {
    const std::size_t m = P.size();
    if (x.size() != m)
        throw DimensionError("rank1_gain_update: x has length " + std::to_string(x.size()) +
                             ", P is " + std::to_string(m) + "x" + std::to_string(m));
    k.resize(m);
    px.resize(m);

    for (std::size_t i = 0; i < m; ++i) {
        const auto row = P.row(i);
        double re = 0.0, im = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double pr = row[j].real(), pi = row[j].imag();
            const double xr = x[j].real(), xi = x[j].imag();
            re += pr * xr - pi * xi;
            im += pr * xi + pi * xr;
        }
        px[i] = {re, im};
    }

    const double denom = lambda + herm_dot(x, px).real();
    if (!(denom > 0.0) || !std::isfinite(denom))
        throw NumericalBreakdown("rank1_gain_update: lambda + x^H P x = " + std::to_string(denom));

    for (std::size_t i = 0; i < m; ++i) k[i] = px[i] / denom;

    // P' = (P - k (Px)^H) / lambda; x^H P equals (P x)^H because P is kept exactly Hermitian.
    // Each (i, j)/(j, i) pair is averaged with its mirror so P' is exactly Hermitian too.
    const double scale = 0.5 / lambda;
    for (std::size_t i = 0; i < m; ++i) {
        const double kir = k[i].real(), kii = k[i].imag();
        const double pxir = px[i].real(), pxii = px[i].imag();
        for (std::size_t j = i; j < m; ++j) {
            const double kjr = k[j].real(), kji = k[j].imag();
            const double pxjr = px[j].real(), pxji = px[j].imag();
            // k_i * conj(px_j)
            const double aij_r = kir * pxjr + kii * pxji;
            const double aij_i = kii * pxjr - kir * pxji;
            // k_j * conj(px_i)
            const double aji_r = kjr * pxir + kji * pxii;
            const double aji_i = kji * pxir - kjr * pxii;
            const Complex pij = P(i, j);
            const Complex pji = P(j, i);
            const double vr = ((pij.real() - aij_r) + (pji.real() - aji_r)) * scale;
            const double vi = ((pij.imag() - aij_i) - (pji.imag() - aji_i)) * scale;
            P(i, j) = {vr, vi};
            P(j, i) = {vr, -vi};
        }
    }

    return 1.0 - herm_dot(k, x);
}

GainUpdate rank1_gain_update(const CMat& P, std::span<const Complex> x, double lambda) {
    GainUpdate out{CVec{}, P, Complex{}};
    CVec px;
    out.T = rank1_gain_update_inplace(out.P, x, lambda, out.k, px);
    return out;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
}

double RngStream::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
}

Complex RngStream::bpsk() {
    return (engine_() >> 63) ? Complex{1.0, 0.0} : Complex{-1.0, 0.0};
}

Complex RngStream::cgauss(double variance) {
    const double s = std::sqrt(0.5 * variance);
    const double re = normal();
    const double im = normal();
    return {s * re, s * im};
}

std::vector<Complex> bpsk_stream(RngStream& rng, std::size_t n) {
    std::vector<Complex> out(n);
    for (auto& v : out) v = rng.bpsk();
    return out;
}

std::vector<Complex> cgauss_stream(RngStream& rng, std::size_t n, double variance) {
    if (variance < 0.0) throw ArgumentError("cgauss_stream: negative variance");
    std::vector<Complex> out(n);
    for (auto& v : out) v = rng.cgauss(variance);
    return out;
}

}  // namespace mrls
