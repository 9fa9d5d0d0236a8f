#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace mrls {

using Complex = std::complex<double>;
using CVec = std::vector<Complex>;

/// Dense square complex matrix, row-major.
class CMat {
public:
    CMat() = default;
    explicit CMat(std::size_t n) : n_(n), a_(n * n) {}

    static CMat identity(std::size_t n, double scale = 1.0);

    std::size_t size() const { return n_; }

    Complex& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

    std::span<Complex> row(std::size_t i) { return {a_.data() + i * n_, n_}; }
    std::span<const Complex> row(std::size_t i) const { return {a_.data() + i * n_, n_}; }

    /// max_{i,j} |A_ij - conj(A_ji)|
    double hermitian_deviation() const;

    bool operator==(const CMat&) const = default;

private:
    std::size_t n_ = 0;
    std::vector<Complex> a_;
};

/// sum_i conj(a_i) * b_i
Complex herm_dot(std::span<const Complex> a, std::span<const Complex> b);

/// Squared Euclidean distance ||a - b||^2.
double squared_distance(std::span<const Complex> a, std::span<const Complex> b);

double squared_norm(std::span<const Complex> a);

struct GainUpdate {
    CVec k;
    CMat P;
    Complex T;
};

/// One RLS rank-1 step on the inverse correlation matrix.
///
/// k = P x / (lambda + x^H P x), P' = (I - k x^H) P / lambda, T = 1 - k^H x.
/// P' is made exactly Hermitian by averaging with its conjugate transpose.
/// Throws NumericalBreakdown when lambda + x^H P x is not a positive finite number.
GainUpdate rank1_gain_update(const CMat& P, std::span<const Complex> x, double lambda);

/// In-place form of rank1_gain_update used on the hot path. `k` and `px` are
/// resized to P.size(); `px` receives P x. Returns T.
Complex rank1_gain_update_inplace(CMat& P, std::span<const Complex> x, double lambda,
                                  CVec& k, CVec& px);

/// Seeded random stream. Output depends only on (seed, stream, call order).
///
/// Built on std::mt19937_64, whose output sequence is fixed by the standard;
/// the uniform and normal transforms are done here rather than through
/// std::*_distribution, whose algorithms are implementation-defined.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Standard normal (Box-Muller).
    double normal();
    /// +1 or -1 with equal probability.
    Complex bpsk();
    /// Circularly symmetric complex Gaussian with E|v|^2 = variance.
    Complex cgauss(double variance);

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

std::vector<Complex> bpsk_stream(RngStream& rng, std::size_t n);

/// Throws ArgumentError for negative variance.
std::vector<Complex> cgauss_stream(RngStream& rng, std::size_t n, double variance);

}  // namespace mrls
