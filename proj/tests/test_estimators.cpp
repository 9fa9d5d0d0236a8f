#include "doctest.h"

#include <cmath>
#include <vector>

#include "mrls/channel.hpp"
#include "mrls/errors.hpp"
#include "mrls/estimators.hpp"
#include "support/oracles.hpp"

using namespace mrls;

namespace {

FilterParams params(std::size_t taps, std::size_t layers, double noise = 0.01) {
    FilterParams p;
    p.taps = taps;
    p.lambda = 1.0 - 1.0 / (2.0 * static_cast<double>(taps));
    p.layers_max = layers;
    p.noise_variance = noise;
    return p;
}

double rel_err(Complex a, Complex b) {
    return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace

TEST_SUITE("estimators") {

TEST_CASE("initial state") {
    FilterParams p = params(2, 3);
    p.delta = 0.01;
    RlsEstimator rls(p);
    for (const auto& v : rls.estimate()) CHECK(v == Complex{});
    CHECK(rls.gain().P()(0, 0) == Complex{100.0, 0.0});
    CHECK(rls.gain().P()(1, 1) == Complex{100.0, 0.0});
    CHECK(rls.gain().P()(0, 1) == Complex{});
    MRlsEstimator m(p);
    for (const auto& layer : m.layers()) {
        CHECK(layer.pi == 0.0);
        for (const auto& v : layer.h_hat) CHECK(v == Complex{});
    }
}

TEST_CASE("parameter validation") {
    FilterParams p = params(4, 2);
    p.delta = 0.0;
    CHECK_THROWS_AS(RlsEstimator{p}, ArgumentError);
    p = params(4, 0);
    CHECK_THROWS_AS(MRlsEstimator{p}, ArgumentError);
    p = params(4, 2);
    p.z = 1.0;
    CHECK_THROWS_AS(MRlsEstimator{p}, ArgumentError);
    p = params(4, 2);
    p.noise_variance = -1.0;
    CHECK_THROWS_AS(MRlsEstimator{p}, ArgumentError);
}

TEST_CASE("stability warning outside (1 - 2/M, 1)") {
    FilterParams p = params(50, 5);
    CHECK_FALSE(p.stability_warning());
    p.lambda = 0.95;
    CHECK(p.stability_warning());
    p.lambda = 1.0;
    CHECK(p.stability_warning());
}

TEST_CASE("noise corrections") {
    FilterParams p = params(50, 3, 0.01);  // eps M = 0.5
    const auto r = p.noise_corrections();
    REQUIRE(r.size() == 3);
    CHECK(r[0] == doctest::Approx(0.01));
    CHECK(r[1] == doctest::Approx(0.005));
    CHECK(r[2] == doctest::Approx(0.0025));
    p.noise_variance = 0.0;
    for (double v : p.noise_corrections()) CHECK(v == 0.0);
}

TEST_CASE("scalar RLS step hand evaluation") {
    FilterParams p = params(1, 1);
    p.lambda = 0.99;
    p.delta = 0.01;
    RlsEstimator rls(p);
    const CVec x{1.0};
    const auto s = rls.step(x, 1.0);
    CHECK(s.e_prior == Complex{1.0, 0.0});
    CHECK(s.h_hat[0].real() == doctest::Approx(100.0 / 100.99).epsilon(1e-14));
    CHECK(s.h_hat[0].real() == doctest::Approx(0.9901970).epsilon(1e-7));
}

TEST_CASE("zero desired signal keeps the estimate at zero") {
    RlsEstimator rls(params(4, 1));
    RngStream rng(1, 0);
    for (int n = 0; n < 100; ++n) {
        const auto x = bpsk_stream(rng, 4);
        const auto s = rls.step(x, 0.0);
        CHECK(s.e_prior == Complex{});
    }
    for (const auto& v : rls.estimate()) CHECK(v == Complex{});
}

TEST_CASE("RLS matches the textbook recursion") {
    const std::size_t m = 5;
    FilterParams p = params(m, 1);
    p.lambda = 0.95;
    p.delta = 0.1;
    RlsEstimator rls(p);
    oracle::Rls ref(m, p.lambda, p.delta);
    RngStream rng(21, 0);
    for (int n = 0; n < 300; ++n) {
        CVec x(m);
        for (auto& v : x) v = rng.cgauss(1.0);
        const Complex d = rng.cgauss(1.0);
        const auto s = rls.step(x, d);
        const Complex e = ref.step(x, d);
        CHECK(rel_err(s.e_prior, e) < 1e-9);
        for (std::size_t i = 0; i < m; ++i) CHECK(rel_err(s.h_hat[i], ref.h[i]) < 1e-8);
    }
}

TEST_CASE("noiseless RLS converges to a fixed system") {
    const std::size_t m = 8;
    ChannelSpec spec;
    spec.taps = m;
    spec.coherence = 1e15;
    spec.noise_variance = 0.0;
    Scenario sc(spec, 4);
    RlsEstimator rls(params(m, 1, 0.0));
    double err = 0.0;
    for (std::size_t n = 0; n < 50 * m; ++n) {
        const auto s = sc.next();
        rls.step(s.x, s.d);
        err = std::sqrt(squared_distance(s.h, rls.estimate()));
    }
    CHECK(err < 1e-6);
}

TEST_CASE("pi_update") {
    CHECK(pi_update(0.0, 1.0, 1.0 / 32.0) == 0.03125);
    double pi = 0.0;
    const double c = 2.5;
    for (int n = 0; n < 400; ++n) pi = pi_update(pi, std::sqrt(c), 1.0 / 32.0);
    CHECK(pi == doctest::Approx(c).epsilon(1e-5));
    // geometric approach: error shrinks by (1 - z) each step
    const double e1 = c - pi_update(0.0, std::sqrt(c), 0.25);
    const double e2 = c - pi_update(c - e1, std::sqrt(c), 0.25);
    CHECK(e2 / e1 == doctest::Approx(0.75));
    pi = 1.0;
    for (int n = 0; n < 2000; ++n) pi = pi_update(pi, 0.0, 1.0 / 32.0);
    CHECK(pi < 1e-20);
    CHECK(pi >= 0.0);
}

TEST_CASE("layer_select") {
    const std::vector<double> pi{0.05, 0.02, 0.03}, r{0.01, 0.005, 0.0025};
    CHECK(layer_select(pi, r, 100.0) == 2);

    const std::vector<double> flat{0.1, 0.1, 0.1, 0.1}, dec{0.04, 0.03, 0.02, 0.01};
    CHECK(layer_select(flat, dec, 100.0) == 1);

    const std::vector<double> huge{1e9, 1e9}, small{0.0, 0.0};
    CHECK(layer_select(huge, small, 100.0) == 1);

    // ties go to the smaller layer
    const std::vector<double> tie{0.2, 0.1, 0.1}, none{0.0, 0.0, 0.0};
    CHECK(layer_select(tie, none, 100.0) == 2);

    CHECK_THROWS_AS(layer_select(std::vector<double>{}, std::vector<double>{}, 1.0), ArgumentError);
    CHECK_THROWS_AS(layer_select(pi, std::vector<double>{0.1}, 1.0), ArgumentError);
}

TEST_CASE("layer_select is invariant to a common positive scale") {
    RngStream rng(6, 0);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> pi(5), r(5);
        for (auto& v : pi) v = rng.uniform();
        for (auto& v : r) v = 0.5 * rng.uniform();
        const double s = 0.01 + 100.0 * rng.uniform();
        std::vector<double> pis(pi), rs(r);
        for (auto& v : pis) v *= s;
        for (auto& v : rs) v *= s;
        CHECK(layer_select(pi, r, 1e300) == layer_select(pis, rs, 1e300));
    }
}

TEST_CASE("L_max = 1 is bitwise classic RLS") {
    for (std::size_t m : {1u, 8u, 50u}) {
        for (std::uint64_t seed = 0; seed < 4; ++seed) {
            ChannelSpec spec;
            spec.taps = m;
            spec.coherence = 100;
            Scenario sc(spec, seed);
            const FilterParams p = params(m, 1);
            RlsEstimator rls(p);
            MRlsEstimator mrls(p);
            for (int n = 0; n < 400; ++n) {
                const auto s = sc.next();
                const auto& a = rls.step(s.x, s.d).h_hat;
                const auto out = mrls.step(s.x, s.d);
                CHECK(out.l_opt == 1);
                CHECK(out.h_tilde == a);
            }
        }
    }
}

TEST_CASE("per-layer a-posteriori identity and telescoping residual") {
    const std::size_t m = 12;
    ChannelSpec spec;
    spec.taps = m;
    spec.coherence = 50;
    Scenario sc(spec, 31);
    MRlsEstimator est(params(m, 5));
    for (int n = 0; n < 1500; ++n) {
        const auto s = sc.next();
        est.step(s.x, s.d);
        const auto d = est.layer_desired();
        CVec sum(m);
        for (std::size_t l = 0; l < 5; ++l) {
            const auto& h = est.layers()[l].h_hat;
            const Complex post = d[l] - herm_dot(h, s.x);
            CHECK(rel_err(d[l + 1], post) < 1e-9);
            for (std::size_t i = 0; i < m; ++i) sum[i] += h[i];
        }
        CHECK(rel_err(d[5], s.d - herm_dot(sum, s.x)) < 1e-9);
    }
}

TEST_CASE("combined estimate is the sum of the first L_opt layers") {
    const std::size_t m = 10;
    ChannelSpec spec;
    spec.taps = m;
    spec.coherence = 30;
    spec.noise_variance = 1e-3;
    Scenario sc(spec, 8);
    MRlsEstimator est(params(m, 4, 1e-3));
    std::vector<int> seen(5, 0);
    for (int n = 0; n < 2000; ++n) {
        const auto s = sc.next();
        const auto out = est.step(s.x, s.d);
        REQUIRE(out.l_opt >= 1);
        REQUIRE(out.l_opt <= 4);
        ++seen[out.l_opt];
        CVec sum(m);
        for (std::size_t l = 0; l < out.l_opt; ++l)
            for (std::size_t i = 0; i < m; ++i) sum[i] += est.layers()[l].h_hat[i];
        CHECK(out.h_tilde == sum);
        for (const auto& layer : est.layers()) CHECK(layer.pi >= 0.0);
    }
    CHECK(seen[1] + seen[2] + seen[3] + seen[4] == 2000);
}

TEST_CASE("selection follows the smoothed residual powers") {
    const std::size_t m = 6;
    ChannelSpec spec;
    spec.taps = m;
    spec.coherence = 40;
    spec.noise_variance = 0.0;
    Scenario sc(spec, 2);
    FilterParams p = params(m, 4, 0.0);
    MRlsEstimator est(p);
    for (int n = 0; n < 500; ++n) {
        const auto s = sc.next();
        const auto out = est.step(s.x, s.d);
        std::vector<double> pi;
        for (const auto& layer : est.layers()) pi.push_back(layer.pi);
        CHECK(out.l_opt == layer_select(pi, est.noise_corrections(), 1.0 / p.delta));
    }
}

TEST_CASE("the gain is computed once per sample") {
    for (std::size_t layers : {1u, 3u, 7u}) {
        MRlsEstimator est(params(4, layers));
        RngStream rng(1, 0);
        for (int n = 0; n < 25; ++n) est.step(bpsk_stream(rng, 4), rng.cgauss(1.0));
        CHECK(est.gain().update_count() == 25);
    }
}

TEST_CASE("layers beyond L_opt keep adapting") {
    const std::size_t m = 4;
    ChannelSpec spec;
    spec.taps = m;
    spec.coherence = 1e12;
    spec.noise_variance = 0.1;
    Scenario sc(spec, 3);
    MRlsEstimator est(params(m, 3, 0.1));
    for (int n = 0; n < 300; ++n) {
        const auto s = sc.next();
        est.step(s.x, s.d);
    }
    CHECK(squared_norm(est.layers()[2].h_hat) > 0.0);
}

}
