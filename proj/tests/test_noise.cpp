#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "tripledot/noise.hpp"
#include "tripledot/rng.hpp"

using namespace tripledot;
using Catch::Matchers::WithinAbs;

namespace {
noise::OneOverFConfig base_config(std::size_t n, std::uint64_t seed) {
    noise::OneOverFConfig cfg;
    cfg.amplitude = 1.0;
    cfg.n_samples = n;
    cfg.dt = 0.01;
    cfg.f_min = 1.0 / (static_cast<double>(n) * cfg.dt);
    cfg.f_max = 0.5 / cfg.dt;
    cfg.seed = seed;
    return cfg;
}
}  // namespace

TEST_CASE("zero amplitude gives the zero trace", "[noise]") {
    auto cfg = base_config(1024, 5);
    cfg.amplitude = 0.0;
    const auto tr = noise::gen_one_over_f(cfg);
    for (double v : tr.values) REQUIRE(v == 0.0);
}

TEST_CASE("same seed twice gives identical traces", "[noise]") {
    const auto cfg = base_config(4096, 123);
    const auto a = noise::gen_one_over_f(cfg);
    const auto b = noise::gen_one_over_f(cfg);
    REQUIRE(a.values == b.values);

    auto other = cfg;
    other.stream = 7;
    REQUIRE(noise::gen_one_over_f(other).values != a.values);
}

TEST_CASE("trace rms matches the configured amplitude", "[noise]") {
    auto cfg = base_config(1 << 14, 42);
    cfg.amplitude = 0.37;
    const auto tr = noise::gen_one_over_f(cfg);
    double sumsq = 0.0, mean = 0.0;
    for (double v : tr.values) {
        sumsq += v * v;
        mean += v;
    }
    const double rms = std::sqrt(sumsq / static_cast<double>(tr.values.size()));
    REQUIRE_THAT(rms, WithinAbs(0.37, 0.037));
    REQUIRE_THAT(mean / static_cast<double>(tr.values.size()), WithinAbs(0.0, 1e-12));
}

TEST_CASE("periodogram slope is -1 over the band", "[noise]") {
    for (std::size_t n : {std::size_t(1) << 14, std::size_t(1) << 16}) {
        double acc = 0.0;
        const int n_seeds = 20;
        for (int s = 0; s < n_seeds; ++s) {
            auto cfg = base_config(n, 1000 + static_cast<std::uint64_t>(s));
            acc += noise::periodogram_slope(noise::gen_one_over_f(cfg));
        }
        REQUIRE_THAT(acc / n_seeds, WithinAbs(-1.0, 0.15));
    }
}

TEST_CASE("band validation", "[noise]") {
    auto cfg = base_config(256, 1);
    cfg.f_min = 0.0;
    REQUIRE_THROWS_AS(noise::gen_one_over_f(cfg), std::invalid_argument);
    cfg = base_config(256, 1);
    cfg.f_max = 1.0 / cfg.dt;  // above Nyquist
    REQUIRE_THROWS_AS(noise::gen_one_over_f(cfg), std::invalid_argument);
    cfg = base_config(256, 1);
    cfg.f_min = cfg.f_max;
    REQUIRE_THROWS_AS(noise::gen_one_over_f(cfg), std::invalid_argument);
}

TEST_CASE("tunneling profile", "[noise]") {
    const noise::TunnelingProfile p{std::numbers::sqrt2, 0.01};
    REQUIRE(noise::tunneling_at(p, 0.0) == p.t0);
    REQUIRE_THAT(noise::tunneling_at(p, p.width), WithinAbs(p.t0 * std::exp(-0.5), 1e-15));

    rng::StreamRng gen(3, 3);
    for (int k = 0; k < 200; ++k) {
        const double d = 0.05 * (gen.uniform() - 0.5);
        REQUIRE(noise::tunneling_at(p, d) == noise::tunneling_at(p, -d));
        REQUIRE(noise::tunneling_at(p, d) <= p.t0);
    }
}

TEST_CASE("nuclear sampling statistics", "[noise]") {
    SECTION("b_nuc = 0 gives zero fields") {
        const auto f = noise::sample_nuclear(0.0, 11, 0);
        for (const auto& b : f.b) REQUIRE(b.norm() == 0.0);
    }

    SECTION("component variance, Maxwell mean and isotropy") {
        const double b_nuc = 0.1;
        const int n = 100000;
        double sumsq = 0.0, summag = 0.0;
        Eigen::Vector3d mean_dir = Eigen::Vector3d::Zero();
        rng::StreamRng gen(2024, 77);
        for (int s = 0; s < n; ++s) {
            const auto f = noise::sample_nuclear(b_nuc, gen);
            for (const auto& b : f.b) sumsq += b.squaredNorm();
            summag += f.b[0].norm();
            mean_dir += f.b[0].normalized();
        }
        const double var = sumsq / (9.0 * n);
        REQUIRE_THAT(var, WithinAbs(b_nuc * b_nuc, 0.03 * b_nuc * b_nuc));

        // 3D Maxwell mean magnitude: b_nuc sqrt(8/pi).
        const double maxwell = b_nuc * std::sqrt(8.0 / std::numbers::pi);
        REQUIRE_THAT(summag / n, WithinAbs(maxwell, 0.02 * maxwell));

        REQUIRE((mean_dir / n).norm() <= 0.02);
    }
}

TEST_CASE("decay fit recovers a synthetic exponential envelope", "[noise]") {
    // cos^2 oscillation with a known contrast decay.
    const double T = 8.0;
    std::vector<double> ts, vs;
    for (int k = 0; k <= 4000; ++k) {
        const double tau = 0.01 * k;
        const double c = std::exp(-tau / T);
        ts.push_back(tau);
        vs.push_back(0.5 + 0.5 * c * std::cos(4.0 * tau));
    }
    const auto fit = noise::fit_decay_time(ts, vs, 0.5, 0.7);
    REQUIRE_THAT(fit.time, WithinAbs(T, 0.05 * T));
}

TEST_CASE("decay fit reports non-decaying envelopes as infinite", "[noise]") {
    std::vector<double> ts, vs;
    for (int k = 0; k <= 2000; ++k) {
        const double tau = 0.01 * k;
        ts.push_back(tau);
        vs.push_back(0.5 + 0.5 * std::cos(4.0 * tau));
    }
    const auto fit = noise::fit_decay_time(ts, vs, 0.5, 0.7);
    REQUIRE(std::isinf(fit.time));
}

TEST_CASE("calibration drives a synthetic decay model to the target", "[noise]") {
    // Stand-in decay law T(a) = c / a^2, matching the qualitative behavior of
    // the real experiment; checks the bisection logic in isolation.
    auto measure = [](double a) { return 6.4e-4 / (a * a); };
    const auto res = noise::calibrate_amplitude(10.0, measure);
    REQUIRE(res.converged);
    REQUIRE_THAT(measure(res.amplitude), WithinAbs(10.0, 0.5));

    const auto faster = noise::calibrate_amplitude(40.0, measure);
    REQUIRE(faster.amplitude < res.amplitude);  // weaker noise, slower decay

    REQUIRE_THROWS_AS(noise::calibrate_amplitude(-1.0, measure), std::invalid_argument);
    // Window that cannot bracket the target.
    noise::CalibrationSettings narrow;
    narrow.amplitude_lo = 0.5;
    narrow.amplitude_hi = 1.0;
    REQUIRE_THROWS_AS(noise::calibrate_amplitude(1e6, measure, narrow), std::runtime_error);
}
