#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "firuq/error.hpp"
#include "firuq/fir.hpp"
#include "firuq/mcsim.hpp"
#include "firuq/stats.hpp"
#include "firuq/wsum.hpp"
#include "oracles.hpp"

using namespace firuq;

namespace {

Signal sine(std::size_t n, double amp = 50.0, double f = 20.0, double fs = 160.0) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = amp * std::sin(2 * std::numbers::pi * f * i / fs);
    return Signal(std::move(x), fs);
}

const FilterCoefficients& default_filter() {
    static const auto h = fir::design_bandpass({160.0, 7.0, 35.0, 2.0, 8.75});
    return h;
}

double eq6_variance(const FilterCoefficients& h, double delta) {
    double s = 0.0;
    for (double b : h.values()) s += b * b;
    return s * delta * delta / 12.0;
}

}  // namespace

TEST_SUITE("mcsim") {

TEST_CASE("quantization noise stays inside the half-step") {
    const Signal x = sine(1'000'000, 10.0);
    RandomStream stream(8);
    const Signal noisy = mcsim::add_quantization_noise(x, 0.5, stream);
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = noisy[i] - x[i];
        REQUIRE(d > -0.25);
        REQUIRE(d < 0.25);
        sum += d;
    }
    CHECK(std::abs(sum / x.size()) < 3.0 * (0.5 / std::sqrt(12.0)) / 1000.0);

    RandomStream a(8), b(8);
    CHECK(std::ranges::equal(mcsim::add_quantization_noise(x, 0.5, a).samples(),
                             mcsim::add_quantization_noise(x, 0.5, b).samples()));
    CHECK_THROWS_AS((void)mcsim::add_quantization_noise(x, 0.0, a), DegenerateError);
}

TEST_CASE("uniform variates never reach the open interval's endpoints") {
    RandomStream s(0);
    for (int i = 0; i < 100000; ++i) {
        const double u = s.uniform_open();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("post-filter error") {
    const Signal a(std::vector<double>{1.0, 2.0, 3.0}, 10.0);
    CHECK(std::ranges::equal(mcsim::post_filter_error(a, a).samples(), std::vector<double>{0.0, 0.0, 0.0}));
    CHECK_THROWS_AS((void)mcsim::post_filter_error(a, Signal(std::vector<double>{1.0}, 10.0)), InputShapeError);
    CHECK_THROWS_AS((void)mcsim::post_filter_error(a, Signal(std::vector<double>{1.0, 2.0, 3.0}, 20.0)),
                    InputShapeError);
}

TEST_CASE("error does not depend on the clean signal") {
    const auto& h = default_filter();
    const Signal x = sine(600, 80.0);
    const Signal z = sine(600, 3.0, 11.0);
    mcsim::TrialConfig cfg;
    cfg.repetitions = 50;
    cfg.seed = 17;
    cfg.output_indices = std::vector<std::size_t>{264, 400, 599};
    const auto ex = mcsim::run_trials(x, h, cfg);
    const auto ez = mcsim::run_trials(z, h, cfg);
    const double tol = std::max(mcsim::signal_independence_tolerance(x, h, 1.0),
                                mcsim::signal_independence_tolerance(z, h, 1.0));
    for (std::size_t k = 0; k < ex.size(); ++k)
        for (std::size_t r = 0; r < 50; ++r) CHECK(std::abs(ex[k].values[r] - ez[k].values[r]) <= tol);
    std::vector<double> ramp(600);
    for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = static_cast<double>(i % 7);
    const FilterCoefficients short_taps({0.5, 0.25, 0.125});
    CHECK(mcsim::signal_independence_gap(Signal(ramp, 160.0), short_taps, cfg, {10, 200}, 20) <=
          mcsim::signal_independence_tolerance(Signal(ramp, 160.0), short_taps, 1.0));
    CHECK(tol < 1e-9);
}

TEST_CASE("shape, transient guard and determinism") {
    const auto& h = default_filter();
    const Signal x = sine(700);
    mcsim::TrialConfig cfg;
    cfg.repetitions = 5000;
    cfg.output_indices = std::vector<std::size_t>{500};
    const auto one = mcsim::run_trials(x, h, cfg, "c", "e");
    REQUIRE(one.size() == 1);
    CHECK(one[0].values.size() == 5000);
    CHECK(one[0].output_index == 500);
    CHECK(one[0].channel_id == "c");

    cfg.output_indices = std::vector<std::size_t>{263};
    CHECK_THROWS_AS((void)mcsim::run_trials(x, h, cfg), BoundsError);
    cfg.output_indices = std::vector<std::size_t>{700};
    CHECK_THROWS_AS((void)mcsim::run_trials(x, h, cfg), BoundsError);
    cfg.output_indices = std::vector<std::size_t>{264};
    CHECK_NOTHROW((void)mcsim::run_trials(x, h, cfg));

    cfg.repetitions = 301;
    cfg.output_indices = std::vector<std::size_t>{300, 650};
    cfg.threads = 1;
    const auto serial = mcsim::run_trials(x, h, cfg);
    cfg.threads = 4;
    const auto parallel = mcsim::run_trials(x, h, cfg);
    cfg.threads = 7;
    const auto parallel7 = mcsim::run_trials(x, h, cfg);
    for (std::size_t k = 0; k < 2; ++k) {
        CHECK(serial[k].values == parallel[k].values);
        CHECK(serial[k].values == parallel7[k].values);
    }
}

TEST_CASE("index helpers") {
    const auto all = mcsim::full_overlap_indices(300, 265);
    REQUIRE(all.size() == 36);
    CHECK(all.front() == 264);
    CHECK(all.back() == 299);
    const auto even = mcsim::evenly_spaced_indices(1000, 265, 5);
    CHECK(even == std::vector<std::size_t>{264, 447, 631, 815, 999});
    CHECK(mcsim::evenly_spaced_indices(270, 265, 100).size() == 6);
}

TEST_CASE("moments of the error at 5000 repetitions") {
    const auto& h = default_filter();
    const Signal x = sine(1200);
    mcsim::TrialConfig cfg;
    cfg.repetitions = 5000;
    cfg.seed = 3;
    cfg.output_indices = mcsim::evenly_spaced_indices(x.size(), h.size(), 16);
    const auto dists = mcsim::run_trials(x, h, cfg);
    const double var = eq6_variance(h, 1.0);
    const double sigma = std::sqrt(var);
    const auto ref = wsum::dominant_distribution(h, 1.0);
    std::vector<double> pooled;
    for (const auto& d : dists) {
        const auto m = stats::central_moments(d.values);
        CHECK(std::abs(m.mean) < 3.0 * sigma / std::sqrt(5000.0));
        // sample variance of a near-Gaussian: se ~ var sqrt(2 / n)
        const double sv = stats::sample_variance(d.values);
        CHECK(std::abs(sv - var) < 3.0 * var * std::sqrt(2.0 / 5000.0));
        CHECK(std::abs(sv - var) < 0.1 * var);
        pooled.insert(pooled.end(), d.values.begin(), d.values.end());
    }
    // the analytic CDF tabulated and interpolated; the interpolation error is
    // far below the tolerance
    const auto [lo, hi] = ref.support();
    std::vector<double> grid(801);
    for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = ref.cdf(lo + (hi - lo) * i / 800.0);
    const auto F = [&](double y) {
        const double t = std::clamp((y - lo) / (hi - lo) * 800.0, 0.0, 800.0);
        const auto i = std::min<std::size_t>(static_cast<std::size_t>(t), 799);
        return grid[i] + (t - i) * (grid[i + 1] - grid[i]);
    };
    CHECK(oracle::ks_distance(pooled, F) < 0.025);
}

}  // TEST_SUITE
