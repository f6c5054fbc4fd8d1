#include <doctest.h>

#include <cmath>
#include <random>

#include "firuq/error.hpp"
#include "firuq/random.hpp"
#include "firuq/stats.hpp"
#include "firuq/wsum.hpp"

using namespace firuq;

namespace {

std::vector<double> fixture(std::size_t n) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = std::pow(std::sin(1.7 * static_cast<double>(i)), 3) + 0.01 * i;
    return x;
}

std::vector<double> gaussian(std::size_t n, std::uint64_t seed, double mean = 0.0, double sd = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(mean, sd);
    std::vector<double> x(n);
    for (auto& v : x) v = g(rng);
    return x;
}

std::vector<double> uniform(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    std::vector<double> x(n);
    for (auto& v : x) v = u(rng);
    return x;
}

}  // namespace

TEST_SUITE("stats") {

TEST_CASE("D'Agostino-Pearson matches scipy.stats.normaltest") {
    // expected values computed with scipy 1.15 on the same fixture
    struct Row {
        std::size_t n;
        double k2, p, zs, zk, G1, G2, g1, g2;
    };
    const Row rows[] = {
        {25, 0.16539720673841965, 0.9206285797615572, 0.105691026677596, -0.39271696375157433,
         0.046112183316924606, -0.45225726328186333, 0.04329800601998869, -0.5975034859304857},
        {40, 0.5821960507104941, 0.7474424061195112, 0.10372676735295908, -0.755934394273074,
         0.036725047902762015, -0.5421199343710277, 0.03533325668070252, -0.623027284381279},
        {500, 70.94282829500197, 3.9351434669480505e-16, 0.004291961040197302, -8.422755479893288,
         0.00046484244313313346, -0.9265766922204639, 0.0004634467520680585, -0.9293128803903938},
    };
    for (const auto& r : rows) {
        CAPTURE(r.n);
        const auto x = fixture(r.n);
        const auto t = stats::dagostino_pearson(x);
        CHECK(t.k2 == doctest::Approx(r.k2).epsilon(1e-10));
        CHECK(t.p_value == doctest::Approx(r.p).epsilon(1e-9));
        CHECK(t.z_skewness == doctest::Approx(r.zs).epsilon(1e-9));
        CHECK(t.z_kurtosis == doctest::Approx(r.zk).epsilon(1e-10));
        CHECK_FALSE(t.below_recommended_n);
        CHECK(stats::sample_skewness(x) == doctest::Approx(r.G1).epsilon(1e-10));
        CHECK(stats::sample_kurtosis_excess(x) == doctest::Approx(r.G2).epsilon(1e-12));
        CHECK(stats::moment_skewness(x) == doctest::Approx(r.g1).epsilon(1e-10));
        CHECK(stats::moment_excess_kurtosis(x) == doctest::Approx(r.g2).epsilon(1e-12));
    }
}

TEST_CASE("normality test preconditions") {
    CHECK_THROWS_AS((void)stats::dagostino_pearson(fixture(19)), SampleSizeError);
    CHECK_THROWS_AS((void)stats::dagostino_pearson(fixture(7), 4), SampleSizeError);
    CHECK(stats::dagostino_pearson(fixture(10), 8).below_recommended_n);
    CHECK_THROWS_AS((void)stats::dagostino_pearson(std::vector<double>(30, 2.5)), DegenerateError);
}

TEST_CASE("normality test calibration") {
    SUBCASE("uniform data is rejected") {
        CHECK(stats::dagostino_pearson(uniform(5000, 1)).p_value < 1e-6);
    }
    SUBCASE("Gaussian data mostly is not") {
        int accepted = 0;
        for (std::uint64_t s = 0; s < 100; ++s)
            accepted += stats::dagostino_pearson(gaussian(5000, 1000 + s, 0.0, 0.18)).p_value > 0.05;
        CHECK(accepted >= 90);
    }
    SUBCASE("rejection rate under the null") {
        int rejected = 0;
        for (std::uint64_t s = 0; s < 1000; ++s)
            rejected += stats::dagostino_pearson(gaussian(500, 5000 + s)).p_value <= 0.05;
        const double rate = rejected / 1000.0;
        CHECK(rate >= 0.025);
        CHECK(rate <= 0.10);
    }
}

TEST_CASE("moment estimators on large samples") {
    const auto u = uniform(200000, 2);
    CHECK(stats::sample_kurtosis_excess(u) == doctest::Approx(-1.2).epsilon(0.02));
    const auto g = gaussian(200000, 3);
    CHECK(std::abs(stats::sample_kurtosis_excess(g)) < 0.05);
    CHECK(std::abs(stats::sample_skewness(g)) < 0.03);
    CHECK_THROWS_AS((void)stats::sample_kurtosis_excess(std::vector<double>{1.0, 2.0, 3.0}), SampleSizeError);
    CHECK_THROWS_AS((void)stats::sample_skewness(std::vector<double>(5, 1.0)), DegenerateError);
    CHECK(stats::sample_variance(std::vector<double>{1.0, 2.0, 3.0, 4.0}) == doctest::Approx(5.0 / 3.0));
}

TEST_CASE("Gaussian reference") {
    const stats::GaussianReference g(2.0, 4.0);
    CHECK(g.cdf(2.0) == 0.5);
    CHECK(g.cdf(4.0) - g.cdf(0.0) == doctest::Approx(0.6826894921370859).epsilon(1e-13));
    CHECK(g.pdf(2.0) == doctest::Approx(1.0 / std::sqrt(2.0 * M_PI * 4.0)).epsilon(1e-15));
    CHECK(g.cdf(-8.0) == doctest::Approx(2.866515718791939e-07).epsilon(1e-12));
    CHECK(stats::gaussian_half_sigma_mass() == doctest::Approx(0.38292492254802624).epsilon(1e-14));
    CHECK(std::round(stats::gaussian_half_sigma_mass() * 1e5) / 1e5 == 0.38292);
    CHECK_THROWS_AS(stats::GaussianReference(0.0, 0.0), Error);
    CHECK_THROWS_AS(stats::GaussianReference(0.0, -1.0), Error);
}

TEST_CASE("half-sigma fraction") {
    CHECK(stats::fraction_within_half_sigma(uniform(400000, 4)) == doctest::Approx(1.0 / std::sqrt(12.0)).epsilon(0.005));
    // s^2 = 2.5 / 3, so s/2 = 0.456 and every point lies outside
    const std::vector<double> pts{-1.0, 1.0, -0.5, 0.5};
    CHECK(stats::fraction_within_half_sigma(pts) == 0.0);
    CHECK(stats::fraction_within_half_sigma(std::vector<double>{-1.0, 0.0, 0.0, 1.0}) == 0.5);
    CHECK_THROWS_AS((void)stats::fraction_within_half_sigma(std::vector<double>{3.0, 3.0}), DegenerateError);
}

TEST_CASE("binning") {
    CHECK(stats::default_bin_count(10) == 16);
    CHECK(stats::default_bin_count(5000) == 71);
    CHECK(stats::default_bin_count(1'000'000) == 128);
    const std::vector<double> x{0.0, 1.0, 2.0, 3.0};
    const auto bins = stats::make_bins(x, -1.0, 1.0, 4);
    CHECK(bins.edges.front() == -1.0);
    CHECK(bins.edges.back() == 3.0);
    CHECK(bins.size() == 4);
    const auto p = stats::histogram_probabilities(x, bins);
    CHECK(p == std::vector<double>{0.0, 0.25, 0.25, 0.5});

    const stats::GaussianReference g(1.0, 1.0);
    const auto q = stats::reference_probabilities([&](double y) { return g.cdf(y); }, bins);
    double total = 0.0;
    for (double v : q) total += v;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(q.front() == doctest::Approx(g.cdf(0.0)).epsilon(1e-14));
}

TEST_CASE("JS distance") {
    SUBCASE("bounds and symmetry") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int k = 0; k < 200; ++k) {
            std::vector<double> p(12), q(12);
            double sp = 0.0, sq = 0.0;
            for (std::size_t i = 0; i < 12; ++i) {
                p[i] = u(rng) < 0.3 ? 0.0 : u(rng);
                q[i] = u(rng) < 0.3 ? 0.0 : u(rng);
                sp += p[i];
                sq += q[i];
            }
            if (sp == 0.0 || sq == 0.0) continue;
            for (auto& v : p) v /= sp;
            for (auto& v : q) v /= sq;
            const double d = stats::js_distance(p, q);
            CHECK(d >= 0.0);
            CHECK(d <= std::sqrt(std::log(2.0)));
            CHECK(d == stats::js_distance(q, p));
        }
    }
    SUBCASE("extremes") {
        const std::vector<double> a{0.5, 0.5, 0.0, 0.0}, b{0.0, 0.0, 0.25, 0.75};
        CHECK(stats::js_distance(a, b) == doctest::Approx(std::sqrt(std::log(2.0))).epsilon(1e-15));
        CHECK(stats::js_distance(a, a) == 0.0);
    }
    SUBCASE("hand-computed value") {
        // p = (1/2, 1/2), q = (1, 0): m = (3/4, 1/4)
        const double kl_p = 0.5 * std::log(0.5 / 0.75) + 0.5 * std::log(0.5 / 0.25);
        const double kl_q = std::log(1.0 / 0.75);
        const std::vector<double> p{0.5, 0.5}, q{1.0, 0.0};
        CHECK(stats::js_distance(p, q) == doctest::Approx(std::sqrt(0.5 * kl_p + 0.5 * kl_q)).epsilon(1e-14));
    }
    SUBCASE("samples from the reference approach zero") {
        const auto x = gaussian(400000, 6);
        const stats::GaussianReference g(0.0, 1.0);
        const auto bins = stats::make_bins(x, -1.0, 1.0, 64);
        CHECK(stats::js_distance(x, [&](double y) { return g.cdf(y); }, bins) < 0.01);
    }
}

TEST_CASE("analyze and aggregate") {
    const auto ref = wsum::WeightedUniformSum(FilterCoefficients({0.5, 0.4, 0.3, 0.2}), 1.0);
    const auto x = wsum::sample(ref, 5000, 12);
    const auto r = stats::analyze(x, ref);
    CHECK(r.n == 5000);
    CHECK(r.bins.size() == 71);
    CHECK(r.js_to_wsum < r.js_to_gaussian);
    CHECK(r.half_sigma_wsum == doctest::Approx(wsum::half_sigma_mass(ref)));
    CHECK(r.half_sigma_gaussian == stats::gaussian_half_sigma_mass());
    CHECK(r.excess_kurtosis < 0.0);
    CHECK(r.rejected == (r.p_value <= 0.05));

    stats::AnalysisOptions strict;
    strict.alpha = r.p_value;
    CHECK(stats::analyze(x, ref, strict).rejected);  // equality rejects

    const auto g = gaussian(5000, 13, 0.0, std::sqrt(ref.variance()));
    const auto rg = stats::analyze(g, ref);
    const std::vector<stats::AnalysisReport> both{r, rg};
    const auto a = stats::aggregate(both);
    CHECK(a.count == 2);
    CHECK(a.mean_js_to_wsum == doctest::Approx(0.5 * (r.js_to_wsum + rg.js_to_wsum)));
    CHECK(a.rejection_rate == 0.5 * (r.rejected + rg.rejected));
    CHECK_THROWS_AS((void)stats::analyze(std::vector<double>(10, 0.1), ref), Error);
}

TEST_CASE("null calibration through analyze") {
    // distributions drawn from a Gaussian reference itself reject at about alpha
    const auto ref = wsum::WeightedUniformSum(FilterCoefficients({1.0, 1.0, 1.0}), 1.0);
    std::vector<stats::AnalysisReport> reports;
    for (std::uint64_t s = 0; s < 200; ++s) {
        stats::AnalysisOptions opt;
        opt.half_sigma_wsum = 0.37;
        reports.push_back(stats::analyze(gaussian(1000, 9000 + s, 0.0, 0.5), ref, opt));
    }
    const double rate = stats::aggregate(reports).rejection_rate;
    CHECK(rate >= 0.01);
    CHECK(rate <= 0.10);
}

}  // TEST_SUITE
