#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <sstream>

#include "firuq/error.hpp"
#include "firuq/io.hpp"
#include "firuq/wsum.hpp"
#include "helpers.hpp"

using namespace firuq;

TEST_SUITE("io") {

TEST_CASE("shortest round-trip numbers") {
    CHECK(io::format_double(0.1) == "0.1");
    CHECK(io::format_double(-2.5e-7) == "-2.5e-07");
    std::mt19937_64 rng(1);
    for (int i = 0; i < 10000; ++i) {
        double v;
        const auto bits = rng();
        std::memcpy(&v, &bits, sizeof v);
        if (!std::isfinite(v)) continue;
        REQUIRE(io::parse_double(io::format_double(v)) == v);
    }
    CHECK(io::parse_double(" +1.25 ") == 1.25);
    CHECK_THROWS_AS((void)io::parse_double("1,5", 4, 2), ParseError);
    CHECK_THROWS_AS((void)io::parse_double(""), ParseError);
    CHECK_THROWS_AS((void)io::parse_double("nan"), ParseError);
}

TEST_CASE("coefficient files") {
    const std::vector<double> b{0.25, -1.5e-3, 3.0, 1.0 / 3.0};
    const auto dir = testing_support::scratch_dir("coeffs");
    io::write_coefficients(dir / "h.txt", b);
    io::write_coefficients(dir / "sub" / "h.csv", b);
    const auto txt = io::read_coefficients(dir / "h.txt");
    CHECK(std::vector<double>(txt.values().begin(), txt.values().end()) == b);
    const auto csv = io::read_file(dir / "sub" / "h.csv");
    CHECK(csv.rfind("index,coefficient\n0,0.25\n", 0) == 0);
    const auto back = io::read_coefficients(dir / "sub" / "h.csv");
    CHECK(std::vector<double>(back.values().begin(), back.values().end()) == b);

    CHECK(io::parse_coefficients("# designed\n\n1\n  2.5\n-3\n") == std::vector<double>{1.0, 2.5, -3.0});
    CHECK_THROWS_AS((void)io::parse_coefficients("1\nabc\n"), ParseError);
    CHECK_THROWS_AS((void)io::read_coefficients(dir / "missing.txt"), Error);
    io::write_file(dir / "zeros.txt", "0\n0\n");
    CHECK_THROWS_AS((void)io::read_coefficients(dir / "zeros.txt"), DegenerateError);
}

TEST_CASE("coefficient hash") {
    const std::vector<double> b{0.25, -1.5e-3};
    const auto h = io::coefficient_hash(b);
    CHECK(h.size() == 16);
    CHECK(h == io::coefficient_hash(std::vector<double>{0.25, -1.5e-3}));
    CHECK(h != io::coefficient_hash(std::vector<double>{0.25, std::nextafter(-1.5e-3, 0.0)}));
    CHECK(h != io::coefficient_hash(std::vector<double>{-1.5e-3, 0.25}));
    // FNV-1a of the empty string
    CHECK(io::coefficient_hash(std::vector<double>{}) == "cbf29ce484222325");
}

TEST_CASE("distribution table") {
    const wsum::WeightedUniformSum d(FilterCoefficients({1.0, 0.5}), 1.0);
    const auto t = io::tabulate(d, 201);
    REQUIRE(t.y.size() == 201);
    CHECK(t.y.front() == -0.75);
    CHECK(t.y.back() == 0.75);
    CHECK(t.cdf.front() == 0.0);
    CHECK(t.cdf.back() == 1.0);
    CHECK(io::trapezoid_mass(t) == doctest::Approx(1.0).epsilon(1e-3));
    const auto csv = io::distribution_csv(t);
    CHECK(csv.rfind("y,pdf,cdf\n-0.75,0,0\n", 0) == 0);
}

}  // TEST_SUITE
