#include <doctest.h>

#include <algorithm>
#include <cstring>
#include <random>

#include "firuq/error.hpp"
#include "firuq/ingest.hpp"
#include "firuq/io.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace firuq;

namespace {

std::vector<std::int16_t> ramp(std::size_t n, int start = -100) {
    std::vector<std::int16_t> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<std::int16_t>(start + static_cast<int>(i));
    return v;
}

std::string two_signal_edf() {
    oracle::EdfFixtureSignal a{"Fc5.", ramp(640), 160};
    oracle::EdfFixtureSignal b{"C3..", ramp(640, 1000), 160, -500.0, 500.0, -2048, 2047};
    return oracle::write_edf({a, b}, 1.0);
}

// Byte offset of a per-signal field, fields listed in header order.
std::size_t signal_field_offset(std::size_t ns, std::size_t field, std::size_t signal) {
    static const std::size_t widths[] = {16, 80, 8, 8, 8, 8, 8, 80, 8, 32};
    std::size_t off = 256;
    for (std::size_t f = 0; f < field; ++f) off += widths[f] * ns;
    return off + widths[field] * signal;
}

void put(std::string& bytes, std::size_t at, const std::string& text, std::size_t width) {
    std::string f = text + std::string(width - text.size(), ' ');
    bytes.replace(at, width, f);
}

}  // namespace

TEST_SUITE("ingest") {

TEST_CASE("EDF write-then-parse round trip") {
    const auto ramp_a = ramp(640);
    const auto ramp_b = ramp(640, 1000);
    const auto file = ingest::parse_edf(two_signal_edf());
    CHECK(file.header.signal_count == 2);
    CHECK(file.header.record_count == 4);
    CHECK(file.header.record_duration == 1.0);
    REQUIRE(file.channels.size() == 2);
    CHECK(file.channels[0].label == "Fc5.");
    CHECK(file.channels[0].sample_rate == 160.0);
    CHECK(file.channels[0].physical_dimension == "uV");
    REQUIRE(file.channels[0].samples.size() == 640);
    CHECK(file.channels[0].clamped_samples == 0);
    const auto& s0 = file.header.signals[0];
    const auto& s1 = file.header.signals[1];
    for (std::size_t i = 0; i < 640; ++i) {
        CHECK(file.channels[0].samples[i] == ingest::digital_to_physical(ramp_a[i], s0));
        CHECK(file.channels[1].samples[i] == ingest::digital_to_physical(ramp_b[i], s1));
    }
    // (dig + 32768) * 6553.5 / 65535 - 3276.8 is dig / 10 up to rounding
    CHECK(file.channels[0].samples[0] == doctest::Approx(-10.0).epsilon(1e-12));
    CHECK(file.channels[1].clamped_samples == 0);
}

TEST_CASE("EDF out-of-range digital values are clamped and counted") {
    oracle::EdfFixtureSignal a{"Oz..", {-3000, -2048, 0, 2047, 3000, 100}, 3, -100.0, 100.0, -2048, 2047};
    const auto file = ingest::parse_edf(oracle::write_edf({a}, 0.5));
    const auto& ch = file.channels[0];
    CHECK(ch.clamped_samples == 2);
    CHECK(ch.sample_rate == 6.0);
    CHECK(ch.samples[0] == -100.0);
    CHECK(ch.samples[1] == -100.0);
    CHECK(ch.samples[3] == 100.0);
    CHECK(ch.samples[4] == 100.0);
}

TEST_CASE("EDF scaling endpoints and monotonicity") {
    ingest::EdfSignalHeader s;
    s.physical_min = -200.0;
    s.physical_max = 300.0;
    s.digital_min = -2048;
    s.digital_max = 2047;
    CHECK(ingest::digital_to_physical(-2048, s) == -200.0);
    CHECK(ingest::digital_to_physical(2047, s) == 300.0);
    double prev = -1e300;
    for (long d = -2048; d <= 2047; ++d) {
        const double p = ingest::digital_to_physical(d, s);
        REQUIRE(p > prev);
        prev = p;
    }
}

TEST_CASE("EDF annotation signals are skipped") {
    oracle::EdfFixtureSignal a{"Cz..", ramp(320), 160};
    oracle::EdfFixtureSignal ann{"EDF Annotations", std::vector<std::int16_t>(60, 0x2b2b), 30};
    const auto file = ingest::parse_edf(oracle::write_edf({a, ann}, 2.0, "EDF+C"));
    REQUIRE(file.channels.size() == 1);
    CHECK(file.channels[0].sample_rate == 80.0);
    CHECK(file.channels[0].samples.size() == 320);
}

TEST_CASE("EDF structured errors") {
    const std::string good = two_signal_edf();
    const auto offset_of = [](const std::string& bytes) -> std::size_t {
        try {
            (void)ingest::parse_edf(bytes);
        } catch (const ParseError& e) {
            return e.offset();
        }
        FAIL("expected ParseError");
        return 0;
    };
    SUBCASE("version") {
        std::string b = good;
        b[0] = '1';
        CHECK(offset_of(b) == 0);
    }
    SUBCASE("truncated data") {
        CHECK_THROWS_AS((void)ingest::parse_edf(good.substr(0, good.size() - 1)), ParseError);
    }
    SUBCASE("truncated header") {
        CHECK(offset_of(good.substr(0, 300)) == 300);  // where the bytes ran out
    }
    SUBCASE("extra bytes") {
        CHECK_THROWS_AS((void)ingest::parse_edf(good + "xx"), ParseError);
    }
    SUBCASE("malformed record count") {
        std::string b = good;
        put(b, 236, "4x", 8);
        CHECK(offset_of(b) == 236);
    }
    SUBCASE("header byte count") {
        std::string b = good;
        put(b, 184, "512", 8);
        CHECK(offset_of(b) == 184);
    }
    SUBCASE("digital range inverted") {
        std::string b = good;
        put(b, signal_field_offset(2, 6, 1), "-4000", 8);
        CHECK(offset_of(b) == signal_field_offset(2, 6, 1));
    }
    SUBCASE("equal physical range") {
        std::string b = good;
        put(b, signal_field_offset(2, 4, 1), "-500", 8);
        CHECK(offset_of(b) == signal_field_offset(2, 3, 1));
    }
    SUBCASE("unknown record count is inferred") {
        std::string b = good;
        put(b, 236, "-1", 8);
        CHECK(ingest::parse_edf(b).header.record_count == 4);
        CHECK_THROWS_AS((void)ingest::parse_edf(b + "x"), ParseError);
    }
    SUBCASE("discontinuous EDF+") {
        std::string b = good;
        put(b, 192, "EDF+D", 44);
        CHECK_THROWS_AS((void)ingest::parse_edf(b), ParseError);
    }
    SUBCASE("file context on disk") {
        const auto dir = testing_support::scratch_dir("edf_ctx");
        std::string b = good;
        b[0] = 'x';
        io::write_file(dir / "bad.edf", b);
        try {
            (void)ingest::read_edf(dir / "bad.edf");
            FAIL("expected error");
        } catch (const Error& e) {
            CHECK(std::string(e.what()).find("bad.edf") != std::string::npos);
            CHECK(e.kind() == ErrorKind::data);
        }
    }
}

TEST_CASE("EDF fuzzed headers never crash") {
    const std::string good = two_signal_edf();
    const std::size_t header = 256 + 2 * 256;
    std::mt19937_64 rng(1234);
    std::uniform_int_distribution<std::size_t> pos(0, header - 1);
    std::uniform_int_distribution<int> byte(0, 255);
    std::uniform_int_distribution<int> digit('0', '9');
    const char specials[] = {'-', '+', '.', ' ', 'e', '9', '0', '\0', '\x7f'};
    std::uniform_int_distribution<std::size_t> special(0, sizeof specials - 1);
    std::size_t parsed = 0, rejected = 0;
    for (int trial = 0; trial < 20000; ++trial) {
        std::string b = good;
        const int edits = 1 + trial % 4;
        for (int e = 0; e < edits; ++e) {
            const std::size_t at = pos(rng);
            switch (trial % 3) {
                case 0: b[at] = static_cast<char>(byte(rng)); break;
                case 1: b[at] = static_cast<char>(digit(rng)); break;
                default: b[at] = specials[special(rng)]; break;
            }
        }
        if (trial % 50 == 0) b.resize(pos(rng));
        try {
            (void)ingest::parse_edf(b);
            ++parsed;
        } catch (const Error&) {
            ++rejected;
        }
    }
    CHECK(parsed + rejected == 20000);
    CHECK(rejected > 0);
    CHECK(parsed > 0);
}

TEST_CASE("CSV channels") {
    SUBCASE("header row") {
        const auto ch = ingest::parse_csv("a,b\n1,2\n3,4", 100.0);
        REQUIRE(ch.size() == 2);
        CHECK(ch[0].label == "a");
        CHECK(ch[1].samples == std::vector<double>{2.0, 4.0});
        CHECK(ch[0].sample_rate == 100.0);
    }
    SUBCASE("no header") {
        const auto ch = ingest::parse_csv("1.5,-2e3\r\n3,4\r\n", 50.0);
        REQUIRE(ch.size() == 2);
        CHECK(ch[0].label == "ch0");
        CHECK(ch[1].samples == std::vector<double>{-2000.0, 4.0});
    }
    SUBCASE("empty body") {
        CHECK(ingest::parse_csv("", 10.0).empty());
        CHECK(ingest::parse_csv("x,y\n", 10.0).empty());
    }
    SUBCASE("quoted labels") {
        const auto ch = ingest::parse_csv("\"Fp1, left\",\"say \"\"hi\"\"\"\n1,2\n", 10.0);
        CHECK(ch[0].label == "Fp1, left");
        CHECK(ch[1].label == "say \"hi\"");
    }
    SUBCASE("errors carry row and column") {
        try {
            (void)ingest::parse_csv("a,b\n1,2\n3\n", 10.0);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.offset() == 3);
            CHECK(e.column() == 2);
        }
        try {
            (void)ingest::parse_csv("a,b\n1,2\n3,x4\n", 10.0);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.offset() == 3);
            CHECK(e.column() == 2);
        }
        CHECK_THROWS_AS((void)ingest::parse_csv("1,2", 0.0), Error);
    }
    SUBCASE("exporter round trip is bit-exact") {
        std::mt19937_64 rng(8);
        std::normal_distribution<double> g(0.0, 1e3);
        std::vector<ingest::ChannelData> chans(3);
        for (std::size_t c = 0; c < 3; ++c) {
            chans[c].label = "ch \"" + std::to_string(c) + "\", x";
            chans[c].sample_rate = 160.0;
            for (int i = 0; i < 500; ++i) chans[c].samples.push_back(g(rng) * std::pow(10.0, i % 30 - 15));
        }
        chans[0].samples[7] = 5e-324;
        chans[1].samples[9] = -0.0;
        const auto back = ingest::parse_csv(ingest::channels_csv(chans), 160.0);
        REQUIRE(back.size() == 3);
        for (std::size_t c = 0; c < 3; ++c) {
            CHECK(back[c].label == chans[c].label);
            REQUIRE(back[c].samples.size() == 500);
            CHECK(std::memcmp(back[c].samples.data(), chans[c].samples.data(), 500 * sizeof(double)) == 0);
        }
    }
}

TEST_CASE("epochs") {
    ingest::ChannelData ch;
    ch.label = "C3";
    ch.sample_rate = 160.0;
    for (int i = 0; i < 1920; ++i) ch.samples.push_back(i * 0.5);
    CHECK(std::ranges::equal(ingest::epoch(ch, 0, 1920).samples(), ch.samples));
    const auto e = ingest::epoch(ch, 640, 4 * 160);
    CHECK(e.size() == 640);
    CHECK(e.sample_rate() == 160.0);
    std::vector<double> joined;
    for (std::size_t k = 0; k < 3; ++k) {
        const auto part = ingest::epoch(ch, k * 640, 640);
        joined.insert(joined.end(), part.samples().begin(), part.samples().end());
    }
    CHECK(joined == ch.samples);
    CHECK_THROWS_AS((void)ingest::epoch(ch, 1500, 640), BoundsError);
    CHECK_THROWS_AS((void)ingest::epoch(ch, 5000, 0), BoundsError);
}

}  // TEST_SUITE
