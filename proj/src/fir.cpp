#include "firuq/fir.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "firuq/error.hpp"

namespace firuq::fir {

namespace {

constexpr double kHammingLengthFactor = 3.3;

// Windowed-sinc lowpass with unit DC gain, built on the left half and mirrored
// so that h[k] == h[L - 1 - k] holds bit-for-bit.
std::vector<double> lowpass(std::size_t length, double cutoff, double sample_rate) {
    const auto window = hamming_window(length);
    const double wc = 2.0 * cutoff / sample_rate;  // cycles per sample, times two
    const std::size_t half = (length - 1) / 2;
    std::vector<double> h(length);
    for (std::size_t k = 0; k <= half; ++k) {
        const double m = static_cast<double>(half) - static_cast<double>(k);
        const double arg = std::numbers::pi * wc * m;
        const double sinc = m == 0.0 ? 1.0 : std::sin(arg) / arg;
        h[k] = wc * sinc * window[k];
        h[length - 1 - k] = h[k];
    }
    double dc = 0.0;
    for (double v : h) dc += v;
    for (double& v : h) v /= dc;
    return h;
}

}  // namespace

std::size_t transition_length(double sample_rate, double transition) {
    if (!(sample_rate > 0.0) || !(transition > 0.0))
        throw DesignError("sample rate and transition bandwidth must be positive");
    const double exact = kHammingLengthFactor * sample_rate / transition;
    // 3.3 has no exact binary form, so products that are integers in exact arithmetic can
    // land a few ulps above the integer; don't let that bump the ceiling.
    const double nearest = std::round(exact);
    const double rounded =
        std::fabs(exact - nearest) <= 1e-9 * std::max(1.0, exact) ? nearest : std::ceil(exact);
    auto n = static_cast<std::size_t>(std::max(1.0, rounded));
    if (n % 2 == 0) ++n;
    return n;
}

std::size_t filter_length(double sample_rate, double l_trans, double h_trans) {
    return transition_length(sample_rate, std::min(l_trans, h_trans));
}

std::vector<double> hamming_window(std::size_t length) {
    if (length < 2) throw DesignError("Hamming window needs at least two points");
    std::vector<double> w(length);
    const double denom = static_cast<double>(length - 1);
    for (std::size_t k = 0; k <= (length - 1) / 2; ++k) {
        w[k] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / denom);
        w[length - 1 - k] = w[k];
    }
    return w;
}

void validate(const BandpassSpec& s) {
    const auto fail = [](const std::string& what) { throw DesignError("invalid bandpass: " + what); };
    if (!(s.sample_rate > 0.0) || !std::isfinite(s.sample_rate)) fail("sample_rate must be positive");
    if (!(s.l_trans > 0.0)) fail("l_trans must be positive");
    if (!(s.h_trans > 0.0)) fail("h_trans must be positive");
    if (!(s.l_freq < s.h_freq)) fail("l_freq must be below h_freq");
    if (!(s.l_freq - s.l_trans > 0.0)) fail("l_freq - l_trans must be above 0 Hz");
    if (!(s.h_freq + s.h_trans < 0.5 * s.sample_rate)) {
        std::ostringstream os;
        os << "h_freq + h_trans must be below Nyquist (" << 0.5 * s.sample_rate << " Hz)";
        fail(os.str());
    }
}

FilterCoefficients design_bandpass(const BandpassSpec& spec) {
    validate(spec);
    const std::size_t length = filter_length(spec.sample_rate, spec.l_trans, spec.h_trans);
    std::vector<double> h(length, 0.0);

    const auto place = [&](double cutoff, double transition, double sign) {
        const auto lp = lowpass(transition_length(spec.sample_rate, transition), cutoff, spec.sample_rate);
        const std::size_t offset = (length - lp.size()) / 2;
        for (std::size_t k = 0; k < lp.size(); ++k) h[offset + k] += sign * lp[k];
    };
    place(spec.h_freq + 0.5 * spec.h_trans, spec.h_trans, +1.0);
    place(spec.l_freq - 0.5 * spec.l_trans, spec.l_trans, -1.0);

    const double gain = magnitude_at(h, spec.sample_rate, std::sqrt(spec.l_freq * spec.h_freq));
    for (double& v : h) v /= gain;
    return FilterCoefficients(std::move(h), spec.sample_rate, spec);
}

double apply_at(std::span<const double> coeffs, std::span<const double> x, std::size_t n) {
    const std::size_t taps = std::min(coeffs.size(), n + 1);
    double acc = 0.0;
    for (std::size_t i = 0; i < taps; ++i) acc += coeffs[i] * x[n - i];
    return acc;
}

Signal apply(const FilterCoefficients& coeffs, const Signal& signal) {
    const auto x = signal.samples();
    std::vector<double> y(x.size());
    for (std::size_t n = 0; n < x.size(); ++n) y[n] = apply_at(coeffs.values(), x, n);
    return Signal(std::move(y), signal.sample_rate());
}

Signal zero_phase_view(const Signal& causal_output, std::size_t filter_length) {
    const std::size_t delay = filter_length > 0 ? (filter_length - 1) / 2 : 0;
    const auto y = causal_output.samples();
    if (delay >= y.size()) return Signal({}, causal_output.sample_rate());
    return Signal(std::vector<double>(y.begin() + static_cast<std::ptrdiff_t>(delay), y.end()),
                  causal_output.sample_rate());
}

std::vector<ResponsePoint> frequency_response(std::span<const double> coeffs, double sample_rate,
                                              std::span<const double> frequencies) {
    std::vector<ResponsePoint> out;
    out.reserve(frequencies.size());
    for (double f : frequencies) {
        const double omega = 2.0 * std::numbers::pi * f / sample_rate;
        double re = 0.0;
        double im = 0.0;
        for (std::size_t k = 0; k < coeffs.size(); ++k) {
            const double a = omega * static_cast<double>(k);
            re += coeffs[k] * std::cos(a);
            im -= coeffs[k] * std::sin(a);
        }
        double phase = std::atan2(im, re);
        if (phase <= -std::numbers::pi) phase = std::numbers::pi;
        out.push_back({f, std::hypot(re, im), phase});
    }
    return out;
}

double magnitude_at(std::span<const double> coeffs, double sample_rate, double frequency) {
    const double f[] = {frequency};
    return frequency_response(coeffs, sample_rate, f).front().magnitude;
}

std::vector<double> frequency_grid(double sample_rate, std::size_t points) {
    if (points < 2) throw Error(ErrorKind::usage, "frequency grid needs at least two points");
    std::vector<double> grid(points);
    const double nyquist = 0.5 * sample_rate;
    for (std::size_t i = 0; i < points; ++i)
        grid[i] = nyquist * static_cast<double>(i) / static_cast<double>(points - 1);
    return grid;
}

}  // namespace firuq::fir
