#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "firuq/types.hpp"

namespace firuq::fir {

/// Taps needed for a transition of width `transition` Hz: 3.3 transition
/// periods (the Hamming main-lobe factor), rounded up to the next odd count.
[[nodiscard]] std::size_t transition_length(double sample_rate, double transition);

/// Full filter length: the rule above applied to the narrower transition.
[[nodiscard]] std::size_t filter_length(double sample_rate, double l_trans, double h_trans);

/// Symmetric Hamming window, w[k] = 0.54 - 0.46 cos(2 pi k / (L - 1)). L >= 2.
[[nodiscard]] std::vector<double> hamming_window(std::size_t length);

/// Throws DesignError naming the first violated constraint.
void validate(const BandpassSpec& spec);

/// Linear-phase Hamming-windowed bandpass.
///
/// The response is an upper lowpass (cutoff h_freq + h_trans/2) minus a lower
/// lowpass (cutoff l_freq - l_trans/2). Each lowpass is a unit-DC windowed sinc
/// sized by transition_length for its own transition and centred in the
/// overall filter_length. The result is scaled to unit magnitude at the
/// geometric band centre sqrt(l_freq * h_freq). Coefficients are exactly
/// symmetric.
[[nodiscard]] FilterCoefficients design_bandpass(const BandpassSpec& spec);

/// y[n] = sum_i b_i x[n - i] with x[m] = 0 for m < 0; same length as x.
/// Plain multiply-then-add in increasing i, so results are bit-reproducible.
[[nodiscard]] Signal apply(const FilterCoefficients& coeffs, const Signal& signal);

/// A single output sample of apply(); the same arithmetic order.
[[nodiscard]] double apply_at(std::span<const double> coeffs, std::span<const double> x,
                              std::size_t n);

/// Causal output advanced by the group delay (L - 1)/2 samples. The trailing
/// (L - 1)/2 samples, which would need future input, are dropped.
[[nodiscard]] Signal zero_phase_view(const Signal& causal_output, std::size_t filter_length);

struct ResponsePoint {
    double frequency = 0.0;  ///< Hz
    double magnitude = 0.0;
    double phase = 0.0;      ///< radians, wrapped to (-pi, pi]
};

/// DTFT of the taps at the given frequencies (Hz).
[[nodiscard]] std::vector<ResponsePoint> frequency_response(std::span<const double> coeffs,
                                                            double sample_rate,
                                                            std::span<const double> frequencies);

[[nodiscard]] double magnitude_at(std::span<const double> coeffs, double sample_rate,
                                  double frequency);

/// Evenly spaced grid 0..sample_rate/2 inclusive.
[[nodiscard]] std::vector<double> frequency_grid(double sample_rate, std::size_t points);

}  // namespace firuq::fir
