#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace firuq {

/// Bandpass design request. Frequencies in Hz.
struct BandpassSpec {
    double sample_rate = 0.0;
    double l_freq = 0.0;   ///< lower passband edge
    double h_freq = 0.0;   ///< upper passband edge
    double l_trans = 0.0;  ///< lower transition bandwidth
    double h_trans = 0.0;  ///< upper transition bandwidth

    bool operator==(const BandpassSpec&) const = default;
};

/// FIR taps b_0..b_N, plus optional design metadata.
///
/// The constructor enforces length >= 1 and at least one nonzero tap, so any
/// instance can be handed to the distribution code without further checks.
class FilterCoefficients {
public:
    explicit FilterCoefficients(std::vector<double> coeffs,
                                std::optional<double> sample_rate = std::nullopt,
                                std::optional<BandpassSpec> design = std::nullopt);

    [[nodiscard]] std::span<const double> values() const noexcept { return coeffs_; }
    [[nodiscard]] std::size_t size() const noexcept { return coeffs_.size(); }
    [[nodiscard]] std::size_t order() const noexcept { return coeffs_.size() - 1; }
    [[nodiscard]] double operator[](std::size_t i) const { return coeffs_[i]; }
    [[nodiscard]] const std::optional<double>& sample_rate() const noexcept { return sample_rate_; }
    [[nodiscard]] const std::optional<BandpassSpec>& design() const noexcept { return design_; }

private:
    std::vector<double> coeffs_;
    std::optional<double> sample_rate_;
    std::optional<BandpassSpec> design_;
};

/// A finite discrete-time signal (x[n] or y[n]) with its sampling rate.
class Signal {
public:
    Signal(std::vector<double> samples, double sample_rate);

    [[nodiscard]] std::span<const double> samples() const noexcept { return samples_; }
    [[nodiscard]] std::size_t size() const noexcept { return samples_.size(); }
    [[nodiscard]] double sample_rate() const noexcept { return sample_rate_; }
    [[nodiscard]] double operator[](std::size_t i) const { return samples_[i]; }
    [[nodiscard]] std::vector<double> release() && { return std::move(samples_); }

private:
    std::vector<double> samples_;
    double sample_rate_;
};

}  // namespace firuq
