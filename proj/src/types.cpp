#include "firuq/types.hpp"

#include <algorithm>
#include <cmath>

#include "firuq/error.hpp"

namespace firuq {

FilterCoefficients::FilterCoefficients(std::vector<double> coeffs,
                                       std::optional<double> sample_rate,
                                       std::optional<BandpassSpec> design)
    : coeffs_(std::move(coeffs)), sample_rate_(sample_rate), design_(std::move(design)) {
    if (coeffs_.empty()) throw DegenerateError("filter needs at least one coefficient");
    if (std::none_of(coeffs_.begin(), coeffs_.end(), [](double b) { return b != 0.0; }))
        throw DegenerateError("all filter coefficients are zero");
    if (std::any_of(coeffs_.begin(), coeffs_.end(), [](double b) { return !std::isfinite(b); }))
        throw DegenerateError("filter coefficients must be finite");
    if (sample_rate_ && !(*sample_rate_ > 0.0))
        throw DegenerateError("filter sample rate must be positive");
}

Signal::Signal(std::vector<double> samples, double sample_rate)
    : samples_(std::move(samples)), sample_rate_(sample_rate) {
    if (!(sample_rate_ > 0.0) || !std::isfinite(sample_rate_))
        throw DegenerateError("signal sample rate must be positive and finite");
}

}  // namespace firuq
