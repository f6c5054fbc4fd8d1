#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "firuq/random.hpp"
#include "firuq/types.hpp"

namespace firuq::mcsim {

struct TrialConfig {
    std::size_t repetitions = 5000;
    double delta = 1.0;  ///< quantization step, signal units
    std::uint64_t seed = 0;
    /// Output indices to record; unset means every index n >= N.
    std::optional<std::vector<std::size_t>> output_indices;
    /// Worker threads; 0 picks the hardware concurrency. Never affects results.
    std::size_t threads = 1;
    /// Re-run a few trials on an all-zero input and require the same error.
    bool self_check = true;
};

/// Post-filter error values at one output index, one per repetition.
struct EmpiricalDistribution {
    std::vector<double> values;
    std::size_t output_index = 0;
    std::string channel_id;
    std::string epoch_id;
};

/// signal + u with u_i independent on (-delta/2, delta/2).
[[nodiscard]] Signal add_quantization_noise(const Signal& signal, double delta, RandomStream& stream);

/// noisy - clean, elementwise. Throws InputShapeError on mismatched shape.
[[nodiscard]] Signal post_filter_error(const Signal& noisy_out, const Signal& clean_out);

/// Every index with full tap overlap: N .. size-1.
[[nodiscard]] std::vector<std::size_t> full_overlap_indices(std::size_t signal_size,
                                                            std::size_t filter_size);

/// `count` indices spread evenly over the full-overlap range (all of them if
/// fewer are available).
[[nodiscard]] std::vector<std::size_t> evenly_spaced_indices(std::size_t signal_size,
                                                             std::size_t filter_size,
                                                             std::size_t count);

/// Monte Carlo over quantization noise. Trial r draws its noise from
/// RandomStream::keyed(cfg.seed, r), so the output is the same for any thread
/// count. Throws BoundsError for indices inside the transient (n < N) or past
/// the end of the signal.
[[nodiscard]] std::vector<EmpiricalDistribution> run_trials(const Signal& signal,
                                                            const FilterCoefficients& coeffs,
                                                            const TrialConfig& cfg,
                                                            const std::string& channel_id = {},
                                                            const std::string& epoch_id = {});

/// Largest |error(signal) - error(zeros)| over the first `trials` trials at
/// the given indices. Zero in exact arithmetic; in floating point it is
/// bounded by the rounding of signal + noise.
[[nodiscard]] double signal_independence_gap(const Signal& signal, const FilterCoefficients& coeffs,
                                             const TrialConfig& cfg,
                                             const std::vector<std::size_t>& indices,
                                             std::size_t trials);

/// Rounding allowance used by the self-check.
[[nodiscard]] double signal_independence_tolerance(const Signal& signal,
                                                   const FilterCoefficients& coeffs, double delta);

}  // namespace firuq::mcsim
