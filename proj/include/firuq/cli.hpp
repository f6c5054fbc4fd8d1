#pragma once

// The firuq command-line pipeline. Each subcommand is also callable as a
// function so tests can drive it in-process.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "firuq/types.hpp"
#include "firuq/wsum.hpp"

namespace firuq::cli {

/// The band used throughout: 7-35 Hz at 160 Hz with 2 / 8.75 Hz transitions.
[[nodiscard]] BandpassSpec default_bandpass();

struct DesignOptions {
    BandpassSpec spec = default_bandpass();
    std::filesystem::path out;
    std::optional<std::filesystem::path> response;
    std::size_t response_points = 513;
};

struct PdfOptions {
    std::filesystem::path coeffs;
    double delta = 1.0;
    double tau = wsum::kDefaultDominanceThreshold;
    double mean = 0.0;
    std::size_t points = 1001;
    std::size_t cap = wsum::kDefaultCoefficientCap;
    std::filesystem::path out;  ///< CSV; the JSON sidecar goes next to it
};

struct PdfResult {
    std::size_t full_count = 0;
    std::size_t selected_count = 0;
    double trapezoid_mass = 0.0;
};

enum class SourceKind { synthetic, edf, csv };

struct SimulateOptions {
    // filter: a coefficient file, or designed from `spec` when unset
    std::optional<std::filesystem::path> coeffs;
    BandpassSpec spec = default_bandpass();
    /// Taps to use instead of reading `coeffs` / designing from `spec` (set
    /// when replaying a manifest); provenance is still recorded from the above.
    std::vector<double> coefficient_values;

    SourceKind source = SourceKind::synthetic;
    std::optional<std::filesystem::path> input;  ///< EDF or CSV path
    std::vector<std::string> channels;           ///< empty: all channels
    double csv_rate = 0.0;
    double synthetic_frequency = 20.0;
    double synthetic_amplitude = 50.0;
    std::size_t synthetic_length = 0;  ///< 0: just long enough for the indices

    std::size_t epoch_start = 0;
    std::size_t epoch_length = 0;  ///< 0: to the end of the channel
    std::size_t epoch_count = 1;

    double delta = 1.0;
    std::size_t repetitions = 5000;
    std::uint64_t seed = 0;
    std::vector<std::size_t> indices;  ///< explicit indices within each epoch
    std::size_t index_count = 100;     ///< evenly spaced when `indices` is empty
    std::size_t threads = 1;
    std::optional<std::filesystem::path> config_file;

    std::filesystem::path out_dir;
};

struct AnalyzeOptions {
    std::filesystem::path run_dir;
    std::optional<std::filesystem::path> coeffs;  ///< defaults to the manifest's taps
    double tau = wsum::kDefaultDominanceThreshold;
    std::size_t cap = wsum::kDefaultCoefficientCap;
    double alpha = 0.05;
    std::size_t bins = 0;  ///< 0: ceil(sqrt(n)) clamped to [16, 128]
    std::size_t threads = 1;
    bool histograms = true;
    std::optional<std::filesystem::path> out_dir;  ///< default run_dir/analysis
};

void run_design(const DesignOptions& opt);
PdfResult run_pdf(const PdfOptions& opt);
void run_simulate(const SimulateOptions& opt);
/// Loads simulate parameters from a manifest written by run_simulate.
[[nodiscard]] SimulateOptions simulate_options_from_manifest(const std::filesystem::path& manifest);
void run_analyze(const AnalyzeOptions& opt, std::ostream& warnings);
/// Human-readable aggregate block of a report.json.
void print_report(const std::filesystem::path& report, std::ostream& out);

/// Full command line. Exit codes: 0 success, 1 usage/config, 2 data,
/// 3 numerical limit.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace firuq::cli
