#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "firuq/types.hpp"

namespace firuq::ingest {

struct EdfSignalHeader {
    std::string label;
    std::string transducer;
    std::string physical_dimension;
    double physical_min = 0.0;
    double physical_max = 0.0;
    long digital_min = 0;
    long digital_max = 0;
    std::string prefiltering;
    std::size_t samples_per_record = 0;

    [[nodiscard]] bool is_annotation() const { return label == "EDF Annotations"; }
};

struct EdfHeader {
    std::string version;
    std::string patient;
    std::string recording;
    std::string start_date;
    std::string start_time;
    std::size_t header_bytes = 0;
    std::string reserved;  ///< "EDF+C" / "EDF+D" for EDF+, blank for plain EDF
    std::size_t record_count = 0;
    double record_duration = 0.0;  ///< seconds
    std::size_t signal_count = 0;
    std::vector<EdfSignalHeader> signals;
};

struct ChannelData {
    std::string label;
    std::vector<double> samples;  ///< physical units
    double sample_rate = 0.0;     ///< Hz
    std::string physical_dimension;
    /// Digital values outside [digital_min, digital_max] that were clamped.
    std::size_t clamped_samples = 0;
};

struct EdfFile {
    EdfHeader header;
    std::vector<ChannelData> channels;  ///< annotation signals are skipped
};

/// Parses continuous EDF / EDF+C. Every failure is a ParseError carrying the
/// byte offset of the offending field.
[[nodiscard]] EdfFile parse_edf(std::string_view bytes);
[[nodiscard]] EdfFile read_edf(const std::filesystem::path& path);

/// (dig - dmin) (pmax - pmin) / (dmax - dmin) + pmin
[[nodiscard]] double digital_to_physical(long digital, const EdfSignalHeader& s);

/// One channel per column. A first row with any non-numeric cell is taken as
/// column labels; otherwise channels are named ch0, ch1, ...
[[nodiscard]] std::vector<ChannelData> parse_csv(std::string_view text, double sample_rate);

/// Column-per-channel CSV with a label row, values in shortest round-trip form.
/// Channels must have equal length.
[[nodiscard]] std::string channels_csv(std::span<const ChannelData> channels);

/// Copy of samples [start, start + length). Throws BoundsError past the end.
[[nodiscard]] Signal epoch(const ChannelData& channel, std::size_t start, std::size_t length);

}  // namespace firuq::ingest
