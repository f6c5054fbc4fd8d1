#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>

#include "firuq/error.hpp"
#include "firuq/ingest.hpp"
#include "firuq/io.hpp"

namespace firuq::ingest {

namespace {

constexpr std::size_t kFixedHeader = 256;
constexpr std::size_t kPerSignalHeader = 256;

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(' ');
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(' ');
    return s.substr(first, last - first + 1);
}

// Sequential reader over the fixed-width ASCII header.
class HeaderCursor {
public:
    explicit HeaderCursor(std::string_view bytes) : bytes_(bytes) {}

    std::size_t offset() const { return pos_; }

    std::string_view raw(std::size_t width, const char* field) {
        if (pos_ + width > bytes_.size())
            throw ParseError(std::string("file truncated inside header field '") + field + "'", pos_);
        const auto s = bytes_.substr(pos_, width);
        for (unsigned char c : s)
            if (c < 32 || c > 126)
                throw ParseError(std::string("non-ASCII byte in header field '") + field + "'", pos_);
        pos_ += width;
        return s;
    }

    std::string text(std::size_t width, const char* field) { return std::string(trim(raw(width, field))); }

    long integer(std::size_t width, const char* field) {
        const std::size_t at = pos_;
        auto s = trim(raw(width, field));
        if (!s.empty() && s.front() == '+') s.remove_prefix(1);
        long v = 0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size())
            throw ParseError(std::string("malformed integer in header field '") + field + "'", at);
        return v;
    }

    double real(std::size_t width, const char* field) {
        const std::size_t at = pos_;
        auto s = trim(raw(width, field));
        if (!s.empty() && s.front() == '+') s.remove_prefix(1);
        double v = 0.0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v))
            throw ParseError(std::string("malformed number in header field '") + field + "'", at);
        return v;
    }

private:
    std::string_view bytes_;
    std::size_t pos_ = 0;
};

std::size_t checked_mul(std::size_t a, std::size_t b, std::size_t at) {
    if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a)
        throw ParseError("data size overflows", at);
    return a * b;
}

}  // namespace

double digital_to_physical(long digital, const EdfSignalHeader& s) {
    return (static_cast<double>(digital) - static_cast<double>(s.digital_min)) *
               (s.physical_max - s.physical_min) /
               (static_cast<double>(s.digital_max) - static_cast<double>(s.digital_min)) +
           s.physical_min;
}

EdfFile parse_edf(std::string_view bytes) {
    HeaderCursor cur(bytes);
    EdfFile file;
    EdfHeader& h = file.header;

    h.version = cur.text(8, "version");
    if (h.version != "0") throw ParseError("not an EDF file (version field must be \"0\")", 0);
    h.patient = cur.text(80, "patient");
    h.recording = cur.text(80, "recording");
    h.start_date = cur.text(8, "startdate");
    h.start_time = cur.text(8, "starttime");
    const std::size_t header_bytes_at = cur.offset();
    const long header_bytes = cur.integer(8, "header bytes");
    h.reserved = cur.text(44, "reserved");
    if (h.reserved.rfind("EDF+D", 0) == 0)
        throw ParseError("discontinuous EDF+D files are not supported", header_bytes_at + 8);
    const std::size_t records_at = cur.offset();
    const long records = cur.integer(8, "number of data records");
    const std::size_t duration_at = cur.offset();
    h.record_duration = cur.real(8, "record duration");
    const std::size_t ns_at = cur.offset();
    const long ns = cur.integer(4, "number of signals");

    if (ns <= 0) throw ParseError("number of signals must be positive", ns_at);
    if (!(h.record_duration > 0.0)) throw ParseError("record duration must be positive", duration_at);
    h.signal_count = static_cast<std::size_t>(ns);
    if (header_bytes < 0 || static_cast<std::size_t>(header_bytes) !=
                                kFixedHeader + kPerSignalHeader * h.signal_count)
        throw ParseError("header byte count disagrees with the number of signals", header_bytes_at);
    h.header_bytes = static_cast<std::size_t>(header_bytes);
    if (bytes.size() < h.header_bytes) throw ParseError("file truncated inside signal headers", bytes.size());

    // Per-signal fields are stored field-major: all labels, then all transducers...
    h.signals.resize(h.signal_count);
    for (auto& s : h.signals) s.label = cur.text(16, "label");
    for (auto& s : h.signals) s.transducer = cur.text(80, "transducer");
    for (auto& s : h.signals) s.physical_dimension = cur.text(8, "physical dimension");
    const std::size_t pmin_at = cur.offset();
    for (auto& s : h.signals) s.physical_min = cur.real(8, "physical minimum");
    for (auto& s : h.signals) s.physical_max = cur.real(8, "physical maximum");
    const std::size_t dmin_at = cur.offset();
    for (auto& s : h.signals) s.digital_min = cur.integer(8, "digital minimum");
    const std::size_t dmax_at = cur.offset();
    for (auto& s : h.signals) s.digital_max = cur.integer(8, "digital maximum");
    for (auto& s : h.signals) s.prefiltering = cur.text(80, "prefiltering");
    const std::size_t spr_at = cur.offset();
    for (std::size_t i = 0; i < h.signal_count; ++i) {
        const long spr = cur.integer(8, "samples per record");
        if (spr <= 0) throw ParseError("samples per record must be positive", spr_at + 8 * i);
        h.signals[i].samples_per_record = static_cast<std::size_t>(spr);
    }
    for (std::size_t i = 0; i < h.signal_count; ++i) (void)cur.raw(32, "signal reserved");

    for (std::size_t i = 0; i < h.signal_count; ++i) {
        const auto& s = h.signals[i];
        if (s.is_annotation()) continue;
        if (s.digital_max <= s.digital_min)
            throw ParseError("digital maximum must exceed digital minimum for '" + s.label + "'", dmax_at + 8 * i);
        if (s.digital_min < -32768 || s.digital_max > 32767)
            throw ParseError("digital range exceeds 16 bits for '" + s.label + "'", dmin_at + 8 * i);
        if (s.physical_max == s.physical_min)
            throw ParseError("physical maximum equals physical minimum for '" + s.label + "'", pmin_at + 8 * i);
    }

    std::size_t record_samples = 0;
    for (const auto& s : h.signals) {
        record_samples += s.samples_per_record;
        if (record_samples > std::numeric_limits<std::size_t>::max() / 4)
            throw ParseError("record size overflows", spr_at);
    }
    const std::size_t record_bytes = 2 * record_samples;
    const std::size_t data_bytes = bytes.size() - h.header_bytes;
    if (records == -1) {
        // recording was not closed properly; infer from the file size
        if (data_bytes % record_bytes != 0)
            throw ParseError("data section is not a whole number of records", h.header_bytes);
        h.record_count = data_bytes / record_bytes;
    } else if (records < 0) {
        throw ParseError("number of data records must be non-negative or -1", records_at);
    } else {
        h.record_count = static_cast<std::size_t>(records);
        const std::size_t expected = checked_mul(h.record_count, record_bytes, records_at);
        if (data_bytes < expected)
            throw ParseError("file truncated: header promises " + std::to_string(h.record_count) +
                                 " records", bytes.size());
        if (data_bytes > expected)
            throw ParseError("record count mismatch: " + std::to_string(data_bytes - expected) +
                                 " bytes past the last record", h.header_bytes + expected);
    }

    std::vector<std::size_t> channel_of(h.signal_count, SIZE_MAX);
    for (std::size_t i = 0; i < h.signal_count; ++i) {
        const auto& s = h.signals[i];
        if (s.is_annotation()) continue;
        channel_of[i] = file.channels.size();
        ChannelData ch;
        ch.label = s.label;
        ch.physical_dimension = s.physical_dimension;
        ch.sample_rate = static_cast<double>(s.samples_per_record) / h.record_duration;
        ch.samples.reserve(checked_mul(s.samples_per_record, h.record_count, spr_at));
        file.channels.push_back(std::move(ch));
    }

    const auto* data = reinterpret_cast<const unsigned char*>(bytes.data()) + h.header_bytes;
    std::size_t pos = 0;
    for (std::size_t r = 0; r < h.record_count; ++r) {
        for (std::size_t i = 0; i < h.signal_count; ++i) {
            const auto& s = h.signals[i];
            if (channel_of[i] == SIZE_MAX) {
                pos += 2 * s.samples_per_record;
                continue;
            }
            auto& ch = file.channels[channel_of[i]];
            for (std::size_t k = 0; k < s.samples_per_record; ++k, pos += 2) {
                long dig = static_cast<std::int16_t>(static_cast<std::uint16_t>(data[pos] | (data[pos + 1] << 8)));
                if (dig < s.digital_min || dig > s.digital_max) {
                    dig = dig < s.digital_min ? s.digital_min : s.digital_max;
                    ++ch.clamped_samples;
                }
                ch.samples.push_back(digital_to_physical(dig, s));
            }
        }
    }
    return file;
}

EdfFile read_edf(const std::filesystem::path& path) {
    const std::string bytes = io::read_file(path);
    try {
        return parse_edf(bytes);
    } catch (const ParseError& e) {
        throw Error(ErrorKind::data, path.string() + ": " + e.what());
    }
}

Signal epoch(const ChannelData& channel, std::size_t start, std::size_t length) {
    if (start > channel.samples.size() || length > channel.samples.size() - start)
        throw BoundsError("epoch [" + std::to_string(start) + ", " + std::to_string(start + length) +
                          ") exceeds channel '" + channel.label + "' of " +
                          std::to_string(channel.samples.size()) + " samples");
    const auto first = channel.samples.begin() + static_cast<std::ptrdiff_t>(start);
    return Signal(std::vector<double>(first, first + static_cast<std::ptrdiff_t>(length)),
                  channel.sample_rate);
}

}  // namespace firuq::ingest
