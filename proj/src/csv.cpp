#include <sstream>

#include "firuq/error.hpp"
#include "firuq/ingest.hpp"
#include "firuq/io.hpp"

namespace firuq::ingest {

namespace {

// One RFC 4180 record (no embedded line breaks). Quoted fields may contain
// commas and doubled quotes.
std::vector<std::string> split_record(std::string_view line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    bool was_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"' && cur.empty() && !was_quoted) {
            quoted = was_quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
            was_quoted = false;
        } else {
            cur.push_back(c);
        }
    }
    if (quoted) throw ParseError("unterminated quoted field", line_no, fields.size() + 1);
    fields.push_back(std::move(cur));
    return fields;
}

bool is_number(const std::string& s) {
    try {
        (void)io::parse_double(s);
        return true;
    } catch (const ParseError&) {
        return false;
    }
}

std::string quote_if_needed(const std::string& s) {
    if (s.find_first_of(",\"") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace

std::vector<ChannelData> parse_csv(std::string_view text, double sample_rate) {
    if (!(sample_rate > 0.0)) throw Error(ErrorKind::usage, "CSV sample rate must be positive");
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        ++line_no;
        start = end + 1;
        if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
        rows.push_back(split_record(line, line_no));
        line_numbers.push_back(line_no);
    }
    if (rows.empty()) return {};

    const std::size_t width = rows.front().size();
    std::vector<std::string> labels;
    std::size_t first_data = 0;
    bool header = false;
    for (const auto& cell : rows.front()) header = header || !is_number(cell);
    if (header) {
        labels = rows.front();
        first_data = 1;
    } else {
        for (std::size_t c = 0; c < width; ++c) labels.push_back("ch" + std::to_string(c));
    }
    if (first_data == rows.size()) return {};

    std::vector<ChannelData> channels(width);
    for (std::size_t c = 0; c < width; ++c) {
        channels[c].label = labels[c];
        channels[c].sample_rate = sample_rate;
        channels[c].samples.reserve(rows.size() - first_data);
    }
    for (std::size_t r = first_data; r < rows.size(); ++r) {
        if (rows[r].size() != width)
            throw ParseError("expected " + std::to_string(width) + " columns, found " +
                                 std::to_string(rows[r].size()),
                             line_numbers[r], std::min(rows[r].size(), width) + 1);
        for (std::size_t c = 0; c < width; ++c)
            channels[c].samples.push_back(io::parse_double(rows[r][c], line_numbers[r], c + 1));
    }
    return channels;
}

std::string channels_csv(std::span<const ChannelData> channels) {
    std::ostringstream os;
    for (std::size_t c = 0; c < channels.size(); ++c)
        os << (c ? "," : "") << quote_if_needed(channels[c].label);
    os << '\n';
    if (channels.empty()) return os.str();
    const std::size_t n = channels.front().samples.size();
    for (const auto& ch : channels)
        if (ch.samples.size() != n) throw InputShapeError("channels differ in length");
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < channels.size(); ++c)
            os << (c ? "," : "") << io::format_double(channels[c].samples[i]);
        os << '\n';
    }
    return os.str();
}

}  // namespace firuq::ingest
