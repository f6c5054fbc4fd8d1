#include "firuq/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <charconv>
#include <cstdio>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "firuq/error.hpp"
#include "firuq/wsum.hpp"

namespace firuq::io {

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = text.find('\n', start);
        if (end == std::string_view::npos) {
            if (start < text.size()) lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, end - start));
        start = end + 1;
    }
    return lines;
}

bool parses_as_number(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size() && !s.empty();
}

}  // namespace

double parse_double(std::string_view field, std::size_t line, std::size_t column) {
    auto s = trim(field);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v))
        throw ParseError("not a number: '" + std::string(trim(field)) + "'", line, column ? column : 1);
    return v;
}

CoefficientFormat format_for_path(const std::filesystem::path& path) {
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".csv" ? CoefficientFormat::csv : CoefficientFormat::text;
}

void write_coefficients(std::ostream& out, std::span<const double> coeffs, CoefficientFormat format) {
    if (format == CoefficientFormat::csv) {
        out << "index,coefficient\n";
        for (std::size_t i = 0; i < coeffs.size(); ++i) out << i << ',' << format_double(coeffs[i]) << '\n';
    } else {
        for (double b : coeffs) out << format_double(b) << '\n';
    }
}

std::vector<double> parse_coefficients(std::string_view text) {
    std::vector<double> out;
    const auto lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto line = trim(lines[i]);
        if (line.empty() || line.front() == '#') continue;
        const auto comma = line.find(',');
        if (comma == std::string_view::npos) {
            out.push_back(parse_double(line, i + 1, 1));
            continue;
        }
        // index,coefficient rows; a non-numeric first row is the header
        const auto value = line.substr(comma + 1);
        if (out.empty() && !parses_as_number(value)) continue;
        if (value.find(',') != std::string_view::npos)
            throw ParseError("expected two columns", i + 1, 3);
        out.push_back(parse_double(value, i + 1, 2));
    }
    return out;
}

FilterCoefficients read_coefficients(const std::filesystem::path& path) {
    auto values = parse_coefficients(read_file(path));
    if (values.empty()) throw Error(ErrorKind::data, path.string() + ": no coefficients");
    return FilterCoefficients(std::move(values));
}

void write_coefficients(const std::filesystem::path& path, std::span<const double> coeffs) {
    std::ostringstream os;
    write_coefficients(os, coeffs, format_for_path(path));
    write_file(path, os.str());
}

std::string coefficient_hash(std::span<const double> coeffs) {
    std::ostringstream os;
    write_coefficients(os, coeffs, CoefficientFormat::text);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : os.str()) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::data, "cannot open " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::data, "cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorKind::data, "write failed for " + path.string());
}

DistributionTable tabulate(const wsum::WeightedUniformSum& dist, std::size_t points) {
    if (points < 2) throw Error(ErrorKind::usage, "need at least two grid points");
    const auto [lo, hi] = dist.support();
    DistributionTable t;
    t.y.resize(points);
    t.pdf.resize(points);
    t.cdf.resize(points);
    for (std::size_t i = 0; i < points; ++i) {
        const double y = i + 1 == points ? hi
                                         : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
        t.y[i] = y;
        t.pdf[i] = dist.pdf(y);
        t.cdf[i] = dist.cdf(y);
    }
    return t;
}

std::string distribution_csv(const DistributionTable& table) {
    std::ostringstream os;
    os << "y,pdf,cdf\n";
    for (std::size_t i = 0; i < table.y.size(); ++i)
        os << format_double(table.y[i]) << ',' << format_double(table.pdf[i]) << ','
           << format_double(table.cdf[i]) << '\n';
    return os.str();
}

double trapezoid_mass(const DistributionTable& table) {
    double mass = 0.0;
    for (std::size_t i = 1; i < table.y.size(); ++i)
        mass += 0.5 * (table.pdf[i] + table.pdf[i - 1]) * (table.y[i] - table.y[i - 1]);
    return mass;
}

}  // namespace firuq::io
