#pragma once

// Text encodings shared by the CLI: shortest round-trip numbers, coefficient
// files and tabulated distributions.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "firuq/types.hpp"

namespace firuq::wsum {
class WeightedUniformSum;
}

namespace firuq::io {

/// Shortest decimal string that parses back to exactly `v`.
[[nodiscard]] std::string format_double(double v);

/// Locale-independent parse of a whole field (surrounding blanks allowed).
/// Throws ParseError with the given line/column on failure.
[[nodiscard]] double parse_double(std::string_view field, std::size_t line = 0, std::size_t column = 0);

enum class CoefficientFormat { text, csv };

/// csv for a ".csv" extension, text otherwise.
[[nodiscard]] CoefficientFormat format_for_path(const std::filesystem::path& path);

/// text: one value per line. csv: "index,coefficient" header then one row per tap.
void write_coefficients(std::ostream& out, std::span<const double> coeffs, CoefficientFormat format);

/// Accepts either layout; blank lines and '#' comments are ignored in text files.
[[nodiscard]] std::vector<double> parse_coefficients(std::string_view text);

[[nodiscard]] FilterCoefficients read_coefficients(const std::filesystem::path& path);
void write_coefficients(const std::filesystem::path& path, std::span<const double> coeffs);

/// 64-bit FNV-1a over the text encoding, as 16 hex digits.
[[nodiscard]] std::string coefficient_hash(std::span<const double> coeffs);

[[nodiscard]] std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

struct DistributionTable {
    std::vector<double> y;
    std::vector<double> pdf;
    std::vector<double> cdf;
};

/// `points` evenly spaced abscissae spanning the closed support.
[[nodiscard]] DistributionTable tabulate(const wsum::WeightedUniformSum& dist, std::size_t points);

/// "y,pdf,cdf" CSV.
[[nodiscard]] std::string distribution_csv(const DistributionTable& table);

/// Trapezoid integral of the pdf column.
[[nodiscard]] double trapezoid_mass(const DistributionTable& table);

}  // namespace firuq::io
