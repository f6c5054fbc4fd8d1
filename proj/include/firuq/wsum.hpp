#pragma once

// Exact distribution of Y = sum_i b_i X_i where the X_i are independent and
// uniform with common width delta:
//
//   f(y) = (-1)^(M+1) / (M! * prod_i(b_i delta))
//          * sum_{s in {-1,+1}^(M+1)} prod_i(s_i) * (y - mu - S(s))^M * H(y - mu - S(s)),
//   S(s) = sum_i s_i b_i delta / 2,
//
// with H the half-maximum Heaviside step. The CDF is the same sum with
// exponent M+1 and (M+1)! in place of M!.
//
// The 2^(M+1) terms cancel catastrophically, so evaluation works in units
// where max|b_i| delta == 1, keeps every shift S exactly in double-double, and
// accumulates the powered terms in double-double as well. Only the final
// normalization is done in plain double.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "firuq/double_double.hpp"
#include "firuq/types.hpp"

namespace firuq::wsum {

inline constexpr std::size_t kDefaultCoefficientCap = 25;
inline constexpr double kDefaultDominanceThreshold = 0.05;

/// Input noise model: X_i ~ U(mu_i - delta/2, mu_i + delta/2), independent.
struct UniformQuantization {
    UniformQuantization(double delta, std::vector<double> means = {});

    double delta;
    /// means[i] is the mean of the input sample weighted by tap b_i, i.e. of
    /// x[n - i] for the output at index n.
    std::vector<double> means;

    [[nodiscard]] double lower(std::size_t i) const { return means[i] - 0.5 * delta; }
    [[nodiscard]] double upper(std::size_t i) const { return means[i] + 0.5 * delta; }
};

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
};

/// Mean sum_i b_i mu_i and variance sum_i b_i^2 delta^2 / 12.
/// Throws InputShapeError when q.means.size() != coeffs.size().
[[nodiscard]] Moments moments(const FilterCoefficients& coeffs, const UniformQuantization& q);

/// 0 for t < 0, 1/2 for t == 0, 1 for t > 0.
[[nodiscard]] constexpr double heaviside(double t) {
    if (t < 0.0) return 0.0;
    if (t > 0.0) return 1.0;
    return 0.5;
}

struct SignTerm {
    DoubleDouble shift;  ///< S for this sign assignment, in units of scale()
    int sign = 1;        ///< product of the s_i
};

/// All 2^(M+1) (S, prod s_i) pairs for a set of nonzero coefficients, sorted
/// by increasing S.
class SignTermExpansion {
public:
    [[nodiscard]] const std::vector<SignTerm>& terms() const noexcept { return terms_; }
    [[nodiscard]] std::size_t size() const noexcept { return terms_.size(); }
    /// M: number of coefficients minus one.
    [[nodiscard]] std::size_t order() const noexcept { return scaled_.size() - 1; }
    /// max_i |b_i| * delta; shifts and scaled coefficients are in this unit.
    [[nodiscard]] double scale() const noexcept { return scale_; }
    /// S of term i in signal units.
    [[nodiscard]] double shift(std::size_t i) const { return terms_[i].shift.to_double() * scale_; }
    /// b_i * delta / scale(), in the caller's order.
    [[nodiscard]] std::span<const double> scaled_coefficients() const noexcept { return scaled_; }
    /// prod_i b_i delta in signal units (may under/overflow for long inputs;
    /// evaluation never uses it).
    [[nodiscard]] double b_tilde() const noexcept { return b_tilde_; }
    /// log(1 / (M! * |prod_i scaled_i|)): the normalization exponent.
    [[nodiscard]] double log_scale() const noexcept { return log_scale_; }
    /// (-1)^(M+1) * sign(b_tilde).
    [[nodiscard]] int sign_factor() const noexcept { return sign_factor_; }

    /// sum over terms with S < x of sign * (x - S)^power, plus half the tie
    /// terms; x is in scaled units. `magnitude`, when given, receives the sum
    /// of absolute term values (for cancellation diagnostics).
    [[nodiscard]] DoubleDouble truncated_power_sum(double x, unsigned power,
                                                   double* magnitude = nullptr) const;

private:
    friend SignTermExpansion expand_sign_terms(std::span<const double>, double, std::size_t);

    std::vector<SignTerm> terms_;
    std::vector<double> scaled_;
    double scale_ = 1.0;
    double b_tilde_ = 0.0;
    double log_scale_ = 0.0;
    int sign_factor_ = 1;
};

/// Throws DegenerateError on a zero coefficient or nonpositive delta, and
/// CombinatorialLimitError when coeffs.size() > cap.
[[nodiscard]] SignTermExpansion expand_sign_terms(std::span<const double> coeffs, double delta,
                                                  std::size_t cap = kDefaultCoefficientCap);

/// A density value together with what it took to get it.
struct EvalDiagnostic {
    double value = 0.0;      ///< returned (clamped) value
    double raw = 0.0;        ///< before clamping
    double magnitude = 0.0;  ///< same normalization applied to sum |term|
    bool clamped = false;

    /// Ratio of the largest possible term mass to the result; log10 of this is
    /// roughly the number of digits lost to cancellation.
    [[nodiscard]] double cancellation() const { return raw != 0.0 ? magnitude / std::abs(raw) : 0.0; }
};

/// Distribution of a weighted sum of independent uniforms. Immutable; all
/// evaluation members are safe to call concurrently.
class WeightedUniformSum {
public:
    /// `coeffs` may contain zero taps; they are dropped from the expansion.
    /// `truncated_from` records the original tap count when `coeffs` is a
    /// dominant subset of a longer filter.
    WeightedUniformSum(FilterCoefficients coeffs, double delta, double mu = 0.0,
                       std::size_t cap = kDefaultCoefficientCap,
                       std::optional<std::size_t> truncated_from = std::nullopt);

    [[nodiscard]] const FilterCoefficients& coefficients() const noexcept { return coeffs_; }
    [[nodiscard]] const SignTermExpansion& expansion() const noexcept { return expansion_; }
    [[nodiscard]] double delta() const noexcept { return delta_; }
    [[nodiscard]] double mean() const noexcept { return mu_; }
    [[nodiscard]] double variance() const noexcept { return variance_; }
    [[nodiscard]] double stddev() const;
    [[nodiscard]] std::optional<std::size_t> truncated_from() const noexcept { return truncated_from_; }
    /// Number of nonzero taps that enter the expansion.
    [[nodiscard]] std::size_t included_count() const noexcept { return expansion_.order() + 1; }

    /// Closed support [mu - W/2, mu + W/2], W = delta * sum |b_i|.
    [[nodiscard]] std::pair<double, double> support() const noexcept { return {lo_, hi_}; }

    [[nodiscard]] double pdf(double y) const { return pdf_diagnostic(y).value; }
    [[nodiscard]] double cdf(double y) const { return cdf_diagnostic(y).value; }
    [[nodiscard]] EvalDiagnostic pdf_diagnostic(double y) const;
    [[nodiscard]] EvalDiagnostic cdf_diagnostic(double y) const;

    /// Excess kurtosis from the cumulants: -6/5 * sum b^4 / (sum b^2)^2.
    [[nodiscard]] double excess_kurtosis() const;

private:
    FilterCoefficients coeffs_;
    double delta_;
    double mu_;
    std::optional<std::size_t> truncated_from_;
    SignTermExpansion expansion_;
    double variance_ = 0.0;
    double lo_ = 0.0;
    double hi_ = 0.0;
    double norm_ = 1.0;  // exp(log_scale)
};

[[nodiscard]] inline double eval_pdf(const WeightedUniformSum& d, double y) { return d.pdf(y); }
[[nodiscard]] inline double eval_cdf(const WeightedUniformSum& d, double y) { return d.cdf(y); }
[[nodiscard]] inline std::pair<double, double> support(const WeightedUniformSum& d) { return d.support(); }

/// P(|Y - mu| <= sigma/2) from the analytic CDF.
/// Throws DegenerateError for zero variance.
[[nodiscard]] double half_sigma_mass(const WeightedUniformSum& dist);

/// n draws of sum_i b_i U_i + mu, U_i uniform on (-delta/2, delta/2).
[[nodiscard]] std::vector<double> sample(const WeightedUniformSum& dist, std::size_t n,
                                         std::uint64_t seed);

struct DominantSelection {
    std::vector<std::size_t> indices;
    FilterCoefficients subset;
};

/// Taps with |b_i| >= tau * max_j |b_j| (zero taps never qualify), in
/// original order. tau must lie in (0, 1].
[[nodiscard]] DominantSelection select_dominant(const FilterCoefficients& coeffs,
                                                double tau = kDefaultDominanceThreshold);

/// The truncated approximation: distribution of the dominant subset only,
/// with its own (smaller) variance and support.
[[nodiscard]] WeightedUniformSum dominant_distribution(const FilterCoefficients& coeffs,
                                                       double delta,
                                                       double tau = kDefaultDominanceThreshold,
                                                       double mu = 0.0,
                                                       std::size_t cap = kDefaultCoefficientCap);

}  // namespace firuq::wsum
