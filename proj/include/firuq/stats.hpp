#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace firuq::wsum {
class WeightedUniformSum;
}

namespace firuq::stats {

inline constexpr std::size_t kMinNormalitySamples = 20;

/// Central moments about the sample mean (divisor n).
struct CentralMoments {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;
    double m3 = 0.0;
    double m4 = 0.0;
};

[[nodiscard]] CentralMoments central_moments(std::span<const double> x);

/// g1 = m3 / m2^1.5 (the estimator the omnibus test is built on).
[[nodiscard]] double moment_skewness(std::span<const double> x);
/// g2 = m4 / m2^2 - 3.
[[nodiscard]] double moment_excess_kurtosis(std::span<const double> x);
/// Bias-adjusted G1 = g1 sqrt(n(n-1)) / (n-2). Needs n >= 3.
[[nodiscard]] double sample_skewness(std::span<const double> x);
/// Bias-adjusted G2 = (n-1)((n+1) g2 + 6) / ((n-2)(n-3)). Needs n >= 4.
[[nodiscard]] double sample_kurtosis_excess(std::span<const double> x);
/// Unbiased variance (divisor n - 1).
[[nodiscard]] double sample_variance(std::span<const double> x);

struct NormalityTest {
    double k2 = 0.0;
    double p_value = 1.0;
    double z_skewness = 0.0;
    double z_kurtosis = 0.0;
    bool below_recommended_n = false;
};

/// D'Agostino-Pearson omnibus K^2 = Z(g1)^2 + Z(b2)^2, p from chi-square(2).
///
/// Z(g1) is D'Agostino's Johnson-SU transform of the sample skewness and Z(b2)
/// the Anscombe-Glynn transform of the sample kurtosis. Throws SampleSizeError
/// when x.size() < min_n (and always below 8, where the skewness transform is
/// undefined), DegenerateError for zero variance.
[[nodiscard]] NormalityTest dagostino_pearson(std::span<const double> x,
                                              std::size_t min_n = kMinNormalitySamples);

/// Normal distribution with given moments. cdf uses std::erfc.
class GaussianReference {
public:
    GaussianReference(double mean, double variance);
    [[nodiscard]] double mean() const noexcept { return mean_; }
    [[nodiscard]] double variance() const noexcept { return variance_; }
    [[nodiscard]] double stddev() const noexcept { return sigma_; }
    [[nodiscard]] double pdf(double x) const;
    [[nodiscard]] double cdf(double x) const;

private:
    double mean_;
    double variance_;
    double sigma_;
};

[[nodiscard]] inline GaussianReference gaussian_reference(double mean, double variance) {
    return {mean, variance};
}

/// 2 Phi(1/2) - 1 = 0.38292...
[[nodiscard]] double gaussian_half_sigma_mass();

/// Fraction of samples in [mean - s/2, mean + s/2], s the n-1 standard deviation.
[[nodiscard]] double fraction_within_half_sigma(std::span<const double> x);

/// Equal-width histogram bins.
struct BinSpec {
    std::vector<double> edges;  ///< size() + 1 edges, increasing
    [[nodiscard]] std::size_t size() const { return edges.empty() ? 0 : edges.size() - 1; }
    [[nodiscard]] double width() const { return edges[1] - edges[0]; }
    [[nodiscard]] double center(std::size_t i) const { return 0.5 * (edges[i] + edges[i + 1]); }
};

/// ceil(sqrt(n)) clamped to [16, 128].
[[nodiscard]] std::size_t default_bin_count(std::size_t n);

/// `count` equal-width bins over the union of the sample range and [ref_lo, ref_hi].
[[nodiscard]] BinSpec make_bins(std::span<const double> x, double ref_lo, double ref_hi,
                                std::size_t count);

/// Sample mass per bin (last bin closed on the right); sums to 1.
[[nodiscard]] std::vector<double> histogram_probabilities(std::span<const double> x,
                                                          const BinSpec& bins);

using CdfFunction = std::function<double(double)>;

/// Reference mass per bin from CDF differences. The outermost bins also take
/// whatever mass lies beyond the edges, so the result always sums to 1.
[[nodiscard]] std::vector<double> reference_probabilities(const CdfFunction& cdf,
                                                          const BinSpec& bins);

/// sqrt of the Jensen-Shannon divergence (natural log) between two mass
/// vectors of equal length; in [0, sqrt(ln 2)]. Exactly symmetric.
[[nodiscard]] double js_distance(std::span<const double> p, std::span<const double> q);

/// Binned distance between a sample and a reference distribution.
[[nodiscard]] double js_distance(std::span<const double> x, const CdfFunction& reference_cdf,
                                 const BinSpec& bins);

struct AnalysisReport {
    std::size_t n = 0;
    double mean = 0.0;
    double variance = 0.0;  ///< n - 1 divisor
    double k2_stat = 0.0;
    double p_value = 1.0;
    bool rejected = false;  ///< p_value <= alpha
    double excess_kurtosis = 0.0;  ///< bias-adjusted G2
    double skewness = 0.0;         ///< bias-adjusted G1
    double js_to_gaussian = 0.0;
    double js_to_wsum = 0.0;
    double half_sigma_empirical = 0.0;
    double half_sigma_gaussian = 0.0;
    double half_sigma_wsum = 0.0;
    BinSpec bins;
};

struct AnalysisOptions {
    double alpha = 0.05;
    std::size_t min_normality_samples = kMinNormalitySamples;
    std::optional<std::size_t> bin_count;       ///< default_bin_count(n) when unset
    std::optional<double> half_sigma_wsum;      ///< computed from the reference when unset
};

/// Full per-distribution comparison against the weighted-sum reference and a
/// Gaussian with the sample's own mean and variance.
[[nodiscard]] AnalysisReport analyze(std::span<const double> x,
                                     const wsum::WeightedUniformSum& reference,
                                     const AnalysisOptions& options = {});

struct Aggregate {
    std::size_t count = 0;
    double rejection_rate = 0.0;
    double mean_k2 = 0.0;
    double mean_excess_kurtosis = 0.0;
    double mean_skewness = 0.0;
    double mean_js_to_gaussian = 0.0;
    double mean_js_to_wsum = 0.0;
    double wsum_closer_fraction = 0.0;  ///< share with js_to_wsum < js_to_gaussian
    double mean_half_sigma_empirical = 0.0;
    double half_sigma_gaussian = 0.0;
    double mean_half_sigma_wsum = 0.0;
};

[[nodiscard]] Aggregate aggregate(std::span<const AnalysisReport> reports);

}  // namespace firuq::stats
