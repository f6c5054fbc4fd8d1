#include "firuq/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "firuq/error.hpp"
#include "firuq/wsum.hpp"

namespace firuq::stats {

CentralMoments central_moments(std::span<const double> x) {
    CentralMoments m;
    m.n = x.size();
    if (x.empty()) return m;
    double sum = 0.0;
    for (double v : x) sum += v;
    m.mean = sum / static_cast<double>(m.n);
    for (double v : x) {
        const double d = v - m.mean;
        const double d2 = d * d;
        m.m2 += d2;
        m.m3 += d2 * d;
        m.m4 += d2 * d2;
    }
    const double n = static_cast<double>(m.n);
    m.m2 /= n;
    m.m3 /= n;
    m.m4 /= n;
    return m;
}

namespace {

CentralMoments checked_moments(std::span<const double> x, std::size_t min_n, const char* what) {
    if (x.size() < min_n)
        throw SampleSizeError(std::string(what) + " needs at least " + std::to_string(min_n) +
                              " samples, got " + std::to_string(x.size()));
    const auto m = central_moments(x);
    if (!(m.m2 > 0.0)) throw DegenerateError(std::string(what) + " of a zero-variance sample");
    return m;
}

}  // namespace

double moment_skewness(std::span<const double> x) {
    const auto m = checked_moments(x, 2, "skewness");
    return m.m3 / std::pow(m.m2, 1.5);
}

double moment_excess_kurtosis(std::span<const double> x) {
    const auto m = checked_moments(x, 2, "kurtosis");
    return m.m4 / (m.m2 * m.m2) - 3.0;
}

double sample_skewness(std::span<const double> x) {
    const auto m = checked_moments(x, 3, "skewness");
    const double n = static_cast<double>(m.n);
    return m.m3 / std::pow(m.m2, 1.5) * std::sqrt(n * (n - 1.0)) / (n - 2.0);
}

double sample_kurtosis_excess(std::span<const double> x) {
    const auto m = checked_moments(x, 4, "kurtosis");
    const double n = static_cast<double>(m.n);
    const double g2 = m.m4 / (m.m2 * m.m2) - 3.0;
    return (n - 1.0) * ((n + 1.0) * g2 + 6.0) / ((n - 2.0) * (n - 3.0));
}

double sample_variance(std::span<const double> x) {
    if (x.size() < 2) throw SampleSizeError("variance needs at least 2 samples");
    const auto m = central_moments(x);
    const double n = static_cast<double>(m.n);
    return m.m2 * n / (n - 1.0);
}

NormalityTest dagostino_pearson(std::span<const double> x, std::size_t min_n) {
    const auto m = checked_moments(x, std::max<std::size_t>(min_n, 8), "D'Agostino-Pearson test");
    const double n = static_cast<double>(m.n);
    NormalityTest t;
    t.below_recommended_n = m.n < kMinNormalitySamples;

    // skewness: D'Agostino (1970)
    const double g1 = m.m3 / std::pow(m.m2, 1.5);
    const double y = g1 * std::sqrt((n + 1.0) * (n + 3.0) / (6.0 * (n - 2.0)));
    const double beta2 = 3.0 * (n * n + 27.0 * n - 70.0) * (n + 1.0) * (n + 3.0) /
                         ((n - 2.0) * (n + 5.0) * (n + 7.0) * (n + 9.0));
    const double w2 = -1.0 + std::sqrt(2.0 * (beta2 - 1.0));
    const double delta = 1.0 / std::sqrt(0.5 * std::log(w2));
    const double alpha = std::sqrt(2.0 / (w2 - 1.0));
    t.z_skewness = delta * std::asinh(y / alpha);

    // kurtosis: Anscombe & Glynn (1983)
    const double b2 = m.m4 / (m.m2 * m.m2);
    const double expected = 3.0 * (n - 1.0) / (n + 1.0);
    const double var_b2 =
        24.0 * n * (n - 2.0) * (n - 3.0) / ((n + 1.0) * (n + 1.0) * (n + 3.0) * (n + 5.0));
    const double xk = (b2 - expected) / std::sqrt(var_b2);
    const double sqrt_beta1 = 6.0 * (n * n - 5.0 * n + 2.0) / ((n + 7.0) * (n + 9.0)) *
                              std::sqrt(6.0 * (n + 3.0) * (n + 5.0) / (n * (n - 2.0) * (n - 3.0)));
    const double a = 6.0 + 8.0 / sqrt_beta1 *
                               (2.0 / sqrt_beta1 + std::sqrt(1.0 + 4.0 / (sqrt_beta1 * sqrt_beta1)));
    const double term1 = 1.0 - 2.0 / (9.0 * a);
    const double denom = 1.0 + xk * std::sqrt(2.0 / (a - 4.0));
    const double term2 = std::copysign(std::cbrt((1.0 - 2.0 / a) / std::fabs(denom)), denom);
    t.z_kurtosis = (term1 - term2) / std::sqrt(2.0 / (9.0 * a));

    t.k2 = t.z_skewness * t.z_skewness + t.z_kurtosis * t.z_kurtosis;
    t.p_value = std::exp(-0.5 * t.k2);  // chi-square(2) survival function
    return t;
}

GaussianReference::GaussianReference(double mean, double variance)
    : mean_(mean), variance_(variance), sigma_(std::sqrt(variance)) {
    if (!(variance > 0.0) || !std::isfinite(variance))
        throw DegenerateError("Gaussian reference needs a positive finite variance");
}

double GaussianReference::pdf(double x) const {
    const double z = (x - mean_) / sigma_;
    return std::exp(-0.5 * z * z) / (sigma_ * std::sqrt(2.0 * std::numbers::pi));
}

double GaussianReference::cdf(double x) const {
    return 0.5 * std::erfc(-(x - mean_) / (sigma_ * std::numbers::sqrt2));
}

double gaussian_half_sigma_mass() { return std::erf(0.25 * std::numbers::sqrt2); }

double fraction_within_half_sigma(std::span<const double> x) {
    const double s = std::sqrt(sample_variance(x));
    if (!(s > 0.0)) throw DegenerateError("half-sigma fraction of a zero-variance sample");
    const double mean = central_moments(x).mean;
    const double lo = mean - 0.5 * s;
    const double hi = mean + 0.5 * s;
    const auto inside = std::count_if(x.begin(), x.end(), [&](double v) { return v >= lo && v <= hi; });
    return static_cast<double>(inside) / static_cast<double>(x.size());
}

std::size_t default_bin_count(std::size_t n) {
    const auto root = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
    return std::clamp<std::size_t>(root, 16, 128);
}

BinSpec make_bins(std::span<const double> x, double ref_lo, double ref_hi, std::size_t count) {
    if (count == 0) throw Error(ErrorKind::usage, "need at least one histogram bin");
    double lo = ref_lo;
    double hi = ref_hi;
    for (double v : x) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (!(hi > lo)) throw DegenerateError("histogram range is empty");
    BinSpec bins;
    bins.edges.resize(count + 1);
    const double width = (hi - lo) / static_cast<double>(count);
    for (std::size_t i = 0; i < count; ++i) bins.edges[i] = lo + width * static_cast<double>(i);
    bins.edges[count] = hi;
    return bins;
}

std::vector<double> histogram_probabilities(std::span<const double> x, const BinSpec& bins) {
    const std::size_t k = bins.size();
    std::vector<double> p(k, 0.0);
    if (x.empty() || k == 0) return p;
    const double lo = bins.edges.front();
    const double width = bins.width();
    for (double v : x) {
        auto i = static_cast<std::ptrdiff_t>(std::floor((v - lo) / width));
        i = std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(k) - 1);
        // floor() can land one bin off next to an edge; settle against the stored edges
        while (i > 0 && v < bins.edges[static_cast<std::size_t>(i)]) --i;
        while (i + 1 < static_cast<std::ptrdiff_t>(k) && v >= bins.edges[static_cast<std::size_t>(i) + 1]) ++i;
        p[static_cast<std::size_t>(i)] += 1.0;
    }
    for (double& v : p) v /= static_cast<double>(x.size());
    return p;
}

std::vector<double> reference_probabilities(const CdfFunction& cdf, const BinSpec& bins) {
    const std::size_t k = bins.size();
    std::vector<double> q(k, 0.0);
    if (k == 0) return q;
    double prev = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double next = i + 1 == k ? 1.0 : std::clamp(cdf(bins.edges[i + 1]), 0.0, 1.0);
        q[i] = std::max(0.0, next - prev);
        prev = std::max(prev, next);
    }
    return q;
}

double js_distance(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw InputShapeError("JS distance needs equal-length mass vectors");
    const auto part = [](double a, double mid) { return a > 0.0 ? a * std::log(a / mid) : 0.0; };
    double jsd = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double mid = 0.5 * (p[i] + q[i]);
        if (mid > 0.0) jsd += 0.5 * (part(p[i], mid) + part(q[i], mid));
    }
    return std::sqrt(std::clamp(jsd, 0.0, std::numbers::ln2));
}

double js_distance(std::span<const double> x, const CdfFunction& reference_cdf, const BinSpec& bins) {
    if (x.size() < 2) throw SampleSizeError("JS distance needs at least 2 samples");
    const auto p = histogram_probabilities(x, bins);
    const auto q = reference_probabilities(reference_cdf, bins);
    return js_distance(p, q);
}

AnalysisReport analyze(std::span<const double> x, const wsum::WeightedUniformSum& reference,
                       const AnalysisOptions& options) {
    AnalysisReport r;
    r.n = x.size();
    const auto nt = dagostino_pearson(x, options.min_normality_samples);
    r.k2_stat = nt.k2;
    r.p_value = nt.p_value;
    r.rejected = nt.p_value <= options.alpha;
    r.excess_kurtosis = sample_kurtosis_excess(x);
    r.skewness = sample_skewness(x);
    r.mean = central_moments(x).mean;
    r.variance = sample_variance(x);

    const GaussianReference gauss(r.mean, r.variance);
    const auto [lo, hi] = reference.support();
    r.bins = make_bins(x, lo, hi, options.bin_count.value_or(default_bin_count(x.size())));
    const auto p = histogram_probabilities(x, r.bins);
    r.js_to_gaussian = js_distance(p, reference_probabilities([&](double v) { return gauss.cdf(v); }, r.bins));
    r.js_to_wsum = js_distance(p, reference_probabilities([&](double v) { return reference.cdf(v); }, r.bins));

    r.half_sigma_empirical = fraction_within_half_sigma(x);
    r.half_sigma_gaussian = gaussian_half_sigma_mass();
    r.half_sigma_wsum = options.half_sigma_wsum.value_or(wsum::half_sigma_mass(reference));
    return r;
}

Aggregate aggregate(std::span<const AnalysisReport> reports) {
    Aggregate a;
    a.count = reports.size();
    a.half_sigma_gaussian = gaussian_half_sigma_mass();
    if (reports.empty()) return a;
    std::size_t rejected = 0;
    std::size_t closer = 0;
    for (const auto& r : reports) {
        rejected += r.rejected;
        closer += r.js_to_wsum < r.js_to_gaussian;
        a.mean_k2 += r.k2_stat;
        a.mean_excess_kurtosis += r.excess_kurtosis;
        a.mean_skewness += r.skewness;
        a.mean_js_to_gaussian += r.js_to_gaussian;
        a.mean_js_to_wsum += r.js_to_wsum;
        a.mean_half_sigma_empirical += r.half_sigma_empirical;
        a.mean_half_sigma_wsum += r.half_sigma_wsum;
    }
    const double n = static_cast<double>(reports.size());
    a.rejection_rate = static_cast<double>(rejected) / n;
    a.wsum_closer_fraction = static_cast<double>(closer) / n;
    a.mean_k2 /= n;
    a.mean_excess_kurtosis /= n;
    a.mean_skewness /= n;
    a.mean_js_to_gaussian /= n;
    a.mean_js_to_wsum /= n;
    a.mean_half_sigma_empirical /= n;
    a.mean_half_sigma_wsum /= n;
    return a;
}

}  // namespace firuq::stats
