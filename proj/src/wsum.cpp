#include "firuq/wsum.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "firuq/error.hpp"
#include "firuq/random.hpp"

namespace firuq::wsum {

UniformQuantization::UniformQuantization(double delta_in, std::vector<double> means_in)
    : delta(delta_in), means(std::move(means_in)) {
    if (!(delta > 0.0) || !std::isfinite(delta))
        throw DegenerateError("quantization step must be positive and finite");
}

Moments moments(const FilterCoefficients& coeffs, const UniformQuantization& q) {
    if (q.means.size() != coeffs.size())
        throw InputShapeError("got " + std::to_string(q.means.size()) + " means for " +
                              std::to_string(coeffs.size()) + " coefficients");
    Moments m;
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        m.mean += coeffs[i] * q.means[i];
        sum_sq += coeffs[i] * coeffs[i];
    }
    m.variance = sum_sq * q.delta * q.delta / 12.0;
    return m;
}

SignTermExpansion expand_sign_terms(std::span<const double> coeffs, double delta, std::size_t cap) {
    if (coeffs.empty()) throw DegenerateError("sign-term expansion needs at least one coefficient");
    if (!(delta > 0.0) || !std::isfinite(delta))
        throw DegenerateError("quantization step must be positive and finite");
    if (coeffs.size() > cap) throw CombinatorialLimitError(coeffs.size(), cap);

    double max_abs = 0.0;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        if (coeffs[i] == 0.0)
            throw DegenerateError("coefficient " + std::to_string(i) +
                                  " is zero; strip zero taps before expansion");
        if (!std::isfinite(coeffs[i])) throw DegenerateError("coefficients must be finite");
        max_abs = std::max(max_abs, std::fabs(coeffs[i]));
    }

    SignTermExpansion e;
    e.scale_ = max_abs * delta;
    e.scaled_.reserve(coeffs.size());
    e.b_tilde_ = 1.0;
    double log_abs_product = 0.0;
    int negatives = 0;
    for (double b : coeffs) {
        const double c = b * delta / e.scale_;
        e.scaled_.push_back(c);
        e.b_tilde_ *= b * delta;
        log_abs_product += std::log(std::fabs(c));
        negatives += c < 0.0;
    }
    const std::size_t order = coeffs.size() - 1;
    e.log_scale_ = -std::lgamma(static_cast<double>(order) + 1.0) - log_abs_product;
    const bool odd_power = (order + 1) % 2 == 1;
    e.sign_factor_ = ((negatives % 2 == 1) != odd_power) ? -1 : 1;

    // Each coefficient doubles the set: s_i = +1 keeps the sign product, s_i = -1
    // flips it. Shifts are sums of exact halves, accumulated in double-double in
    // a fixed order so that S and its all-flipped partner are exact negatives.
    e.terms_.reserve(std::size_t{1} << coeffs.size());
    e.terms_.push_back({DoubleDouble{0.0}, 1});
    for (double c : e.scaled_) {
        const double half = 0.5 * c;
        const std::size_t n = e.terms_.size();
        for (std::size_t j = 0; j < n; ++j) {
            const SignTerm t = e.terms_[j];
            e.terms_.push_back({t.shift - DoubleDouble{half}, -t.sign});
            e.terms_[j].shift = t.shift + DoubleDouble{half};
        }
    }
    std::sort(e.terms_.begin(), e.terms_.end(), [](const SignTerm& a, const SignTerm& b) {
        if (a.shift == b.shift) return a.sign < b.sign;
        return a.shift < b.shift;
    });
    return e;
}

DoubleDouble SignTermExpansion::truncated_power_sum(double x, unsigned power,
                                                    double* magnitude) const {
    const DoubleDouble xd{x};
    const auto first_not_below = std::lower_bound(
        terms_.begin(), terms_.end(), xd,
        [](const SignTerm& t, const DoubleDouble& v) { return t.shift < v; });

    // Terms are visited in increasing S; for x <= 0 (the evaluation path always
    // reflects onto the left half) that is decreasing |x - S|, largest first.
    DoubleDouble acc{0.0};
    double mag = 0.0;
    for (auto it = terms_.begin(); it != first_not_below; ++it) {
        const DoubleDouble p = pow(xd - it->shift, power);
        acc += it->sign > 0 ? p : -p;
        mag += std::fabs(p.hi);
    }
    if (power == 0) {
        // H(0) = 1/2 only matters when the power term is 0^0 = 1.
        for (auto it = first_not_below; it != terms_.end() && it->shift == xd; ++it) {
            acc += DoubleDouble{0.5 * it->sign};
            mag += 0.5;
        }
    }
    if (magnitude) *magnitude = mag;
    return acc;
}

namespace {

FilterCoefficients nonzero_taps(const FilterCoefficients& coeffs) {
    std::vector<double> kept;
    for (double b : coeffs.values())
        if (b != 0.0) kept.push_back(b);
    return FilterCoefficients(std::move(kept), coeffs.sample_rate(), coeffs.design());
}

}  // namespace

WeightedUniformSum::WeightedUniformSum(FilterCoefficients coeffs, double delta, double mu,
                                       std::size_t cap, std::optional<std::size_t> truncated_from)
    : coeffs_(std::move(coeffs)),
      delta_(delta),
      mu_(mu),
      truncated_from_(truncated_from),
      expansion_(expand_sign_terms(nonzero_taps(coeffs_).values(), delta, cap)) {
    if (!std::isfinite(mu_)) throw DegenerateError("distribution mean must be finite");
    double sum_sq = 0.0;
    double sum_abs = 0.0;
    for (double b : coeffs_.values()) {
        sum_sq += b * b;
        sum_abs += std::fabs(b);
    }
    variance_ = sum_sq * delta_ * delta_ / 12.0;
    lo_ = mu_ - 0.5 * delta_ * sum_abs;
    hi_ = mu_ + 0.5 * delta_ * sum_abs;
    norm_ = std::exp(expansion_.log_scale());
}

double WeightedUniformSum::stddev() const { return std::sqrt(variance_); }

EvalDiagnostic WeightedUniformSum::pdf_diagnostic(double y) const {
    EvalDiagnostic d;
    if (y < lo_ || y > hi_ || std::isnan(y)) return d;
    const double scale = expansion_.scale();
    const double t = -std::fabs((y - mu_) / scale);  // f is symmetric about mu
    double mag = 0.0;
    const auto order = static_cast<unsigned>(expansion_.order());
    const DoubleDouble acc = expansion_.truncated_power_sum(t, order, &mag);
    const double factor = norm_ / scale;
    d.raw = expansion_.sign_factor() * acc.to_double() * factor;
    d.magnitude = mag * factor;
    d.clamped = d.raw < 0.0;
    d.value = d.clamped ? 0.0 : d.raw;
    return d;
}

EvalDiagnostic WeightedUniformSum::cdf_diagnostic(double y) const {
    EvalDiagnostic d;
    if (std::isnan(y)) {
        d.value = d.raw = y;
        return d;
    }
    if (y <= lo_) return d;
    if (y >= hi_) {
        d.value = d.raw = 1.0;
        return d;
    }
    const double t = (y - mu_) / expansion_.scale();
    const bool upper_half = t > 0.0;  // F(mu + t) = 1 - F(mu - t)
    double mag = 0.0;
    const auto power = static_cast<unsigned>(expansion_.order() + 1);
    const DoubleDouble acc = expansion_.truncated_power_sum(-std::fabs(t), power, &mag);
    const double factor = norm_ / static_cast<double>(power);
    const double left = expansion_.sign_factor() * acc.to_double() * factor;
    d.magnitude = mag * factor;
    d.raw = upper_half ? 1.0 - left : left;
    d.value = std::clamp(d.raw, 0.0, 1.0);
    d.clamped = d.value != d.raw;
    return d;
}

double WeightedUniformSum::excess_kurtosis() const {
    double s2 = 0.0;
    double s4 = 0.0;
    for (double b : coeffs_.values()) {
        const double b2 = b * b;
        s2 += b2;
        s4 += b2 * b2;
    }
    return -1.2 * s4 / (s2 * s2);
}

double half_sigma_mass(const WeightedUniformSum& dist) {
    if (!(dist.variance() > 0.0)) throw DegenerateError("half-sigma mass needs positive variance");
    const double half = 0.5 * dist.stddev();
    return dist.cdf(dist.mean() + half) - dist.cdf(dist.mean() - half);
}

std::vector<double> sample(const WeightedUniformSum& dist, std::size_t n, std::uint64_t seed) {
    RandomStream stream(seed);
    const auto taps = dist.coefficients().values();
    std::vector<double> out(n);
    for (auto& v : out) {
        double s = 0.0;
        for (double b : taps) s += b * stream.centered(dist.delta());
        v = s + dist.mean();
    }
    return out;
}

DominantSelection select_dominant(const FilterCoefficients& coeffs, double tau) {
    if (!(tau > 0.0 && tau <= 1.0))
        throw Error(ErrorKind::usage, "dominance threshold must lie in (0, 1]");
    double max_abs = 0.0;
    for (double b : coeffs.values()) max_abs = std::max(max_abs, std::fabs(b));
    const double threshold = tau * max_abs;
    DominantSelection sel{{}, coeffs};
    std::vector<double> subset;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        const double a = std::fabs(coeffs[i]);
        if (a != 0.0 && a >= threshold) {
            sel.indices.push_back(i);
            subset.push_back(coeffs[i]);
        }
    }
    sel.subset = FilterCoefficients(std::move(subset), coeffs.sample_rate(), coeffs.design());
    return sel;
}

WeightedUniformSum dominant_distribution(const FilterCoefficients& coeffs, double delta, double tau,
                                         double mu, std::size_t cap) {
    auto sel = select_dominant(coeffs, tau);
    return WeightedUniformSum(std::move(sel.subset), delta, mu, cap, coeffs.size());
}

}  // namespace firuq::wsum
