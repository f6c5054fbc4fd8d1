#include "firuq/mcsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "firuq/error.hpp"
#include "firuq/fir.hpp"

namespace firuq::mcsim {

Signal add_quantization_noise(const Signal& signal, double delta, RandomStream& stream) {
    if (!(delta > 0.0)) throw DegenerateError("quantization step must be positive");
    const auto x = signal.samples();
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + stream.centered(delta);
    return Signal(std::move(out), signal.sample_rate());
}

Signal post_filter_error(const Signal& noisy_out, const Signal& clean_out) {
    if (noisy_out.size() != clean_out.size())
        throw InputShapeError("noisy and clean outputs differ in length");
    if (noisy_out.sample_rate() != clean_out.sample_rate())
        throw InputShapeError("noisy and clean outputs differ in sample rate");
    std::vector<double> e(noisy_out.size());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = noisy_out[i] - clean_out[i];
    return Signal(std::move(e), noisy_out.sample_rate());
}

std::vector<std::size_t> full_overlap_indices(std::size_t signal_size, std::size_t filter_size) {
    std::vector<std::size_t> idx;
    for (std::size_t n = filter_size - 1; n < signal_size; ++n) idx.push_back(n);
    return idx;
}

std::vector<std::size_t> evenly_spaced_indices(std::size_t signal_size, std::size_t filter_size,
                                               std::size_t count) {
    auto all = full_overlap_indices(signal_size, filter_size);
    if (count == 0 || all.size() <= count) return all;
    std::vector<std::size_t> idx(count);
    for (std::size_t k = 0; k < count; ++k)
        idx[k] = all[k * (all.size() - 1) / std::max<std::size_t>(count - 1, 1)];
    return idx;
}

namespace {

void check_indices(const std::vector<std::size_t>& indices, std::size_t signal_size,
                   std::size_t filter_size) {
    for (std::size_t n : indices) {
        if (n + 1 < filter_size)
            throw BoundsError("output index " + std::to_string(n) +
                              " is inside the filter transient (needs n >= " +
                              std::to_string(filter_size - 1) + ")");
        if (n >= signal_size)
            throw BoundsError("output index " + std::to_string(n) + " is past the end of a " +
                              std::to_string(signal_size) + "-sample signal");
    }
}

// Error values for trials [first, last) written into per-index columns.
void run_block(const Signal& signal, std::span<const double> taps, const TrialConfig& cfg,
               const std::vector<std::size_t>& indices, const std::vector<double>& clean_at,
               std::size_t first, std::size_t last, std::vector<EmpiricalDistribution>& out) {
    for (std::size_t r = first; r < last; ++r) {
        auto stream = RandomStream::keyed(cfg.seed, r);
        const Signal noisy = add_quantization_noise(signal, cfg.delta, stream);
        for (std::size_t k = 0; k < indices.size(); ++k)
            out[k].values[r] = fir::apply_at(taps, noisy.samples(), indices[k]) - clean_at[k];
    }
}

}  // namespace

double signal_independence_tolerance(const Signal& signal, const FilterCoefficients& coeffs,
                                     double delta) {
    double sum_abs = 0.0;
    for (double b : coeffs.values()) sum_abs += std::fabs(b);
    double max_abs = 0.0;
    for (double v : signal.samples()) max_abs = std::max(max_abs, std::fabs(v));
    return 4.0 * static_cast<double>(coeffs.size()) * std::numeric_limits<double>::epsilon() *
           sum_abs * (max_abs + delta);
}

double signal_independence_gap(const Signal& signal, const FilterCoefficients& coeffs,
                               const TrialConfig& cfg, const std::vector<std::size_t>& indices,
                               std::size_t trials) {
    const Signal zeros(std::vector<double>(signal.size(), 0.0), signal.sample_rate());
    const auto taps = coeffs.values();
    double gap = 0.0;
    for (std::size_t r = 0; r < trials; ++r) {
        auto s1 = RandomStream::keyed(cfg.seed, r);
        auto s2 = RandomStream::keyed(cfg.seed, r);
        const Signal a = add_quantization_noise(signal, cfg.delta, s1);
        const Signal b = add_quantization_noise(zeros, cfg.delta, s2);
        for (std::size_t n : indices) {
            const double ea = fir::apply_at(taps, a.samples(), n) - fir::apply_at(taps, signal.samples(), n);
            const double eb = fir::apply_at(taps, b.samples(), n);
            gap = std::max(gap, std::fabs(ea - eb));
        }
    }
    return gap;
}

std::vector<EmpiricalDistribution> run_trials(const Signal& signal, const FilterCoefficients& coeffs,
                                              const TrialConfig& cfg, const std::string& channel_id,
                                              const std::string& epoch_id) {
    if (cfg.repetitions < 2) throw Error(ErrorKind::usage, "need at least two repetitions");
    if (!(cfg.delta > 0.0)) throw Error(ErrorKind::usage, "quantization step must be positive");
    const std::vector<std::size_t> indices =
        cfg.output_indices ? *cfg.output_indices : full_overlap_indices(signal.size(), coeffs.size());
    check_indices(indices, signal.size(), coeffs.size());

    const auto taps = coeffs.values();
    std::vector<double> clean_at(indices.size());
    for (std::size_t k = 0; k < indices.size(); ++k)
        clean_at[k] = fir::apply_at(taps, signal.samples(), indices[k]);

    std::vector<EmpiricalDistribution> out(indices.size());
    for (std::size_t k = 0; k < indices.size(); ++k) {
        out[k].values.assign(cfg.repetitions, 0.0);
        out[k].output_index = indices[k];
        out[k].channel_id = channel_id;
        out[k].epoch_id = epoch_id;
    }

    std::size_t workers = cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                           : cfg.threads;
    workers = std::min(workers, cfg.repetitions);
    if (workers <= 1) {
        run_block(signal, taps, cfg, indices, clean_at, 0, cfg.repetitions, out);
    } else {
        // Blocks write disjoint trial slots, so no synchronization is needed.
        std::vector<std::jthread> pool;
        const std::size_t per = (cfg.repetitions + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t first = w * per;
            const std::size_t last = std::min(cfg.repetitions, first + per);
            if (first >= last) break;
            pool.emplace_back([&, first, last] {
                run_block(signal, taps, cfg, indices, clean_at, first, last, out);
            });
        }
    }

    if (cfg.self_check && !indices.empty()) {
        const std::vector<std::size_t> probe(indices.begin(),
                                             indices.begin() + std::min<std::ptrdiff_t>(4, std::ssize(indices)));
        const double gap = signal_independence_gap(signal, coeffs, cfg, probe,
                                                   std::min<std::size_t>(4, cfg.repetitions));
        if (gap > signal_independence_tolerance(signal, coeffs, cfg.delta))
            throw Error(ErrorKind::data, "self-check failed: post-filter error depends on the clean signal");
    }
    return out;
}

}  // namespace firuq::mcsim
