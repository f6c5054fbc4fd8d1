#include "firuq/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <iostream>
#include <json.hpp>
#include <map>
#include <numbers>
#include <sstream>
#include <thread>

#include "firuq/error.hpp"
#include "firuq/fir.hpp"
#include "firuq/ingest.hpp"
#include "firuq/io.hpp"
#include "firuq/mcsim.hpp"
#include "firuq/stats.hpp"

namespace firuq::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

BandpassSpec default_bandpass() { return {160.0, 7.0, 35.0, 2.0, 8.75}; }

namespace {

constexpr const char* kRunFormat = "firuq-run/1";
constexpr const char* kReportFormat = "firuq-report/1";

ordered_json spec_json(const BandpassSpec& s) {
    return {{"sample_rate", s.sample_rate}, {"l_freq", s.l_freq}, {"h_freq", s.h_freq},
            {"l_trans", s.l_trans},         {"h_trans", s.h_trans}};
}

BandpassSpec spec_from_json(const ordered_json& j) {
    return {j.at("sample_rate").get<double>(), j.at("l_freq").get<double>(),
            j.at("h_freq").get<double>(), j.at("l_trans").get<double>(),
            j.at("h_trans").get<double>()};
}

std::string sanitize(const std::string& s) {
    std::string out;
    for (unsigned char c : s) out.push_back(std::isalnum(c) || c == '-' ? static_cast<char>(c) : '_');
    while (!out.empty() && out.back() == '_') out.pop_back();
    return out.empty() ? "ch" : out;
}

const char* source_name(SourceKind k) {
    switch (k) {
        case SourceKind::edf: return "edf";
        case SourceKind::csv: return "csv";
        default: return "synthetic";
    }
}

SourceKind source_from_name(const std::string& s) {
    if (s == "edf") return SourceKind::edf;
    if (s == "csv") return SourceKind::csv;
    if (s == "synthetic") return SourceKind::synthetic;
    throw Error(ErrorKind::usage, "unknown input source '" + s + "'");
}

ordered_json read_json(const fs::path& path) {
    try {
        return ordered_json::parse(io::read_file(path));
    } catch (const ordered_json::exception& e) {
        throw Error(ErrorKind::data, path.string() + ": " + e.what());
    }
}

void write_json(const fs::path& path, const ordered_json& j) { io::write_file(path, j.dump(2) + "\n"); }

FilterCoefficients resolve_filter(const SimulateOptions& opt) {
    if (!opt.coefficient_values.empty()) return FilterCoefficients(opt.coefficient_values);
    if (opt.coeffs) return io::read_coefficients(*opt.coeffs);
    return fir::design_bandpass(opt.spec);
}

struct Source {
    std::string label;
    ingest::ChannelData data;
};

std::vector<Source> load_sources(const SimulateOptions& opt, std::size_t filter_size) {
    std::vector<ingest::ChannelData> channels;
    switch (opt.source) {
        case SourceKind::synthetic: {
            std::size_t length = opt.synthetic_length;
            if (length == 0) {
                const std::size_t needed =
                    opt.indices.empty() ? opt.index_count : *std::max_element(opt.indices.begin(), opt.indices.end()) + 1;
                length = opt.epoch_start + opt.epoch_count * (filter_size - 1 + std::max<std::size_t>(needed, 1));
            }
            ingest::ChannelData ch;
            ch.label = "synthetic";
            ch.sample_rate = opt.spec.sample_rate;
            ch.samples.resize(length);
            for (std::size_t n = 0; n < length; ++n)
                ch.samples[n] = opt.synthetic_amplitude *
                                std::sin(2.0 * std::numbers::pi * opt.synthetic_frequency *
                                         static_cast<double>(n) / ch.sample_rate);
            channels.push_back(std::move(ch));
            break;
        }
        case SourceKind::edf:
            if (!opt.input) throw Error(ErrorKind::usage, "--edf needs a path");
            channels = ingest::read_edf(*opt.input).channels;
            break;
        case SourceKind::csv:
            if (!opt.input) throw Error(ErrorKind::usage, "--csv needs a path");
            try {
                channels = ingest::parse_csv(io::read_file(*opt.input), opt.csv_rate);
            } catch (const ParseError& e) {
                throw Error(ErrorKind::data, opt.input->string() + ": " + e.what());
            }
            break;
    }
    std::vector<Source> out;
    if (opt.channels.empty()) {
        for (auto& ch : channels) out.push_back({ch.label, std::move(ch)});
        return out;
    }
    for (const auto& want : opt.channels) {
        auto it = std::find_if(channels.begin(), channels.end(), [&](const auto& c) { return c.label == want; });
        if (it == channels.end()) throw Error(ErrorKind::data, "no channel labelled '" + want + "' in input");
        out.push_back({it->label, *it});
    }
    return out;
}

ordered_json simulate_parameters(const SimulateOptions& opt) {
    ordered_json p;
    p["source"] = source_name(opt.source);
    p["input"] = opt.input ? ordered_json(opt.input->string()) : ordered_json(nullptr);
    p["channels"] = opt.channels;
    p["csv_rate"] = opt.csv_rate;
    p["synthetic_frequency"] = opt.synthetic_frequency;
    p["synthetic_amplitude"] = opt.synthetic_amplitude;
    p["synthetic_length"] = opt.synthetic_length;
    p["epoch_start"] = opt.epoch_start;
    p["epoch_length"] = opt.epoch_length;
    p["epoch_count"] = opt.epoch_count;
    p["delta"] = opt.delta;
    p["repetitions"] = opt.repetitions;
    p["seed"] = opt.seed;
    p["indices"] = opt.indices;
    p["index_count"] = opt.index_count;
    p["config_file"] = opt.config_file ? ordered_json(opt.config_file->string()) : ordered_json(nullptr);
    return p;
}

std::string trials_csv(const std::vector<mcsim::EmpiricalDistribution>& dists) {
    std::string out = "output_index,trial,error_value\n";
    for (const auto& d : dists) {
        const std::string idx = std::to_string(d.output_index) + ",";
        for (std::size_t r = 0; r < d.values.size(); ++r) {
            out += idx;
            out += std::to_string(r);
            out += ',';
            out += io::format_double(d.values[r]);
            out += '\n';
        }
    }
    return out;
}

std::vector<mcsim::EmpiricalDistribution> parse_trials_csv(const fs::path& path, const std::string& channel,
                                                           const std::string& epoch) {
    const std::string text = io::read_file(path);
    std::vector<mcsim::EmpiricalDistribution> out;
    std::map<std::size_t, std::size_t> slot;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    try {
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line_no == 1) continue;
            const auto c1 = line.find(',');
            const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
            if (c2 == std::string::npos) throw ParseError("expected 3 columns", line_no, 1);
            const auto index = static_cast<std::size_t>(io::parse_double(line.substr(0, c1), line_no, 1));
            const double value = io::parse_double(line.substr(c2 + 1), line_no, 3);
            auto [it, inserted] = slot.try_emplace(index, out.size());
            if (inserted) {
                out.emplace_back();
                out.back().output_index = index;
                out.back().channel_id = channel;
                out.back().epoch_id = epoch;
            }
            out[it->second].values.push_back(value);
        }
    } catch (const ParseError& e) {
        throw Error(ErrorKind::data, path.string() + ": " + e.what());
    }
    return out;
}

template <typename F>
void parallel_for(std::size_t count, std::size_t threads, F&& body) {
    std::size_t workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    workers = std::min(workers, std::max<std::size_t>(count, 1));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::jthread> pool;
    const std::size_t per = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t first = w * per;
        const std::size_t last = std::min(count, first + per);
        if (first >= last) break;
        pool.emplace_back([&body, first, last] {
            for (std::size_t i = first; i < last; ++i) body(i);
        });
    }
}

ordered_json aggregate_json(const stats::Aggregate& a) {
    return {{"count", a.count},
            {"rejection_rate", a.rejection_rate},
            {"mean_k2", a.mean_k2},
            {"mean_excess_kurtosis", a.mean_excess_kurtosis},
            {"mean_skewness", a.mean_skewness},
            {"mean_js_to_gaussian", a.mean_js_to_gaussian},
            {"mean_js_to_wsum", a.mean_js_to_wsum},
            {"wsum_closer_fraction", a.wsum_closer_fraction},
            {"mean_half_sigma_empirical", a.mean_half_sigma_empirical},
            {"half_sigma_gaussian", a.half_sigma_gaussian},
            {"mean_half_sigma_wsum", a.mean_half_sigma_wsum}};
}

}  // namespace

void run_design(const DesignOptions& opt) {
    if (opt.out.empty()) throw Error(ErrorKind::usage, "design needs --out");
    const auto coeffs = fir::design_bandpass(opt.spec);
    io::write_coefficients(opt.out, coeffs.values());
    if (opt.response) {
        const auto grid = fir::frequency_grid(opt.spec.sample_rate, opt.response_points);
        std::string csv = "frequency_hz,magnitude,phase_rad\n";
        for (const auto& p : fir::frequency_response(coeffs.values(), opt.spec.sample_rate, grid))
            csv += io::format_double(p.frequency) + "," + io::format_double(p.magnitude) + "," +
                   io::format_double(p.phase) + "\n";
        io::write_file(*opt.response, csv);
    }
}

PdfResult run_pdf(const PdfOptions& opt) {
    if (opt.out.empty()) throw Error(ErrorKind::usage, "pdf needs --out");
    const auto full = io::read_coefficients(opt.coeffs);
    const auto sel = wsum::select_dominant(full, opt.tau);
    const wsum::WeightedUniformSum dist(sel.subset, opt.delta, opt.mean, opt.cap, full.size());
    const auto table = io::tabulate(dist, opt.points);

    double full_sum_sq = 0.0;
    for (double b : full.values()) full_sum_sq += b * b;
    const auto [lo, hi] = dist.support();
    PdfResult result{full.size(), sel.indices.size(), io::trapezoid_mass(table)};

    ordered_json meta;
    meta["coefficient_hash"] = io::coefficient_hash(full.values());
    meta["full_count"] = full.size();
    meta["selected_count"] = sel.indices.size();
    meta["selected_indices"] = sel.indices;
    meta["selected_coefficients"] = std::vector<double>(sel.subset.values().begin(), sel.subset.values().end());
    meta["tau"] = opt.tau;
    meta["delta"] = opt.delta;
    meta["mean"] = opt.mean;
    meta["full_variance"] = full_sum_sq * opt.delta * opt.delta / 12.0;
    meta["truncated_variance"] = dist.variance();
    meta["support"] = {lo, hi};
    meta["half_sigma_mass"] = wsum::half_sigma_mass(dist);
    meta["excess_kurtosis"] = dist.excess_kurtosis();
    meta["points"] = opt.points;
    meta["trapezoid_mass"] = result.trapezoid_mass;

    io::write_file(opt.out, io::distribution_csv(table));
    fs::path sidecar = opt.out;
    sidecar.replace_extension(".json");
    write_json(sidecar, meta);
    return result;
}

void run_simulate(const SimulateOptions& opt) {
    if (opt.out_dir.empty()) throw Error(ErrorKind::usage, "simulate needs --out-dir");
    if (opt.epoch_count == 0) throw Error(ErrorKind::usage, "epoch count must be positive");
    if (opt.epoch_count > 1 && opt.epoch_length == 0)
        throw Error(ErrorKind::usage, "multiple epochs need an explicit --epoch-length");
    const auto coeffs = resolve_filter(opt);
    const auto sources = load_sources(opt, coeffs.size());

    ordered_json manifest;
    manifest["format"] = kRunFormat;
    manifest["parameters"] = simulate_parameters(opt);
    ordered_json filter;
    if (opt.coeffs) {
        filter["source"] = "file";
        filter["path"] = opt.coeffs->string();
    } else {
        filter["source"] = "design";
        filter["design"] = spec_json(opt.spec);
    }
    filter["hash"] = io::coefficient_hash(coeffs.values());
    filter["taps"] = coeffs.size();
    filter["coefficients"] = std::vector<double>(coeffs.values().begin(), coeffs.values().end());
    manifest["filter"] = filter;
    manifest["files"] = ordered_json::array();

    for (const auto& src : sources) {
        for (std::size_t e = 0; e < opt.epoch_count; ++e) {
            const std::size_t length = opt.epoch_length ? opt.epoch_length
                                       : src.data.samples.size() > opt.epoch_start
                                           ? src.data.samples.size() - opt.epoch_start
                                           : 0;
            const std::size_t start = opt.epoch_start + e * length;
            const Signal signal = ingest::epoch(src.data, start, length);

            mcsim::TrialConfig cfg;
            cfg.repetitions = opt.repetitions;
            cfg.delta = opt.delta;
            cfg.seed = opt.seed;
            cfg.threads = opt.threads;
            cfg.output_indices = opt.indices.empty()
                                     ? mcsim::evenly_spaced_indices(signal.size(), coeffs.size(), opt.index_count)
                                     : opt.indices;
            if (cfg.output_indices->empty())
                throw BoundsError(src.label + " epoch " + std::to_string(e) + " has " +
                                  std::to_string(signal.size()) + " samples, fewer than the " +
                                  std::to_string(coeffs.size()) + " filter taps");
            const std::string epoch_id = std::to_string(e);
            const auto dists = mcsim::run_trials(signal, coeffs, cfg, src.label, epoch_id);

            const std::string name = "trials_" + sanitize(src.label) + "_" + epoch_id + ".csv";
            io::write_file(opt.out_dir / name, trials_csv(dists));
            manifest["files"].push_back({{"channel", src.label},
                                         {"epoch", epoch_id},
                                         {"path", name},
                                         {"start", start},
                                         {"length", length},
                                         {"indices", *cfg.output_indices}});
        }
    }
    write_json(opt.out_dir / "manifest.json", manifest);
}

SimulateOptions simulate_options_from_manifest(const fs::path& path) {
    const auto m = read_json(path);
    try {
        if (m.at("format") != kRunFormat) throw Error(ErrorKind::data, path.string() + ": not a run manifest");
        const auto& p = m.at("parameters");
        SimulateOptions opt;
        opt.source = source_from_name(p.at("source").get<std::string>());
        if (!p.at("input").is_null()) opt.input = p.at("input").get<std::string>();
        opt.channels = p.at("channels").get<std::vector<std::string>>();
        opt.csv_rate = p.at("csv_rate").get<double>();
        opt.synthetic_frequency = p.at("synthetic_frequency").get<double>();
        opt.synthetic_amplitude = p.at("synthetic_amplitude").get<double>();
        opt.synthetic_length = p.at("synthetic_length").get<std::size_t>();
        opt.epoch_start = p.at("epoch_start").get<std::size_t>();
        opt.epoch_length = p.at("epoch_length").get<std::size_t>();
        opt.epoch_count = p.at("epoch_count").get<std::size_t>();
        opt.delta = p.at("delta").get<double>();
        opt.repetitions = p.at("repetitions").get<std::size_t>();
        opt.seed = p.at("seed").get<std::uint64_t>();
        opt.indices = p.at("indices").get<std::vector<std::size_t>>();
        opt.index_count = p.at("index_count").get<std::size_t>();
        if (!p.at("config_file").is_null()) opt.config_file = p.at("config_file").get<std::string>();
        const auto& f = m.at("filter");
        if (f.at("source") == "file") opt.coeffs = f.at("path").get<std::string>();
        else opt.spec = spec_from_json(f.at("design"));
        opt.coefficient_values = f.at("coefficients").get<std::vector<double>>();
        if (io::coefficient_hash(opt.coefficient_values) != f.at("hash").get<std::string>())
            throw Error(ErrorKind::data, path.string() + ": coefficients do not match the recorded hash");
        return opt;
    } catch (const ordered_json::exception& e) {
        throw Error(ErrorKind::data, path.string() + ": " + e.what());
    }
}

void run_analyze(const AnalyzeOptions& opt, std::ostream& warnings) {
    const auto manifest = read_json(opt.run_dir / "manifest.json");
    std::vector<double> taps;
    double delta = 0.0;
    std::string recorded_hash;
    ordered_json files;
    try {
        taps = manifest.at("filter").at("coefficients").get<std::vector<double>>();
        recorded_hash = manifest.at("filter").at("hash").get<std::string>();
        delta = manifest.at("parameters").at("delta").get<double>();
        files = manifest.at("files");
    } catch (const ordered_json::exception& e) {
        throw Error(ErrorKind::data, "manifest: " + std::string(e.what()));
    }
    if (opt.coeffs) {
        const auto given = io::read_coefficients(*opt.coeffs);
        if (io::coefficient_hash(given.values()) != recorded_hash)
            warnings << "warning: " << opt.coeffs->string()
                     << " does not match the coefficients recorded in the run manifest\n";
        taps.assign(given.values().begin(), given.values().end());
    }
    const FilterCoefficients coeffs(taps);
    const auto reference = wsum::dominant_distribution(coeffs, delta, opt.tau, 0.0, opt.cap);
    const double half_sigma_wsum = wsum::half_sigma_mass(reference);

    std::vector<mcsim::EmpiricalDistribution> dists;
    for (const auto& f : files) {
        auto part = parse_trials_csv(opt.run_dir / f.at("path").get<std::string>(),
                                     f.at("channel").get<std::string>(), f.at("epoch").get<std::string>());
        std::move(part.begin(), part.end(), std::back_inserter(dists));
    }

    stats::AnalysisOptions aopt;
    aopt.alpha = opt.alpha;
    aopt.half_sigma_wsum = half_sigma_wsum;
    if (opt.bins) aopt.bin_count = opt.bins;

    std::vector<std::optional<stats::AnalysisReport>> reports(dists.size());
    std::vector<std::string> errors(dists.size());
    parallel_for(dists.size(), opt.threads, [&](std::size_t i) {
        try {
            reports[i] = stats::analyze(dists[i].values, reference, aopt);
        } catch (const Error& e) {
            errors[i] = e.what();
        }
    });

    const fs::path out_dir = opt.out_dir.value_or(opt.run_dir / "analysis");
    ordered_json records = ordered_json::array();
    std::vector<stats::AnalysisReport> ok;
    std::string summary =
        "channel,epoch,output_index,n,mean,variance,k2,p_value,rejected,excess_kurtosis,skewness,"
        "js_to_gaussian,js_to_wsum,half_sigma_empirical,half_sigma_gaussian,half_sigma_wsum,error\n";
    const auto num = [](double v) { return io::format_double(v); };
    for (std::size_t i = 0; i < dists.size(); ++i) {
        const auto& d = dists[i];
        ordered_json rec{{"channel", d.channel_id}, {"epoch", d.epoch_id}, {"output_index", d.output_index}};
        const std::string prefix = d.channel_id + "," + d.epoch_id + "," + std::to_string(d.output_index) + ",";
        if (!reports[i]) {
            rec["n"] = d.values.size();
            rec["error"] = errors[i];
            records.push_back(rec);
            summary += prefix + std::to_string(d.values.size()) + ",,,,,,,,,,,,," + "\"" + errors[i] + "\"\n";
            warnings << "warning: " << d.channel_id << "/" << d.epoch_id << "/" << d.output_index << ": "
                     << errors[i] << "\n";
            continue;
        }
        const auto& r = *reports[i];
        ok.push_back(r);
        rec["n"] = r.n;
        rec["mean"] = r.mean;
        rec["variance"] = r.variance;
        rec["k2_stat"] = r.k2_stat;
        rec["p_value"] = r.p_value;
        rec["rejected"] = r.rejected;
        rec["excess_kurtosis"] = r.excess_kurtosis;
        rec["skewness"] = r.skewness;
        rec["js_to_gaussian"] = r.js_to_gaussian;
        rec["js_to_wsum"] = r.js_to_wsum;
        rec["half_sigma_empirical"] = r.half_sigma_empirical;
        rec["half_sigma_gaussian"] = r.half_sigma_gaussian;
        rec["half_sigma_wsum"] = r.half_sigma_wsum;
        rec["bin_edges"] = r.bins.edges;
        records.push_back(rec);
        summary += prefix + std::to_string(r.n) + "," + num(r.mean) + "," + num(r.variance) + "," +
                   num(r.k2_stat) + "," + num(r.p_value) + "," + (r.rejected ? "1" : "0") + "," +
                   num(r.excess_kurtosis) + "," + num(r.skewness) + "," + num(r.js_to_gaussian) + "," +
                   num(r.js_to_wsum) + "," + num(r.half_sigma_empirical) + "," +
                   num(r.half_sigma_gaussian) + "," + num(r.half_sigma_wsum) + ",\n";

        if (opt.histograms) {
            const stats::GaussianReference gauss(r.mean, r.variance);
            const auto p = stats::histogram_probabilities(d.values, r.bins);
            std::string h = "bin_lo,bin_hi,center,empirical_density,wsum_pdf,gaussian_pdf\n";
            for (std::size_t b = 0; b < r.bins.size(); ++b) {
                const double c = r.bins.center(b);
                const double w = r.bins.edges[b + 1] - r.bins.edges[b];
                h += num(r.bins.edges[b]) + "," + num(r.bins.edges[b + 1]) + "," + num(c) + "," +
                     num(p[b] / w) + "," + num(reference.pdf(c)) + "," + num(gauss.pdf(c)) + "\n";
            }
            io::write_file(out_dir / "histograms" /
                               ("hist_" + sanitize(d.channel_id) + "_" + d.epoch_id + "_" +
                                std::to_string(d.output_index) + ".csv"),
                           h);
        }
    }

    const auto [lo, hi] = reference.support();
    ordered_json report;
    report["format"] = kReportFormat;
    report["metadata"] = {
        {"alpha", opt.alpha},
        {"rejection_rule", "p_value <= alpha"},
        {"bin_rule", opt.bins ? "fixed count" : "ceil(sqrt(n)) clamped to [16, 128]"},
        {"bin_range", "union of sample range and weighted-sum support, equal width"},
        {"reference_mass", "CDF differences; outermost bins absorb tail mass"},
        {"js_log_base", "e"},
        {"normality_test_estimators", "moment g1, b2 (divisor n)"},
        {"reported_moment_estimators", "bias-adjusted G1, G2"},
        {"half_sigma_empirical_sd", "n-1 divisor"},
        {"gaussian_moments", "sample mean and n-1 variance of each distribution"}};
    report["reference"] = {{"coefficient_hash", io::coefficient_hash(coeffs.values())},
                           {"tau", opt.tau},
                           {"delta", delta},
                           {"full_count", coeffs.size()},
                           {"selected_count", reference.included_count()},
                           {"truncated_variance", reference.variance()},
                           {"support", {lo, hi}},
                           {"half_sigma_mass", half_sigma_wsum},
                           {"excess_kurtosis", reference.excess_kurtosis()}};
    report["aggregate"] = aggregate_json(stats::aggregate(ok));
    report["failed_records"] = dists.size() - ok.size();
    report["records"] = records;
    write_json(out_dir / "report.json", report);
    io::write_file(out_dir / "summary.csv", summary);
}

void print_report(const fs::path& path, std::ostream& out) {
    const auto r = read_json(path);
    try {
        if (r.at("format") != kReportFormat) throw Error(ErrorKind::data, path.string() + ": not a report");
        const auto& a = r.at("aggregate");
        const auto& ref = r.at("reference");
        out << "distributions analysed   " << a.at("count").get<std::size_t>() << " ("
            << r.at("failed_records").get<std::size_t>() << " failed)\n";
        out << "reference taps           " << ref.at("selected_count").get<std::size_t>() << " of "
            << ref.at("full_count").get<std::size_t>() << " (tau " << ref.at("tau").get<double>() << ")\n";
        const auto line = [&](const char* label, const char* key) {
            out << label << a.at(key).get<double>() << "\n";
        };
        line("normality rejection rate ", "rejection_rate");
        line("mean excess kurtosis     ", "mean_excess_kurtosis");
        line("mean JS to weighted sum  ", "mean_js_to_wsum");
        line("mean JS to Gaussian      ", "mean_js_to_gaussian");
        line("weighted sum closer in   ", "wsum_closer_fraction");
        line("half-sigma empirical     ", "mean_half_sigma_empirical");
        line("half-sigma weighted sum  ", "mean_half_sigma_wsum");
        line("half-sigma Gaussian      ", "half_sigma_gaussian");
    } catch (const ordered_json::exception& e) {
        throw Error(ErrorKind::data, path.string() + ": " + e.what());
    }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Output-uncertainty analysis for FIR filters under uniform quantization noise", "firuq"};
    auto* config_opt = app.set_config("--config", "", "TOML/INI file; keys mirror the long flags, one [section] per subcommand");
    app.require_subcommand(1);

    const auto add_spec = [](CLI::App* cmd, BandpassSpec& spec) {
        cmd->add_option("--sample-rate", spec.sample_rate, "Hz")->capture_default_str();
        cmd->add_option("--l-freq", spec.l_freq, "lower passband edge, Hz")->capture_default_str();
        cmd->add_option("--h-freq", spec.h_freq, "upper passband edge, Hz")->capture_default_str();
        cmd->add_option("--l-trans", spec.l_trans, "lower transition bandwidth, Hz")->capture_default_str();
        cmd->add_option("--h-trans", spec.h_trans, "upper transition bandwidth, Hz")->capture_default_str();
    };

    DesignOptions design;
    std::string design_response;
    auto* design_cmd = app.add_subcommand("design", "design the Hamming-windowed bandpass");
    add_spec(design_cmd, design.spec);
    design_cmd->add_option("--out", design.out, "coefficient file (.csv for CSV, otherwise one per line)")->required();
    design_cmd->add_option("--response", design_response, "frequency-response CSV");
    design_cmd->add_option("--response-points", design.response_points)->capture_default_str();

    PdfOptions pdf;
    auto* pdf_cmd = app.add_subcommand("pdf", "tabulate the dominant-coefficient output distribution");
    pdf_cmd->add_option("--coeffs", pdf.coeffs, "coefficient file")->required();
    pdf_cmd->add_option("--delta", pdf.delta, "quantization step")->capture_default_str();
    pdf_cmd->add_option("--tau", pdf.tau, "dominance threshold in (0, 1]")->capture_default_str();
    pdf_cmd->add_option("--mean", pdf.mean)->capture_default_str();
    pdf_cmd->add_option("--points", pdf.points, "grid points")->capture_default_str();
    pdf_cmd->add_option("--cap", pdf.cap, "maximum coefficients in the expansion")->capture_default_str();
    pdf_cmd->add_option("--out", pdf.out, "CSV of y,pdf,cdf (JSON sidecar alongside)")->required();

    SimulateOptions sim;
    std::string sim_coeffs, sim_edf, sim_csv, sim_manifest;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo post-filter error");
    sim_cmd->add_option("--coeffs", sim_coeffs, "coefficient file (default: design from the band flags)");
    add_spec(sim_cmd, sim.spec);
    auto* edf_opt = sim_cmd->add_option("--edf", sim_edf, "EDF input");
    auto* csv_opt = sim_cmd->add_option("--csv", sim_csv, "CSV input, one column per channel");
    edf_opt->excludes(csv_opt);
    sim_cmd->add_option("--csv-rate", sim.csv_rate, "sample rate of the CSV input, Hz");
    sim_cmd->add_option("--channels", sim.channels, "channel labels (default: all)");
    sim_cmd->add_option("--synthetic-frequency", sim.synthetic_frequency)->capture_default_str();
    sim_cmd->add_option("--synthetic-amplitude", sim.synthetic_amplitude)->capture_default_str();
    sim_cmd->add_option("--synthetic-length", sim.synthetic_length, "samples; 0 = minimum needed")->capture_default_str();
    sim_cmd->add_option("--epoch-start", sim.epoch_start, "first sample")->capture_default_str();
    sim_cmd->add_option("--epoch-length", sim.epoch_length, "samples; 0 = rest of channel")->capture_default_str();
    sim_cmd->add_option("--epoch-count", sim.epoch_count, "consecutive epochs")->capture_default_str();
    sim_cmd->add_option("--delta", sim.delta, "quantization step")->capture_default_str();
    sim_cmd->add_option("--repetitions", sim.repetitions)->capture_default_str();
    sim_cmd->add_option("--seed", sim.seed)->capture_default_str();
    sim_cmd->add_option("--indices", sim.indices, "output indices within each epoch");
    sim_cmd->add_option("--index-count", sim.index_count, "evenly spaced indices when --indices is absent")
        ->capture_default_str();
    sim_cmd->add_option("--threads", sim.threads, "worker threads (0 = all cores)")->capture_default_str();
    sim_cmd->add_option("--from-manifest", sim_manifest, "replay the parameters of an earlier run");
    sim_cmd->add_option("--out-dir", sim.out_dir)->required();

    AnalyzeOptions an;
    std::string an_coeffs, an_out;
    bool no_histograms = false;
    auto* an_cmd = app.add_subcommand("analyze", "normality, kurtosis, JS distances, half-sigma mass");
    an_cmd->add_option("--run-dir", an.run_dir, "directory written by simulate")->required();
    an_cmd->add_option("--coeffs", an_coeffs, "coefficient file (default: taps in the manifest)");
    an_cmd->add_option("--tau", an.tau)->capture_default_str();
    an_cmd->add_option("--cap", an.cap)->capture_default_str();
    an_cmd->add_option("--alpha", an.alpha, "rejection level (p <= alpha rejects)")->capture_default_str();
    an_cmd->add_option("--bins", an.bins, "histogram bins; 0 = ceil(sqrt(n)) in [16, 128]")->capture_default_str();
    an_cmd->add_option("--threads", an.threads)->capture_default_str();
    an_cmd->add_flag("--no-histograms", no_histograms);
    an_cmd->add_option("--out-dir", an_out, "default: <run-dir>/analysis");

    std::string report_path;
    auto* rep_cmd = app.add_subcommand("report", "print the aggregate block of an analysis");
    rep_cmd->add_option("--report", report_path, "report.json")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : static_cast<int>(ErrorKind::usage);
    }

    try {
        if (*design_cmd) {
            if (!design_response.empty()) design.response = design_response;
            run_design(design);
        } else if (*pdf_cmd) {
            const auto r = run_pdf(pdf);
            out << "selected " << r.selected_count << " of " << r.full_count << " coefficients; grid mass "
                << r.trapezoid_mass << "\n";
        } else if (*sim_cmd) {
            if (!sim_manifest.empty()) {
                auto replay = simulate_options_from_manifest(sim_manifest);
                replay.out_dir = sim.out_dir;
                replay.threads = sim.threads;
                sim = std::move(replay);
            } else {
                if (!sim_coeffs.empty()) sim.coeffs = sim_coeffs;
                if (!sim_edf.empty()) {
                    sim.source = SourceKind::edf;
                    sim.input = sim_edf;
                } else if (!sim_csv.empty()) {
                    sim.source = SourceKind::csv;
                    sim.input = sim_csv;
                }
                if (config_opt->count() > 0) sim.config_file = config_opt->as<std::string>();
            }
            run_simulate(sim);
        } else if (*an_cmd) {
            if (!an_coeffs.empty()) an.coeffs = an_coeffs;
            if (!an_out.empty()) an.out_dir = an_out;
            an.histograms = !no_histograms;
            run_analyze(an, err);
        } else if (*rep_cmd) {
            print_report(report_path, out);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return static_cast<int>(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return static_cast<int>(ErrorKind::data);
    }
    return 0;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv{"firuq"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace firuq::cli
