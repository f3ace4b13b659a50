#pragma once

// `ucpc` command-line front end: gen, cluster, eval, verify, bench.
//
// Exit codes: 0 success, 2 usage, 3 data validation, 4 verification failure.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ucpc/algorithms.hpp"
#include "ucpc/datagen.hpp"
#include "ucpc/eval.hpp"
#include "ucpc/io.hpp"
#include "ucpc/verify.hpp"

namespace ucpc::cli {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kThreadsEnv = "UCPC_THREADS";

enum ExitCode : int { ok = 0, usage = 2, invalid_data = 3, verification_failed = 4 };

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace detail {

using Clock = std::chrono::steady_clock;

inline double ms_since(Clock::time_point t) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t).count();
}

inline std::size_t default_threads() {
    if (const char* env = std::getenv(kThreadsEnv)) {
        try {
            const long v = std::stol(env);
            if (v >= 0) return static_cast<std::size_t>(v);
        } catch (...) {
        }
    }
    return 1;
}

inline std::string stem(const std::string& path) { return fs::path(path).stem().string(); }

inline io::LabelMode label_mode(const std::string& s) {
    if (s == "last") return io::LabelMode::last_column;
    if (s == "none") return io::LabelMode::none;
    return io::LabelMode::automatic;
}

inline json manifest_base(const std::vector<std::string>& args) {
    return {{"tool", "ucpc"}, {"version", kVersion}, {"command_line", args}};
}

inline std::string dataset_digest(const std::string& path) { return io::digest(io::read_file(path)); }

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace detail

struct GenOptions {
    std::string input;
    std::string out_dir = ".";
    std::string family = "normal";
    double coverage = 0.95;
    std::uint64_t seed = 0;
    std::optional<double> range_lo, range_hi;
    bool absolute = false;
    std::string labels = "auto";
};

struct ClusterOptions {
    std::string dataset;
    std::string algo = "ucpc";
    std::size_t k = 2;
    std::uint64_t seed = 0;
    std::size_t restarts = 1;
    std::size_t max_sweeps = 100;
    std::size_t mc_samples = 10000;
    std::size_t threads = 1;
    std::string output = "assignment.json";
    std::string manifest;
    std::string labels = "auto";
};

struct EvalOptions {
    std::string dataset;
    std::string assignment;
    std::string reference;
    std::string theta_against;
    std::string csv_out;
    std::string json_out;
    std::string name;
    std::string labels = "auto";
};

struct VerifyOptions {
    std::string suite = "all";
    std::size_t samples = 100000;
    std::uint64_t seed = 1;
    bool inject_fault = false;
};

struct BenchOptions {
    std::string dataset;
    std::vector<std::string> algos{"ucpc", "ukmeans", "mmvar"};
    std::size_t k = 2;
    std::size_t repeats = 3;
    std::uint64_t seed = 0;
    std::size_t max_sweeps = 100;
    std::size_t mc_samples = 1000;
    bool size_sweep = false;
    std::string output;
    std::string labels = "auto";
};

// ---------------------------------------------------------------------------

inline int cmd_gen(const GenOptions& o, const std::vector<std::string>& args, std::ostream& out) {
    const auto t0 = detail::Clock::now();
    const auto family = parse_family(o.family);
    if (!family) throw detail::UsageError("unknown family '" + o.family + "'");
    const io::DeterministicData input = io::read_csv(o.input, detail::label_mode(o.labels));
    const double t_load = detail::ms_since(t0);

    GenConfig cfg;
    cfg.family = *family;
    cfg.coverage = o.coverage;
    cfg.seed = o.seed;
    cfg.relative_to_range = !o.absolute;
    ParamRange& range = cfg.family == Family::uniform   ? cfg.uniform_half_width
                        : cfg.family == Family::normal ? cfg.normal_stddev
                                                       : cfg.exponential_scale;
    if (o.range_lo) range.lo = *o.range_lo;
    if (o.range_hi) range.hi = *o.range_hi;

    const auto t1 = detail::Clock::now();
    const auto pdfs = assign_pdfs(input.points, cfg);
    io::DeterministicData perturbed{perturb(input.points, pdfs, cfg.seed), input.labels, input.header};
    const Dataset uncertain = uncertainize(input.points, pdfs, cfg.coverage, input.labels);
    const double t_gen = detail::ms_since(t1);

    fs::create_directories(o.out_dir);
    const std::string base = (fs::path(o.out_dir) / detail::stem(o.input)).string();
    const std::string perturbed_path = base + ".perturbed.csv";
    const std::string uncertain_path = base + ".uncertain.json";
    const std::string manifest_path = base + ".gen_manifest.json";
    io::write_file(perturbed_path, io::format_csv(perturbed));
    io::write_file(uncertain_path, io::dataset_to_json(uncertain).dump(1) + "\n");

    json manifest = detail::manifest_base(args);
    manifest["command"] = "gen";
    manifest["config"] = {{"family", to_string(cfg.family)},
                          {"range", {range.lo, range.hi}},
                          {"relative_to_range", cfg.relative_to_range},
                          {"coverage", cfg.coverage}};
    manifest["seeds"] = {{"seed", cfg.seed}};
    manifest["input"] = {{"path", o.input}, {"digest", detail::dataset_digest(o.input)},
                         {"n", input.points.size()}, {"m", input.points.front().size()},
                         {"labels", input.labels.has_value()}};
    manifest["timings_ms"] = {{"load", t_load}, {"generate", t_gen}, {"total", detail::ms_since(t0)}};
    manifest["outputs"] = {perturbed_path, uncertain_path};
    io::write_file(manifest_path, manifest.dump(2) + "\n");

    out << "wrote " << perturbed_path << "\nwrote " << uncertain_path << "\nwrote " << manifest_path << "\n";
    return ok;
}

inline int cmd_cluster(const ClusterOptions& o, const std::vector<std::string>& args, std::ostream& out) {
    const auto algo = parse_algorithm(o.algo);
    if (!algo) throw detail::UsageError("unknown algorithm '" + o.algo + "' (ucpc|ukmeans|mmvar|bukm)");
    const auto t0 = detail::Clock::now();
    const Dataset data = io::load_dataset(o.dataset, detail::label_mode(o.labels));
    const double t_load = detail::ms_since(t0);

    ClusterConfig cfg;
    cfg.k = o.k;
    cfg.seed = o.seed;
    cfg.restarts = o.restarts;
    cfg.max_sweeps = o.max_sweeps;
    cfg.mc_samples = o.mc_samples;
    cfg.threads = o.threads;
    cfg.validate(data.size());

    const auto t1 = detail::Clock::now();
    const Clustering c = run_algorithm(*algo, data, cfg);
    const double t_run = detail::ms_since(t1);

    io::write_file(o.output, io::assignment_to_json(data, c, o.algo, o.seed).dump(1) + "\n");

    const std::string manifest_path = o.manifest.empty() ? o.output + ".manifest.json" : o.manifest;
    json manifest = detail::manifest_base(args);
    manifest["command"] = "cluster";
    manifest["config"] = {{"algo", o.algo},
                          {"k", cfg.k},
                          {"restarts", cfg.restarts},
                          {"max_sweeps", cfg.max_sweeps},
                          {"min_relative_decrease", cfg.min_relative_decrease},
                          {"mc_samples", cfg.mc_samples},
                          {"threads", cfg.threads}};
    manifest["seeds"] = {{"seed", cfg.seed}, {"best_restart", c.restart_index}, {"restart_seed", c.seed_used}};
    manifest["dataset"] = {{"path", o.dataset}, {"digest", detail::dataset_digest(o.dataset)},
                           {"n", data.size()}, {"m", data.dim()}};
    manifest["result"] = {{"objective", c.objective}, {"sweeps_used", c.sweeps_used}};
    if (c.objective_std_error) manifest["result"]["objective_std_error"] = *c.objective_std_error;
    manifest["timings_ms"] = {{"load", t_load},
                              {"offline", c.offline_ms},
                              {"online", c.online_ms},
                              {"run_total", t_run},
                              {"sweeps", c.sweep_ms}};
    manifest["outputs"] = {o.output};
    io::write_file(manifest_path, manifest.dump(2) + "\n");

    out << o.algo << " k=" << c.k << " objective=" << io::format_double(c.objective) << " sweeps=" << c.sweeps_used
        << "\nwrote " << o.output << "\nwrote " << manifest_path << "\n";
    return ok;
}

namespace detail {

/// Reference labels from a file of `id,label` lines, aligned to dataset order.
inline Labels read_reference(const std::string& path, const Dataset& data) {
    std::istringstream in(io::read_file(path));
    std::unordered_map<std::string, std::string> by_id;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (io::trim(line).empty()) continue;
        const auto cells = io::split_csv_line(line);
        if (cells.size() != 2) throw data_error(path + " line " + std::to_string(line_no) + ": expected id,label");
        by_id[cells[0]] = cells[1];
    }
    Labels out;
    for (const auto& o : data) {
        const auto it = by_id.find(o.id());
        if (it == by_id.end()) throw data_error(path + ": no reference label for object id " + o.id());
        out.push_back(it->second);
    }
    return out;
}

} // namespace detail

inline int cmd_eval(const EvalOptions& o, const std::vector<std::string>&, std::ostream& out) {
    const auto t0 = detail::Clock::now();
    const Dataset data = io::load_dataset(o.dataset, detail::label_mode(o.labels));
    const io::AssignmentFile a = io::read_assignment(o.assignment);
    const std::vector<std::size_t> assignment = io::align_assignment(data, a);

    std::optional<Labels> reference;
    if (!o.reference.empty()) reference = detail::read_reference(o.reference, data);
    else if (data.labels()) reference = *data.labels();

    io::MetricsRow row;
    row.dataset = o.name.empty() ? detail::stem(o.dataset) : o.name;
    row.algo = a.algo;
    row.k = a.k;
    row.seed = a.seed;
    if (reference) row.report.f_measure = f_measure(assignment, a.k, *reference);
    const InternalQuality iq = internal_quality(assignment, a.k, data);
    row.report.intra = iq.intra;
    row.report.inter = iq.inter;
    row.report.quality_q = iq.q;
    row.report.inter_defined = iq.inter_defined;
    if (!o.theta_against.empty()) {
        if (!reference) throw data_error("theta needs reference labels");
        const io::AssignmentFile p = io::read_assignment(o.theta_against);
        const double f_perturbed = f_measure(io::align_assignment(data, p), p.k, *reference);
        row.report.theta = theta(*row.report.f_measure, f_perturbed);
    }
    row.report.wall_time_ms = detail::ms_since(t0);

    const std::string csv = std::string(io::kMetricsHeader) + "\n" + io::format_metrics_row(row) + "\n";
    if (!o.csv_out.empty()) io::write_file(o.csv_out, csv);
    if (!o.json_out.empty()) io::write_file(o.json_out, io::report_to_json(row).dump(2) + "\n");
    out << csv;
    return ok;
}

inline int cmd_verify(const VerifyOptions& o, std::ostream& out) {
    if (o.suite != "identities" && o.suite != "oracle" && o.suite != "all")
        throw detail::UsageError("unknown suite '" + o.suite + "' (identities|oracle|all)");
    const verify::Options opt{o.samples, o.seed, o.inject_fault};
    std::vector<verify::CheckResult> results;
    if (o.suite != "oracle") {
        auto r = verify::identities(opt);
        results.insert(results.end(), r.begin(), r.end());
    }
    if (o.suite != "identities") {
        auto r = verify::oracle_checks(opt);
        results.insert(results.end(), r.begin(), r.end());
    }
    std::size_t failed = 0;
    for (const auto& r : results) {
        out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
        if (!r.passed) ++failed;
    }
    out << (results.size() - failed) << "/" << results.size() << " checks passed\n";
    return failed == 0 ? ok : verification_failed;
}

inline int cmd_bench(const BenchOptions& o, std::ostream& out) {
    if (o.repeats < 3) throw detail::UsageError("bench needs --repeats >= 3");
    std::vector<Algorithm> algos;
    for (const auto& name : o.algos) {
        const auto a = parse_algorithm(name);
        if (!a) throw detail::UsageError("unknown algorithm '" + name + "'");
        algos.push_back(*a);
    }
    const Dataset full = io::load_dataset(o.dataset, detail::label_mode(o.labels));

    auto time_run = [&](Algorithm a, const Dataset& data, std::uint64_t seed) {
        ClusterConfig cfg;
        cfg.k = o.k;
        cfg.seed = seed;
        cfg.max_sweeps = o.max_sweeps;
        cfg.mc_samples = o.mc_samples;
        cfg.validate(data.size());
        const Clustering c = run_algorithm(a, data, cfg);
        return c.online_ms;  // clustering time; offline phases excluded
    };
    auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        const std::size_t h = v.size() / 2;
        return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
    };

    std::ostringstream table;
    if (!o.size_sweep) {
        table << "algo,repeat,ms\n";
        for (Algorithm a : algos) {
            std::vector<double> times;
            for (std::size_t r = 0; r < o.repeats; ++r) {
                times.push_back(time_run(a, full, derive_seed(o.seed, r)));
                table << to_string(a) << ',' << r << ',' << io::format_double(times.back()) << '\n';
            }
            table << to_string(a) << ",median," << io::format_double(median(times)) << '\n';
        }
    } else {
        table << "fraction,algo,n,ms\n";
        for (const double fraction : {0.05, 0.10, 0.25, 0.50, 0.75, 1.00}) {
            const auto n = std::max<std::size_t>(o.k, static_cast<std::size_t>(fraction * static_cast<double>(full.size())));
            const Dataset subset(std::vector<UncertainObject>(full.objects().begin(), full.objects().begin() + n));
            for (Algorithm a : algos) {
                std::vector<double> times;
                for (std::size_t r = 0; r < o.repeats; ++r) times.push_back(time_run(a, subset, derive_seed(o.seed, r)));
                table << io::format_double(fraction) << ',' << to_string(a) << ',' << n << ','
                      << io::format_double(median(times)) << '\n';
            }
        }
    }
    if (!o.output.empty()) io::write_file(o.output, table.str());
    out << table.str();
    return ok;
}

// ---------------------------------------------------------------------------

/// Entry point; `argv[0]` is the program name.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    const std::vector<std::string> args(argv, argv + argc);
    CLI::App app{"Partitional clustering of uncertain objects"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    GenOptions gen;
    auto* g = app.add_subcommand("gen", "Generate perturbed and uncertain datasets from a deterministic CSV");
    g->add_option("input", gen.input, "Deterministic CSV (numeric columns, optional trailing label)")->required();
    g->add_option("-o,--out-dir", gen.out_dir, "Output directory")->capture_default_str();
    g->add_option("--family", gen.family, "uniform|normal|exponential")->capture_default_str();
    g->add_option("--coverage", gen.coverage, "Mass captured by each uncertain region")->capture_default_str();
    g->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
    g->add_option("--range-lo", gen.range_lo, "Lower end of the parameter range");
    g->add_option("--range-hi", gen.range_hi, "Upper end of the parameter range");
    g->add_flag("--absolute", gen.absolute, "Parameter range in data units instead of fractions of each range");
    g->add_option("--labels", gen.labels, "auto|last|none")->capture_default_str();

    ClusterOptions cl;
    cl.threads = detail::default_threads();
    auto* c = app.add_subcommand("cluster", "Cluster a dataset");
    c->add_option("dataset", cl.dataset, "Dataset JSON or deterministic CSV")->required();
    c->add_option("--algo", cl.algo, "ucpc|ukmeans|mmvar|bukm")->capture_default_str();
    c->add_option("--k", cl.k, "Number of clusters")->capture_default_str();
    c->add_option("--seed", cl.seed, "Random seed")->capture_default_str();
    c->add_option("--restarts", cl.restarts, "Random restarts (best objective wins)")->capture_default_str();
    c->add_option("--max-sweeps", cl.max_sweeps, "Sweep limit per run")->capture_default_str();
    c->add_option("--mc-samples", cl.mc_samples, "Samples per object (bukm)")->capture_default_str();
    c->add_option("--threads", cl.threads, std::string("Restart threads (default from ") + kThreadsEnv + ")");
    c->add_option("-o,--output", cl.output, "Assignment JSON path")->capture_default_str();
    c->add_option("--manifest", cl.manifest, "Manifest path (default: <output>.manifest.json)");
    c->add_option("--labels", cl.labels, "CSV label column: auto|last|none")->capture_default_str();

    EvalOptions ev;
    auto* e = app.add_subcommand("eval", "Evaluate an assignment");
    e->add_option("dataset", ev.dataset, "Dataset JSON or deterministic CSV")->required();
    e->add_option("assignment", ev.assignment, "Assignment JSON")->required();
    e->add_option("--reference", ev.reference, "Reference labels as id,label lines (default: dataset labels)");
    e->add_option("--theta-against", ev.theta_against, "Assignment of the perturbed dataset, for theta");
    e->add_option("--csv", ev.csv_out, "Write the metrics CSV here");
    e->add_option("--json", ev.json_out, "Write the metrics JSON here");
    e->add_option("--name", ev.name, "Dataset name in the report");
    e->add_option("--labels", ev.labels, "CSV label column: auto|last|none")->capture_default_str();

    VerifyOptions vo;
    auto* v = app.add_subcommand("verify", "Run the closed-form verification suites");
    v->add_option("--suite", vo.suite, "identities|oracle|all")->capture_default_str();
    v->add_option("--samples", vo.samples, "Monte-Carlo samples per oracle check")->capture_default_str();
    v->add_option("--seed", vo.seed, "Random seed")->capture_default_str();
    v->add_flag("--inject-fault", vo.inject_fault)->group("");

    BenchOptions bo;
    auto* b = app.add_subcommand("bench", "Time clustering runs");
    b->add_option("dataset", bo.dataset, "Dataset JSON or deterministic CSV")->required();
    b->add_option("--algos", bo.algos, "Algorithms to time")->delimiter(',')->capture_default_str();
    b->add_option("--k", bo.k, "Number of clusters")->capture_default_str();
    b->add_option("--repeats", bo.repeats, "Repeats per algorithm (>= 3)")->capture_default_str();
    b->add_option("--seed", bo.seed, "Random seed")->capture_default_str();
    b->add_option("--max-sweeps", bo.max_sweeps, "Sweep limit per run")->capture_default_str();
    b->add_option("--mc-samples", bo.mc_samples, "Samples per object (bukm)")->capture_default_str();
    b->add_flag("--size-sweep", bo.size_sweep, "Time prefixes of 5%..100% of the dataset");
    b->add_option("-o,--output", bo.output, "Write the timing table here");
    b->add_option("--labels", bo.labels, "CSV label column: auto|last|none")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& pe) {
        const int code = app.exit(pe, out, err);
        return code == 0 ? ok : usage;
    }

    try {
        if (*g) return cmd_gen(gen, args, out);
        if (*c) return cmd_cluster(cl, args, out);
        if (*e) return cmd_eval(ev, args, out);
        if (*v) return cmd_verify(vo, out);
        if (*b) return cmd_bench(bo, out);
    } catch (const detail::UsageError& ex) {
        err << "usage error: " << ex.what() << "\n";
        return usage;
    } catch (const argument_error& ex) {
        err << "argument error: " << ex.what() << "\n";
        return usage;
    } catch (const data_error& ex) {
        err << "data error: " << ex.what() << "\n";
        return invalid_data;
    } catch (const degenerate_support_error& ex) {
        err << "data error: " << ex.what() << "\n";
        return invalid_data;
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << "\n";
        return invalid_data;
    }
    return usage;
}

} // namespace ucpc::cli
