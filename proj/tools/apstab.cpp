// apstab: command-line front end for clustering runs, stability reports,
// benchmark tables and the synthetic property suites.
//
// Exit codes: 0 success, 2 invalid input or run error, 3 missing dataset,
// 4 property failure.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "apstab/apstab.hpp"

#ifndef APSTAB_VERSION
#define APSTAB_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace apstab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitMissingDataset = 3;
constexpr int kExitPropertyFailure = 4;
constexpr int kSchemaVersion = 1;

struct Common {
    std::optional<std::string> config_path;
    std::vector<std::string> settings; // key=value
    std::optional<std::size_t> threads;
    std::string out_dir;
    std::string log_level = "warn";
};

struct DatasetArgs {
    std::string dataset;
    bool normalize = false;
    std::string data_dir;
    long label_column = -1;
    bool header = false;
    bool unlabeled = false;
};

Config resolve_config(const Common& c, const std::map<std::string, std::string>& extra = {}) {
    std::map<std::string, std::string> overrides;
    for (const auto& s : c.settings) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw Error(ErrorKind::ConfigParseError, "--set expects key=value, got '" + s + "'");
        overrides[detail::trim(s.substr(0, eq))] = detail::trim(s.substr(eq + 1));
    }
    for (const auto& [k, v] : extra) overrides[k] = v;
    if (c.threads) overrides["thread_width"] = std::to_string(*c.threads);
    return load_config(c.config_path ? std::optional<fs::path>(*c.config_path) : std::nullopt, overrides);
}

void apply_log_level(const std::string& level) {
    static const std::map<std::string, LogLevel> levels = {
        {"debug", LogLevel::Debug}, {"info", LogLevel::Info}, {"warn", LogLevel::Warn},
        {"error", LogLevel::Error}, {"off", LogLevel::Off}};
    logger().set_level(levels.at(level));
}

bool is_registered(const std::string& name) {
    for (const auto& s : dataset_registry())
        if (s.name == name) return true;
    return false;
}

Instance load_dataset(const DatasetArgs& a) {
    const fs::path dir = a.data_dir.empty() ? data_dir() : fs::path(a.data_dir);
    if (is_registered(a.dataset)) return load_variant(a.dataset, a.normalize, dir);
    if (!fs::exists(a.dataset))
        throw Error(ErrorKind::MissingDataset, "'" + a.dataset + "' is neither a registered dataset nor a file");
    CsvOptions opt;
    opt.has_header = a.header;
    if (!a.unlabeled) opt.label_column = a.label_column;
    Instance inst = load_csv(a.dataset, opt);
    inst.name = fs::path(a.dataset).stem().string();
    if (!a.normalize) return inst;
    return normalize_unit_range(inst);
}

json config_json(const Config& cfg) {
    json j = json::object();
    for (const auto& [k, v] : config_values(cfg)) j[k] = v;
    return j;
}

json summary_json(const EpsSummary& s) { return {{"min", s.min}, {"avg", s.avg}, {"max", s.max}}; }

json base_report(const std::string& command, const std::vector<std::string>& argv, const Config& cfg) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["tool"] = "apstab";
    j["tool_version"] = APSTAB_VERSION;
    j["command"] = command;
    // The output directory is not an input; leaving it out keeps reports
    // from identical runs byte-identical wherever they are written.
    json args = json::array();
    for (std::size_t i = 0; i < argv.size(); ++i) {
        if (argv[i] == "--out-dir") {
            ++i;
            continue;
        }
        if (argv[i].rfind("--out-dir=", 0) == 0) continue;
        args.push_back(argv[i]);
    }
    j["argv"] = args;
    j["config"] = config_json(cfg);
    return j;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
    out << text;
}

std::string iso_timestamp() {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

// report.json is deterministic; wall times and the timestamp go to timing.json.
void emit(const std::string& out_dir, const json& report, const json& timing) {
    if (out_dir.empty()) return;
    fs::create_directories(out_dir);
    write_text(fs::path(out_dir) / "report.json", report.dump(2) + "\n");
    json t = timing;
    t["schema_version"] = kSchemaVersion;
    t["timestamp"] = iso_timestamp();
    write_text(fs::path(out_dir) / "timing.json", t.dump(2) + "\n");
}

void write_matrix_csv(const fs::path& path, const Matrix& m) {
    std::ostringstream s;
    s << std::setprecision(17);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) s << (c ? "," : "") << m(r, c);
        s << '\n';
    }
    write_text(path, s.str());
}

void write_assignment_csv(const fs::path& path, const Assignment& a) {
    std::ostringstream s;
    s << "point,cluster\n";
    for (std::size_t p = 0; p < a.size(); ++p) s << p << ',' << a[p] << '\n';
    write_text(path, s.str());
}

Assignment read_assignment_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
    std::string line;
    Assignment a;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = detail::trim(line);
        if (line.empty() || line_no == 1) continue;
        const auto comma = line.find(',');
        try {
            const auto p = std::stoul(line.substr(0, comma));
            if (p != a.size()) throw Error(ErrorKind::ParseError, "points out of order");
            a.push_back(std::stoi(line.substr(comma + 1)));
        } catch (const std::logic_error&) {
            throw Error(ErrorKind::ParseError, path.string() + ":" + std::to_string(line_no) + ": bad assignment row");
        }
    }
    return a;
}

// ---------------------------------------------------------------- cluster

struct ClusterArgs {
    DatasetArgs data;
    Common common;
    std::optional<std::size_t> k;
    std::string algo = "stable";
    std::uint64_t seed = 1;
    std::size_t trials = 1;
    std::optional<std::size_t> budget;
    std::optional<double> r, t;
};

struct ClusterOutcome {
    Clustering clustering; // assignment, centers such that the reported cost is recomputable
    double cost = 0.0;
    json extra = json::object();
};

ClusterOutcome run_algorithm(const Instance& inst, std::size_t k, const ClusterArgs& a, const Config& cfg) {
    ClusterOutcome out;
    if (a.algo == "stable") {
        if (a.r) {
            const auto seeds = initialize(components_at(inst, *a.r), k);
            if (!seeds) throw Error(ErrorKind::Insufficient, "fewer than k components at r=" + std::to_string(*a.r));
            out.clustering = partition_clustering(inst, assign(inst, *seeds), k);
            out.extra["threshold"] = *a.r;
        } else {
            const StableResult res = cluster_detailed(inst, k, {cfg.sweep_memory_mode});
            out.clustering = res.clustering;
            out.extra["threshold"] = res.threshold;
            out.extra["events_evaluated"] = res.events_evaluated;
        }
    } else if (a.algo == "robust") {
        RobustResult res;
        if (a.r && a.t) res = robust_cluster_detailed(inst, k, *a.r, *a.t);
        else if (a.r || a.t) throw Error(ErrorKind::InvalidArgument, "robust needs both --r and --t, or neither");
        else res = robust_cluster_search(inst, k, {cfg.t_grid_policy, cfg.sweep_memory_mode});
        out.clustering = res.clustering;
        out.extra["r"] = res.r;
        out.extra["t"] = res.t;
        out.extra["survivors"] = res.survivors.size();
    } else if (a.algo == "lloyd") {
        if (!inst.labels) throw Error(ErrorKind::MissingLabels, "lloyd starts from the label centroids; the data has no labels");
        if (k != inst.label_count())
            throw Error(ErrorKind::InvalidArgument, "lloyd uses one center per label; --k must equal the label count");
        out.clustering = ground_truth_lloyd(inst, cfg.lloyd_tol, cfg.lloyd_max_iter);
        out.extra["init"] = "ground-truth centroids";
    } else if (a.algo == "kmeanspp_lloyd") {
        const auto runs = parallel_map(a.trials, cfg.thread_width,
                                       [&](std::size_t t) { return kmeanspp_lloyd_run(inst, k, a.seed + t, cfg); });
        std::vector<double> costs;
        std::size_t best = 0;
        for (std::size_t t = 0; t < runs.size(); ++t) {
            costs.push_back(runs[t].cost);
            if (runs[t].cost < runs[best].cost) best = t;
        }
        out.clustering = runs[best];
        out.extra["trial_costs"] = costs;
        out.extra["best_trial"] = best;
        out.extra["best_seed"] = a.seed + best;
    } else if (a.algo == "kmeanspp") {
        const TrialSummary s = kmeanspp_init_trials(inst, k, a.trials, a.seed, cfg.thread_width);
        const Matrix centers = kmeanspp_init(inst, k, a.seed + s.best_trial);
        out.clustering.assignment = assign(inst, centers);
        out.clustering.centers = centers;
        out.clustering.k = k;
        out.clustering.cost = cost(inst, centers);
        out.extra["trial_costs"] = s.costs;
        out.extra["best_trial"] = s.best_trial;
        out.extra["best_seed"] = a.seed + s.best_trial;
    } else if (a.algo == "two_means") {
        if (k != 2) throw Error(ErrorKind::InvalidArgument, "two_means needs k = 2");
        CandidateBudget budget;
        budget.max_multiset_size = a.budget.value_or(cfg.perceptron_budget);
        budget.dedup_cosine = cfg.dedup_cosine;
        Cluster2Stats stats;
        out.clustering = cluster2(inst, budget, &stats);
        out.extra["budget"] = budget.max_multiset_size;
        out.extra["pairs_tried"] = stats.pairs_tried;
        out.extra["partitions_scored"] = stats.partitions_scored;
    } else {
        throw Error(ErrorKind::InvalidArgument, "unknown algorithm '" + a.algo + "'");
    }
    out.cost = out.clustering.cost;
    return out;
}

int cmd_cluster(const ClusterArgs& a, const std::vector<std::string>& argv) {
    const Config cfg = resolve_config(a.common);
    const Instance inst = load_dataset(a.data);
    std::size_t k = a.k.value_or(inst.label_count());
    if (k == 0) throw Error(ErrorKind::InvalidArgument, "--k is required for unlabeled data");

    const auto t0 = std::chrono::steady_clock::now();
    const ClusterOutcome res = run_algorithm(inst, k, a, cfg);
    const double ms = elapsed_ms(t0);

    json row;
    row["dataset"] = inst.name;
    row["n"] = inst.n();
    row["d"] = inst.d();
    row["k"] = k;
    row["algorithm"] = a.algo;
    row["cost"] = res.cost;
    std::optional<double> recovery;
    if (inst.labels && inst.label_count() == k) {
        recovery = recovery_score(res.clustering, ground_truth_lloyd(inst, cfg.lloyd_tol, cfg.lloyd_max_iter));
        row["recovery"] = *recovery;
    } else {
        row["recovery"] = nullptr;
    }
    row["details"] = res.extra;

    json report = base_report("cluster", argv, cfg);
    report["seed"] = a.seed;
    report["trials"] = a.trials;
    report["rows"] = json::array({row});
    report["files"] = {{"assignment", "assignment.csv"}, {"centers", "centers.csv"}};
    emit(a.common.out_dir, report, {{"wall_time_ms", {{inst.name + "/" + a.algo, ms}}}});
    if (!a.common.out_dir.empty()) {
        write_assignment_csv(fs::path(a.common.out_dir) / "assignment.csv", res.clustering.assignment);
        write_matrix_csv(fs::path(a.common.out_dir) / "centers.csv", res.clustering.centers);
    }

    std::cout << std::left << std::setw(16) << "dataset" << std::setw(16) << "algorithm" << std::setw(6) << "k"
              << std::setw(18) << "cost" << std::setw(10) << "recovery" << "time_ms\n";
    std::cout << std::setw(16) << inst.name << std::setw(16) << a.algo << std::setw(6) << k << std::setw(18)
              << std::setprecision(10) << res.cost << std::setw(10) << std::setprecision(4)
              << (recovery ? std::to_string(*recovery) : "-") << std::setprecision(6) << ms << "\n";
    return kExitOk;
}

// -------------------------------------------------------------- stability

struct StabilityArgs {
    DatasetArgs data;
    Common common;
    std::vector<double> etas{std::begin(kTableEtas), std::end(kTableEtas)};
    std::vector<double> epss{std::begin(kTableEpss), std::end(kTableEpss)};
    std::string margin = "signed";
    std::string reference = "converged";
};

json stability_json(const StabilityRow& row) {
    json j;
    j["dataset"] = row.dataset;
    j["eps"] = summary_json(row.eps);
    j["separation"] = json::array();
    for (const auto& c : row.cells) {
        json cell = {{"eta", c.eta}, {"eps", c.eps}, {"undefined_pairs", c.undefined_pairs}};
        cell["rho_over_delta"] = c.rho_over_delta ? summary_json(*c.rho_over_delta) : json(nullptr);
        j["separation"].push_back(cell);
    }
    return j;
}

void print_stability(const StabilityRow& row) {
    std::cout << row.dataset << "  eps min/avg/max: " << std::setprecision(4) << row.eps.min << " " << row.eps.avg
              << " " << row.eps.max << "\n";
    std::cout << "  eta     eps     rho/Delta min/avg/max\n";
    for (const auto& c : row.cells) {
        std::cout << "  " << std::left << std::setw(8) << c.eta << std::setw(8) << c.eps;
        if (c.rho_over_delta)
            std::cout << c.rho_over_delta->min << " " << c.rho_over_delta->avg << " " << c.rho_over_delta->max;
        else
            std::cout << "undefined (" << c.undefined_pairs << " pair(s))";
        std::cout << "\n";
    }
}

int cmd_stability(const StabilityArgs& a, const std::vector<std::string>& argv) {
    const Config cfg = resolve_config(a.common);
    const Instance inst = load_dataset(a.data);
    if (!inst.labels) throw Error(ErrorKind::MissingLabels, "stability needs a labeled dataset");
    const MarginMode mode = a.margin == "unsigned" ? MarginMode::Unsigned : MarginMode::Signed;
    const Clustering ref = a.reference == "center-shift" ? diagnostic_reference(inst)
                                                         : ground_truth_lloyd(inst, cfg.lloyd_tol, cfg.lloyd_max_iter);
    const StabilityRow row = stability_row(ref, inst, a.etas, a.epss, mode);
    json report = base_report("stability", argv, cfg);
    report["reference"] = a.reference;
    report["margin"] = a.margin;
    report["reference_cost"] = ref.cost;
    report["beta"] = balance(ref);
    report["rows"] = json::array({stability_json(row)});
    emit(a.common.out_dir, report, json::object());
    print_stability(row);
    return kExitOk;
}

// ------------------------------------------------------------------ bench

struct BenchArgs {
    Common common;
    std::uint64_t seed = 1;
    std::vector<std::string> only;
    std::string data_dir;
};

int cmd_bench(const BenchArgs& a, const std::vector<std::string>& argv) {
    const Config cfg = resolve_config(a.common);
    const fs::path dir = a.data_dir.empty() ? data_dir() : fs::path(a.data_dir);
    std::vector<std::string> names;
    for (const auto& s : dataset_registry())
        if (a.only.empty() || std::find(a.only.begin(), a.only.end(), s.name) != a.only.end()) names.push_back(s.name);
    for (const auto& n : a.only)
        if (!is_registered(n)) throw Error(ErrorKind::InvalidArgument, "unknown dataset '" + n + "'");

    std::vector<std::string> missing;
    for (const auto& n : names)
        if (!fs::exists(dir / dataset_spec(n).file_name)) missing.push_back((dir / dataset_spec(n).file_name).string());
    if (!missing.empty()) {
        std::string msg = "missing dataset files:";
        for (const auto& m : missing) msg += "\n  " + m;
        throw Error(ErrorKind::MissingDataset, msg);
    }

    json report = base_report("bench", argv, cfg);
    report["seed"] = a.seed;
    report["costs"] = json::array();
    report["stability"] = json::array();
    json timing = {{"wall_time_ms", json::object()}};
    std::cout << std::left << std::setw(14) << "dataset" << std::setw(14) << "stable" << std::setw(14) << "kmeans++"
              << std::setw(14) << "stable+lloyd" << std::setw(14) << "kmeans++lloyd" << std::setw(10) << "recovery"
              << "stable_ms\n";
    std::vector<StabilityRow> stab;
    for (const auto& n : names)
        for (bool norm : {false, true}) {
            const Instance inst = load_variant(n, norm, dir);
            const CostRow r = cost_row(inst, cfg, a.seed);
            report["costs"].push_back({{"dataset", r.dataset}, {"n", r.n}, {"k", r.k}, {"d", r.d},
                                       {"stable", r.stable}, {"kmeanspp_init", r.kpp_init},
                                       {"stable_lloyd", r.stable_lloyd}, {"kmeanspp_lloyd", r.kpp_lloyd},
                                       {"ground_truth_lloyd", r.gt_lloyd}, {"recovery", r.recovery},
                                       {"events_evaluated", r.events_evaluated}});
            timing["wall_time_ms"][r.dataset + "/stable"] = r.stable_ms;
            if (r.dataset.rfind("letter", 0) == 0 ? r.stable_ms > cfg.letter_seconds * 1e3
                                                   : r.stable_ms > cfg.small_dataset_seconds * 1e3)
                logger().warn("time_ceiling_exceeded", {{"dataset", r.dataset}, {"ms", std::to_string(r.stable_ms)}});
            std::cout << std::setw(14) << r.dataset << std::setprecision(6) << std::setw(14) << r.stable << std::setw(14)
                      << r.kpp_init << std::setw(14) << r.stable_lloyd << std::setw(14) << r.kpp_lloyd << std::setw(10)
                      << std::setprecision(4) << r.recovery << std::setprecision(6) << r.stable_ms << "\n";
            stab.push_back(stability_row(ground_truth_lloyd(inst, cfg.lloyd_tol, cfg.lloyd_max_iter), inst));
            report["stability"].push_back(stability_json(stab.back()));
        }
    std::cout << "\n";
    for (const auto& s : stab) print_stability(s);
    emit(a.common.out_dir, report, timing);
    return kExitOk;
}

// ------------------------------------------------------------------ synth

struct SynthArgs {
    Common common;
    std::string suite;
    std::size_t seeds = 100;
    std::uint64_t seed = 1;
};

int cmd_synth(const SynthArgs& a, const std::vector<std::string>& argv) {
    const Config cfg = resolve_config(a.common);
    const auto t0 = std::chrono::steady_clock::now();
    const auto reports = run_suite(a.suite, a.seeds, a.seed, cfg.thread_width);
    const double ms = elapsed_ms(t0);
    json report = base_report("synth", argv, cfg);
    report["suite"] = a.suite;
    report["base_seed"] = a.seed;
    report["parts"] = json::array();
    bool ok = true;
    for (const auto& r : reports) {
        json part = {{"name", r.name}, {"cases", r.cases.size()}, {"passed", r.passed()}, {"failures", json::array()}};
        for (const auto& c : r.cases)
            if (!c.passed) part["failures"].push_back({{"index", c.index}, {"seed", c.seed}, {"detail", c.detail}});
        report["parts"].push_back(part);
        ok = ok && r.ok();
        std::cout << (r.ok() ? "PASS " : "FAIL ") << r.name << " " << r.passed() << "/" << r.cases.size() << "\n";
        for (const auto& c : r.cases)
            if (!c.passed) std::cout << "  seed " << c.seed << " (case " << c.index << "): " << c.detail << "\n";
    }
    emit(a.common.out_dir, report, {{"wall_time_ms", {{a.suite, ms}}}});
    return ok ? kExitOk : kExitPropertyFailure;
}

// ----------------------------------------------------------------- recost

struct RecostArgs {
    DatasetArgs data;
    std::string assignment;
    std::string centers;
};

int cmd_recost(const RecostArgs& a) {
    const Instance inst = load_dataset(a.data);
    const Assignment asg = read_assignment_csv(a.assignment);
    if (asg.size() != inst.n()) throw Error(ErrorKind::SizeMismatch, "assignment length differs from n");
    int hi = -1;
    for (int l : asg) hi = std::max(hi, l);
    const auto k = static_cast<std::size_t>(hi + 1);
    double c = 0.0;
    if (a.centers.empty()) {
        c = partition_cost(inst, asg, k);
    } else {
        CsvOptions opt;
        Instance centers = load_csv(a.centers, opt);
        c = assignment_cost(inst, asg, centers.points);
    }
    std::cout << std::setprecision(17) << c << "\n";
    return kExitOk;
}

void add_dataset_options(CLI::App* app, DatasetArgs& d) {
    app->add_option("--dataset", d.dataset, "registered name (wine, iris, banknote, letter) or CSV path")->required();
    app->add_flag("--normalize", d.normalize, "scale every feature to [0, 1]");
    app->add_option("--data-dir", d.data_dir, std::string("dataset directory (default $") + kDataDirEnv + ")");
    app->add_option("--label-column", d.label_column, "label column of a CSV path; negative counts from the end");
    app->add_flag("--header", d.header, "CSV path has a header row");
    app->add_flag("--unlabeled", d.unlabeled, "CSV path has no label column");
}

void add_common_options(CLI::App* app, Common& c) {
    app->add_option("--config", c.config_path, "key = value config file");
    app->add_option("--set", c.settings, "config override key=value (repeatable)");
    app->add_option("--threads", c.threads, "worker pool width");
    app->add_option("--out-dir", c.out_dir, "write report.json, timing.json and data files here");
    app->add_option("--log-level", c.log_level, "debug, info, warn, error or off")
        ->check(CLI::IsMember({"debug", "info", "warn", "error", "off"}));
}

} // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    args.erase(args.begin());

    CLI::App app{"Clustering of perturbation-stable instances"};
    app.require_subcommand(1);
    app.set_version_flag("--version", APSTAB_VERSION);

    ClusterArgs cluster_args;
    auto* cluster = app.add_subcommand("cluster", "run one clustering algorithm on a dataset");
    add_dataset_options(cluster, cluster_args.data);
    add_common_options(cluster, cluster_args.common);
    cluster->add_option("--k", cluster_args.k, "number of clusters (default: label count)");
    cluster->add_option("--algo", cluster_args.algo, "algorithm")
        ->check(CLI::IsMember({"stable", "robust", "lloyd", "kmeanspp_lloyd", "kmeanspp", "two_means"}));
    cluster->add_option("--seed", cluster_args.seed, "base seed; trial t uses seed + t");
    cluster->add_option("--trials", cluster_args.trials, "independent runs for randomized algorithms")
        ->check(CLI::PositiveNumber);
    cluster->add_option("--budget", cluster_args.budget, "two_means multiset size")->check(CLI::PositiveNumber);
    cluster->add_option("--r", cluster_args.r, "fixed distance threshold (stable, robust)");
    cluster->add_option("--t", cluster_args.t, "fixed degree threshold (robust)");

    StabilityArgs stab_args;
    auto* stability = app.add_subcommand("stability", "eps and (rho/Delta) profile of the ground-truth Lloyd clustering");
    add_dataset_options(stability, stab_args.data);
    add_common_options(stability, stab_args.common);
    stability->add_option("--eta", stab_args.etas, "trimming fractions")->delimiter(',');
    stability->add_option("--eps", stab_args.epss, "cone parameters")->delimiter(',');
    stability->add_option("--margin", stab_args.margin, "signed or unsigned margin")
        ->check(CLI::IsMember({"signed", "unsigned"}));
    stability->add_option("--reference", stab_args.reference, "converged or center-shift reference clustering")
        ->check(CLI::IsMember({"converged", "center-shift"}));

    BenchArgs bench_args;
    auto* bench = app.add_subcommand("bench", "cost, eps and separation tables over the registered datasets");
    add_common_options(bench, bench_args.common);
    bench->add_option("--seed", bench_args.seed, "base seed for k-means++ trials");
    bench->add_option("--only", bench_args.only, "restrict to these datasets")->delimiter(',');
    bench->add_option("--data-dir", bench_args.data_dir, "dataset directory");

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "run a synthetic property suite");
    add_common_options(synth, synth_args.common);
    synth->add_option("--suite", synth_args.suite, "theorem51, robust_theorem, perceptron, lemma34 or aps_check")
        ->required();
    synth->add_option("--seeds", synth_args.seeds, "cases per suite part");
    synth->add_option("--seed", synth_args.seed, "base seed; case i uses seed + i");

    RecostArgs recost_args;
    auto* recost = app.add_subcommand("recost", "recompute the cost of an assignment file");
    add_dataset_options(recost, recost_args.data);
    recost->add_option("--assignment", recost_args.assignment, "assignment.csv")->required();
    recost->add_option("--centers", recost_args.centers, "centers.csv (default: centroids of the assignment)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    try {
        if (*cluster) {
            apply_log_level(cluster_args.common.log_level);
            return cmd_cluster(cluster_args, args);
        }
        if (*stability) {
            apply_log_level(stab_args.common.log_level);
            return cmd_stability(stab_args, args);
        }
        if (*bench) {
            apply_log_level(bench_args.common.log_level);
            return cmd_bench(bench_args, args);
        }
        if (*synth) {
            apply_log_level(synth_args.common.log_level);
            return cmd_synth(synth_args, args);
        }
        if (*recost) return cmd_recost(recost_args);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.kind() == ErrorKind::MissingDataset ? kExitMissingDataset : kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
    return kExitInvalid;
}
