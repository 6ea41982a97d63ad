#include "changeauc/cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>

#include "CLI11.hpp"

#include "changeauc/csv.hpp"
#include "changeauc/multi_cp.hpp"
#include "changeauc/parallel.hpp"
#include "changeauc/report.hpp"
#include "changeauc/rng.hpp"
#include "changeauc/version.hpp"

namespace changeauc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void write_output(const std::string& path, const json& doc) {
    std::string text = dump_report(doc);
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::io_error, "cannot open " + path + " for writing");
    out << text;
    if (!out) throw Error(ErrorCode::io_error, "write failed for " + path);
}

// Flags shared by everything that consults a null quantile table.
struct TableArgs {
    long knots = 10000;
    long reps = 50000;
    std::uint64_t seed = 2;  // default-scale tables at this seed match the reference quantiles
    bool full_scale = false;
    std::string cache_dir;

    long resolved_knots() const { return full_scale ? 100000 : knots; }
    long resolved_reps() const { return full_scale ? 100000 : reps; }

    void attach(CLI::App* cmd) {
        cmd->add_option("--knots", knots, "Brownian path knots K for the null table");
        cmd->add_option("--table-reps", reps, "Monte Carlo replications for the null table");
        cmd->add_option("--table-seed", seed, "seed for the null-table simulation");
        cmd->add_flag("--full-scale", full_scale, "use K = R = 1e5 for the null table");
        cmd->add_option("--cache-dir", cache_dir, "quantile table cache directory")
            ->envname("CHANGEAUC_CACHE_DIR");
    }

    json echo() const {
        json j;
        j["knots"] = resolved_knots();
        j["reps"] = resolved_reps();
        j["seed"] = seed;
        j["cache_dir"] = cache_dir;
        return j;
    }
};

struct ClassifierArgs {
    std::string name = "rf";
    LogisticL1Config logistic;
    ForestConfig forest;
    double lambda = -1.0;  // <0 means "use the data-driven default"

    void attach(CLI::App* cmd) {
        cmd->add_option("--classifier", name, "classifier: rf | logistic | constant")
            ->check(CLI::IsMember({"rf", "logistic", "constant"}));
        cmd->add_option("--lambda", lambda, "L1 penalty (default: 0.01 * lambda_max)");
        cmd->add_option("--max-iters", logistic.max_iters, "logistic solver iteration cap");
        cmd->add_option("--tol", logistic.tol, "logistic solver convergence tolerance");
        cmd->add_option("--n-trees", forest.n_trees, "number of trees in the forest");
        cmd->add_option("--min-leaf", forest.min_leaf, "minimum samples per leaf");
        cmd->add_option("--max-tree-depth", forest.max_depth, "tree depth cap (0 = unbounded)");
        cmd->add_option("--mtry", forest.mtry, "features tried per split (0 = floor(sqrt(p)))");
    }

    ClassifierKind kind() const { return classifier_kind_from_name(name); }

    ScanOptions scan_options(int threads) const {
        ScanOptions opts;
        opts.logistic = logistic;
        if (lambda >= 0.0) opts.logistic.lambda = lambda;
        opts.forest = forest;
        opts.threads = threads;
        return opts;
    }

    json echo() const {
        json j;
        j["classifier"] = name;
        json lg;
        if (lambda >= 0.0)
            lg["lambda"] = lambda;
        else
            lg["lambda"] = nullptr;
        lg["max_iters"] = logistic.max_iters;
        lg["tol"] = logistic.tol;
        j["logistic"] = std::move(lg);
        json rf;
        rf["n_trees"] = forest.n_trees;
        rf["max_depth"] = forest.max_depth;
        rf["min_leaf"] = forest.min_leaf;
        rf["mtry"] = forest.mtry;
        j["forest"] = std::move(rf);
        return j;
    }
};

// --seed is mandatory for every stochastic subcommand unless --no-seed asks
// for fresh entropy; either way the value used is echoed in the report.
struct SeedArgs {
    std::uint64_t seed = 0;
    bool no_seed = false;
    CLI::Option* seed_opt = nullptr;

    void attach(CLI::App* cmd) {
        seed_opt = cmd->add_option("--seed", seed, "root RNG seed");
        cmd->add_flag("--no-seed", no_seed, "draw the seed from system entropy");
    }

    std::uint64_t resolve() {
        if (no_seed && seed_opt->count())
            throw CLI::ValidationError("--seed and --no-seed are mutually exclusive");
        if (!no_seed && !seed_opt->count())
            throw CLI::ValidationError("--seed is required (or pass --no-seed for entropy)");
        if (no_seed) {
            std::random_device rd;
            seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
        }
        return seed;
    }
};

struct SingleArgs {
    std::string input;
    bool has_header = false;
    double alpha = 0.05;
    double epsilon = 0.15;
    double eta = 0.05;
    int threads = 0;
    std::string output = "-";
    std::string curve_path;
    SeedArgs seed;
    TableArgs table;
    ClassifierArgs classifier;

    void attach(CLI::App* cmd, bool cusum_mode) {
        cmd->add_option("--input", input, "input CSV, one observation per row")->required();
        cmd->add_flag("--has-header", has_header, "first CSV line is a header");
        cmd->add_option("--alpha", alpha, "test level");
        cmd->add_option("--epsilon", epsilon, "training fraction per endpoint");
        cmd->add_option("--eta", eta, "extra candidate trimming fraction");
        cmd->add_option("--threads", threads, "worker thread cap (0 = auto)");
        cmd->add_option("--output", output, "report destination ('-' = stdout)");
        cmd->add_option("--emit-curve", curve_path,
                        cusum_mode ? "also write the CUSUM curve as CSV"
                                   : "also write the AUC curve as CSV");
        seed.attach(cmd);
        table.attach(cmd);
        classifier.attach(cmd);
    }
};

int run_single(SingleArgs& a, bool cusum_mode) {
    auto start = Clock::now();
    CsvDataset data = load_csv(a.input, a.has_header);

    RunConfig cfg;
    cfg.alpha = a.alpha;
    cfg.seed = a.seed.resolve();
    cfg.classifier_kind = a.classifier.kind();
    cfg.epsilon = a.epsilon;
    cfg.eta = a.eta;

    int threads = resolve_threads(a.threads);
    NullQuantileTable table = load_or_build_table(
        cusum_mode ? TableKind::sup_h0 : TableKind::sup_g0, cfg.epsilon, cfg.eta,
        a.table.resolved_knots(), a.table.resolved_reps(), a.table.seed, a.table.cache_dir,
        threads);
    ScanOptions opts = a.classifier.scan_options(threads);

    SingleCpReport report = cusum_mode ? cusum_test(data.series, cfg, table, opts)
                                       : test_single(data.series, cfg, table, opts);

    if (!a.curve_path.empty()) {
        const auto& values = cusum_mode ? report.cusum_phi : report.curve.psi;
        std::vector<long> ks(values.size());
        for (std::size_t i = 0; i < ks.size(); ++i)
            ks[i] = report.curve.grid.lo + static_cast<long>(i);
        save_curve_csv(a.curve_path, ks, values);
    }

    json config;
    config["input"] = a.input;
    config["has_header"] = a.has_header;
    config["T"] = data.series.T();
    config["p"] = data.series.p();
    config["alpha"] = a.alpha;
    config["epsilon"] = a.epsilon;
    config["eta"] = a.eta;
    config["seed"] = cfg.seed;
    config.update(a.classifier.echo());
    config["table"] = a.table.echo();

    json timing;
    timing["seconds"] = seconds_since(start);
    write_output(a.output, make_envelope(cusum_mode ? "cusum" : "detect", std::move(config),
                                         to_json(report, false), std::move(timing)));
    return 0;
}

struct MultiArgs {
    std::string input;
    bool has_header = false;
    double epsilon = 0.15;
    double eta = 0.05;
    long B = 199;
    double threshold_quantile = 0.90;
    long min_len = kDefaultMinLen;
    double decay = kDefaultDecay;
    int threads = 0;
    std::string output = "-";
    SeedArgs seed;
    ClassifierArgs classifier;

    void attach(CLI::App* cmd) {
        cmd->add_option("--input", input, "input CSV, one observation per row")->required();
        cmd->add_flag("--has-header", has_header, "first CSV line is a header");
        cmd->add_option("--epsilon", epsilon, "training fraction per endpoint");
        cmd->add_option("--eta", eta, "extra candidate trimming fraction");
        cmd->add_option("--B", B, "permutation replications per segment");
        cmd->add_option("--threshold-quantile", threshold_quantile,
                        "permutation quantile for the detection threshold");
        cmd->add_option("--min-len", min_len, "shortest segment/interval still scanned");
        cmd->add_option("--decay", decay, "seeded-interval length decay per layer");
        cmd->add_option("--threads", threads, "worker thread cap (0 = auto)");
        cmd->add_option("--output", output, "report destination ('-' = stdout)");
        seed.attach(cmd);
        classifier.attach(cmd);
    }
};

int run_multi(MultiArgs& a) {
    auto start = Clock::now();
    CsvDataset data = load_csv(a.input, a.has_header);

    RunConfig cfg;
    cfg.seed = a.seed.resolve();
    cfg.classifier_kind = a.classifier.kind();
    cfg.epsilon = a.epsilon;
    cfg.eta = a.eta;

    PermutationConfig pcfg;
    pcfg.B = a.B;
    pcfg.threshold_quantile = a.threshold_quantile;
    pcfg.seed = cfg.seed;

    int threads = resolve_threads(a.threads);
    MultiCpReport report =
        detect_multiple(data.series, cfg, pcfg, a.min_len, a.decay,
                        a.classifier.scan_options(threads));

    json config;
    config["input"] = a.input;
    config["has_header"] = a.has_header;
    config["T"] = data.series.T();
    config["p"] = data.series.p();
    config["epsilon"] = a.epsilon;
    config["eta"] = a.eta;
    config["B"] = a.B;
    config["threshold_quantile"] = a.threshold_quantile;
    config["min_len"] = a.min_len;
    config["decay"] = a.decay;
    config["seed"] = cfg.seed;
    config.update(a.classifier.echo());

    json timing;
    timing["seconds"] = seconds_since(start);
    write_output(a.output, make_envelope("detect-multi", std::move(config), to_json(report),
                                         std::move(timing)));
    return 0;
}

struct QuantileArgs {
    std::string kind = "g0";
    double epsilon = 0.15;
    double eta = 0.05;
    long knots = 10000;
    long reps = 50000;
    bool full_scale = false;
    std::string cache_dir;
    int threads = 0;
    std::string output = "-";
    SeedArgs seed;

    void attach(CLI::App* cmd) {
        cmd->add_option("--kind", kind, "statistic: g0 (AUC) | h0 (CUSUM)")
            ->check(CLI::IsMember({"g0", "h0", "sup_g0", "sup_h0"}));
        cmd->add_option("--epsilon", epsilon, "training fraction per endpoint");
        cmd->add_option("--eta", eta, "extra candidate trimming fraction");
        cmd->add_option("--knots", knots, "Brownian path knots K");
        cmd->add_option("--reps", reps, "Monte Carlo replications R");
        cmd->add_flag("--full-scale", full_scale, "use K = R = 1e5");
        cmd->add_option("--cache-dir", cache_dir, "quantile table cache directory")
            ->envname("CHANGEAUC_CACHE_DIR");
        cmd->add_option("--threads", threads, "worker thread cap (0 = auto)");
        cmd->add_option("--output", output, "report destination ('-' = stdout)");
        seed.attach(cmd);
    }
};

int run_quantiles(QuantileArgs& a) {
    auto start = Clock::now();
    std::uint64_t seed = a.seed.resolve();
    long knots = a.full_scale ? 100000 : a.knots;
    long reps = a.full_scale ? 100000 : a.reps;
    NullQuantileTable table =
        load_or_build_table(table_kind_from_name(a.kind), a.epsilon, a.eta, knots, reps, seed,
                            a.cache_dir, resolve_threads(a.threads));

    json config;
    config["kind"] = table_kind_name(table.kind);
    config["epsilon"] = a.epsilon;
    config["eta"] = a.eta;
    config["knots"] = knots;
    config["reps"] = reps;
    config["seed"] = seed;
    config["cache_dir"] = a.cache_dir;

    json timing;
    timing["seconds"] = seconds_since(start);
    write_output(a.output, make_envelope("quantiles", std::move(config), to_json(table),
                                         std::move(timing)));
    return 0;
}

struct SimulateArgs {
    std::string dgp;
    long T = 0;
    long p = 0;
    long t0 = -1;
    std::string output_csv;
    std::string output = "-";
    SeedArgs seed;

    void attach(CLI::App* cmd) {
        cmd->add_option("--dgp", dgp, "generator name, e.g. standard_null, dense_mean")
            ->required();
        cmd->add_option("--T", T, "series length")->required();
        cmd->add_option("--p", p, "dimension")->required();
        cmd->add_option("--t0", t0, "change index (default: floor(T/2); change DGPs only)");
        cmd->add_option("--output-csv", output_csv, "where to write the generated series")
            ->required();
        cmd->add_option("--output", output, "report destination ('-' = stdout)");
        seed.attach(cmd);
    }
};

int run_simulate(SimulateArgs& a) {
    auto start = Clock::now();
    DgpSpec spec;
    spec.kind = dgp_kind_from_name(a.dgp);
    spec.T = a.T;
    spec.p = a.p;
    if (a.t0 >= 0) spec.t0 = a.t0;
    std::uint64_t seed = a.seed.resolve();

    Series series = generate(spec, seed);
    save_series_csv(a.output_csv, series);

    json config;
    config["dgp"] = dgp_kind_name(spec.kind);
    config["T"] = spec.T;
    config["p"] = spec.p;
    if (dgp_is_null(spec.kind))
        config["t0"] = nullptr;
    else
        config["t0"] = spec.resolved_t0();
    config["seed"] = seed;

    json result;
    result["output_csv"] = a.output_csv;
    result["rows"] = series.T();
    result["columns"] = series.p();

    json timing;
    timing["seconds"] = seconds_since(start);
    write_output(a.output, make_envelope("simulate", std::move(config), std::move(result),
                                         std::move(timing)));
    return 0;
}

struct BenchmarkArgs {
    std::string mode = "size";
    std::vector<std::string> dgps;
    std::vector<std::string> classifiers{"rf"};
    long T = 500;
    long p = 10;
    long t0 = -1;
    long reps = 100;
    double alpha = 0.05;
    double epsilon = 0.15;
    double eta = 0.05;
    int threads = 0;
    std::string per_rep_path;
    std::string output = "-";
    SeedArgs seed;
    TableArgs table;
    ClassifierArgs classifier_cfg;  // hyper-parameters shared across the list

    void attach(CLI::App* cmd) {
        cmd->add_option("--mode", mode, "size (null DGPs) or power (change DGPs)")
            ->check(CLI::IsMember({"size", "power"}));
        cmd->add_option("--dgp", dgps, "comma-separated generator names")
            ->required()
            ->delimiter(',');
        cmd->add_option("--classifiers", classifiers, "comma-separated classifier names")
            ->delimiter(',');
        cmd->add_option("--T", T, "series length");
        cmd->add_option("--p", p, "dimension");
        cmd->add_option("--t0", t0, "change index (power mode; default floor(T/2))");
        cmd->add_option("--reps", reps, "replications per (dgp, classifier) cell");
        cmd->add_option("--alpha", alpha, "test level");
        cmd->add_option("--epsilon", epsilon, "training fraction per endpoint");
        cmd->add_option("--eta", eta, "extra candidate trimming fraction");
        cmd->add_option("--threads", threads, "worker thread cap (0 = auto)");
        cmd->add_option("--per-rep", per_rep_path, "optional per-replication CSV");
        cmd->add_option("--output", output, "report destination ('-' = stdout)");
        seed.attach(cmd);
        table.attach(cmd);
        // hyper-parameter flags only; --classifiers picks the kinds
        cmd->add_option("--lambda", classifier_cfg.lambda,
                        "L1 penalty (default: 0.01 * lambda_max)");
        cmd->add_option("--max-iters", classifier_cfg.logistic.max_iters,
                        "logistic solver iteration cap");
        cmd->add_option("--tol", classifier_cfg.logistic.tol,
                        "logistic solver convergence tolerance");
        cmd->add_option("--n-trees", classifier_cfg.forest.n_trees,
                        "number of trees in the forest");
        cmd->add_option("--min-leaf", classifier_cfg.forest.min_leaf,
                        "minimum samples per leaf");
        cmd->add_option("--max-tree-depth", classifier_cfg.forest.max_depth,
                        "tree depth cap (0 = unbounded)");
        cmd->add_option("--mtry", classifier_cfg.forest.mtry,
                        "features tried per split (0 = floor(sqrt(p)))");
    }
};

int run_benchmark(BenchmarkArgs& a) {
    auto start = Clock::now();
    const bool power = a.mode == "power";
    std::uint64_t root_seed = a.seed.resolve();
    int threads = resolve_threads(a.threads);

    NullQuantileTable table = load_or_build_table(
        TableKind::sup_g0, a.epsilon, a.eta, a.table.resolved_knots(), a.table.resolved_reps(),
        a.table.seed, a.table.cache_dir, threads);

    std::ofstream per_rep;
    if (!a.per_rep_path.empty()) {
        per_rep.open(a.per_rep_path);
        if (!per_rep)
            throw Error(ErrorCode::io_error, "cannot open " + a.per_rep_path + " for writing");
        per_rep << (power ? "dgp,classifier,rep,rejected,ari,abs_localization_error,seconds\n"
                          : "dgp,classifier,rep,rejected,seconds\n");
    }

    json cells = json::array();
    for (std::size_t di = 0; di < a.dgps.size(); ++di) {
        DgpSpec spec;
        spec.kind = dgp_kind_from_name(a.dgps[di]);
        spec.T = a.T;
        spec.p = a.p;
        if (a.t0 >= 0) spec.t0 = a.t0;

        // One seed per DGP, shared across classifiers: every classifier sees
        // the same simulated draws, so cells in a row are paired.
        std::uint64_t cell_seed = child_seed(root_seed, static_cast<std::uint64_t>(di));

        for (const auto& clf : a.classifiers) {
            RunConfig cfg;
            cfg.alpha = a.alpha;
            cfg.seed = cell_seed;
            cfg.classifier_kind = classifier_kind_from_name(clf);
            cfg.epsilon = a.epsilon;
            cfg.eta = a.eta;

            ScanOptions opts = a.classifier_cfg.scan_options(1);
            ExperimentResult res =
                power ? run_power_experiment(spec, cfg, a.reps, table, opts, threads)
                      : run_size_experiment(spec, cfg, a.reps, table, opts, threads);

            json cell;
            cell["dgp"] = dgp_kind_name(spec.kind);
            cell["classifier"] = clf;
            cell["seed"] = cell_seed;
            cell.update(to_json(res));
            if (power) {
                cell.erase("ari");
                cell.erase("abs_localization_error");
            }
            cells.push_back(std::move(cell));

            if (per_rep.is_open()) {
                for (long rep = 0; rep < res.rep_count; ++rep) {
                    per_rep << dgp_kind_name(spec.kind) << ',' << clf << ',' << rep + 1 << ','
                            << res.rejected[rep];
                    if (power)
                        per_rep << ',' << res.ari_samples[rep] << ','
                                << res.localization_errors[rep];
                    per_rep << ',' << res.runtimes[rep] << '\n';
                }
            }
        }
    }

    json config;
    config["mode"] = a.mode;
    config["dgps"] = a.dgps;
    config["classifiers"] = a.classifiers;
    config["T"] = a.T;
    config["p"] = a.p;
    if (power) config["t0"] = a.t0 >= 0 ? json(a.t0) : json(nullptr);
    config["reps"] = a.reps;
    config["alpha"] = a.alpha;
    config["epsilon"] = a.epsilon;
    config["eta"] = a.eta;
    config["seed"] = root_seed;
    config["table"] = a.table.echo();
    config.update(a.classifier_cfg.echo());
    config.erase("classifier");

    json result;
    result["cells"] = std::move(cells);

    json timing;
    timing["seconds"] = seconds_since(start);
    write_output(a.output, make_envelope("benchmark", std::move(config), std::move(result),
                                         std::move(timing)));
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"classifier-AUC offline change-point detection"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    SingleArgs detect_args;
    detect_args.attach(app.add_subcommand("detect", "single change-point AUC test"), false);

    SingleArgs cusum_args;
    cusum_args.attach(app.add_subcommand("cusum", "score-CUSUM baseline test"), true);

    MultiArgs multi_args;
    multi_args.attach(
        app.add_subcommand("detect-multi", "seeded binary segmentation for multiple changes"));

    QuantileArgs quantile_args;
    quantile_args.attach(
        app.add_subcommand("quantiles", "tabulate the null distribution by Monte Carlo"));

    SimulateArgs simulate_args;
    simulate_args.attach(app.add_subcommand("simulate", "generate a benchmark series as CSV"));

    BenchmarkArgs benchmark_args;
    benchmark_args.attach(
        app.add_subcommand("benchmark", "size/power study over simulated series"));

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);

        if (app.got_subcommand("detect")) return run_single(detect_args, false);
        if (app.got_subcommand("cusum")) return run_single(cusum_args, true);
        if (app.got_subcommand("detect-multi")) return run_multi(multi_args);
        if (app.got_subcommand("quantiles")) return run_quantiles(quantile_args);
        if (app.got_subcommand("simulate")) return run_simulate(simulate_args);
        if (app.got_subcommand("benchmark")) return run_benchmark(benchmark_args);
        return 1;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            // --help / --version travel through the exception path
            return app.exit(e);
        }
        std::cerr << "usage error: " << e.what() << "\n\n" << app.help() << std::flush;
        return 1;
    } catch (const Error& e) {
        std::cerr << "error [" << error_code_name(e.code()) << "]: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace changeauc
