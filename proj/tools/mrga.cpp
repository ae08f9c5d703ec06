// Command-line harness: population generation, single jobs, sweeps, the
// single-process baseline and CSV/plot-data reporting.
//
// Exit codes: 0 success, 1 I/O or data error, 2 usage/config error,
// 3 resource limit exceeded.

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mrga/mrga.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;
constexpr int kExitResourceLimit = 3;

struct GenpopArgs {
    std::uint64_t count = 0;
    std::uint32_t dim = 300;
    std::vector<double> bounds = {-100.0, 100.0};
    std::uint64_t seed = 1;
    std::string out;
    std::uint64_t block_size = mrga::kDefaultBlockSizeBytes;
};

struct RunArgs {
    std::string in;
    std::string mode = "basic";
    std::string objective = "sphere";
    double elite_rate = 0.01;
    std::uint32_t iters = 1000;
    double mutation_rate = 0.01;
    double crossover_rate = 0.8;
    double keep_fraction = 0.5;
    std::uint64_t seed = 1;
    unsigned parallelism = mrga::default_parallelism();
    std::uint64_t block_size = mrga::kDefaultBlockSizeBytes;
    std::string csv;
};

struct SweepArgs {
    std::vector<std::uint64_t> sizes;
    std::vector<std::string> modes = {"basic", "elite"};
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    std::uint32_t dim = 300;
    std::vector<double> bounds = {-100.0, 100.0};
    std::string objective = "sphere";
    double elite_rate = 0.01;
    std::uint32_t iters = 1000;
    double mutation_rate = 0.01;
    double crossover_rate = 0.8;
    double keep_fraction = 0.5;
    unsigned parallelism = mrga::default_parallelism();
    std::uint64_t block_size = mrga::kDefaultBlockSizeBytes;
    std::string csv;
    std::string workdir = "mrga_sweep_work";
};

struct BaselineArgs {
    std::uint64_t count = 0;
    std::uint32_t dim = 300;
    std::vector<double> bounds = {-100.0, 100.0};
    std::uint32_t iters = 1000;
    double mutation_rate = 0.01;
    double crossover_rate = 0.8;
    double keep_fraction = 0.5;
    std::string objective = "sphere";
    std::uint64_t seed = 1;
    std::optional<std::uint64_t> mem_limit;
};

struct ReportArgs {
    std::string csv;
    std::string out_prefix;
};

void add_ga_flags(CLI::App* cmd, std::uint32_t& iters, double& mutation, double& crossover,
                  double& keep) {
    cmd->add_option("--iters", iters, "GA iterations per phase")->check(CLI::Range(1u, 1000000u));
    cmd->add_option("--mutation-rate", mutation, "per-gene mutation probability");
    cmd->add_option("--crossover-rate", crossover, "per-pair crossover probability");
    cmd->add_option("--keep-fraction", keep, "top fraction surviving each generation");
}

void append_csv_row(const std::string& path, const mrga::ExperimentRow& row) {
    const bool fresh = !fs::exists(path) || fs::file_size(path) == 0;
    std::ofstream out(path, std::ios::app);
    if (!out) throw mrga::IoError("cannot open csv for append: " + path);
    if (fresh) out << mrga::kCsvHeader << '\n';
    out << mrga::to_csv_line(row) << '\n';
    out.flush();
    if (!out) throw mrga::IoError("write failed: " + path);
}

int cmd_genpop(const GenpopArgs& args) {
    mrga::ObjectiveSpec spec{"sphere", args.dim, args.bounds[0], args.bounds[1]};
    const auto header = mrga::generate_population_file(args.out, args.count, spec, args.seed);
    const auto manifest = mrga::split_into_blocks(header, args.block_size);
    const std::string manifest_path = args.out + ".manifest";
    mrga::write_manifest_sidecar(manifest_path, manifest);

    std::printf("path=%s\n", args.out.c_str());
    std::printf("count=%" PRIu64 "\n", header.chromosome_count);
    std::printf("dimension=%u\n", header.dimension);
    std::printf("bounds=[%g,%g]\n", header.lower_bound, header.upper_bound);
    std::printf("seed=%" PRIu64 "\n", header.generator_seed);
    std::printf("record_bytes=%" PRIu64 "\n", mrga::record_size_bytes(header.dimension));
    std::printf("file_bytes=%" PRIu64 "\n", mrga::file_size_bytes(header));
    std::printf("blocks=%" PRIu64 "\n", manifest.block_count());
    std::printf("manifest=%s\n", manifest_path.c_str());
    return kExitOk;
}

int cmd_run(const RunArgs& args) {
    const auto header = mrga::read_header(args.in);

    mrga::JobConfig config;
    config.mode = mrga::parse_reduce_mode(args.mode);
    config.ga.dimension = header.dimension;
    config.ga.lower_bound = header.lower_bound;
    config.ga.upper_bound = header.upper_bound;
    config.ga.iterations = args.iters;
    config.ga.mutation_rate = args.mutation_rate;
    config.ga.crossover_rate = args.crossover_rate;
    config.ga.keep_fraction = args.keep_fraction;
    config.ga.elite_rate = args.elite_rate;
    config.ga.master_seed = args.seed;
    config.objective = {args.objective, header.dimension, header.lower_bound, header.upper_bound};
    config.population_path = args.in;
    config.manifest = mrga::split_into_blocks(header, args.block_size);
    config.parallelism = args.parallelism;

    const mrga::JobResult result = mrga::run_job(config);

    std::printf("mode=%s\n", mrga::to_string(result.mode));
    std::printf("maps=%" PRIu64 "\n", result.map_count);
    std::printf("mer=%.17g\n", result.mer);
    std::printf("map_time_s=%.3f\n", result.timings.map_s);
    std::printf("shuffle_time_s=%.3f\n", result.timings.shuffle_s);
    std::printf("reduce_time_s=%.3f\n", result.timings.reduce_s);
    std::printf("total_time_s=%.3f\n", result.timings.total_s);
    for (const auto& r : result.map_reports)
        std::printf("map %" PRIu64 ": in=%" PRIu64 " emitted=%" PRIu64
                    " best_initial=%.6g best_final=%.6g gens=%u time_s=%.3f\n",
                    r.block_index, r.input_count, r.emitted_count, r.best_fitness_initial,
                    r.best_fitness_final, r.generations_run, r.wall_time_s);

    if (!args.csv.empty()) {
        mrga::ExperimentRow row;
        row.population = header.chromosome_count;
        row.bytes = header.chromosome_count * mrga::record_size_bytes(header.dimension);
        row.blocks = result.map_count;
        row.mode = result.mode;
        row.mer = result.mer;
        row.wall_time_s = result.timings.total_s;
        row.seed = args.seed;
        append_csv_row(args.csv, row);
    }
    return kExitOk;
}

int cmd_sweep(const SweepArgs& args) {
    mrga::SweepSpec spec;
    spec.sizes = args.sizes;
    for (const auto& m : args.modes) spec.modes.push_back(mrga::parse_reduce_mode(m));
    spec.seeds = args.seeds;
    spec.ga.dimension = args.dim;
    spec.ga.lower_bound = args.bounds[0];
    spec.ga.upper_bound = args.bounds[1];
    spec.ga.iterations = args.iters;
    spec.ga.mutation_rate = args.mutation_rate;
    spec.ga.crossover_rate = args.crossover_rate;
    spec.ga.keep_fraction = args.keep_fraction;
    spec.ga.elite_rate = args.elite_rate;
    spec.objective_name = args.objective;
    spec.block_size_bytes = args.block_size;
    spec.workdir = args.workdir;
    spec.parallelism = args.parallelism;
    spec.validate();

    std::ofstream csv(args.csv, std::ios::trunc);
    if (!csv) throw mrga::IoError("cannot create csv: " + args.csv);
    csv << mrga::kCsvHeader << '\n';
    csv.flush();

    std::vector<mrga::ExperimentRow> rows;
    mrga::run_sweep(spec, [&](const mrga::ExperimentRow& row) {
        rows.push_back(row);
        csv << mrga::to_csv_line(row) << '\n';
        csv.flush();  // partial csv survives an abort
        std::printf("row: %s\n", mrga::to_csv_line(row).c_str());
    });

    std::printf("# summary: mode population median_mer median_time_s\n");
    for (const auto& s : mrga::summarize_rows(rows))
        std::printf("%s %" PRIu64 " %.17g %.3f\n", mrga::to_string(s.mode), s.population,
                    s.median_mer, s.median_time_s);
    std::printf("csv=%s\n", args.csv.c_str());
    return kExitOk;
}

int cmd_baseline(const BaselineArgs& args) {
    mrga::GaParams params;
    params.dimension = args.dim;
    params.lower_bound = args.bounds[0];
    params.upper_bound = args.bounds[1];
    params.iterations = args.iters;
    params.mutation_rate = args.mutation_rate;
    params.crossover_rate = args.crossover_rate;
    params.keep_fraction = args.keep_fraction;
    params.master_seed = args.seed;

    const auto result = mrga::run_baseline(args.count, params, args.objective, args.mem_limit);
    std::printf("count=%" PRIu64 "\n", args.count);
    std::printf("dimension=%u\n", args.dim);
    std::printf("footprint_bytes=%" PRIu64 "\n", result.footprint_bytes);
    std::printf("mer=%.17g\n", result.mer);
    std::printf("wall_time_s=%.6f\n", result.wall_time_s);
    return kExitOk;
}

int cmd_report(const ReportArgs& args) {
    const auto rows = mrga::parse_csv_file(args.csv);
    fs::path prefix = args.out_prefix.empty() ? fs::path(args.csv).replace_extension("")
                                              : fs::path(args.out_prefix);
    const auto written = mrga::write_report_series(prefix, rows);
    for (const auto& p : written) std::printf("series=%s\n", p.string().c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MapReduce-style genetic algorithm runner"};
    app.require_subcommand(1);

    GenpopArgs genpop;
    auto* genpop_cmd = app.add_subcommand("genpop", "generate a reusable population file");
    genpop_cmd->add_option("--count", genpop.count, "number of chromosomes")
        ->required()
        ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{1} << 40));
    genpop_cmd->add_option("--dim", genpop.dim, "gene count per chromosome")
        ->check(CLI::Range(1u, 1000000u));
    genpop_cmd->add_option("--bounds", genpop.bounds, "search domain: LO HI")->expected(2);
    genpop_cmd->add_option("--seed", genpop.seed, "generator seed");
    genpop_cmd->add_option("--out", genpop.out, "output population file")->required();
    genpop_cmd->add_option("--block-size", genpop.block_size, "block size in bytes (suffixes ok)")
        ->transform(CLI::AsSizeValue(true));

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "run one map/shuffle/reduce job");
    run_cmd->add_option("--in", run.in, "population file")->required();
    run_cmd->add_option("--mode", run.mode, "basic | elite");
    run_cmd->add_option("--objective", run.objective, "objective function name");
    run_cmd->add_option("--elite-rate", run.elite_rate, "fraction each map emits");
    add_ga_flags(run_cmd, run.iters, run.mutation_rate, run.crossover_rate, run.keep_fraction);
    run_cmd->add_option("--seed", run.seed, "master seed");
    run_cmd->add_option("--parallelism", run.parallelism, "max concurrent map tasks")
        ->check(CLI::Range(1u, 4096u));
    run_cmd->add_option("--block-size", run.block_size, "block size in bytes (suffixes ok)")
        ->transform(CLI::AsSizeValue(true));
    run_cmd->add_option("--csv", run.csv, "append the result row to this csv");

    SweepArgs sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "population sweep over modes and seeds");
    sweep_cmd->add_option("--sizes", sweep.sizes, "population sizes, strictly increasing")
        ->required()
        ->delimiter(',');
    sweep_cmd->add_option("--modes", sweep.modes, "modes to run")->delimiter(',');
    sweep_cmd->add_option("--seeds", sweep.seeds, "master seeds")->delimiter(',');
    sweep_cmd->add_option("--dim", sweep.dim, "gene count per chromosome")
        ->check(CLI::Range(1u, 1000000u));
    sweep_cmd->add_option("--bounds", sweep.bounds, "search domain: LO HI")->expected(2);
    sweep_cmd->add_option("--objective", sweep.objective, "objective function name");
    sweep_cmd->add_option("--elite-rate", sweep.elite_rate, "fraction each map emits");
    add_ga_flags(sweep_cmd, sweep.iters, sweep.mutation_rate, sweep.crossover_rate,
                 sweep.keep_fraction);
    sweep_cmd->add_option("--parallelism", sweep.parallelism, "max concurrent map tasks")
        ->check(CLI::Range(1u, 4096u));
    sweep_cmd->add_option("--block-size", sweep.block_size, "block size in bytes (suffixes ok)")
        ->transform(CLI::AsSizeValue(true));
    sweep_cmd->add_option("--csv", sweep.csv, "output csv path")->required();
    sweep_cmd->add_option("--workdir", sweep.workdir, "directory for generated population files");

    BaselineArgs baseline;
    auto* baseline_cmd = app.add_subcommand("baseline", "single-process GA on one population");
    baseline_cmd->add_option("--count", baseline.count, "population size")
        ->required()
        ->check(CLI::Range(std::uint64_t{4}, std::uint64_t{1} << 40));
    baseline_cmd->add_option("--dim", baseline.dim, "gene count per chromosome")
        ->check(CLI::Range(1u, 1000000u));
    baseline_cmd->add_option("--bounds", baseline.bounds, "search domain: LO HI")->expected(2);
    baseline_cmd->add_option("--objective", baseline.objective, "objective function name");
    add_ga_flags(baseline_cmd, baseline.iters, baseline.mutation_rate, baseline.crossover_rate,
                 baseline.keep_fraction);
    baseline_cmd->add_option("--seed", baseline.seed, "master seed");
    std::uint64_t mem_limit_value = 0;
    auto* mem_limit_opt =
        baseline_cmd->add_option("--mem-limit", mem_limit_value, "fail if the footprint exceeds this")
            ->transform(CLI::AsSizeValue(true));

    ReportArgs report;
    auto* report_cmd = app.add_subcommand("report", "emit plot-ready series from a sweep csv");
    report_cmd->add_option("--csv", report.csv, "input csv")->required();
    report_cmd->add_option("--out-prefix", report.out_prefix, "series file prefix");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitUsage;
    }

    if (*mem_limit_opt) baseline.mem_limit = mem_limit_value;

    try {
        if (*genpop_cmd) return cmd_genpop(genpop);
        if (*run_cmd) return cmd_run(run);
        if (*sweep_cmd) return cmd_sweep(sweep);
        if (*baseline_cmd) return cmd_baseline(baseline);
        if (*report_cmd) return cmd_report(report);
    } catch (const mrga::ResourceLimitError& e) {
        std::fprintf(stderr, "error: %s\nestimated_bytes=%" PRIu64 "\n", e.what(),
                     e.estimated_bytes);
        return kExitResourceLimit;
    } catch (const mrga::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const mrga::DegeneratePopulationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const mrga::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIo;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIo;
    }
    return kExitUsage;
}
