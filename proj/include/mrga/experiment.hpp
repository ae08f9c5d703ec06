#pragma once

#include <algorithm>
#include <cerrno>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mrga/blockstore.hpp"
#include "mrga/engine.hpp"
#include "mrga/errors.hpp"
#include "mrga/ga.hpp"
#include "mrga/objective.hpp"

namespace mrga {

/// One experiment outcome, mirroring the reported population/size/result
/// /time/map-count table plus mode and seed.
struct ExperimentRow {
    std::uint64_t population = 0;
    std::uint64_t bytes = 0;   // serialized record bytes, header excluded
    std::uint64_t blocks = 0;  // map count
    ReduceMode mode = ReduceMode::kBasic;
    double mer = 0.0;
    double wall_time_s = 0.0;
    std::uint64_t seed = 0;

    bool operator==(const ExperimentRow&) const = default;
};

inline constexpr const char* kCsvHeader = "population,bytes,blocks,mode,mer,wall_time_s,seed";

namespace detail {

/// Shortest decimal form that re-parses to the identical double.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    fields.push_back(cur);
    return fields;
}

inline std::uint64_t parse_u64_field(const std::string& s, std::size_t line_no) {
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (s.empty() || s[0] < '0' || s[0] > '9' || errno != 0 || *end != '\0')
        throw IoError("csv line " + std::to_string(line_no) + ": bad integer '" + s + "'");
    return v;
}

inline double parse_double_field(const std::string& s, std::size_t line_no) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (errno != 0 || end == s.c_str() || *end != '\0')
        throw IoError("csv line " + std::to_string(line_no) + ": bad number '" + s + "'");
    return v;
}

}  // namespace detail

inline std::string to_csv_line(const ExperimentRow& row) {
    return std::to_string(row.population) + ',' + std::to_string(row.bytes) + ',' +
           std::to_string(row.blocks) + ',' + to_string(row.mode) + ',' +
           detail::format_double(row.mer) + ',' + detail::format_double(row.wall_time_s) + ',' +
           std::to_string(row.seed);
}

/// Parses a full CSV stream (header line first). Errors carry the
/// 1-based line number.
inline std::vector<ExperimentRow> parse_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw IoError("csv line 1: empty input");
    if (line == std::string(kCsvHeader) + "\r") line.pop_back();
    if (line != kCsvHeader)
        throw IoError("csv line 1: expected header '" + std::string(kCsvHeader) + "'");

    std::vector<ExperimentRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = detail::split_fields(line);
        if (fields.size() != 7)
            throw IoError("csv line " + std::to_string(line_no) + ": expected 7 fields, got " +
                          std::to_string(fields.size()));
        ExperimentRow row;
        row.population = detail::parse_u64_field(fields[0], line_no);
        row.bytes = detail::parse_u64_field(fields[1], line_no);
        row.blocks = detail::parse_u64_field(fields[2], line_no);
        try {
            row.mode = parse_reduce_mode(fields[3]);
        } catch (const ConfigError& e) {
            throw IoError("csv line " + std::to_string(line_no) + ": " + e.what());
        }
        row.mer = detail::parse_double_field(fields[4], line_no);
        row.wall_time_s = detail::parse_double_field(fields[5], line_no);
        row.seed = detail::parse_u64_field(fields[6], line_no);
        rows.push_back(row);
    }
    if (rows.empty()) throw IoError("csv has no data rows");
    return rows;
}

inline std::vector<ExperimentRow> parse_csv_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open csv: " + path.string());
    return parse_csv(in);
}

/// Median with the even-count convention of averaging the middle pair.
inline double median(std::vector<double> values) {
    if (values.empty()) throw ContractError("median: no values");
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    if (values.size() % 2 == 1) return values[mid];
    return 0.5 * (values[mid - 1] + values[mid]);
}

/// A population sweep over sizes, modes and seeds with shared GA
/// parameters, reproducing the paper-style experiment tables.
struct SweepSpec {
    std::vector<std::uint64_t> sizes;  // strictly increasing
    std::vector<ReduceMode> modes;
    std::vector<std::uint64_t> seeds;
    GaParams ga;
    std::string objective_name = "sphere";
    std::uint64_t block_size_bytes = kDefaultBlockSizeBytes;
    std::filesystem::path workdir;
    unsigned parallelism = default_parallelism();

    void validate() const {
        ga.validate();
        if (sizes.empty()) throw ConfigError("sweep: sizes list is empty");
        for (std::size_t i = 1; i < sizes.size(); ++i)
            if (sizes[i] <= sizes[i - 1])
                throw ConfigError("sweep: sizes must be strictly increasing");
        if (modes.empty()) throw ConfigError("sweep: modes list is empty");
        if (seeds.empty()) throw ConfigError("sweep: seeds list is empty");
        if (workdir.empty()) throw ConfigError("sweep: workdir not set");
    }
};

/// Runs one job for every (mode, size, seed) combination and hands each
/// finished row to `sink` in (mode, population, seed) order, so a
/// streamed CSV is already sorted and partial output survives an abort.
/// The population file for a (size, seed) cell is generated once with
/// seed mix_seed(seed, size) and shared by both modes, which is what
/// makes per-seed basic/elite comparisons exact.
inline void run_sweep(const SweepSpec& spec,
                      const std::function<void(const ExperimentRow&)>& sink) {
    spec.validate();
    std::filesystem::create_directories(spec.workdir);

    std::vector<ReduceMode> modes = spec.modes;
    std::sort(modes.begin(), modes.end(), [](ReduceMode a, ReduceMode b) {
        return std::string(to_string(a)) < to_string(b);
    });
    modes.erase(std::unique(modes.begin(), modes.end()), modes.end());
    std::vector<std::uint64_t> seeds = spec.seeds;
    std::sort(seeds.begin(), seeds.end());

    ObjectiveSpec objective{spec.objective_name, spec.ga.dimension, spec.ga.lower_bound,
                            spec.ga.upper_bound};
    lookup_objective(objective);  // fail before any work if the name is unknown

    for (ReduceMode mode : modes) {
        for (std::uint64_t size : spec.sizes) {
            for (std::uint64_t seed : seeds) {
                const auto pop_path =
                    spec.workdir / ("pop_" + std::to_string(size) + "_" + std::to_string(seed) + ".mrga");
                if (!std::filesystem::exists(pop_path))
                    generate_population_file(pop_path, size, objective, mix_seed(seed, size));
                const PopulationFileHeader header = read_header(pop_path);

                JobConfig config;
                config.mode = mode;
                config.ga = spec.ga;
                config.ga.master_seed = seed;
                config.objective = objective;
                config.population_path = pop_path;
                config.manifest = split_into_blocks(header, spec.block_size_bytes);
                config.parallelism = spec.parallelism;

                const JobResult result = run_job(config);
                ExperimentRow row;
                row.population = size;
                row.bytes = size * record_size_bytes(spec.ga.dimension);
                row.blocks = result.map_count;
                row.mode = mode;
                row.mer = result.mer;
                row.wall_time_s = result.timings.total_s;
                row.seed = seed;
                sink(row);
            }
        }
    }
}

struct SweepSummaryEntry {
    ReduceMode mode;
    std::uint64_t population;
    double median_mer;
    double median_time_s;
};

/// Per-(mode, population) medians, sorted by (mode, population).
inline std::vector<SweepSummaryEntry> summarize_rows(const std::vector<ExperimentRow>& rows) {
    std::vector<SweepSummaryEntry> summary;
    for (ReduceMode mode : {ReduceMode::kBasic, ReduceMode::kEliteReduce}) {
        std::vector<std::uint64_t> sizes;
        for (const auto& r : rows)
            if (r.mode == mode) sizes.push_back(r.population);
        std::sort(sizes.begin(), sizes.end());
        sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
        for (std::uint64_t size : sizes) {
            std::vector<double> mers, times;
            for (const auto& r : rows) {
                if (r.mode == mode && r.population == size) {
                    mers.push_back(r.mer);
                    times.push_back(r.wall_time_s);
                }
            }
            summary.push_back({mode, size, median(mers), median(times)});
        }
    }
    return summary;
}

/// Emits per-mode (population, median_mer) and (population, median_time)
/// series as two-column text files next to `prefix`. Returns the written
/// paths.
inline std::vector<std::filesystem::path>
write_report_series(const std::filesystem::path& prefix, const std::vector<ExperimentRow>& rows) {
    const auto summary = summarize_rows(rows);
    std::vector<std::filesystem::path> written;
    for (ReduceMode mode : {ReduceMode::kBasic, ReduceMode::kEliteReduce}) {
        const bool present = std::any_of(summary.begin(), summary.end(),
                                         [&](const auto& s) { return s.mode == mode; });
        if (!present) continue;
        for (const char* metric : {"mer", "time"}) {
            auto path = prefix;
            path += std::string("_") + to_string(mode) + "_" + metric + ".dat";
            std::ofstream out(path, std::ios::trunc);
            if (!out) throw IoError("cannot create series file: " + path.string());
            for (const auto& s : summary) {
                if (s.mode != mode) continue;
                const double value = std::string(metric) == "mer" ? s.median_mer : s.median_time_s;
                out << s.population << ' ' << detail::format_double(value) << '\n';
            }
            out.flush();
            if (!out) throw IoError("write failed: " + path.string());
            written.push_back(path);
        }
    }
    return written;
}

/// Gene storage for `count` chromosomes at `dimension` genes plus the
/// fitness slot, the dominant term of the in-memory footprint.
inline std::uint64_t estimated_footprint_bytes(std::uint64_t count, std::uint32_t dimension) {
    return count * record_size_bytes(dimension);
}

struct BaselineResult {
    Chromosome best;
    double mer = kUnsetFitness;
    double wall_time_s = 0.0;
    std::uint64_t footprint_bytes = 0;
    EvolutionStats stats;
};

/// The single-process path: one in-memory population, no blocks. Seeding
/// matches a one-block job exactly (generation stream = master_seed, GA
/// stream = mix_seed(master_seed, 0)), so a baseline run and a
/// single-block map task with the same seed produce the same result.
/// With mem_limit_bytes set below the footprint, fails with a structured
/// resource-limit error instead of allocating.
inline BaselineResult run_baseline(std::uint64_t count, const GaParams& params,
                                   const std::string& objective_name = "sphere",
                                   std::optional<std::uint64_t> mem_limit_bytes = std::nullopt) {
    params.validate();
    if (count < 4)
        throw DegeneratePopulationError("baseline: population size " + std::to_string(count) +
                                        " < 4");
    const std::uint64_t footprint = estimated_footprint_bytes(count, params.dimension);
    if (mem_limit_bytes && footprint > *mem_limit_bytes)
        throw ResourceLimitError("baseline population needs an estimated " +
                                     std::to_string(footprint) + " bytes, over the " +
                                     std::to_string(*mem_limit_bytes) + "-byte limit",
                                 footprint, *mem_limit_bytes);

    const ObjectiveSpec spec{objective_name, params.dimension, params.lower_bound,
                             params.upper_bound};
    const Objective objective = lookup_objective(spec);

    const auto start = std::chrono::steady_clock::now();
    RngStream gen_rng(params.master_seed);
    Population pop =
        random_population(count, params.dimension, params.lower_bound, params.upper_bound, gen_rng);
    evaluate(pop, objective);

    BaselineResult result;
    RngStream ga_rng(mix_seed(params.master_seed, 0));
    Population final_pop = run_generations(std::move(pop), params, objective, ga_rng, &result.stats);
    result.best = final_pop.members.front();
    result.mer = result.best.fitness;
    result.footprint_bytes = footprint;
    result.wall_time_s = detail::seconds_since(start);
    return result;
}

}  // namespace mrga
