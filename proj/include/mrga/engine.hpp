#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "mrga/blockstore.hpp"
#include "mrga/chromosome.hpp"
#include "mrga/errors.hpp"
#include "mrga/ga.hpp"
#include "mrga/objective.hpp"
#include "mrga/rng.hpp"

namespace mrga {

enum class ReduceMode { kBasic, kEliteReduce };

inline const char* to_string(ReduceMode mode) {
    return mode == ReduceMode::kBasic ? "basic" : "elite";
}

inline ReduceMode parse_reduce_mode(const std::string& s) {
    if (s == "basic") return ReduceMode::kBasic;
    if (s == "elite") return ReduceMode::kEliteReduce;
    throw ConfigError("unknown mode '" + s + "'; expected 'basic' or 'elite'");
}

/// All map tasks emit under one constant key: a single reducer consumes
/// the whole mixed-elite population.
inline constexpr std::uint32_t kEliteShuffleKey = 0;

/// One shuffled key/value pair: an evaluated elite chromosome plus the
/// block it came from.
struct EliteRecord {
    std::uint32_t key = kEliteShuffleKey;
    Chromosome value;
    std::uint64_t origin_block = 0;
};

struct MapTaskReport {
    std::uint64_t block_index = 0;
    std::uint64_t input_count = 0;
    std::uint64_t emitted_count = 0;
    double best_fitness_initial = kUnsetFitness;
    double best_fitness_final = kUnsetFitness;
    std::uint32_t generations_run = 0;
    double wall_time_s = 0.0;
};

struct MapTaskResult {
    std::vector<EliteRecord> elites;  // ascending fitness order
    MapTaskReport report;
};

struct PhaseTimings {
    double map_s = 0.0;
    double shuffle_s = 0.0;
    double reduce_s = 0.0;
    double total_s = 0.0;
};

struct JobResult {
    Chromosome best_chromosome;
    double mer = kUnsetFitness;  // fitness of best_chromosome
    ReduceMode mode = ReduceMode::kBasic;
    std::uint64_t map_count = 0;
    PhaseTimings timings;
    std::vector<MapTaskReport> map_reports;
};

/// hardware_concurrency() is allowed to return 0; never default below 1.
inline unsigned default_parallelism() {
    return std::max(1u, std::thread::hardware_concurrency());
}

struct JobConfig {
    ReduceMode mode = ReduceMode::kBasic;
    GaParams ga;
    ObjectiveSpec objective;
    std::filesystem::path population_path;
    BlockManifest manifest;
    unsigned parallelism = default_parallelism();

    void validate() const {
        ga.validate();
        objective.validate();
        if (objective.dimension != ga.dimension)
            throw ConfigError("objective dimension does not match GA dimension");
        if (objective.lower_bound != ga.lower_bound || objective.upper_bound != ga.upper_bound)
            throw ConfigError("objective bounds do not match GA bounds");
        if (parallelism < 1) throw ConfigError("parallelism must be >= 1");
        if (manifest.entries.empty()) throw ConfigError("manifest has no blocks");
    }
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace detail

/// Evaluates a block, evolves it for the configured iterations and emits
/// the top max(1, ceil(elite_rate * block_size)) chromosomes in rank
/// order. Deterministic for a given task_seed.
inline MapTaskResult run_map_task(Population block, const GaParams& params,
                                  const Objective& objective, std::uint64_t task_seed,
                                  std::uint64_t block_index) {
    const auto start = std::chrono::steady_clock::now();
    if (block.size() < 4)
        throw DegeneratePopulationError("map task for block " + std::to_string(block_index) +
                                        ": block size " + std::to_string(block.size()) + " < 4");
    RngStream rng(task_seed);
    evaluate(block, objective);

    MapTaskResult out;
    out.report.block_index = block_index;
    out.report.input_count = block.size();
    out.report.best_fitness_initial = best_of(block).fitness;

    EvolutionStats stats;
    Population final_pop = run_generations(std::move(block), params, objective, rng, &stats);

    const std::uint64_t emit = elite_count(final_pop.size(), params.elite_rate);
    out.elites.reserve(emit);
    for (std::uint64_t i = 0; i < emit; ++i)
        out.elites.push_back({kEliteShuffleKey, final_pop.members[i], block_index});

    out.report.emitted_count = emit;
    out.report.best_fitness_final = final_pop.members.front().fitness;
    out.report.generations_run = stats.generations_run;
    out.report.wall_time_s = detail::seconds_since(start);
    return out;
}

/// Gathers all emitted records into one mixed-elite population ordered by
/// (origin_block, within-block rank), so the result does not depend on
/// map completion order. Records of one block must arrive in emission
/// order relative to each other, which holds because each block is
/// emitted by a single task.
inline Population shuffle(std::vector<EliteRecord> records) {
    if (records.empty()) throw JobError("shuffle: no elite records emitted");
    std::stable_sort(records.begin(), records.end(),
                     [](const EliteRecord& a, const EliteRecord& b) {
                         return a.origin_block < b.origin_block;
                     });
    Population pop;
    pop.members.reserve(records.size());
    for (auto& r : records) pop.members.push_back(std::move(r.value));
    return pop;
}

/// Basic mode: the global minimum over the mixed elites, no further
/// evolution.
inline Chromosome reduce_basic(const Population& elites) {
    return best_of(elites);
}

/// Proposed mode: evolve the mixed-elite population for another
/// params.iterations generations and return its best chromosome. By
/// elitism the result is never worse than reduce_basic on the same
/// input.
inline Chromosome reduce_elite(Population elites, const GaParams& params,
                               const Objective& objective, std::uint64_t reduce_seed,
                               EvolutionStats* stats = nullptr) {
    if (elites.size() < 4)
        throw DegeneratePopulationError(
            "reduce_elite: only " + std::to_string(elites.size()) +
            " elites; increase elite_rate or use more blocks");
    RngStream rng(reduce_seed);
    evaluate(elites, objective);  // fills any unset slots; clamping is a no-op for map output
    Population final_pop = run_generations(std::move(elites), params, objective, rng, stats);
    return final_pop.members.front();
}

namespace detail {

/// Runs every map task with at most `parallelism` workers. Each task
/// reads its own block and owns its RngStream; slot i of the result is
/// block i, so the outcome is independent of scheduling. Fail-fast on
/// the first task error.
inline std::vector<MapTaskResult> run_map_phase(const JobConfig& config,
                                                const Objective& objective) {
    const std::uint64_t map_count = config.manifest.entries.size();
    std::vector<MapTaskResult> results(map_count);
    std::atomic<std::uint64_t> next{0};
    std::atomic<bool> abort{false};
    std::mutex failure_mutex;
    std::vector<std::pair<std::uint64_t, std::exception_ptr>> failures;

    auto worker = [&] {
        for (;;) {
            const std::uint64_t i = next.fetch_add(1);
            if (i >= map_count || abort.load()) return;
            try {
                Population block = read_block(config.population_path, config.manifest, i);
                results[i] = run_map_task(std::move(block), config.ga, objective,
                                          mix_seed(config.ga.master_seed, i), i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                failures.emplace_back(i, std::current_exception());
                abort.store(true);
                return;
            }
        }
    };

    const unsigned n_threads =
        static_cast<unsigned>(std::min<std::uint64_t>(config.parallelism, map_count));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(n_threads);
        for (unsigned t = 0; t < n_threads; ++t) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }

    if (!failures.empty()) {
        std::sort(failures.begin(), failures.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        try {
            std::rethrow_exception(failures.front().second);
        } catch (const std::exception& e) {
            throw JobError("map task for block " + std::to_string(failures.front().first) +
                           " failed: " + e.what());
        }
    }
    return results;
}

}  // namespace detail

/// Executes the whole job: parallel map phase over the manifest's blocks,
/// shuffle, then the mode's reduce. Task i seeds its stream from
/// mix_seed(master_seed, i) and the reducer from mix_seed(master_seed,
/// kReduceSeedKey), so the result is bit-identical for any parallelism
/// level. Wall times are the only non-deterministic fields.
inline JobResult run_job(const JobConfig& config) {
    config.validate();
    const Objective objective = lookup_objective(config.objective);
    const auto job_start = std::chrono::steady_clock::now();

    std::vector<MapTaskResult> map_results = detail::run_map_phase(config, objective);
    const double map_s = detail::seconds_since(job_start);

    const auto shuffle_start = std::chrono::steady_clock::now();
    std::vector<EliteRecord> records;
    for (auto& r : map_results)
        for (auto& e : r.elites) records.push_back(std::move(e));
    Population elites = shuffle(std::move(records));
    const double shuffle_s = detail::seconds_since(shuffle_start);

    const auto reduce_start = std::chrono::steady_clock::now();
    JobResult result;
    result.mode = config.mode;
    if (config.mode == ReduceMode::kBasic) {
        result.best_chromosome = reduce_basic(elites);
    } else {
        result.best_chromosome = reduce_elite(std::move(elites), config.ga, objective,
                                              mix_seed(config.ga.master_seed, kReduceSeedKey));
    }
    result.mer = result.best_chromosome.fitness;
    result.map_count = map_results.size();
    result.map_reports.reserve(map_results.size());
    for (auto& r : map_results) result.map_reports.push_back(r.report);
    result.timings.map_s = map_s;
    result.timings.shuffle_s = shuffle_s;
    result.timings.reduce_s = detail::seconds_since(reduce_start);
    result.timings.total_s = detail::seconds_since(job_start);
    return result;
}

}  // namespace mrga
