#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mrga/chromosome.hpp"
#include "mrga/errors.hpp"
#include "mrga/objective.hpp"
#include "mrga/rng.hpp"

namespace mrga {

/// Evolution knobs shared by the map phase, the reduce phase and the
/// single-process baseline.
struct GaParams {
    std::uint32_t dimension = 300;
    double mutation_rate = 0.01;
    double crossover_rate = 0.8;
    std::uint32_t iterations = 1000;
    double elite_rate = 0.01;     // fraction of a final map population emitted
    double keep_fraction = 0.5;   // top fraction surviving each generation
    double lower_bound = -100.0;
    double upper_bound = 100.0;
    std::uint64_t master_seed = 1;

    void validate() const {
        if (dimension < 1) throw ConfigError("dimension must be >= 1");
        if (iterations < 1) throw ConfigError("iterations must be >= 1");
        if (mutation_rate < 0.0 || mutation_rate > 1.0)
            throw ConfigError("mutation_rate must be in [0, 1]");
        if (crossover_rate < 0.0 || crossover_rate > 1.0)
            throw ConfigError("crossover_rate must be in [0, 1]");
        if (elite_rate <= 0.0 || elite_rate > 1.0)
            throw ConfigError("elite_rate must be in (0, 1]");
        if (keep_fraction <= 0.0 || keep_fraction >= 1.0)
            throw ConfigError("keep_fraction must be in (0, 1)");
        if (!(lower_bound < upper_bound))
            throw ConfigError("bounds require lower_bound < upper_bound");
    }
};

/// Per-generation bookkeeping filled by run_generations.
struct EvolutionStats {
    std::uint32_t generations_run = 0;
    double initial_best = kUnsetFitness;
    std::vector<double> best_by_generation;  // best fitness after each generation
};

/// ceil(frac * n) computed with a small downward guard so that decimal
/// rates behave like their mathematical value (0.01 * 1000 -> 10, not 11).
inline std::uint64_t ceil_fraction(double frac, std::uint64_t n) {
    return static_cast<std::uint64_t>(std::ceil(frac * static_cast<double>(n) - 1e-9));
}

/// Number of chromosomes a map task emits: max(1, ceil(elite_rate * n)),
/// so every block contributes at least one record.
inline std::uint64_t elite_count(std::uint64_t population_size, double elite_rate) {
    return std::max<std::uint64_t>(1, ceil_fraction(elite_rate, population_size));
}

/// Chromosomes uniform in [lo, hi], drawn row-major (member by member,
/// gene by gene) with fitness unset. Same draw order as the population
/// file generator, so in-memory and on-disk populations from one seed
/// are identical.
inline Population random_population(std::uint64_t count, std::uint32_t dimension,
                                    double lo, double hi, RngStream& rng) {
    Population pop;
    pop.members.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        std::vector<double> genes(dimension);
        for (auto& g : genes) g = rng.uniform_real(lo, hi);
        pop.members.emplace_back(std::move(genes));
    }
    return pop;
}

/// Clamps genes into the objective's domain, then fills every unset
/// fitness slot. Cached fitness values are trusted; re-evaluation is a
/// no-op. Order is preserved.
inline void evaluate(Population& pop, const Objective& objective) {
    const auto& spec = objective.spec();
    bool any_changed = false;
    for (auto& c : pop.members) {
        if (c.dimension() != spec.dimension)
            throw ConfigError("evaluate: chromosome dimension " +
                              std::to_string(c.dimension()) + " does not match objective dimension " +
                              std::to_string(spec.dimension));
        bool clamped = false;
        for (auto& g : c.genes) {
            if (g < spec.lower_bound) { g = spec.lower_bound; clamped = true; }
            else if (g > spec.upper_bound) { g = spec.upper_bound; clamped = true; }
        }
        if (clamped) c.fitness = kUnsetFitness;  // cached value no longer matches
        if (!c.has_fitness()) {
            c.fitness = objective(c.genes);
            any_changed = true;
        }
    }
    if (any_changed) pop.sorted = false;
}

/// Stable ascending sort by fitness (minimization; ties keep their
/// original order). All fitness values must be set.
inline void rank(Population& pop) {
    if (pop.empty()) throw ContractError("rank: empty population");
    for (const auto& c : pop.members)
        if (!c.has_fitness()) throw ContractError("rank: unset fitness present");
    std::stable_sort(pop.members.begin(), pop.members.end(),
                     [](const Chromosome& a, const Chromosome& b) { return a.fitness < b.fitness; });
    pop.sorted = true;
}

/// The chromosome with minimal fitness; ties broken by lowest index.
inline const Chromosome& best_of(const Population& pop) {
    if (pop.empty()) throw ContractError("best_of: empty population");
    const Chromosome* best = nullptr;
    for (const auto& c : pop.members) {
        if (!c.has_fitness()) throw ContractError("best_of: unset fitness present");
        if (best == nullptr || c.fitness < best->fitness) best = &c;
    }
    return *best;
}

/// Rank-list weights over the kept survivors: rank n (1 = best) gets
/// probability (n_keep - n + 1) / (1 + 2 + ... + n_keep).
inline std::vector<double> rank_weights(std::uint64_t n_keep) {
    const double denom = static_cast<double>(n_keep) * static_cast<double>(n_keep + 1) / 2.0;
    std::vector<double> w(n_keep);
    for (std::uint64_t i = 0; i < n_keep; ++i)
        w[i] = static_cast<double>(n_keep - i) / denom;
    return w;
}

namespace detail {

/// One weighted draw from the cumulative rank distribution.
inline std::size_t draw_rank(const std::vector<double>& cumulative, RngStream& rng) {
    const double u = rng.next_double();
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    auto idx = static_cast<std::size_t>(it - cumulative.begin());
    return std::min(idx, cumulative.size() - 1);
}

}  // namespace detail

/// Draws ceil((size - n_keep) / 2) parent index pairs from the top
/// n_keep = ceil(keep_fraction * size) survivors of a ranked population.
/// Pair members are distinct. Draw order: mother, then father redrawn
/// until it differs.
inline std::vector<std::pair<std::size_t, std::size_t>>
select_parent_pairs(const Population& pop, RngStream& rng, const GaParams& params) {
    if (!pop.sorted) throw ContractError("select_parent_pairs: population must be ranked");
    const std::uint64_t size = pop.size();
    const std::uint64_t n_keep = ceil_fraction(params.keep_fraction, size);
    if (n_keep < 2)
        throw DegeneratePopulationError("select_parent_pairs: fewer than 2 survivors (n_keep=" +
                                        std::to_string(n_keep) + ")");
    const std::uint64_t n_pairs = (size - n_keep + 1) / 2;

    const auto weights = rank_weights(n_keep);
    std::vector<double> cumulative(weights.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        cumulative[i] = acc;
    }

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(n_pairs);
    for (std::uint64_t p = 0; p < n_pairs; ++p) {
        const std::size_t mother = detail::draw_rank(cumulative, rng);
        std::size_t father = mother;
        while (father == mother) father = detail::draw_rank(cumulative, rng);
        pairs.emplace_back(mother, father);
    }
    return pairs;
}

/// Single-point blend crossover for real-coded chromosomes. A crossover
/// gene alpha and a blend factor beta in [0, 1) are drawn (alpha first);
/// the gene at alpha is blended convexly, the flanks are swapped:
///   offspring1 = [mother[0..alpha), mother_a - beta*(mother_a - father_a), father(alpha..D)]
///   offspring2 = [father[0..alpha), father_a + beta*(mother_a - father_a), mother(alpha..D)]
/// Blended genes stay within the interval spanned by the parents' genes
/// at alpha. Offspring fitness is unset.
inline std::pair<Chromosome, Chromosome>
crossover_haupt(const Chromosome& mother, const Chromosome& father, RngStream& rng) {
    const std::size_t dim = mother.dimension();
    if (dim != father.dimension())
        throw ConfigError("crossover_haupt: parent dimensions differ (" +
                          std::to_string(dim) + " vs " + std::to_string(father.dimension()) + ")");
    if (dim == 0) throw ConfigError("crossover_haupt: zero-dimensional parents");

    const auto alpha = static_cast<std::size_t>(rng.uniform_index(dim));
    const double beta = rng.next_double();
    const double diff = mother.genes[alpha] - father.genes[alpha];

    Chromosome first, second;
    first.genes.resize(dim);
    second.genes.resize(dim);
    for (std::size_t i = 0; i < alpha; ++i) {
        first.genes[i] = mother.genes[i];
        second.genes[i] = father.genes[i];
    }
    first.genes[alpha] = mother.genes[alpha] - beta * diff;
    second.genes[alpha] = father.genes[alpha] + beta * diff;
    for (std::size_t i = alpha + 1; i < dim; ++i) {
        first.genes[i] = father.genes[i];
        second.genes[i] = mother.genes[i];
    }
    return {std::move(first), std::move(second)};
}

/// Uniform-reset mutation. members[0] (the incumbent best; callers rank
/// first) is exempt. Every other gene is independently replaced with
/// probability mutation_rate by a fresh uniform draw in bounds; touched
/// chromosomes get their fitness unset. Draw order: member by member,
/// gene by gene, one bernoulli draw per gene.
inline void mutate(Population& pop, RngStream& rng, const GaParams& params) {
    bool any_changed = false;
    for (std::size_t m = 1; m < pop.members.size(); ++m) {
        auto& c = pop.members[m];
        bool changed = false;
        for (auto& g : c.genes) {
            if (rng.bernoulli(params.mutation_rate)) {
                g = rng.uniform_real(params.lower_bound, params.upper_bound);
                changed = true;
            }
        }
        if (changed) {
            c.fitness = kUnsetFitness;
            any_changed = true;
        }
    }
    if (any_changed) pop.sorted = false;
}

/// Runs exactly params.iterations generations of
///   rank -> replace bottom by offspring of selected pairs -> mutate -> evaluate
/// on an already-evaluated population and returns the final ranked
/// population. Per pair, crossover_haupt applies with probability
/// crossover_rate, otherwise the parents are copied; when the
/// replacement count is odd the last pair contributes only its first
/// offspring. The best chromosome survives each generation untouched, so
/// best fitness is non-increasing.
inline Population run_generations(Population pop, const GaParams& params,
                                  const Objective& objective, RngStream& rng,
                                  EvolutionStats* stats = nullptr) {
    params.validate();
    if (pop.size() < 4)
        throw DegeneratePopulationError("run_generations: population size " +
                                        std::to_string(pop.size()) + " < 4");
    if (params.lower_bound != objective.spec().lower_bound ||
        params.upper_bound != objective.spec().upper_bound)
        throw ConfigError("run_generations: GA bounds differ from objective bounds");
    if (!pop.members.empty() && pop.members[0].dimension() != params.dimension)
        throw ConfigError("run_generations: population dimension does not match params");

    const double initial_best = best_of(pop).fitness;  // also checks the evaluated precondition
    if (stats != nullptr) {
        stats->generations_run = 0;
        stats->initial_best = initial_best;
        stats->best_by_generation.clear();
        stats->best_by_generation.reserve(params.iterations);
    }

    const std::size_t size = pop.size();
    for (std::uint32_t gen = 0; gen < params.iterations; ++gen) {
        rank(pop);
        const auto pairs = select_parent_pairs(pop, rng, params);
        // offspring land in slots [n_keep, size)
        std::size_t slot = ceil_fraction(params.keep_fraction, size);
        for (const auto& [mi, fi] : pairs) {
            const Chromosome& mother = pop.members[mi];
            const Chromosome& father = pop.members[fi];
            if (rng.bernoulli(params.crossover_rate)) {
                auto [first, second] = crossover_haupt(mother, father, rng);
                pop.members[slot++] = std::move(first);
                if (slot < size) pop.members[slot++] = std::move(second);
            } else {
                pop.members[slot++] = mother;  // cached fitness stays valid
                if (slot < size) pop.members[slot++] = father;
            }
        }
        if (!pairs.empty()) pop.sorted = false;
        mutate(pop, rng, params);
        evaluate(pop, objective);
        if (stats != nullptr) {
            stats->generations_run = gen + 1;
            stats->best_by_generation.push_back(best_of(pop).fitness);
        }
    }
    rank(pop);
    return pop;
}

}  // namespace mrga
