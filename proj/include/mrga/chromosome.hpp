#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace mrga {

/// Sentinel for "fitness not yet evaluated". Objectives themselves never
/// produce NaN, so the slot is unambiguous.
inline constexpr double kUnsetFitness = std::numeric_limits<double>::quiet_NaN();

/// A real-coded candidate solution: a fixed-length gene vector plus a
/// cached fitness value.
struct Chromosome {
    std::vector<double> genes;
    double fitness = kUnsetFitness;

    Chromosome() = default;
    explicit Chromosome(std::vector<double> g) : genes(std::move(g)) {}
    Chromosome(std::vector<double> g, double f) : genes(std::move(g)), fitness(f) {}

    bool has_fitness() const { return !std::isnan(fitness); }
    std::size_t dimension() const { return genes.size(); }
};

/// An ordered collection of chromosomes. `sorted` is true when members
/// ascend by fitness (minimization order, best first).
struct Population {
    std::vector<Chromosome> members;
    bool sorted = false;

    Population() = default;
    explicit Population(std::vector<Chromosome> m) : members(std::move(m)) {}

    std::size_t size() const { return members.size(); }
    bool empty() const { return members.empty(); }
};

}  // namespace mrga
