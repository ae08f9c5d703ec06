#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <vector>

#include "mrga/ga.hpp"

using mrga::Chromosome;
using mrga::GaParams;
using mrga::Objective;
using mrga::ObjectiveSpec;
using mrga::Population;
using mrga::RngStream;

namespace {

Objective sphere_objective(std::uint32_t dim, double lo = -100.0, double hi = 100.0) {
    return mrga::lookup_objective({"sphere", dim, lo, hi});
}

Population make_population(const std::vector<std::vector<double>>& genes) {
    Population pop;
    for (const auto& g : genes) pop.members.emplace_back(g);
    return pop;
}

Population with_fitnesses(const std::vector<double>& fitnesses) {
    Population pop;
    for (std::size_t i = 0; i < fitnesses.size(); ++i)
        pop.members.emplace_back(std::vector<double>{static_cast<double>(i)}, fitnesses[i]);
    return pop;
}

bool same_genes(const Chromosome& a, const Chromosome& b) {
    return a.genes == b.genes;
}

}  // namespace

TEST_CASE("evaluate fills fitness from the objective") {
    auto pop = make_population({{0, 0, 0}, {1, 2, 3}});
    mrga::evaluate(pop, sphere_objective(3));
    CHECK(pop.members[0].fitness == 0.0);
    CHECK(pop.members[1].fitness == 14.0);  // 1 + 4 + 9
}

TEST_CASE("evaluate clamps genes into bounds first") {
    auto pop = make_population({{150.0}, {-123.0}});
    mrga::evaluate(pop, sphere_objective(1));
    CHECK(pop.members[0].genes[0] == 100.0);
    CHECK(pop.members[0].fitness == 10000.0);
    CHECK(pop.members[1].genes[0] == -100.0);
    CHECK(pop.members[1].fitness == 10000.0);
}

TEST_CASE("evaluate re-evaluation is a no-op") {
    int calls = 0;
    Objective counting({"sphere", 2, -100, 100}, [&calls](std::span<const double> g) {
        ++calls;
        return mrga::sphere(g);
    });
    auto pop = make_population({{1, 1}, {2, 2}, {3, 3}});
    mrga::evaluate(pop, counting);
    CHECK(calls == 3);
    mrga::evaluate(pop, counting);
    CHECK(calls == 3);  // cached fitness trusted
}

TEST_CASE("evaluate preserves order and rejects dimension mismatch") {
    auto pop = make_population({{2, 0}, {1, 0}});
    mrga::evaluate(pop, sphere_objective(2));
    CHECK(pop.members[0].fitness == 4.0);
    CHECK(pop.members[1].fitness == 1.0);

    auto bad = make_population({{1, 2, 3}});
    CHECK_THROWS_AS(mrga::evaluate(bad, sphere_objective(2)), mrga::ConfigError);
}

TEST_CASE("rank sorts ascending by fitness") {
    auto pop = with_fitnesses({3, 1, 2});
    mrga::rank(pop);
    REQUIRE(pop.sorted);
    CHECK(pop.members[0].fitness == 1.0);
    CHECK(pop.members[1].fitness == 2.0);
    CHECK(pop.members[2].fitness == 3.0);
}

TEST_CASE("rank is stable for ties") {
    // members A,B,C with fitness 5,5,1; genes mark the original index
    auto pop = with_fitnesses({5, 5, 1});
    mrga::rank(pop);
    CHECK(pop.members[0].genes[0] == 2.0);  // C
    CHECK(pop.members[1].genes[0] == 0.0);  // A
    CHECK(pop.members[2].genes[0] == 1.0);  // B
}

TEST_CASE("rank is idempotent") {
    auto pop = with_fitnesses({4, 2, 9, 2});
    mrga::rank(pop);
    auto snapshot = pop.members;
    mrga::rank(pop);
    for (std::size_t i = 0; i < snapshot.size(); ++i) {
        CHECK(same_genes(pop.members[i], snapshot[i]));
        CHECK(pop.members[i].fitness == snapshot[i].fitness);
    }
}

TEST_CASE("rank rejects unset fitness and empty populations") {
    auto pop = make_population({{1.0}});
    CHECK_THROWS_AS(mrga::rank(pop), mrga::ContractError);
    Population empty;
    CHECK_THROWS_AS(mrga::rank(empty), mrga::ContractError);
}

TEST_CASE("best_of picks the minimum, ties by lowest index") {
    auto pop = with_fitnesses({2, 1, 3});
    CHECK(mrga::best_of(pop).fitness == 1.0);
    CHECK(mrga::best_of(pop).genes[0] == 1.0);

    auto ties = with_fitnesses({7, 7, 7});
    CHECK(mrga::best_of(ties).genes[0] == 0.0);

    auto single = with_fitnesses({5});
    CHECK(mrga::best_of(single).fitness == 5.0);

    Population empty;
    CHECK_THROWS_AS(mrga::best_of(empty), mrga::ContractError);
}

TEST_CASE("rank weights for four survivors") {
    const auto w = mrga::rank_weights(4);
    REQUIRE(w.size() == 4);
    CHECK(w[0] == Catch::Approx(0.4));  // (4-1+1)/10
    CHECK(w[1] == Catch::Approx(0.3));
    CHECK(w[2] == Catch::Approx(0.2));
    CHECK(w[3] == Catch::Approx(0.1));
}

TEST_CASE("ceil_fraction behaves like the mathematical value on decimal rates") {
    CHECK(mrga::ceil_fraction(0.01, 1000) == 10);
    CHECK(mrga::ceil_fraction(0.5, 10) == 5);
    CHECK(mrga::ceil_fraction(0.5, 5) == 3);
    CHECK(mrga::ceil_fraction(0.3, 10) == 3);
    CHECK(mrga::elite_count(1000, 0.01) == 10);
    CHECK(mrga::elite_count(50, 0.001) == 1);  // max(1, ceil(0.05))
}

TEST_CASE("select_parent_pairs counting rule and survivor restriction") {
    GaParams params;
    params.dimension = 1;
    params.keep_fraction = 0.5;
    auto pop = with_fitnesses({1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
    mrga::rank(pop);
    RngStream rng(5);
    const auto pairs = mrga::select_parent_pairs(pop, rng, params);
    CHECK(pairs.size() == 3);  // ceil((10-5)/2)
    for (const auto& [m, f] : pairs) {
        CHECK(m < 5);
        CHECK(f < 5);
        CHECK(m != f);
    }
}

TEST_CASE("select_parent_pairs requires a ranked population") {
    GaParams params;
    auto pop = with_fitnesses({1, 2, 3, 4});
    RngStream rng(5);
    CHECK_THROWS_AS(mrga::select_parent_pairs(pop, rng, params), mrga::ContractError);
}

TEST_CASE("select_parent_pairs rejects a single survivor") {
    GaParams params;
    params.keep_fraction = 0.5;
    auto pop = with_fitnesses({1, 2});  // n_keep = 1
    mrga::rank(pop);
    RngStream rng(5);
    CHECK_THROWS_AS(mrga::select_parent_pairs(pop, rng, params),
                    mrga::DegeneratePopulationError);
}

TEST_CASE("select_parent_pairs mother marginal matches the rank weights") {
    GaParams params;
    params.keep_fraction = 0.5;
    auto pop = with_fitnesses({1, 2, 3, 4, 5, 6, 7, 8});  // n_keep = 4
    mrga::rank(pop);
    RngStream rng(33);
    const int trials = 30000;
    std::vector<int> hits(4, 0);
    for (int t = 0; t < trials; ++t) {
        const auto pairs = mrga::select_parent_pairs(pop, rng, params);
        ++hits[pairs[0].first];  // first draw of the round is the first mother
    }
    const auto w = mrga::rank_weights(4);
    for (int r = 0; r < 4; ++r) {
        const double mean = trials * w[r];
        const double sigma = std::sqrt(trials * w[r] * (1 - w[r]));
        CHECK(std::abs(hits[r] - mean) < 5 * sigma);
    }
}

TEST_CASE("crossover of identical parents reproduces them") {
    Chromosome p(std::vector<double>{1, 2, 3, 4});
    RngStream rng(9);
    const auto [a, b] = mrga::crossover_haupt(p, p, rng);
    CHECK(same_genes(a, p));
    CHECK(same_genes(b, p));
    CHECK_FALSE(a.has_fitness());
    CHECK_FALSE(b.has_fitness());
}

TEST_CASE("crossover follows the documented draw order and split rule") {
    RngStream rng(123);
    Chromosome mother(std::vector<double>{10, 20, 30, 40});
    Chromosome father(std::vector<double>{-1, -2, -3, -4});
    for (int trial = 0; trial < 500; ++trial) {
        RngStream probe = rng;  // same state the operator will consume
        const auto alpha = static_cast<std::size_t>(probe.uniform_index(4));
        const double beta = probe.next_double();

        const auto [first, second] = mrga::crossover_haupt(mother, father, rng);
        const double diff = mother.genes[alpha] - father.genes[alpha];
        for (std::size_t i = 0; i < 4; ++i) {
            if (i < alpha) {
                REQUIRE(first.genes[i] == mother.genes[i]);
                REQUIRE(second.genes[i] == father.genes[i]);
            } else if (i > alpha) {
                REQUIRE(first.genes[i] == father.genes[i]);
                REQUIRE(second.genes[i] == mother.genes[i]);
            } else {
                REQUIRE(first.genes[i] == mother.genes[alpha] - beta * diff);
                REQUIRE(second.genes[i] == father.genes[alpha] + beta * diff);
            }
        }
    }
}

TEST_CASE("crossover blend stays within the parents' span") {
    RngStream rng(77);
    for (int trial = 0; trial < 1000; ++trial) {
        Chromosome m, f;
        for (int i = 0; i < 6; ++i) {
            m.genes.push_back(rng.uniform_real(-100, 100));
            f.genes.push_back(rng.uniform_real(-100, 100));
        }
        const auto [a, b] = mrga::crossover_haupt(m, f, rng);
        for (int i = 0; i < 6; ++i) {
            const double lo = std::min(m.genes[i], f.genes[i]);
            const double hi = std::max(m.genes[i], f.genes[i]);
            REQUIRE(a.genes[i] >= lo);
            REQUIRE(a.genes[i] <= hi);
            REQUIRE(b.genes[i] >= lo);
            REQUIRE(b.genes[i] <= hi);
        }
    }
}

TEST_CASE("crossover blended genes are symmetric about the parent sum") {
    RngStream rng(88);
    Chromosome m(std::vector<double>{0.0}), f(std::vector<double>{10.0});
    const auto [a, b] = mrga::crossover_haupt(m, f, rng);
    CHECK(a.genes[0] + b.genes[0] == Catch::Approx(10.0).margin(1e-12));
}

TEST_CASE("crossover rejects mismatched dimensions") {
    Chromosome m(std::vector<double>{1, 2});
    Chromosome f(std::vector<double>{1, 2, 3});
    RngStream rng(1);
    CHECK_THROWS_AS(mrga::crossover_haupt(m, f, rng), mrga::ConfigError);
}

TEST_CASE("mutate with rate zero changes nothing") {
    GaParams params;
    params.mutation_rate = 0.0;
    auto pop = with_fitnesses({1, 2, 3, 4});
    mrga::rank(pop);
    auto snapshot = pop.members;
    RngStream rng(4);
    mrga::mutate(pop, rng, params);
    for (std::size_t i = 0; i < snapshot.size(); ++i) {
        CHECK(same_genes(pop.members[i], snapshot[i]));
        CHECK(pop.members[i].fitness == snapshot[i].fitness);
    }
}

TEST_CASE("mutate with rate one resamples every non-best gene in bounds") {
    GaParams params;
    params.mutation_rate = 1.0;
    params.lower_bound = -100.0;
    params.upper_bound = 100.0;
    Population pop;
    for (int i = 0; i < 5; ++i)
        pop.members.emplace_back(std::vector<double>(8, 500.0 + i), static_cast<double>(i));
    pop.sorted = true;
    RngStream rng(6);
    mrga::mutate(pop, rng, params);

    // best untouched, fitness intact
    CHECK(pop.members[0].genes == std::vector<double>(8, 500.0));
    CHECK(pop.members[0].fitness == 0.0);
    for (std::size_t m = 1; m < pop.members.size(); ++m) {
        CHECK_FALSE(pop.members[m].has_fitness());
        for (double g : pop.members[m].genes) {
            REQUIRE(g >= -100.0);
            REQUIRE(g <= 100.0);
        }
    }
}

TEST_CASE("run_generations keeps the optimum absorbing") {
    GaParams params;
    params.dimension = 5;
    params.iterations = 30;
    auto obj = sphere_objective(5);
    Population pop;
    for (int i = 0; i < 6; ++i) pop.members.emplace_back(std::vector<double>(5, 0.0));
    mrga::evaluate(pop, obj);
    RngStream rng(17);
    const auto final_pop = mrga::run_generations(pop, params, obj, rng);
    CHECK(mrga::best_of(final_pop).fitness == 0.0);
}

TEST_CASE("run_generations runs exactly the requested generations") {
    GaParams params;
    params.dimension = 4;
    params.iterations = 1;
    auto obj = sphere_objective(4);
    RngStream init(3);
    auto pop = mrga::random_population(10, 4, -100, 100, init);
    mrga::evaluate(pop, obj);
    RngStream rng(18);
    mrga::EvolutionStats stats;
    mrga::run_generations(pop, params, obj, rng, &stats);
    CHECK(stats.generations_run == 1);
    CHECK(stats.best_by_generation.size() == 1);

    params.iterations = 7;
    RngStream rng2(18);
    mrga::run_generations(pop, params, obj, rng2, &stats);
    CHECK(stats.generations_run == 7);
    CHECK(stats.best_by_generation.size() == 7);
}

TEST_CASE("run_generations is deterministic for a fixed seed") {
    GaParams params;
    params.dimension = 10;
    params.iterations = 50;
    auto obj = sphere_objective(10);
    RngStream init(42);
    auto pop = mrga::random_population(100, 10, -100, 100, init);
    mrga::evaluate(pop, obj);

    RngStream rng_a(42), rng_b(42);
    const auto a = mrga::run_generations(pop, params, obj, rng_a);
    const auto b = mrga::run_generations(pop, params, obj, rng_b);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        REQUIRE(std::memcmp(a.members[i].genes.data(), b.members[i].genes.data(),
                            a.members[i].genes.size() * sizeof(double)) == 0);
        REQUIRE(a.members[i].fitness == b.members[i].fitness);
    }
}

TEST_CASE("run_generations best fitness is non-increasing") {
    GaParams params;
    params.dimension = 8;
    params.iterations = 60;
    auto obj = sphere_objective(8);
    RngStream init(9);
    auto pop = mrga::random_population(40, 8, -100, 100, init);
    mrga::evaluate(pop, obj);
    RngStream rng(10);
    mrga::EvolutionStats stats;
    mrga::run_generations(pop, params, obj, rng, &stats);
    double prev = stats.initial_best;
    for (double best : stats.best_by_generation) {
        REQUIRE(best <= prev);
        prev = best;
    }
}

TEST_CASE("run_generations rejects degenerate and inconsistent inputs") {
    GaParams params;
    params.dimension = 2;
    auto obj = sphere_objective(2);
    auto tiny = make_population({{1, 1}, {2, 2}, {3, 3}});
    mrga::evaluate(tiny, obj);
    RngStream rng(1);
    CHECK_THROWS_AS(mrga::run_generations(tiny, params, obj, rng),
                    mrga::DegeneratePopulationError);

    auto pop = make_population({{1, 1}, {2, 2}, {3, 3}, {4, 4}});
    mrga::evaluate(pop, obj);
    GaParams narrow = params;
    narrow.lower_bound = -50.0;  // objective bounds differ
    CHECK_THROWS_AS(mrga::run_generations(pop, narrow, obj, rng), mrga::ConfigError);

    GaParams zero_iters = params;
    zero_iters.iterations = 0;
    CHECK_THROWS_AS(mrga::run_generations(pop, zero_iters, obj, rng), mrga::ConfigError);
}

TEST_CASE("random_population is deterministic and in bounds") {
    RngStream a(21), b(21);
    const auto pa = mrga::random_population(20, 6, -3, 3, a);
    const auto pb = mrga::random_population(20, 6, -3, 3, b);
    for (std::size_t i = 0; i < pa.size(); ++i) {
        REQUIRE(pa.members[i].genes == pb.members[i].genes);
        REQUIRE_FALSE(pa.members[i].has_fitness());
        for (double g : pa.members[i].genes) {
            REQUIRE(g >= -3.0);
            REQUIRE(g < 3.0);
        }
    }
}

TEST_CASE("ga params validation rejects out-of-range knobs") {
    GaParams params;
    CHECK_NOTHROW(params.validate());

    auto expect_reject = [](auto mutator) {
        GaParams p;
        mutator(p);
        CHECK_THROWS_AS(p.validate(), mrga::ConfigError);
    };
    expect_reject([](GaParams& p) { p.dimension = 0; });
    expect_reject([](GaParams& p) { p.iterations = 0; });
    expect_reject([](GaParams& p) { p.mutation_rate = -0.1; });
    expect_reject([](GaParams& p) { p.mutation_rate = 1.1; });
    expect_reject([](GaParams& p) { p.crossover_rate = 2.0; });
    expect_reject([](GaParams& p) { p.elite_rate = 0.0; });
    expect_reject([](GaParams& p) { p.elite_rate = 1.5; });
    expect_reject([](GaParams& p) { p.keep_fraction = 0.0; });
    expect_reject([](GaParams& p) { p.keep_fraction = 1.0; });
    expect_reject([](GaParams& p) { p.lower_bound = 5; p.upper_bound = -5; });
}
