#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "pasldpc/protograph.hpp"

namespace pasldpc {

struct DeConfig {
    int population = 30;
    double scale_f = 0.8;
    double crossover_cr = 0.88;
    int generations = 200;
    int entry_max = 3;
    int vn_degree_max = 9;
    int degree2_columns_max = 1;
    std::vector<double> operating_set;  // robust mode evaluates the max over these
    bool robust = true;                 // false: single-rate threshold fitness
    double single_rate = 2.7;
    uint64_t seed = 1;
    int rows = 3;
    int cols = 16;
    int levels_d = 4;  // columns per bit level, T(k) = ceil(k/D)
    int workers = 1;
};

struct Candidate {
    BaseMatrix matrix;
    double fitness = 0.0;                               // dB
    std::vector<std::pair<double, double>> evaluated_at;  // (R, threshold_db)
};

struct GenerationLog {
    int generation = 0;
    double best_fitness = 0.0;
};

class DeOptimizer {
public:
    DeOptimizer(DeConfig cfg, ThresholdAnalyzer& analyzer);

    BaseMatrix random_candidate(std::mt19937_64& rng) const;

    // Project a matrix onto the constraint set; throws infeasible-constraints
    // after 100 attempts.
    BaseMatrix repair(BaseMatrix a, std::mt19937_64& rng) const;

    // Eq. style min-max fitness in dB; +inf when any threshold diverges.
    double robust_fitness(const BaseMatrix& a, const std::vector<double>& p_set);

    Candidate evaluate(BaseMatrix a);

    // One DE generation: mutate, crossover, repair, select.
    void de_step(std::vector<Candidate>& population, int generation);

    // Full run from a fresh random population; per-generation log appended.
    Candidate run(std::vector<GenerationLog>* log = nullptr,
                  const std::function<void(const GenerationLog&)>& on_generation = {});

    const DeConfig& config() const { return cfg_; }

private:
    double fitness_of(const BaseMatrix& a,
                      std::vector<std::pair<double, double>>* evaluated);

    DeConfig cfg_;
    ThresholdAnalyzer& analyzer_;
    std::mutex cache_mu_;
    std::map<std::pair<std::vector<int>, long long>, double> threshold_cache_;
};

}  // namespace pasldpc
