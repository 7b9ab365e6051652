#include "pasldpc/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pasldpc/errors.hpp"
#include "pasldpc/parallel.hpp"

namespace pasldpc {

namespace {

uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

uint64_t mix_seed(uint64_t master, uint64_t a, uint64_t b) {
    return splitmix64(splitmix64(master ^ (a * 0xD1342543DE82EF95ull)) ^ b);
}

long long quantize(double v) { return std::llround(v * 1e9); }

}  // namespace

DeOptimizer::DeOptimizer(DeConfig cfg, ThresholdAnalyzer& analyzer)
    : cfg_(std::move(cfg)), analyzer_(analyzer) {
    if (cfg_.population < 4) {
        throw Error(ErrorKind::invalid_config, "DE needs a population of at least 4");
    }
    if (cfg_.robust) {
        if (cfg_.operating_set.empty()) {
            throw Error(ErrorKind::invalid_config, "robust mode needs a nonempty operating set");
        }
        for (double r : cfg_.operating_set) {
            if (r < 0.7 - 1e-12 || r > 2.7 + 1e-12) {
                throw Error(ErrorKind::invalid_config,
                            "operating set must lie within [0.7, 2.7]");
            }
        }
    }
}

BaseMatrix DeOptimizer::random_candidate(std::mt19937_64& rng) const {
    BaseMatrix a;
    a.rows = cfg_.rows;
    a.cols = cfg_.cols;
    a.entries.resize(static_cast<std::size_t>(a.rows) * a.cols);
    a.level_of_column.resize(a.cols);
    for (int k = 0; k < a.cols; ++k) a.level_of_column[k] = level_map(k + 1, cfg_.levels_d);
    std::uniform_int_distribution<int> entry(0, cfg_.entry_max);
    for (int& e : a.entries) e = entry(rng);
    return repair(std::move(a), rng);
}

BaseMatrix DeOptimizer::repair(BaseMatrix a, std::mt19937_64& rng) const {
    const BaseMatrixConstraints limits{cfg_.entry_max, cfg_.vn_degree_max,
                                       cfg_.degree2_columns_max};
    std::uniform_int_distribution<int> pick_row(0, a.rows - 1);
    std::uniform_int_distribution<int> pick_col(0, a.cols - 1);
    for (int attempt = 0; attempt < 100; ++attempt) {
        for (int& e : a.entries) e = std::clamp(e, 0, cfg_.entry_max);
        // Overweight columns: shave the largest entries round-robin.
        for (int k = 0; k < a.cols; ++k) {
            while (a.column_sum(k) > cfg_.vn_degree_max) {
                int arg = 0;
                for (int l = 1; l < a.rows; ++l)
                    if (a.at(l, k) > a.at(arg, k)) arg = l;
                a.at(arg, k) -= 1;
            }
        }
        // Underweight columns up to degree 2.
        for (int k = 0; k < a.cols; ++k) {
            while (a.column_sum(k) < 2) {
                const int l = pick_row(rng);
                if (a.at(l, k) < cfg_.entry_max) a.at(l, k) += 1;
            }
        }
        // All but `degree2_columns_max` degree-2 columns are raised to 3.
        int kept = 0;
        for (int k = 0; k < a.cols; ++k) {
            if (a.column_sum(k) != 2) continue;
            if (kept < cfg_.degree2_columns_max) {
                ++kept;
                continue;
            }
            for (;;) {
                const int l = pick_row(rng);
                if (a.at(l, k) < cfg_.entry_max) {
                    a.at(l, k) += 1;
                    break;
                }
            }
        }
        // Degenerate checks.
        for (int l = 0; l < a.rows; ++l) {
            while (a.row_sum(l) < 2) {
                const int k = pick_col(rng);
                if (a.at(l, k) < cfg_.entry_max) a.at(l, k) += 1;
            }
        }
        if (a.violations(limits).empty()) return a;
    }
    throw Error(ErrorKind::infeasible_constraints, "base matrix repair did not converge");
}

double DeOptimizer::fitness_of(const BaseMatrix& a,
                               std::vector<std::pair<double, double>>* evaluated) {
    const std::vector<double> rates =
        cfg_.robust ? cfg_.operating_set : std::vector<double>{cfg_.single_rate};
    std::vector<int> key_entries = a.entries;
    key_entries.insert(key_entries.end(), a.level_of_column.begin(),
                       a.level_of_column.end());
    double fitness = -std::numeric_limits<double>::infinity();
    for (double r : rates) {
        const auto key = std::make_pair(key_entries, quantize(r));
        double th = 0.0;
        bool have = false;
        {
            std::lock_guard<std::mutex> lock(cache_mu_);
            auto it = threshold_cache_.find(key);
            if (it != threshold_cache_.end()) {
                th = it->second;
                have = true;
            }
        }
        if (!have) {
            try {
                th = analyzer_.threshold_db(a, r);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::diverged_ensemble) throw;
                th = std::numeric_limits<double>::infinity();
            }
            std::lock_guard<std::mutex> lock(cache_mu_);
            threshold_cache_.emplace(key, th);
        }
        if (evaluated) evaluated->emplace_back(r, th);
        const double backoff =
            cfg_.robust ? th - analyzer_.required_snr_db(r) : th;
        fitness = std::max(fitness, backoff);
    }
    return fitness;
}

double DeOptimizer::robust_fitness(const BaseMatrix& a, const std::vector<double>& p_set) {
    double worst = -std::numeric_limits<double>::infinity();
    for (double r : p_set) {
        double th;
        try {
            th = analyzer_.threshold_db(a, r);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::diverged_ensemble) throw;
            return std::numeric_limits<double>::infinity();
        }
        worst = std::max(worst, th - analyzer_.required_snr_db(r));
    }
    return worst;
}

Candidate DeOptimizer::evaluate(BaseMatrix a) {
    Candidate c;
    c.matrix = std::move(a);
    c.fitness = fitness_of(c.matrix, &c.evaluated_at);
    return c;
}

void DeOptimizer::de_step(std::vector<Candidate>& population, int generation) {
    const int np = static_cast<int>(population.size());
    std::vector<BaseMatrix> trials(np);
    for (int i = 0; i < np; ++i) {
        std::mt19937_64 rng(mix_seed(cfg_.seed, generation + 1, i));
        std::uniform_int_distribution<int> pick(0, np - 1);
        int ia, ib, ic;
        do { ia = pick(rng); } while (ia == i);
        do { ib = pick(rng); } while (ib == i || ib == ia);
        do { ic = pick(rng); } while (ic == i || ic == ia || ic == ib);
        const BaseMatrix& target = population[i].matrix;
        BaseMatrix trial = target;
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        std::uniform_int_distribution<int> pick_entry(0, static_cast<int>(target.entries.size()) - 1);
        const int forced = pick_entry(rng);
        for (std::size_t e = 0; e < target.entries.size(); ++e) {
            const double mutant = population[ia].matrix.entries[e] +
                                  cfg_.scale_f * (population[ib].matrix.entries[e] -
                                                  population[ic].matrix.entries[e]);
            const int rounded =
                std::clamp(static_cast<int>(std::lround(mutant)), 0, cfg_.entry_max);
            if (uni(rng) < cfg_.crossover_cr || static_cast<int>(e) == forced) {
                trial.entries[e] = rounded;
            }
        }
        trials[i] = repair(std::move(trial), rng);
    }
    std::vector<Candidate> evaluated(np);
    parallel_for(np, cfg_.workers, [&](int i) { evaluated[i] = evaluate(trials[i]); });
    for (int i = 0; i < np; ++i) {
        if (evaluated[i].fitness < population[i].fitness) {
            population[i] = std::move(evaluated[i]);
        }
    }
}

Candidate DeOptimizer::run(std::vector<GenerationLog>* log,
                           const std::function<void(const GenerationLog&)>& on_generation) {
    std::vector<BaseMatrix> initial(cfg_.population);
    for (int i = 0; i < cfg_.population; ++i) {
        std::mt19937_64 rng(mix_seed(cfg_.seed, 0, i));
        initial[i] = random_candidate(rng);
    }
    std::vector<Candidate> population(cfg_.population);
    parallel_for(cfg_.population, cfg_.workers,
                 [&](int i) { population[i] = evaluate(initial[i]); });

    auto best_of = [&]() {
        int arg = 0;
        for (int i = 1; i < cfg_.population; ++i)
            if (population[i].fitness < population[arg].fitness) arg = i;
        return population[arg];
    };
    auto record = [&](int gen) {
        GenerationLog entry{gen, best_of().fitness};
        if (log) log->push_back(entry);
        if (on_generation) on_generation(entry);
    };
    record(0);
    for (int g = 0; g < cfg_.generations; ++g) {
        de_step(population, g);
        record(g + 1);
    }
    return best_of();
}

}  // namespace pasldpc
