#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gpfuse/fitness.hpp"
#include "gpfuse/tree.hpp"

namespace gpfuse {

using Rng = std::mt19937_64;

struct GpConfig {
    int population_size = 50;  // must be even
    int max_generations = 100;
    int tournament_size = 5;
    bool elitism = true;

    double crossover_rate_init = 0.9;
    double crossover_rate_min = 0.6;
    double crossover_rate_max = 0.95;
    double mutation_rate_init = 0.1;
    double mutation_rate_min = 0.05;
    double mutation_rate_max = 0.4;
    int adaptation_window = 10;  // generations of operator credit kept

    int init_depth_min = 2;  // ramped half-and-half depth range
    int init_depth_max = 6;
    int dynamic_depth_start = 7;

    std::uint64_t rng_seed = 0;
    double w1 = 0.01;
    double w2 = 0.01;
    int workers = 1;      // parallel fitness evaluations; never affects results
    int frame_stride = 1;

    void check() const;
    static GpConfig load(const std::filesystem::path& path);  // key=value file
    std::string to_text() const;                              // same key=value format
};

struct GenerationRecord {
    int generation = 0;
    int population_size = 0;
    double best_f = 0;
    double mean_f = 0;
    double crossover_rate = 0;
    double mutation_rate = 0;
    int depth_limit = 0;
    std::string best_tree;  // canonical s-expression of the generation's best
};

struct RunHistory {
    std::vector<GenerationRecord> generations;
};

void save_history(const RunHistory& history, const std::filesystem::path& csv_path);

// Fitness provider for the engine; lower f is better. Implementations must be
// safe to call from several threads at once.
class TreeScorer {
  public:
    virtual ~TreeScorer() = default;
    virtual FitnessReport score(const SolutionTree& tree) const = 0;
};

// Ramped half-and-half over depths [init_depth_min, init_depth_max]; within
// each depth half the trees are "full" and half "grow".
std::vector<SolutionTree> init_population(const GpConfig& cfg, int n_terminals, Rng& rng);

// Draws tournament_size individuals with replacement and returns the index of
// the fittest; ties break toward smaller trees, then earlier draw.
std::size_t tournament_select(std::span<const SolutionTree> population, std::span<const double> fitnesses,
                              int tournament_size, Rng& rng);

// Standard subtree exchange at uniformly chosen nodes. An offspring deeper
// than depth_limit is replaced by its own parent, unless accept_overdepth
// returns true for it.
std::pair<SolutionTree, SolutionTree> crossover(
    const SolutionTree& a, const SolutionTree& b, Rng& rng, int depth_limit,
    const std::function<bool(const SolutionTree&)>& accept_overdepth = {});

// Per-node point mutation: each node independently with probability p_m is
// resampled among the symbols of identical arity (MV keeps its arity).
SolutionTree mutate(const SolutionTree& tree, double p_m, int n_terminals, Rng& rng);

// Operator-credit adaptation: rates proportional to the normalized windowed
// credits, within the configured bounds; with zero total credit the current
// rates decay halfway toward their initial values.
std::pair<double, double> adapt_rates(double crossover_credit, double mutation_credit, const GpConfig& cfg,
                                      double current_pc, double current_pm);

struct EvolveResult {
    SolutionTree best;
    FitnessReport best_report;
    RunHistory history;
};

// The full evolutionary loop. Deterministic given (cfg, scorer, seed),
// independent of cfg.workers.
EvolveResult evolve(const GpConfig& cfg, int n_terminals, const TreeScorer& scorer);

}  // namespace gpfuse
