#include "gpfuse/engine.hpp"

#include <algorithm>
#include <atomic>
#include <deque>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "gpfuse/kvfile.hpp"

namespace gpfuse {

void GpConfig::check() const {
    if (population_size < 2 || population_size % 2 != 0)
        throw std::invalid_argument("population_size must be even and >= 2");
    if (max_generations < 0) throw std::invalid_argument("max_generations must be >= 0");
    if (tournament_size < 1 || tournament_size > population_size)
        throw std::invalid_argument("tournament_size must be in [1, population_size]");
    auto probability = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!probability(crossover_rate_init) || !probability(crossover_rate_min) || !probability(crossover_rate_max) ||
        !probability(mutation_rate_init) || !probability(mutation_rate_min) || !probability(mutation_rate_max))
        throw std::invalid_argument("rates must be probabilities in [0, 1]");
    if (crossover_rate_min > crossover_rate_max || mutation_rate_min > mutation_rate_max)
        throw std::invalid_argument("rate bounds are inverted");
    if (adaptation_window < 1) throw std::invalid_argument("adaptation_window must be >= 1");
    if (init_depth_min < 1 || init_depth_max < init_depth_min)
        throw std::invalid_argument("invalid initial depth range");
    if (dynamic_depth_start < init_depth_max)
        throw std::invalid_argument("dynamic_depth_start must be >= init_depth_max");
    if (workers < 1) throw std::invalid_argument("workers must be >= 1");
    if (frame_stride < 1) throw std::invalid_argument("frame_stride must be >= 1");
    if (w1 < 0 || w2 < 0) throw std::invalid_argument("penalty weights must be >= 0");
}

GpConfig GpConfig::load(const std::filesystem::path& path) {
    KvFile kv = KvFile::load(path);
    GpConfig cfg;
    static const char* known[] = {"population_size", "max_generations", "tournament_size", "elitism",
                                  "crossover_rate_init", "crossover_rate_min", "crossover_rate_max",
                                  "mutation_rate_init", "mutation_rate_min", "mutation_rate_max",
                                  "adaptation_window", "init_depth_min", "init_depth_max",
                                  "dynamic_depth_start", "rng_seed", "w1", "w2", "workers", "frame_stride"};
    for (const auto& [k, v] : kv.entries)
        if (std::find_if(std::begin(known), std::end(known), [&](const char* s) { return k == s; }) ==
            std::end(known))
            throw std::runtime_error(path.string() + ": unknown config key '" + k + "'");
    cfg.population_size = static_cast<int>(kv.get_int("population_size", cfg.population_size));
    cfg.max_generations = static_cast<int>(kv.get_int("max_generations", cfg.max_generations));
    cfg.tournament_size = static_cast<int>(kv.get_int("tournament_size", cfg.tournament_size));
    cfg.elitism = kv.get_bool("elitism", cfg.elitism);
    cfg.crossover_rate_init = kv.get_double("crossover_rate_init", cfg.crossover_rate_init);
    cfg.crossover_rate_min = kv.get_double("crossover_rate_min", cfg.crossover_rate_min);
    cfg.crossover_rate_max = kv.get_double("crossover_rate_max", cfg.crossover_rate_max);
    cfg.mutation_rate_init = kv.get_double("mutation_rate_init", cfg.mutation_rate_init);
    cfg.mutation_rate_min = kv.get_double("mutation_rate_min", cfg.mutation_rate_min);
    cfg.mutation_rate_max = kv.get_double("mutation_rate_max", cfg.mutation_rate_max);
    cfg.adaptation_window = static_cast<int>(kv.get_int("adaptation_window", cfg.adaptation_window));
    cfg.init_depth_min = static_cast<int>(kv.get_int("init_depth_min", cfg.init_depth_min));
    cfg.init_depth_max = static_cast<int>(kv.get_int("init_depth_max", cfg.init_depth_max));
    cfg.dynamic_depth_start = static_cast<int>(kv.get_int("dynamic_depth_start", cfg.dynamic_depth_start));
    cfg.rng_seed = static_cast<std::uint64_t>(kv.get_int("rng_seed", static_cast<long long>(cfg.rng_seed)));
    cfg.w1 = kv.get_double("w1", cfg.w1);
    cfg.w2 = kv.get_double("w2", cfg.w2);
    cfg.workers = static_cast<int>(kv.get_int("workers", cfg.workers));
    cfg.frame_stride = static_cast<int>(kv.get_int("frame_stride", cfg.frame_stride));
    cfg.check();
    return cfg;
}

std::string GpConfig::to_text() const {
    std::ostringstream out;
    out.precision(17);
    out << "population_size = " << population_size << "\n"
        << "max_generations = " << max_generations << "\n"
        << "tournament_size = " << tournament_size << "\n"
        << "elitism = " << (elitism ? "true" : "false") << "\n"
        << "crossover_rate_init = " << crossover_rate_init << "\n"
        << "crossover_rate_min = " << crossover_rate_min << "\n"
        << "crossover_rate_max = " << crossover_rate_max << "\n"
        << "mutation_rate_init = " << mutation_rate_init << "\n"
        << "mutation_rate_min = " << mutation_rate_min << "\n"
        << "mutation_rate_max = " << mutation_rate_max << "\n"
        << "adaptation_window = " << adaptation_window << "\n"
        << "init_depth_min = " << init_depth_min << "\n"
        << "init_depth_max = " << init_depth_max << "\n"
        << "dynamic_depth_start = " << dynamic_depth_start << "\n"
        << "rng_seed = " << rng_seed << "\n"
        << "w1 = " << w1 << "\n"
        << "w2 = " << w2 << "\n"
        << "workers = " << workers << "\n"
        << "frame_stride = " << frame_stride << "\n";
    return out.str();
}

void save_history(const RunHistory& history, const std::filesystem::path& csv_path) {
    std::ofstream out(csv_path);
    if (!out) throw std::runtime_error(csv_path.string() + ": cannot open destination for writing");
    out << "generation,population_size,best_f,mean_f,crossover_rate,mutation_rate,depth_limit,best_tree\n";
    out.precision(17);
    for (const GenerationRecord& r : history.generations)
        out << r.generation << ',' << r.population_size << ',' << r.best_f << ',' << r.mean_f << ','
            << r.crossover_rate << ','
            << r.mutation_rate << ',' << r.depth_limit << ",\"" << r.best_tree << "\"\n";
}

namespace {

constexpr OpKind kUnaryOps[] = {OpKind::Erode, OpKind::Dilate, OpKind::Median};
constexpr OpKind kBinaryOps[] = {OpKind::Or, OpKind::And};
constexpr OpKind kAllOps[] = {OpKind::Erode, OpKind::Dilate, OpKind::Median,
                              OpKind::Or,    OpKind::And,    OpKind::Majority};

int arity_for(OpKind op, Rng& rng) {
    switch (op) {
        case OpKind::Erode:
        case OpKind::Dilate:
        case OpKind::Median: return 1;
        case OpKind::Or:
        case OpKind::And: return 2;
        case OpKind::Majority: return std::uniform_int_distribution<int>(0, 1)(rng) == 0 ? 3 : 5;
        case OpKind::Terminal: break;
    }
    return 0;
}

TreeNode random_terminal(int n_terminals, Rng& rng) {
    TreeNode node;
    node.terminal = std::uniform_int_distribution<int>(0, n_terminals - 1)(rng);
    return node;
}

TreeNode random_node(int depth_left, bool full, int n_terminals, Rng& rng) {
    if (depth_left == 0) return random_terminal(n_terminals, rng);
    if (!full) {
        // grow: pick uniformly among the 7 symbol kinds, terminal included
        if (std::uniform_int_distribution<int>(0, 6)(rng) == 0) return random_terminal(n_terminals, rng);
    }
    TreeNode node;
    node.op = kAllOps[std::uniform_int_distribution<int>(0, 5)(rng)];
    const int arity = arity_for(node.op, rng);
    node.children.reserve(arity);
    for (int i = 0; i < arity; ++i) node.children.push_back(random_node(depth_left - 1, full, n_terminals, rng));
    return node;
}

int node_count(const TreeNode& n) {
    int count = 1;
    for (const TreeNode& c : n.children) count += node_count(c);
    return count;
}

int node_depth(const TreeNode& n) {
    int depth = 0;
    for (const TreeNode& c : n.children) depth = std::max(depth, 1 + node_depth(c));
    return depth;
}

// Preorder node access for uniform subtree picks.
TreeNode* nth_node(TreeNode& root, int index) {
    if (index == 0) return &root;
    int seen = 0;
    for (TreeNode& c : root.children) {
        const int sub = node_count(c);
        if (index - 1 - seen < sub) return nth_node(c, index - 1 - seen);
        seen += sub;
    }
    return nullptr;
}

void mutate_node(TreeNode& node, double p_m, int n_terminals, Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (unit(rng) < p_m) {
        switch (node.op) {
            case OpKind::Terminal:
                node.terminal = std::uniform_int_distribution<int>(0, n_terminals - 1)(rng);
                break;
            case OpKind::Erode:
            case OpKind::Dilate:
            case OpKind::Median:
                node.op = kUnaryOps[std::uniform_int_distribution<int>(0, 2)(rng)];
                break;
            case OpKind::Or:
            case OpKind::And:
                node.op = kBinaryOps[std::uniform_int_distribution<int>(0, 1)(rng)];
                break;
            case OpKind::Majority:
                break;  // MV is the only symbol of its arity
        }
    }
    for (TreeNode& c : node.children) mutate_node(c, p_m, n_terminals, rng);
}

// Shared fitness cache keyed by canonical serialization.
class ScorerCache {
  public:
    ScorerCache(const TreeScorer& scorer, int workers) : scorer_(scorer), workers_(workers) {}

    FitnessReport score(const SolutionTree& tree) {
        const std::string key = serialize(tree);
        {
            std::lock_guard lock(mutex_);
            if (auto it = cache_.find(key); it != cache_.end()) return it->second;
        }
        FitnessReport report = scorer_.score(tree);
        std::lock_guard lock(mutex_);
        cache_.emplace(key, report);
        return report;
    }

    std::vector<FitnessReport> score_all(std::span<const SolutionTree> trees) {
        std::vector<FitnessReport> reports(trees.size());
        if (workers_ <= 1 || trees.size() <= 1) {
            for (std::size_t i = 0; i < trees.size(); ++i) reports[i] = score(trees[i]);
            return reports;
        }
        std::atomic<std::size_t> next{0};
        auto work = [&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= trees.size()) break;
                reports[i] = score(trees[i]);
            }
        };
        std::vector<std::thread> threads;
        const int n = std::min<int>(workers_, static_cast<int>(trees.size()));
        threads.reserve(n);
        for (int t = 0; t < n; ++t) threads.emplace_back(work);
        for (auto& t : threads) t.join();
        return reports;
    }

  private:
    const TreeScorer& scorer_;
    int workers_;
    std::mutex mutex_;
    std::unordered_map<std::string, FitnessReport> cache_;
};

}  // namespace

std::vector<SolutionTree> init_population(const GpConfig& cfg, int n_terminals, Rng& rng) {
    if (n_terminals < 1) throw std::invalid_argument("init_population: need at least one terminal");
    const int span = cfg.init_depth_max - cfg.init_depth_min + 1;
    std::vector<SolutionTree> population;
    population.reserve(cfg.population_size);
    for (int i = 0; i < cfg.population_size; ++i) {
        const int depth = cfg.init_depth_min + (i / 2) % span;
        const bool full = i % 2 == 0;
        SolutionTree tree;
        tree.root = random_node(depth, full, n_terminals, rng);
        population.push_back(std::move(tree));
    }
    return population;
}

std::size_t tournament_select(std::span<const SolutionTree> population, std::span<const double> fitnesses,
                              int tournament_size, Rng& rng) {
    if (population.empty() || population.size() != fitnesses.size())
        throw std::invalid_argument("tournament_select: bad population");
    std::uniform_int_distribution<std::size_t> pick(0, population.size() - 1);
    std::size_t best = pick(rng);
    int best_size = node_count(population[best].root);
    for (int t = 1; t < tournament_size; ++t) {
        const std::size_t i = pick(rng);
        const int size = node_count(population[i].root);
        if (fitnesses[i] < fitnesses[best] || (fitnesses[i] == fitnesses[best] && size < best_size)) {
            best = i;
            best_size = size;
        }
    }
    return best;
}

std::pair<SolutionTree, SolutionTree> crossover(const SolutionTree& a, const SolutionTree& b, Rng& rng,
                                                int depth_limit,
                                                const std::function<bool(const SolutionTree&)>& accept_overdepth) {
    SolutionTree child_a = a;
    SolutionTree child_b = b;
    const int na = node_count(child_a.root);
    const int nb = node_count(child_b.root);
    const int ia = std::uniform_int_distribution<int>(0, na - 1)(rng);
    const int ib = std::uniform_int_distribution<int>(0, nb - 1)(rng);
    TreeNode* pa = nth_node(child_a.root, ia);
    TreeNode* pb = nth_node(child_b.root, ib);
    std::swap(*pa, *pb);
    if (node_depth(child_a.root) > depth_limit && !(accept_overdepth && accept_overdepth(child_a))) child_a = a;
    if (node_depth(child_b.root) > depth_limit && !(accept_overdepth && accept_overdepth(child_b))) child_b = b;
    return {std::move(child_a), std::move(child_b)};
}

SolutionTree mutate(const SolutionTree& tree, double p_m, int n_terminals, Rng& rng) {
    if (p_m < 0 || p_m > 1) throw std::invalid_argument("mutate: p_m must be in [0, 1]");
    SolutionTree out = tree;
    mutate_node(out.root, p_m, n_terminals, rng);
    return out;
}

std::pair<double, double> adapt_rates(double crossover_credit, double mutation_credit, const GpConfig& cfg,
                                      double current_pc, double current_pm) {
    const double total = crossover_credit + mutation_credit;
    if (total <= 0) {
        // no operator earned credit: decay halfway back toward the initial rates
        return {current_pc + 0.5 * (cfg.crossover_rate_init - current_pc),
                current_pm + 0.5 * (cfg.mutation_rate_init - current_pm)};
    }
    const double frac = crossover_credit / total;
    const double pc = cfg.crossover_rate_min + frac * (cfg.crossover_rate_max - cfg.crossover_rate_min);
    const double pm = cfg.mutation_rate_min + (1.0 - frac) * (cfg.mutation_rate_max - cfg.mutation_rate_min);
    return {pc, pm};
}

EvolveResult evolve(const GpConfig& cfg, int n_terminals, const TreeScorer& scorer) {
    cfg.check();
    Rng rng(cfg.rng_seed);
    ScorerCache cache(scorer, cfg.workers);

    std::vector<SolutionTree> population = init_population(cfg, n_terminals, rng);
    std::vector<FitnessReport> reports = cache.score_all(population);
    std::vector<double> fits(population.size());
    for (std::size_t i = 0; i < reports.size(); ++i) fits[i] = reports[i].f;

    auto best_index = [&] {
        std::size_t best = 0;
        for (std::size_t i = 1; i < fits.size(); ++i)
            if (fits[i] < fits[best]) best = i;
        return best;
    };

    std::size_t bi = best_index();
    SolutionTree best_ever = population[bi];
    FitnessReport best_report = reports[bi];

    double pc = cfg.crossover_rate_init;
    double pm = cfg.mutation_rate_init;
    int depth_limit = cfg.dynamic_depth_start;
    std::deque<std::pair<double, double>> credit_window;

    RunHistory history;
    auto record = [&](int gen) {
        GenerationRecord r;
        r.generation = gen;
        r.population_size = static_cast<int>(population.size());
        r.best_f = fits[best_index()];
        double sum = 0;
        for (double f : fits) sum += f;
        r.mean_f = sum / static_cast<double>(fits.size());
        r.crossover_rate = pc;
        r.mutation_rate = pm;
        r.depth_limit = depth_limit;
        r.best_tree = serialize(population[best_index()]);
        history.generations.push_back(std::move(r));
    };
    record(0);

    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // Over-depth offspring survive only if fitter than anything seen so far,
    // in which case the depth limit rises to accommodate them.
    auto accept_overdepth = [&](const SolutionTree& t) {
        const FitnessReport r = cache.score(t);
        if (r.f < best_report.f) {
            depth_limit = std::max(depth_limit, node_depth(t.root));
            return true;
        }
        return false;
    };

    for (int gen = 1; gen <= cfg.max_generations; ++gen) {
        std::vector<SolutionTree> offspring;
        struct Meta {
            bool via_crossover = false;
            bool via_mutation = false;
            double parent_f = 0;
        };
        std::vector<Meta> meta;
        offspring.reserve(cfg.population_size);
        meta.reserve(cfg.population_size);

        while (static_cast<int>(offspring.size()) < cfg.population_size) {
            const std::size_t i = tournament_select(population, fits, cfg.tournament_size, rng);
            const std::size_t j = tournament_select(population, fits, cfg.tournament_size, rng);
            SolutionTree c1, c2;
            bool crossed = false;
            if (unit(rng) < pc) {
                std::tie(c1, c2) = crossover(population[i], population[j], rng, depth_limit, accept_overdepth);
                crossed = true;
            } else {
                c1 = population[i];
                c2 = population[j];
            }
            SolutionTree m1 = mutate(c1, pm, n_terminals, rng);
            SolutionTree m2 = mutate(c2, pm, n_terminals, rng);
            meta.push_back({crossed, !(m1 == c1), fits[i]});
            meta.push_back({crossed, !(m2 == c2), fits[j]});
            offspring.push_back(std::move(m1));
            offspring.push_back(std::move(m2));
        }

        std::vector<FitnessReport> child_reports = cache.score_all(offspring);

        double cx_credit = 0, mut_credit = 0;
        for (std::size_t k = 0; k < offspring.size(); ++k) {
            const double gain = std::max(0.0, meta[k].parent_f - child_reports[k].f);
            if (meta[k].via_crossover) cx_credit += gain;
            if (meta[k].via_mutation) mut_credit += gain;
        }

        if (cfg.elitism) {
            std::size_t worst = 0;
            for (std::size_t k = 1; k < offspring.size(); ++k)
                if (child_reports[k].f > child_reports[worst].f) worst = k;
            offspring[worst] = best_ever;
            child_reports[worst] = best_report;
        }

        population = std::move(offspring);
        reports = std::move(child_reports);
        for (std::size_t k = 0; k < reports.size(); ++k) fits[k] = reports[k].f;

        const std::size_t gb = best_index();
        if (reports[gb].f < best_report.f) {
            best_ever = population[gb];
            best_report = reports[gb];
        }

        credit_window.emplace_back(cx_credit, mut_credit);
        while (static_cast<int>(credit_window.size()) > cfg.adaptation_window) credit_window.pop_front();
        double wcx = 0, wmut = 0;
        for (const auto& [c, m] : credit_window) {
            wcx += c;
            wmut += m;
        }
        std::tie(pc, pm) = adapt_rates(wcx, wmut, cfg, pc, pm);

        record(gen);
    }

    return {std::move(best_ever), best_report, std::move(history)};
}

}  // namespace gpfuse
