#include "gpfuse/fitness.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace gpfuse {

void EvaluationContext::check() const {
    if (pool_values.empty()) throw std::invalid_argument("evaluation context: empty pool");
    const std::size_t videos = pool_values[0].size();
    if (videos == 0) throw std::invalid_argument("evaluation context: no videos");
    for (const auto& row : pool_values)
        if (row.size() != videos) throw std::invalid_argument("evaluation context: ragged pool table");
    if (w1 < 0 || w2 < 0) throw std::invalid_argument("evaluation context: negative penalty weight");
}

double p1(double candidate_value, std::span<const double> pool_values, Orientation orientation) {
    if (pool_values.empty()) throw std::invalid_argument("p1: empty pool");
    if (orientation == Orientation::HigherBetter)
        return *std::max_element(pool_values.begin(), pool_values.end()) - candidate_value;
    return candidate_value - *std::min_element(pool_values.begin(), pool_values.end());
}

double p2(int distinct_terminals, int pool_size) {
    if (pool_size < 1) throw std::invalid_argument("p2: pool size must be >= 1");
    return static_cast<double>(distinct_terminals) / static_cast<double>(pool_size);
}

double p2(const SolutionTree& tree, int pool_size) { return p2(stats(tree).distinct_terminals, pool_size); }

FitnessReport fitness(const std::vector<MetricVector>& candidate_per_video, int distinct_terminals,
                      const EvaluationContext& ctx) {
    ctx.check();
    const int n = ctx.pool_size();
    const int videos = ctx.video_count();
    if (static_cast<int>(candidate_per_video.size()) != videos)
        throw std::invalid_argument("fitness: candidate measured on " + std::to_string(candidate_per_video.size()) +
                                    " videos, pool has " + std::to_string(videos));

    FitnessReport report;
    report.w1 = ctx.w1;
    report.w2 = ctx.w2;
    report.p2 = p2(distinct_terminals, n);

    double rank_sum = 0, p1_sum = 0;
    for (int v = 0; v < videos; ++v) {
        for (int j = 0; j < kNumMeasures; ++j) {
            // Candidate first, then the n pool contenders.
            std::vector<double> cell(n + 1);
            cell[0] = candidate_per_video[v].values()[j];
            for (int k = 0; k < n; ++k) cell[k + 1] = ctx.pool_values[k][v].values()[j];
            const double rank = rank_values(cell, kMeasureOrientations[j])[0];
            const double dist = p1(cell[0], std::span<const double>(cell).subspan(1), kMeasureOrientations[j]);
            rank_sum += rank;
            p1_sum += dist;
            report.per_measure_rank[j] += rank;
        }
    }
    const double cells = static_cast<double>(videos) * kNumMeasures;
    report.mean_rank = rank_sum / cells;
    report.p1_mean = p1_sum / cells;
    for (int j = 0; j < kNumMeasures; ++j) report.per_measure_rank[j] /= static_cast<double>(videos);
    report.f = report.mean_rank + ctx.w1 * report.p1_mean + ctx.w2 * report.p2;
    return report;
}

std::vector<double> rank_pool(const EvaluationContext& ctx) {
    ctx.check();
    const int n = ctx.pool_size();
    const int videos = ctx.video_count();
    std::vector<double> avg(n, 0.0);
    for (int v = 0; v < videos; ++v) {
        for (int j = 0; j < kNumMeasures; ++j) {
            std::vector<double> cell(n);
            for (int k = 0; k < n; ++k) cell[k] = ctx.pool_values[k][v].values()[j];
            std::vector<double> ranks = rank_values(cell, kMeasureOrientations[j]);
            for (int k = 0; k < n; ++k) avg[k] += ranks[k];
        }
    }
    const double cells = static_cast<double>(videos) * kNumMeasures;
    for (double& r : avg) r /= cells;
    return avg;
}

void save_pool_measures(const std::filesystem::path& path, std::span<const std::string> algorithms,
                        std::span<const std::string> videos,
                        const std::vector<std::vector<MetricVector>>& values) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path.string() + ": cannot open destination for writing");
    out << "algorithm,video,measure,value\n";
    out.precision(17);
    for (std::size_t k = 0; k < algorithms.size(); ++k)
        for (std::size_t v = 0; v < videos.size(); ++v)
            for (int j = 0; j < kNumMeasures; ++j)
                out << algorithms[k] << ',' << videos[v] << ',' << kMeasureNames[j] << ','
                    << values[k][v].values()[j] << '\n';
}

PoolMeasures load_pool_measures(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path.string() + ": cannot open pool cache");
    std::string line;
    std::getline(in, line);  // header
    std::map<std::string, std::size_t> algo_index, video_index;
    std::map<std::string, int> measure_index;
    for (int j = 0; j < kNumMeasures; ++j) measure_index[kMeasureNames[j]] = j;

    PoolMeasures pm;
    std::vector<std::array<double, kNumMeasures>> flat;
    struct Cell {
        std::size_t a, v;
        int j;
        double value;
    };
    std::vector<Cell> cells;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string algo, video, measure, value;
        if (!std::getline(ss, algo, ',') || !std::getline(ss, video, ',') || !std::getline(ss, measure, ',') ||
            !std::getline(ss, value))
            throw std::runtime_error(path.string() + ": malformed pool cache line: " + line);
        auto [ait, ains] = algo_index.try_emplace(algo, algo_index.size());
        if (ains) pm.algorithms.push_back(algo);
        auto [vit, vins] = video_index.try_emplace(video, video_index.size());
        if (vins) pm.videos.push_back(video);
        auto mit = measure_index.find(measure);
        if (mit == measure_index.end())
            throw std::runtime_error(path.string() + ": unknown measure '" + measure + "'");
        cells.push_back({ait->second, vit->second, mit->second, std::stod(value)});
    }
    pm.values.assign(pm.algorithms.size(),
                     std::vector<MetricVector>(pm.videos.size()));
    std::vector<std::vector<std::array<double, kNumMeasures>>> raw(
        pm.algorithms.size(), std::vector<std::array<double, kNumMeasures>>(pm.videos.size()));
    for (const Cell& c : cells) raw[c.a][c.v][c.j] = c.value;
    for (std::size_t a = 0; a < pm.algorithms.size(); ++a)
        for (std::size_t v = 0; v < pm.videos.size(); ++v)
            pm.values[a][v] = MetricVector::from_values(raw[a][v]);
    return pm;
}

}  // namespace gpfuse
