#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "gpfuse/metrics.hpp"
#include "gpfuse/tree.hpp"

namespace gpfuse {

// Whether candidates are ranked within each video and averaged, or against
// measures pooled over all training frames (a single pseudo-video).
enum class Granularity { PerVideo, Aggregate };

// Cached reference-pool measurements a candidate is ranked against.
struct EvaluationContext {
    // pool_values[k][v]: measures of pool algorithm k on video v. Aggregate
    // contexts hold exactly one pooled pseudo-video per algorithm.
    std::vector<std::vector<MetricVector>> pool_values;
    double w1 = 0.01;
    double w2 = 0.01;
    Granularity granularity = Granularity::PerVideo;

    int pool_size() const { return static_cast<int>(pool_values.size()); }
    int video_count() const { return pool_values.empty() ? 0 : static_cast<int>(pool_values[0].size()); }
    void check() const;  // throws on empty or ragged tables
};

struct FitnessReport {
    double f = 0;          // mean_rank + w1*p1_mean + w2*p2; lower is better
    double mean_rank = 0;  // mean candidate rank over all (video, measure) cells
    double p1_mean = 0;    // mean signed distance to the best pool value over cells
    double p2 = 0;         // distinct terminals / pool size
    double w1 = 0, w2 = 0;
    std::array<double, kNumMeasures> per_measure_rank{};  // candidate rank per measure, averaged over videos
};

// Signed distance between the candidate and the best pool member; negative iff
// the candidate strictly beats every pool value.
double p1(double candidate_value, std::span<const double> pool_values, Orientation orientation);

// Fraction of the pool referenced by the candidate.
double p2(int distinct_terminals, int pool_size);
double p2(const SolutionTree& tree, int pool_size);

// Rank-based fitness: per (video, measure) cell the candidate is ranked among
// the pool values plus itself (rank 1 = best, fractional ties); the penalties
// are added inside the per-measure sum and everything is averaged over cells.
FitnessReport fitness(const std::vector<MetricVector>& candidate_per_video, int distinct_terminals,
                      const EvaluationContext& ctx);

// Average rank of each pool algorithm against the others, per (video, measure)
// cell. Used to report how the evolved solution compares to its pool.
std::vector<double> rank_pool(const EvaluationContext& ctx);

// Pool-measure cache: CSV of (algorithm, video, measure, value) so repeated
// runs skip re-scoring the pool.
void save_pool_measures(const std::filesystem::path& path, std::span<const std::string> algorithms,
                        std::span<const std::string> videos,
                        const std::vector<std::vector<MetricVector>>& values);

struct PoolMeasures {
    std::vector<std::string> algorithms;
    std::vector<std::string> videos;
    std::vector<std::vector<MetricVector>> values;
};

PoolMeasures load_pool_measures(const std::filesystem::path& path);

}  // namespace gpfuse
