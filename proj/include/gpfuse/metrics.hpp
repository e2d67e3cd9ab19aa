#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "gpfuse/mask.hpp"

namespace gpfuse {

struct ConfusionCounts {
    long long tp = 0, fp = 0, tn = 0, fn = 0;

    ConfusionCounts& operator+=(const ConfusionCounts& o) {
        tp += o.tp;
        fp += o.fp;
        tn += o.tn;
        fn += o.fn;
        return *this;
    }
    long long total() const { return tp + fp + tn + fn; }
};

enum class Orientation { HigherBetter, LowerBetter };

inline constexpr int kNumMeasures = 7;

inline constexpr std::array<const char*, kNumMeasures> kMeasureNames = {
    "recall", "specificity", "fpr", "fnr", "pwc", "precision", "fmeasure"};

inline constexpr std::array<Orientation, kNumMeasures> kMeasureOrientations = {
    Orientation::HigherBetter, Orientation::HigherBetter, Orientation::LowerBetter,
    Orientation::LowerBetter,  Orientation::LowerBetter,  Orientation::HigherBetter,
    Orientation::HigherBetter};

// The seven CDNET measures of one method on one video (or one pooled aggregate).
struct MetricVector {
    double recall = 0, specificity = 0, fpr = 0, fnr = 0, pwc = 0, precision = 0, fmeasure = 0;

    std::array<double, kNumMeasures> values() const {
        return {recall, specificity, fpr, fnr, pwc, precision, fmeasure};
    }
    static MetricVector from_values(const std::array<double, kNumMeasures>& v) {
        return {v[0], v[1], v[2], v[3], v[4], v[5], v[6]};
    }
};

// Per-pixel tally. OUT_OF_ROI and UNKNOWN pixels are excluded entirely;
// SHADOW counts as negative ground truth.
ConfusionCounts confusion(const BinaryMask& pred, const GroundTruthFrame& gt);

// Total function: degenerate denominators fall back to benign values
// (recall=1/fnr=0 when tp+fn=0; specificity=1/fpr=0 when tn+fp=0;
// precision=1 when tp+fp=0 and fn=0, else 0; fmeasure=0 when
// precision+recall=0; pwc=0 on an empty tally).
MetricVector measures(const ConfusionCounts& c);

// Rank 1 = best for the given orientation; ties receive the fractional
// (average) rank.
std::vector<double> rank_values(std::span<const double> values, Orientation orientation);

struct CategoryReport {
    struct Row {
        std::string category;
        MetricVector mean;
    };
    std::vector<Row> rows;
    MetricVector overall;  // mean of category means
};

// Per-category mean of each measure over that category's videos. Throws on an
// empty category.
CategoryReport category_report(
    const std::vector<std::pair<std::string, std::vector<MetricVector>>>& per_category_videos);

struct CdnetRanking {
    // category_ranks[method][category]: mean over the 7 per-measure ranks.
    std::vector<std::vector<double>> category_ranks;
    // average_rank[method]: mean over categories.
    std::vector<double> average_rank;
};

// CDNET-style ranking: within each (category, measure) cell, rank all methods
// with fractional ties. per_method_category[m][c] must be rectangular.
CdnetRanking cdnet_rank(const std::vector<std::vector<MetricVector>>& per_method_category);

}  // namespace gpfuse
