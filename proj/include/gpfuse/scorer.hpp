#pragma once

#include <string>
#include <vector>

#include "gpfuse/dataset.hpp"
#include "gpfuse/engine.hpp"
#include "gpfuse/fitness.hpp"

namespace gpfuse {

// Per-video frame bundles of a training set, fully resident in memory.
struct TrainingSet {
    std::vector<std::string> video_ids;
    std::vector<std::vector<FrameBundle>> videos;  // aligned with video_ids
    int pool_size = 0;

    void check() const;
};

// Measures of one mask producer over the training set: per video in PerVideo
// granularity, or one pooled pseudo-video in Aggregate granularity.
// produce(v, f) must return the producer's mask for frame f of video v.
template <typename Produce>
std::vector<MetricVector> measure_producer(const TrainingSet& train, Granularity granularity, Produce&& produce) {
    std::vector<MetricVector> out;
    ConfusionCounts pooled;
    for (std::size_t v = 0; v < train.videos.size(); ++v) {
        ConfusionCounts counts;
        for (std::size_t f = 0; f < train.videos[v].size(); ++f)
            counts += confusion(produce(v, f), train.videos[v][f].gt);
        if (granularity == Granularity::PerVideo)
            out.push_back(measures(counts));
        else
            pooled += counts;
    }
    if (granularity == Granularity::Aggregate) out.push_back(measures(pooled));
    return out;
}

// Builds the reference-pool context by scoring each terminal's masks directly.
EvaluationContext build_context(const TrainingSet& train, double w1, double w2, Granularity granularity);

// Scores a candidate tree against the pool on the training set. Thread-safe.
class FusionScorer : public TreeScorer {
  public:
    FusionScorer(TrainingSet train, EvaluationContext ctx);

    FitnessReport score(const SolutionTree& tree) const override;

    const TrainingSet& training_set() const { return train_; }
    const EvaluationContext& context() const { return ctx_; }

  private:
    TrainingSet train_;
    EvaluationContext ctx_;
};

}  // namespace gpfuse
