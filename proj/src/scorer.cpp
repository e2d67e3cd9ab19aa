#include "gpfuse/scorer.hpp"

#include <stdexcept>

namespace gpfuse {

void TrainingSet::check() const {
    if (videos.empty()) throw std::invalid_argument("training set: no videos");
    if (video_ids.size() != videos.size()) throw std::invalid_argument("training set: id/video mismatch");
    if (pool_size < 1) throw std::invalid_argument("training set: empty pool");
    for (const auto& bundles : videos) {
        if (bundles.empty()) throw std::invalid_argument("training set: video without evaluated frames");
        for (const FrameBundle& b : bundles)
            if (static_cast<int>(b.pool_masks.size()) != pool_size)
                throw std::invalid_argument("training set: bundle with wrong pool mask count");
    }
}

EvaluationContext build_context(const TrainingSet& train, double w1, double w2, Granularity granularity) {
    train.check();
    EvaluationContext ctx;
    ctx.w1 = w1;
    ctx.w2 = w2;
    ctx.granularity = granularity;
    ctx.pool_values.reserve(train.pool_size);
    for (int k = 0; k < train.pool_size; ++k)
        ctx.pool_values.push_back(measure_producer(
            train, granularity, [&](std::size_t v, std::size_t f) { return train.videos[v][f].pool_masks[k]; }));
    ctx.check();
    return ctx;
}

FusionScorer::FusionScorer(TrainingSet train, EvaluationContext ctx)
    : train_(std::move(train)), ctx_(std::move(ctx)) {
    train_.check();
    ctx_.check();
    if (ctx_.pool_size() != train_.pool_size)
        throw std::invalid_argument("scorer: context pool size differs from training set");
}

FitnessReport FusionScorer::score(const SolutionTree& tree) const {
    validate(tree, train_.pool_size);
    std::vector<MetricVector> candidate = measure_producer(
        train_, ctx_.granularity,
        [&](std::size_t v, std::size_t f) { return evaluate(tree, train_.videos[v][f].pool_masks); });
    return fitness(candidate, stats(tree).distinct_terminals, ctx_);
}

}  // namespace gpfuse
