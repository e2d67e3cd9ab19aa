#include "gpfuse/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace gpfuse {

ConfusionCounts confusion(const BinaryMask& pred, const GroundTruthFrame& gt) {
    if (!gt.same_shape(pred))
        throw std::invalid_argument("confusion: prediction and ground truth dimensions differ");
    ConfusionCounts c;
    for (std::size_t i = 0; i < gt.labels.size(); ++i) {
        switch (gt.labels[i]) {
            case GtLabel::OutOfRoi:
            case GtLabel::Unknown:
                break;
            case GtLabel::Positive:
                pred.data[i] ? ++c.tp : ++c.fn;
                break;
            case GtLabel::Negative:
            case GtLabel::Shadow:
                pred.data[i] ? ++c.fp : ++c.tn;
                break;
        }
    }
    return c;
}

MetricVector measures(const ConfusionCounts& c) {
    MetricVector m;
    const double tp = static_cast<double>(c.tp), fp = static_cast<double>(c.fp);
    const double tn = static_cast<double>(c.tn), fn = static_cast<double>(c.fn);
    if (c.tp + c.fn > 0) {
        m.recall = tp / (tp + fn);
        m.fnr = fn / (tp + fn);
    } else {
        m.recall = 1.0;
        m.fnr = 0.0;
    }
    if (c.tn + c.fp > 0) {
        m.specificity = tn / (tn + fp);
        m.fpr = fp / (tn + fp);
    } else {
        m.specificity = 1.0;
        m.fpr = 0.0;
    }
    if (c.tp + c.fp > 0)
        m.precision = tp / (tp + fp);
    else
        m.precision = c.fn == 0 ? 1.0 : 0.0;
    m.pwc = c.total() > 0 ? 100.0 * (fn + fp) / (tp + fn + fp + tn) : 0.0;
    m.fmeasure = (m.precision + m.recall) > 0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    return m;
}

std::vector<double> rank_values(std::span<const double> values, Orientation orientation) {
    if (values.empty()) throw std::invalid_argument("rank_values: empty input");
    const std::size_t k = values.size();
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    const bool higher = orientation == Orientation::HigherBetter;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return higher ? values[a] > values[b] : values[a] < values[b];
    });
    std::vector<double> ranks(k);
    std::size_t i = 0;
    while (i < k) {
        std::size_t j = i;
        while (j + 1 < k && values[order[j + 1]] == values[order[i]]) ++j;
        const double shared = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = shared;
        i = j + 1;
    }
    return ranks;
}

namespace {

MetricVector mean_of(std::span<const MetricVector> vs) {
    std::array<double, kNumMeasures> acc{};
    for (const MetricVector& v : vs) {
        auto vals = v.values();
        for (int j = 0; j < kNumMeasures; ++j) acc[j] += vals[j];
    }
    for (int j = 0; j < kNumMeasures; ++j) acc[j] /= static_cast<double>(vs.size());
    return MetricVector::from_values(acc);
}

}  // namespace

CategoryReport category_report(
    const std::vector<std::pair<std::string, std::vector<MetricVector>>>& per_category_videos) {
    if (per_category_videos.empty()) throw std::invalid_argument("category_report: no categories");
    CategoryReport report;
    std::vector<MetricVector> category_means;
    for (const auto& [name, videos] : per_category_videos) {
        if (videos.empty()) throw std::invalid_argument("category_report: empty category '" + name + "'");
        MetricVector mean = mean_of(videos);
        report.rows.push_back({name, mean});
        category_means.push_back(mean);
    }
    report.overall = mean_of(category_means);
    return report;
}

CdnetRanking cdnet_rank(const std::vector<std::vector<MetricVector>>& per_method_category) {
    const std::size_t n_methods = per_method_category.size();
    if (n_methods == 0) throw std::invalid_argument("cdnet_rank: no methods");
    const std::size_t n_categories = per_method_category[0].size();
    if (n_categories == 0) throw std::invalid_argument("cdnet_rank: no categories");
    for (const auto& row : per_method_category)
        if (row.size() != n_categories) throw std::invalid_argument("cdnet_rank: ragged input");

    CdnetRanking out;
    out.category_ranks.assign(n_methods, std::vector<double>(n_categories, 0.0));
    for (std::size_t c = 0; c < n_categories; ++c) {
        for (int j = 0; j < kNumMeasures; ++j) {
            std::vector<double> cell(n_methods);
            for (std::size_t m = 0; m < n_methods; ++m) cell[m] = per_method_category[m][c].values()[j];
            std::vector<double> ranks = rank_values(cell, kMeasureOrientations[j]);
            for (std::size_t m = 0; m < n_methods; ++m) out.category_ranks[m][c] += ranks[m];
        }
        for (std::size_t m = 0; m < n_methods; ++m) out.category_ranks[m][c] /= kNumMeasures;
    }
    out.average_rank.resize(n_methods);
    for (std::size_t m = 0; m < n_methods; ++m) {
        double sum = 0;
        for (double r : out.category_ranks[m]) sum += r;
        out.average_rank[m] = sum / static_cast<double>(n_categories);
    }
    return out;
}

}  // namespace gpfuse
