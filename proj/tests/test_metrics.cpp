#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "gpfuse/metrics.hpp"

using namespace gpfuse;

namespace {

constexpr double kTol = 1e-12;

// Rank oracle straight from the definition: rank of v = 1 + number of strictly
// better values + half the number of equal others.
std::vector<double> oracle_ranks(const std::vector<double>& values, Orientation o) {
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        double better = 0, equal = 0;
        for (std::size_t j = 0; j < values.size(); ++j) {
            if (j == i) continue;
            const bool j_better =
                o == Orientation::HigherBetter ? values[j] > values[i] : values[j] < values[i];
            if (j_better)
                better += 1;
            else if (values[j] == values[i])
                equal += 1;
        }
        out[i] = 1 + better + equal / 2;
    }
    return out;
}

}  // namespace

TEST_CASE("measures: worked confusion example") {
    ConfusionCounts c{.tp = 50, .fp = 10, .tn = 915, .fn = 25};
    MetricVector m = measures(c);
    CHECK(m.recall == doctest::Approx(50.0 / 75).epsilon(kTol));
    CHECK(m.specificity == doctest::Approx(915.0 / 925).epsilon(kTol));
    CHECK(m.fpr == doctest::Approx(10.0 / 925).epsilon(kTol));
    CHECK(m.fnr == doctest::Approx(25.0 / 75).epsilon(kTol));
    CHECK(m.pwc == doctest::Approx(3.5).epsilon(kTol));
    CHECK(m.precision == doctest::Approx(50.0 / 60).epsilon(kTol));
    CHECK(m.fmeasure == doctest::Approx(20.0 / 27).epsilon(kTol));
    // Rounded presentation values.
    CHECK(m.recall == doctest::Approx(0.6667).epsilon(1e-4));
    CHECK(m.fmeasure == doctest::Approx(0.7407).epsilon(1e-4));
}

TEST_CASE("measures: degenerate denominators use the documented fallbacks") {
    MetricVector empty = measures(ConfusionCounts{});
    CHECK(empty.recall == 1.0);
    CHECK(empty.fnr == 0.0);
    CHECK(empty.specificity == 1.0);
    CHECK(empty.fpr == 0.0);
    CHECK(empty.precision == 1.0);
    CHECK(empty.pwc == 0.0);

    // No positives in the ground truth, no predictions: perfect.
    MetricVector all_tn = measures(ConfusionCounts{.tn = 10});
    CHECK(all_tn.recall == 1.0);
    CHECK(all_tn.precision == 1.0);
    CHECK(all_tn.fmeasure == 1.0);

    // Missed everything without predicting: precision falls to 0.
    MetricVector missed = measures(ConfusionCounts{.fn = 5});
    CHECK(missed.recall == 0.0);
    CHECK(missed.precision == 0.0);
    CHECK(missed.fmeasure == 0.0);  // p + r == 0
}

TEST_CASE("measures: complementary pairs always sum to one") {
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 200; ++trial) {
        ConfusionCounts c{.tp = static_cast<long long>(rng() % 100), .fp = static_cast<long long>(rng() % 100),
                          .tn = static_cast<long long>(rng() % 100), .fn = static_cast<long long>(rng() % 100)};
        MetricVector m = measures(c);
        CHECK(m.recall + m.fnr == doctest::Approx(1.0).epsilon(kTol));
        CHECK(m.specificity + m.fpr == doctest::Approx(1.0).epsilon(kTol));
        CHECK(m.pwc == doctest::Approx(100.0 * (c.fp + c.fn) / std::max<long long>(c.total(), 1)).epsilon(1e-9));
        for (double v : m.values()) {
            CHECK(v >= 0.0);
            CHECK(v <= 100.0);
        }
    }
}

TEST_CASE("confusion: label semantics per pixel") {
    GroundTruthFrame gt(5, 1);
    gt.labels = {GtLabel::Positive, GtLabel::Negative, GtLabel::Shadow, GtLabel::OutOfRoi, GtLabel::Unknown};
    BinaryMask all_fg(5, 1, 1);
    ConfusionCounts c = confusion(all_fg, gt);
    CHECK(c.tp == 1);
    CHECK(c.fp == 2);  // negative + shadow, both predicted foreground
    CHECK(c.tn == 0);
    CHECK(c.fn == 0);
    CHECK(c.total() == 3);  // ROI/unknown pixels never counted

    BinaryMask all_bg(5, 1, 0);
    ConfusionCounts b = confusion(all_bg, gt);
    CHECK(b.fn == 1);
    CHECK(b.tn == 2);
    CHECK(b.total() == 3);

    BinaryMask wrong_shape(1, 5, 0);
    CHECK_THROWS_AS(confusion(wrong_shape, gt), std::invalid_argument);
}

TEST_CASE("confusion: counts are additive over frame splits") {
    std::mt19937_64 rng(7);
    GroundTruthFrame gt(16, 1);
    BinaryMask pred(16, 1);
    const GtLabel labels[5] = {GtLabel::Positive, GtLabel::Negative, GtLabel::Shadow, GtLabel::OutOfRoi,
                               GtLabel::Unknown};
    for (int i = 0; i < 16; ++i) {
        gt.labels[i] = labels[rng() % 5];
        pred.data[i] = rng() % 2;
    }
    ConfusionCounts whole = confusion(pred, gt);

    ConfusionCounts split;
    for (int half = 0; half < 2; ++half) {
        GroundTruthFrame g(8, 1);
        BinaryMask p(8, 1);
        for (int i = 0; i < 8; ++i) {
            g.labels[i] = gt.labels[half * 8 + i];
            p.data[i] = pred.data[half * 8 + i];
        }
        split += confusion(p, g);
    }
    CHECK(split.tp == whole.tp);
    CHECK(split.fp == whole.fp);
    CHECK(split.tn == whole.tn);
    CHECK(split.fn == whole.fn);
}

TEST_CASE("rank_values: fractional ties and both orientations") {
    std::vector<double> v = {0.9, 0.7, 0.9, 0.1};
    std::vector<double> hi = rank_values(v, Orientation::HigherBetter);
    CHECK(hi == std::vector<double>{1.5, 3, 1.5, 4});
    std::vector<double> lo = rank_values(v, Orientation::LowerBetter);
    CHECK(lo == std::vector<double>{3.5, 2, 3.5, 1});

    std::vector<double> all_equal = {5, 5, 5};
    CHECK(rank_values(all_equal, Orientation::HigherBetter) == std::vector<double>{2, 2, 2});
}

TEST_CASE("rank_values matches the pairwise-count oracle on random inputs") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> v(1 + rng() % 10);
        for (auto& x : v) x = static_cast<double>(rng() % 6) / 5.0;  // force ties
        for (Orientation o : {Orientation::HigherBetter, Orientation::LowerBetter}) {
            std::vector<double> got = rank_values(v, o);
            std::vector<double> want = oracle_ranks(v, o);
            REQUIRE(got.size() == want.size());
            for (std::size_t i = 0; i < v.size(); ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(kTol));
            // Ranks always sum to n(n+1)/2.
            double sum = 0;
            for (double r : got) sum += r;
            CHECK(sum == doctest::Approx(v.size() * (v.size() + 1) / 2.0).epsilon(kTol));
        }
    }
}

TEST_CASE("category_report averages per category, then across categories") {
    MetricVector a = MetricVector::from_values({1, 1, 0, 0, 0, 1, 1});
    MetricVector b = MetricVector::from_values({0, 0, 1, 1, 10, 0, 0});
    std::vector<std::pair<std::string, std::vector<MetricVector>>> input = {
        {"catA", {a, b}},
        {"catB", {a}},
    };
    CategoryReport rep = category_report(input);
    REQUIRE(rep.rows.size() == 2);
    CHECK(rep.rows[0].mean.recall == doctest::Approx(0.5).epsilon(kTol));
    CHECK(rep.rows[0].mean.pwc == doctest::Approx(5.0).epsilon(kTol));
    CHECK(rep.rows[1].mean.recall == doctest::Approx(1.0).epsilon(kTol));
    // Overall is the unweighted mean of category means, not of videos.
    CHECK(rep.overall.recall == doctest::Approx(0.75).epsilon(kTol));
    CHECK(rep.overall.pwc == doctest::Approx(2.5).epsilon(kTol));

    std::vector<std::pair<std::string, std::vector<MetricVector>>> empty_cat = {{"catA", {}}};
    CHECK_THROWS_AS(category_report(empty_cat), std::invalid_argument);
}

TEST_CASE("cdnet_rank: hand-checked two-method, two-category table") {
    // Method 0 wins every higher-better measure and every lower-better measure
    // in category 0; the table is reversed in category 1.
    MetricVector good = MetricVector::from_values({0.9, 0.9, 0.1, 0.1, 1.0, 0.9, 0.9});
    MetricVector bad = MetricVector::from_values({0.5, 0.5, 0.5, 0.5, 5.0, 0.5, 0.5});
    std::vector<std::vector<MetricVector>> table = {{good, bad}, {bad, good}};
    CdnetRanking r = cdnet_rank(table);
    REQUIRE(r.category_ranks.size() == 2);
    CHECK(r.category_ranks[0][0] == doctest::Approx(1.0).epsilon(kTol));
    CHECK(r.category_ranks[0][1] == doctest::Approx(2.0).epsilon(kTol));
    CHECK(r.category_ranks[1][0] == doctest::Approx(2.0).epsilon(kTol));
    CHECK(r.category_ranks[1][1] == doctest::Approx(1.0).epsilon(kTol));
    CHECK(r.average_rank[0] == doctest::Approx(1.5).epsilon(kTol));
    CHECK(r.average_rank[1] == doctest::Approx(1.5).epsilon(kTol));
}

TEST_CASE("cdnet_rank agrees with per-cell rank_values on random tables") {
    std::mt19937_64 rng(43);
    const int methods = 4, cats = 3;
    std::vector<std::vector<MetricVector>> table(methods, std::vector<MetricVector>(cats));
    for (auto& row : table)
        for (auto& mv : row) {
            std::array<double, kNumMeasures> v{};
            for (auto& x : v) x = static_cast<double>(rng() % 10) / 10.0;
            mv = MetricVector::from_values(v);
        }
    CdnetRanking r = cdnet_rank(table);
    for (int c = 0; c < cats; ++c) {
        std::array<std::vector<double>, kNumMeasures> cell_ranks;
        for (int mi = 0; mi < kNumMeasures; ++mi) {
            std::vector<double> col(methods);
            for (int m = 0; m < methods; ++m) col[m] = table[m][c].values()[mi];
            cell_ranks[mi] = rank_values(col, kMeasureOrientations[mi]);
        }
        for (int m = 0; m < methods; ++m) {
            double mean = 0;
            for (int mi = 0; mi < kNumMeasures; ++mi) mean += cell_ranks[mi][m];
            mean /= kNumMeasures;
            CHECK(r.category_ranks[m][c] == doctest::Approx(mean).epsilon(kTol));
        }
    }
    for (int m = 0; m < methods; ++m) {
        double avg = 0;
        for (int c = 0; c < cats; ++c) avg += r.category_ranks[m][c];
        CHECK(r.average_rank[m] == doctest::Approx(avg / cats).epsilon(kTol));
    }
}
