#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "downcite/classify.hpp"
#include "support/builders.hpp"
#include "support/oracles.hpp"

using namespace downcite;
using testsupport::make_corpus;
using testsupport::make_paper;

namespace {

/// Cohort of identical papers plus one carrying a single-month spike.
Corpus spike_corpus(int papers, int months, std::int64_t base, int spike_month,
                    std::int64_t spike) {
    std::vector<PaperRecord> out;
    for (int i = 0; i < papers; ++i) {
        std::vector<std::int64_t> monthly(static_cast<std::size_t>(months), base);
        if (i == 0) monthly[static_cast<std::size_t>(spike_month)] += spike;
        out.push_back(make_paper("P" + std::to_string(i), AccessClass::NonOpenAccess, {2007, 1},
                                 std::move(monthly)));
    }
    return make_corpus(std::move(out));
}

} // namespace

TEST(Classify, BurstDeltaMatchesStddevOracle) {
    const Corpus corpus = spike_corpus(5, 12, 10, 4, 200);
    const auto curves = cumulative_curves(corpus);
    const auto profile = cohort_profile(curves);
    const auto& spiky = *corpus.find_paper("P0");

    std::vector<double> counts(spiky.monthly_downloads.begin(), spiky.monthly_downloads.end());
    std::vector<double> reference = median_monthly_increments(profile);
    const double expected =
        std::abs(oracle::sample_stddev(counts) - oracle::sample_stddev(reference));
    const auto delta = burst_delta(spiky, profile);
    ASSERT_TRUE(delta.has_value());
    EXPECT_NEAR(*delta, expected, 1e-9);
}

TEST(Classify, BurstDeltaUndefinedForOneMonthHistories) {
    const Corpus corpus = make_corpus({
        make_paper("A", AccessClass::NonOpenAccess, {2007, 4}, {5}),
        make_paper("B", AccessClass::NonOpenAccess, {2007, 1}, {5, 5, 5, 5}),
    });
    const auto profile = cohort_profile(cumulative_curves(corpus));
    EXPECT_FALSE(burst_delta(*corpus.find_paper("A"), profile).has_value());
}

TEST(Classify, HomogeneousCohortHasZeroRatio) {
    // Every paper equals the median benchmark, so each delta is zero, the
    // cohort mean is zero, and the ratio convention keeps everyone at 0.
    const Corpus corpus = spike_corpus(4, 10, 7, 3, 0);
    const auto profile = cohort_profile(cumulative_curves(corpus));
    const auto& paper = *corpus.find_paper("P1");
    const auto stats = burst_stats(paper, profile, 0.0);
    EXPECT_EQ(stats.ratio, 0.0);
    EXPECT_FALSE(stats.burst_month.has_value());
    EXPECT_EQ(classify_burstiness(stats), Burstiness::NonBursty);
}

TEST(Classify, BurstMonthIsTheLargestDeviation) {
    const Corpus corpus = spike_corpus(7, 24, 10, 9, 500);
    const auto curves = cumulative_curves(corpus);
    const auto profile = cohort_profile(curves);
    const auto& spiky = *corpus.find_paper("P0");

    double mean_delta = 0;
    int n = 0;
    for (const auto& p : corpus.papers) {
        if (auto d = burst_delta(p, profile)) {
            mean_delta += *d;
            ++n;
        }
    }
    mean_delta /= n;

    const auto stats = burst_stats(spiky, profile, mean_delta);
    EXPECT_GT(stats.ratio, 5.0);
    ASSERT_TRUE(stats.burst_month.has_value());
    EXPECT_EQ(*stats.burst_month, 9);
    EXPECT_EQ(classify_burstiness(stats), Burstiness::SleepingBeauty);
}

TEST(Classify, SleepingBeautyBoundaryIsStrict) {
    ClassifyConfig config;
    BurstStats stats;
    stats.ratio = 10.0;
    stats.burst_month = 6;
    EXPECT_EQ(classify_burstiness(stats, config), Burstiness::BurstyEarly);
    stats.burst_month = 7;
    EXPECT_EQ(classify_burstiness(stats, config), Burstiness::SleepingBeauty);
}

TEST(Classify, CurveRmsdHandValue) {
    CumulativeCurve curve{"A", {10, 20, 30}};
    CohortProfile profile;
    profile.median = {13, 16, 30};
    // deviations -3, 4, 0 -> rms = sqrt(25/3)
    EXPECT_NEAR(curve_rmsd(curve, profile), std::sqrt(25.0 / 3.0), 1e-12);
    profile.median = {13, 16};
    EXPECT_NEAR(curve_rmsd(curve, profile), std::sqrt((9.0 + 16.0) / 2.0), 1e-12);
    profile.median = {};
    EXPECT_THROW(curve_rmsd(curve, profile), InputError);
}

TEST(Classify, AttractivenessSplitsOnDominance) {
    ClassifyConfig config;
    config.rmsd_critical_non_oa = 1.0;
    CohortProfile profile;
    profile.median = {10, 20, 30};

    const auto label = [&](std::vector<std::int64_t> values) {
        CumulativeCurve curve{"A", std::move(values)};
        return classify_attractiveness(curve, profile, config, AccessClass::NonOpenAccess);
    };
    EXPECT_EQ(label({10, 20, 30}), Attractiveness::Typical);
    EXPECT_EQ(label({15, 25, 35}), Attractiveness::MoreAttractive);
    EXPECT_EQ(label({5, 15, 25}), Attractiveness::LessAttractive);
    EXPECT_EQ(label({5, 25, 35}), Attractiveness::Crossing);
    // touching the median anywhere breaks strict dominance
    EXPECT_EQ(label({10, 25, 35}), Attractiveness::Crossing);
}

TEST(Classify, HalfLifeConvention) {
    EXPECT_EQ(half_life({"A", {1, 1, 2}}), std::optional<int>(0)); // 2*1 >= 2
    EXPECT_EQ(half_life({"A", {1, 2, 4}}), std::optional<int>(1)); // 2*2 >= 4
    EXPECT_EQ(half_life({"A", {0, 0, 4}}), std::optional<int>(2));
    EXPECT_EQ(half_life({"A", {0, 0, 0}}), std::nullopt);
    EXPECT_EQ(half_life({"A", {}}), std::nullopt);
}

TEST(Classify, AgeingBoundsFromLifetimeFractions) {
    ClassifyConfig config; // low 0.25, high 0.50
    // 40-month-old paper: flash < 10, usual in [10,20], delayed > 20
    EXPECT_EQ(classify_ageing(9, 40, config), Ageing::FlashInPan);
    EXPECT_EQ(classify_ageing(10, 40, config), Ageing::Usual);
    EXPECT_EQ(classify_ageing(20, 40, config), Ageing::Usual);
    EXPECT_EQ(classify_ageing(21, 40, config), Ageing::Delayed);
}

TEST(Classify, AgeingBoundsAbsolute) {
    EXPECT_EQ(classify_ageing_bounds(4, 5.0, 11.0), Ageing::FlashInPan);
    EXPECT_EQ(classify_ageing_bounds(5, 5.0, 11.0), Ageing::Usual);
    EXPECT_EQ(classify_ageing_bounds(11, 5.0, 11.0), Ageing::Usual);
    EXPECT_EQ(classify_ageing_bounds(12, 5.0, 11.0), Ageing::Delayed);
}

TEST(Classify, CorpusLabelsSpikePaperOnly) {
    const Corpus corpus = spike_corpus(8, 24, 10, 3, 600);
    const auto result = classify_corpus(corpus);
    for (const auto& labels : result.labels) {
        if (labels.paper_id == "P0") {
            EXPECT_EQ(labels.burstiness, Burstiness::BurstyEarly);
            EXPECT_FALSE(labels.attractiveness.has_value());
            EXPECT_FALSE(labels.ageing.has_value());
            EXPECT_TRUE(labels.half_life_months.has_value());
        } else {
            EXPECT_EQ(labels.burstiness, Burstiness::NonBursty);
            EXPECT_EQ(labels.attractiveness, Attractiveness::Typical);
            ASSERT_TRUE(labels.ageing.has_value());
        }
    }
    const auto& s = result.summary.at(AccessClass::NonOpenAccess);
    EXPECT_EQ(s.papers, 8u);
    EXPECT_EQ(s.bursty_early, 1u);
    EXPECT_EQ(s.non_bursty, 7u);
    EXPECT_EQ(s.typical, 7u);
}

TEST(Classify, SummaryCountsAreConsistent) {
    const Corpus corpus = spike_corpus(6, 18, 9, 8, 400);
    const auto result = classify_corpus(corpus);
    for (const auto& [access, s] : result.summary) {
        EXPECT_EQ(s.papers, s.non_bursty + s.bursty_early + s.sleeping_beauty);
        EXPECT_EQ(s.non_bursty, s.typical + s.more_attractive + s.less_attractive + s.crossing);
        EXPECT_EQ(s.ageing_papers, s.usual + s.flash_in_pan + s.delayed);
        EXPECT_LE(s.ageing_papers, s.non_bursty);
    }
}

TEST(Classify, ExclusionsOneBucketPerPaper) {
    // C: single-month history (no burst stats); D: all-zero downloads (no
    // half-life). Both must land in exactly one exclusion bucket.
    const Corpus corpus = make_corpus({
        make_paper("A", AccessClass::NonOpenAccess, {2007, 1}, {10, 10, 10, 10}),
        make_paper("B", AccessClass::NonOpenAccess, {2007, 1}, {10, 10, 10, 10}),
        make_paper("C", AccessClass::NonOpenAccess, {2007, 4}, {10}),
        make_paper("D", AccessClass::NonOpenAccess, {2007, 1}, {0, 0, 0, 0}),
    });
    const auto result = classify_corpus(corpus);
    std::set<std::string> excluded;
    for (const auto& e : result.exclusions) {
        EXPECT_TRUE(excluded.insert(e.paper_id).second) << e.paper_id << " excluded twice";
    }
    ASSERT_EQ(result.exclusions.size(), 2u);
    EXPECT_EQ(result.exclusions[0].paper_id, "C");
    EXPECT_EQ(result.exclusions[0].reason, "history_too_short_for_burst_stats");
    EXPECT_EQ(result.exclusions[1].paper_id, "D");
    EXPECT_EQ(result.exclusions[1].reason, "zero_downloads_no_half_life");

    // C still gets a burstiness label; D still gets attractiveness.
    const auto& c = *std::find_if(result.labels.begin(), result.labels.end(),
                                  [](const auto& l) { return l.paper_id == "C"; });
    EXPECT_EQ(c.burstiness, Burstiness::NonBursty);
    EXPECT_FALSE(c.delta_ratio.has_value());
    const auto& d = *std::find_if(result.labels.begin(), result.labels.end(),
                                  [](const auto& l) { return l.paper_id == "D"; });
    EXPECT_TRUE(d.attractiveness.has_value());
    EXPECT_FALSE(d.ageing.has_value());
    EXPECT_FALSE(d.half_life_months.has_value());
}

TEST(Classify, LabelsSortedByPaperId) {
    std::vector<PaperRecord> papers;
    for (const char* id : {"Z9", "A1", "M5", "B2"})
        papers.push_back(make_paper(id, AccessClass::NonOpenAccess, {2007, 1}, {3, 3, 3}));
    papers.push_back(make_paper("C7", AccessClass::OpenAccess, {2007, 1}, {3, 3, 3}));
    const auto result = classify_corpus(make_corpus(papers));
    for (std::size_t i = 1; i < result.labels.size(); ++i)
        EXPECT_LT(result.labels[i - 1].paper_id, result.labels[i].paper_id);
}

TEST(Classify, AccessClassesUseTheirOwnCriticalRmsd) {
    ClassifyConfig config;
    config.rmsd_critical_non_oa = 5.0;
    config.rmsd_critical_oa = 1000.0;
    CohortProfile profile;
    profile.median = {0, 0, 0};
    CumulativeCurve curve{"A", {10, 20, 30}}; // rmsd ~ 21.6
    EXPECT_NE(classify_attractiveness(curve, profile, config, AccessClass::NonOpenAccess),
              Attractiveness::Typical);
    EXPECT_EQ(classify_attractiveness(curve, profile, config, AccessClass::OpenAccess),
              Attractiveness::Typical);
}

TEST(Classify, CohortPercentileModeUsesHalfLifeDistribution) {
    // Half-lives across the cohort: designed spread, with one fast and one
    // slow paper. Bounds are the P25/P50 of the half-life distribution.
    ClassifyConfig config;
    config.halflife_mode = HalfLifeMode::CohortPercentile;
    std::vector<PaperRecord> papers;
    // half-life 0: front-loaded; half-life grows with index
    papers.push_back(make_paper("A", AccessClass::NonOpenAccess, {2007, 1}, {100, 0, 0, 0, 0, 0}));
    papers.push_back(make_paper("B", AccessClass::NonOpenAccess, {2007, 1}, {50, 60, 0, 0, 0, 0}));
    papers.push_back(make_paper("C", AccessClass::NonOpenAccess, {2007, 1}, {10, 10, 90, 0, 0, 0}));
    papers.push_back(make_paper("D", AccessClass::NonOpenAccess, {2007, 1}, {0, 0, 0, 0, 110, 0}));
    const auto result = classify_corpus(make_corpus(papers), config);

    // m50: A=0, B=1, C=2, D=4; P25 = 0.75, P50 = 1.5
    const auto labels_of = [&](const std::string& id) {
        return std::find_if(result.labels.begin(), result.labels.end(),
                            [&](const auto& l) { return l.paper_id == id; });
    };
    EXPECT_EQ(labels_of("A")->ageing, Ageing::FlashInPan); // 0 < 0.75
    EXPECT_EQ(labels_of("B")->ageing, Ageing::Usual);      // 0.75 <= 1 <= 1.5
    EXPECT_EQ(labels_of("C")->ageing, Ageing::Delayed);    // 2 > 1.5
    EXPECT_EQ(labels_of("D")->ageing, Ageing::Delayed);
}

TEST(Classify, ConfigValidation) {
    ClassifyConfig config;
    config.rmsd_critical_oa = 0;
    EXPECT_THROW(config.validate(), InputError);
    config = {};
    config.halflife_low_fraction = 0.6; // above high
    EXPECT_THROW(config.validate(), InputError);
    EXPECT_THROW(classify_corpus(Corpus{}), InputError);
}
