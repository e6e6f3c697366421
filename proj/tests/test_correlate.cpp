#include <gtest/gtest.h>

#include <algorithm>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "downcite/correlate.hpp"
#include "support/builders.hpp"
#include "support/oracles.hpp"

using namespace downcite;
using testsupport::add_citations;
using testsupport::make_corpus;
using testsupport::make_paper;

namespace {

/// Papers with constant monthly downloads and citations exactly proportional
/// to each year's downloads. Their paths have constant direction.
Corpus proportional_corpus(int papers, int years) {
    std::vector<PaperRecord> out;
    for (int i = 0; i < papers; ++i) {
        const std::int64_t monthly = 10 + 5 * i;
        out.push_back(make_paper("P" + std::to_string(i), AccessClass::NonOpenAccess, {2007, 1},
                                 std::vector<std::int64_t>(static_cast<std::size_t>(12 * years),
                                                           monthly)));
    }
    Corpus corpus = make_corpus(std::move(out));
    for (int i = 0; i < papers; ++i) {
        const std::int64_t annual = 3 * (10 + 5 * i); // downloads/4 per year
        CitationRecord rec;
        rec.paper_id = "P" + std::to_string(i);
        for (int y = 2007; y < 2007 + years; ++y) rec.annual_citations[y] = annual;
        corpus.citations[rec.paper_id] = std::move(rec);
    }
    return corpus;
}

std::vector<AnnualPoint> path(std::initializer_list<std::pair<std::int64_t, std::int64_t>> dc) {
    std::vector<AnnualPoint> points;
    int year = 2007;
    for (const auto& [d, c] : dc) points.push_back({year++, d, c});
    return points;
}

} // namespace

TEST(Correlate, TrajectoriesFollowCalendarYears) {
    Corpus corpus = make_corpus({
        make_paper("A", AccessClass::NonOpenAccess, {2007, 10}, {10, 10, 10, 20, 30, 0, 0}),
        make_paper("B", AccessClass::OpenAccess, {2008, 3}, {5, 5}),
        make_paper("C", AccessClass::NonOpenAccess, {2008, 1}, {9, 9, 9, 9}),
    });
    // A covers 2007-10 .. 2008-04, B covers 2008-03 .. 2008-04
    ASSERT_EQ(corpus.observation_end, (YearMonth{2008, 4}));
    add_citations(corpus, "A", {{2007, 1}, {2008, 2}, {2009, 7}});
    add_citations(corpus, "B", {{2008, 1}});

    const auto build = build_trajectories(corpus);
    EXPECT_EQ(build.excluded_no_citations, 1u); // C has no citation record
    ASSERT_EQ(build.trajectories.size(), 2u);

    const auto& a = build.trajectories[0];
    EXPECT_EQ(a.paper_id, "A");
    EXPECT_EQ(a.pub_year, 2007);
    ASSERT_EQ(a.points.size(), 2u);
    EXPECT_EQ(a.points[0], (AnnualPoint{2007, 30, 1}));
    EXPECT_EQ(a.points[1], (AnnualPoint{2008, 80, 3})); // the 2009 citation is out of window

    const auto& b = build.trajectories[1];
    EXPECT_EQ(b.paper_id, "B");
    ASSERT_EQ(b.points.size(), 1u);
    EXPECT_EQ(b.points[0], (AnnualPoint{2008, 10, 1}));
}

TEST(Correlate, TrajectoryFilterAndEmptyErrors) {
    Corpus corpus = make_corpus({
        make_paper("A", AccessClass::NonOpenAccess, {2007, 1}, {10, 10}),
        make_paper("B", AccessClass::OpenAccess, {2007, 1}, {5, 5}),
    });
    add_citations(corpus, "A", {{2007, 3}});
    add_citations(corpus, "B", {{2007, 2}});

    const auto oa = build_trajectories(corpus, AccessFilter::OpenAccessOnly);
    ASSERT_EQ(oa.trajectories.size(), 1u);
    EXPECT_EQ(oa.trajectories[0].paper_id, "B");

    Corpus no_citations = make_corpus({
        make_paper("A", AccessClass::NonOpenAccess, {2007, 1}, {10, 10}),
    });
    EXPECT_THROW(build_trajectories(no_citations), InputError);
}

TEST(ZigZag, ConstantDirectionHasExactlyZeroSpread) {
    const auto stats = zigzag_stats(path({{100, 10}, {200, 20}, {300, 30}}));
    ASSERT_EQ(stats.angles_degrees.size(), 3u);
    ASSERT_TRUE(stats.delta_degrees.has_value());
    EXPECT_EQ(*stats.delta_degrees, 0.0);
    EXPECT_EQ(stats.cluster, Cluster::Slow);
}

TEST(ZigZag, RawModeRightAngleTurn) {
    // flat year then a diagonal year: angles 0 and 45 degrees
    ZigZagConfig config;
    config.normalize = false;
    const auto stats = zigzag_stats(path({{100, 0}, {200, 100}}), config);
    ASSERT_EQ(stats.angles_degrees.size(), 2u);
    EXPECT_NEAR(stats.angles_degrees[0], 0.0, 1e-12);
    EXPECT_NEAR(stats.angles_degrees[1], 45.0, 1e-9);
    ASSERT_TRUE(stats.delta_degrees.has_value());
    EXPECT_NEAR(*stats.delta_degrees, 45.0, 1e-9);
    EXPECT_EQ(stats.cluster, Cluster::High);
}

TEST(ZigZag, NormalizedLateCitationBurstIsHigh) {
    // steady downloads, all citations landing in the final year
    const auto stats = zigzag_stats(path({{100, 0}, {200, 0}, {300, 0}, {400, 100}}));
    ASSERT_TRUE(stats.delta_degrees.has_value());
    // last segment: atan2(1, 0.25) = 75.9637...; earlier segments 0
    EXPECT_NEAR(*stats.delta_degrees, 75.9637565320735, 1e-9);
    EXPECT_EQ(stats.cluster, Cluster::High);
}

TEST(ZigZag, SmallKinkLandsMedium) {
    // annual citations 24, 24, 25 against constant downloads: a one-unit kink
    const auto stats = zigzag_stats(path({{100, 24}, {200, 48}, {300, 73}}));
    ASSERT_TRUE(stats.cluster.has_value());
    EXPECT_EQ(*stats.cluster, Cluster::Medium);
    EXPECT_GT(*stats.delta_degrees, 0.3);
    EXPECT_LT(*stats.delta_degrees, 8.0);
}

TEST(ZigZag, StagnantYearsCarryNoDirection) {
    const auto stats = zigzag_stats(path({{100, 10}, {100, 10}, {200, 20}}));
    EXPECT_EQ(stats.angles_degrees.size(), 2u);
    ASSERT_TRUE(stats.delta_degrees.has_value());
    EXPECT_EQ(*stats.delta_degrees, 0.0);
    EXPECT_EQ(stats.cluster, Cluster::Slow);
}

TEST(ZigZag, PureCitationYearIsNinetyDegrees) {
    const auto stats = zigzag_stats(path({{100, 0}, {100, 50}}));
    ASSERT_EQ(stats.angles_degrees.size(), 2u);
    EXPECT_NEAR(stats.angles_degrees[1], 90.0, 1e-9);
    EXPECT_NEAR(*stats.delta_degrees, 90.0, 1e-9);
    EXPECT_EQ(stats.cluster, Cluster::High);
}

TEST(ZigZag, TooFewDirectedSegmentsLeaveNoCluster) {
    EXPECT_FALSE(zigzag_stats({}).cluster.has_value());
    EXPECT_FALSE(zigzag_stats(path({{100, 10}})).cluster.has_value());
    // second year adds no movement: only one directed segment remains
    const auto stats = zigzag_stats(path({{100, 10}, {100, 10}}));
    EXPECT_EQ(stats.angles_degrees.size(), 1u);
    EXPECT_FALSE(stats.delta_degrees.has_value());
    EXPECT_FALSE(stats.cluster.has_value());
}

TEST(ZigZag, AnglesMatchArctangentOracle) {
    ZigZagConfig config;
    config.normalize = false;
    std::mt19937 gen(99);
    std::uniform_int_distribution<std::int64_t> step(0, 100);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<AnnualPoint> points;
        std::int64_t d = 0, c = 0;
        std::vector<double> expected;
        for (int year = 0; year < 6; ++year) {
            const std::int64_t dd = step(gen);
            const std::int64_t dc = step(gen);
            d += dd;
            c += dc;
            points.push_back({2007 + year, d, c});
            if (dd != 0 || dc != 0)
                expected.push_back(oracle::segment_angle_degrees(static_cast<double>(dd),
                                                                 static_cast<double>(dc)));
        }
        const auto stats = zigzag_stats(points, config);
        ASSERT_EQ(stats.angles_degrees.size(), expected.size());
        for (std::size_t i = 0; i < expected.size(); ++i)
            EXPECT_NEAR(stats.angles_degrees[i], expected[i], 1e-9);
    }
}

TEST(ZigZag, ConfigValidation) {
    ZigZagConfig config;
    config.delta_slow = -0.1;
    EXPECT_THROW(zigzag_stats(path({{1, 1}, {2, 2}}), config), InputError);
    config = {};
    config.delta_high = config.delta_slow;
    EXPECT_THROW(zigzag_stats(path({{1, 1}, {2, 2}}), config), InputError);
}

TEST(Correlate, ProportionalCorpusIsSlowWithPerfectCorrelation) {
    const Corpus corpus = proportional_corpus(6, 3);
    const auto report = cluster_report(corpus);

    EXPECT_EQ(report.eligible_trajectories, 6u);
    EXPECT_EQ(report.unclusterable, 0u);
    EXPECT_EQ(report.excluded_no_citations, 0u);
    ASSERT_TRUE(report.overall.pcc.has_value());
    EXPECT_NEAR(*report.overall.pcc, 1.0, 1e-12);
    EXPECT_EQ(report.overall.n, 6u);

    ASSERT_EQ(report.by_cluster.size(), 1u);
    EXPECT_EQ(report.by_cluster.at(Cluster::Slow).n, 6u);
    EXPECT_EQ(report.by_pub_year.at(2007).n, 6u);
    EXPECT_EQ(report.by_access.at(AccessClass::NonOpenAccess).n, 6u);
    for (const auto& m : report.memberships) {
        EXPECT_EQ(m.cluster, Cluster::Slow);
        EXPECT_EQ(m.delta_degrees, 0.0);
        EXPECT_EQ(m.pub_year, 2007);
    }

    // final totals: 36 months of downloads, 3 years of citations
    const auto& p0 = report.memberships[0];
    EXPECT_EQ(p0.paper_id, "P0");
    EXPECT_EQ(p0.final_downloads, 360);
    EXPECT_EQ(p0.final_citations, 90);
}

TEST(Correlate, CitationShiftCountsTrailingYears) {
    Corpus corpus = make_corpus({
        make_paper("A", AccessClass::NonOpenAccess, {2007, 1},
                   std::vector<std::int64_t>(24, 10)),
        make_paper("B", AccessClass::NonOpenAccess, {2007, 1},
                   std::vector<std::int64_t>(24, 20)),
    });
    add_citations(corpus, "A", {{2008, 5}, {2009, 7}, {2010, 100}});
    add_citations(corpus, "B", {{2008, 2}});

    CorrelateConfig config;
    const auto plain = cluster_report(corpus, config);
    config.citation_shift = 2;
    const auto shifted = cluster_report(corpus, config);

    EXPECT_EQ(plain.citation_shift, 0);
    EXPECT_EQ(shifted.citation_shift, 2);
    const auto find = [](const CorrelationReport& r, const char* id) {
        for (const auto& m : r.memberships)
            if (m.paper_id == id) return m;
        ADD_FAILURE() << id << " missing from memberships";
        return ClusterMembership{};
    };
    EXPECT_EQ(find(plain, "A").final_citations, 5);     // 2008 only
    EXPECT_EQ(find(shifted, "A").final_citations, 112); // through 2010
    EXPECT_EQ(find(plain, "A").final_downloads, 240);
    EXPECT_EQ(find(shifted, "B").final_citations, 2);

    config.citation_shift = -1;
    EXPECT_THROW(cluster_report(corpus, config), InputError);
}

TEST(Correlate, SmallOrFlatGroupsHaveNoCoefficient) {
    // two papers: n = 2 < 3 leaves every group without a coefficient
    const auto two = cluster_report(proportional_corpus(2, 3));
    EXPECT_EQ(two.overall.n, 2u);
    EXPECT_FALSE(two.overall.pcc.has_value());

    // three identical papers: no variance on either axis
    std::vector<PaperRecord> papers;
    for (const char* id : {"A", "B", "C"})
        papers.push_back(make_paper(id, AccessClass::NonOpenAccess, {2007, 1},
                                    std::vector<std::int64_t>(24, 10)));
    Corpus corpus = make_corpus(std::move(papers));
    for (const char* id : {"A", "B", "C"}) add_citations(corpus, id, {{2007, 4}, {2008, 4}});
    const auto flat = cluster_report(corpus);
    EXPECT_EQ(flat.overall.n, 3u);
    EXPECT_FALSE(flat.overall.pcc.has_value());
}

TEST(Correlate, CountsAreConsistentAndShortPathsExcluded) {
    Corpus corpus = proportional_corpus(5, 3);
    // publishes in the final observation year: a single annual point, so a
    // single directed segment and no spread
    corpus.papers.push_back(make_paper("Z_late", AccessClass::NonOpenAccess, {2009, 6},
                                       {7, 7, 7, 7, 7, 7, 7}));
    std::sort(corpus.papers.begin(), corpus.papers.end(),
              [](const auto& a, const auto& b) { return a.paper_id < b.paper_id; });
    add_citations(corpus, "Z_late", {{2009, 3}});

    const auto report = cluster_report(corpus);
    EXPECT_EQ(report.eligible_trajectories, 6u);
    EXPECT_EQ(report.unclusterable, 1u);
    ASSERT_EQ(report.exclusions.size(), 1u);
    EXPECT_EQ(report.exclusions[0].paper_id, "Z_late");
    EXPECT_EQ(report.exclusions[0].reason, "trajectory_too_short_to_cluster");

    std::size_t cluster_total = 0;
    for (const auto& [cluster, stat] : report.by_cluster) cluster_total += stat.n;
    EXPECT_EQ(cluster_total, report.memberships.size());
    EXPECT_EQ(report.memberships.size(),
              report.eligible_trajectories - report.unclusterable);
    for (std::size_t i = 1; i < report.memberships.size(); ++i)
        EXPECT_LT(report.memberships[i - 1].paper_id, report.memberships[i].paper_id);
}

TEST(Correlate, GroupPearsonMatchesOracle) {
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> val(0.0, 500.0);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<std::pair<double, double>> xy;
        std::vector<double> xs, ys;
        const int n = 3 + trial % 7;
        for (int i = 0; i < n; ++i) {
            const double x = val(gen), y = val(gen);
            xy.emplace_back(x, y);
            xs.push_back(x);
            ys.push_back(y);
        }
        const auto got = detail::group_pearson(xy);
        const auto want = oracle::pcc(xs, ys);
        ASSERT_EQ(got.pcc.has_value(), want.has_value());
        if (want) EXPECT_NEAR(*got.pcc, *want, 1e-9);
        EXPECT_EQ(got.n, static_cast<std::size_t>(n));
    }
}
