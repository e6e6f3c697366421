#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "downcite/calendar.hpp"
#include "downcite/profiles.hpp"
#include "downcite/records.hpp"
#include "downcite/stats.hpp"

namespace downcite {

/// Cumulative standing of one paper at the end of a calendar year.
struct AnnualPoint {
    int year = 0;
    std::int64_t cum_downloads = 0;
    std::int64_t cum_citations = 0;

    bool operator==(const AnnualPoint&) const = default;
};

struct AnnualTrajectory {
    std::string paper_id;
    AccessClass access = AccessClass::NonOpenAccess;
    int pub_year = 0;
    std::vector<AnnualPoint> points; // pub year through window end, inclusive

    bool operator==(const AnnualTrajectory&) const = default;
};

/// Builds one trajectory per paper that has a citation record. Papers
/// without one cannot enter the downloads-vs-citations comparison at all;
/// the caller receives their count separately.
struct TrajectoryBuild {
    std::vector<AnnualTrajectory> trajectories; // sorted by paper_id
    std::size_t excluded_no_citations = 0;
};

inline TrajectoryBuild build_trajectories(const Corpus& corpus,
                                          AccessFilter filter = AccessFilter::All) {
    TrajectoryBuild build;
    const int end_year = corpus.observation_end.year;
    for (const auto& paper : corpus.papers) {
        if (!matches(filter, paper.access)) continue;
        const auto cit = corpus.citations.find(paper.paper_id);
        if (cit == corpus.citations.end()) {
            ++build.excluded_no_citations;
            continue;
        }

        AnnualTrajectory traj;
        traj.paper_id = paper.paper_id;
        traj.access = paper.access;
        traj.pub_year = paper.published.year;

        std::map<int, std::int64_t> downloads_by_year;
        for (std::size_t i = 0; i < paper.monthly_downloads.size(); ++i) {
            const YearMonth when = add_months(paper.published, static_cast<int>(i));
            downloads_by_year[when.year] += paper.monthly_downloads[i];
        }

        std::int64_t cum_d = 0;
        for (int year = traj.pub_year; year <= end_year; ++year) {
            if (const auto it = downloads_by_year.find(year); it != downloads_by_year.end())
                cum_d += it->second;
            std::int64_t cum_c = 0;
            for (const auto& [cit_year, count] : cit->second.annual_citations)
                if (cit_year <= year) cum_c += count;
            traj.points.push_back({year, cum_d, cum_c});
        }
        build.trajectories.push_back(std::move(traj));
    }
    if (build.trajectories.empty())
        throw InputError("no papers with citation records match the requested access class");
    return build;
}

enum class Cluster { Slow, Medium, High };

inline const char* cluster_token(Cluster c) {
    switch (c) {
        case Cluster::Slow: return "slow";
        case Cluster::Medium: return "medium";
        case Cluster::High: return "high";
    }
    return "";
}

struct ZigZagConfig {
    double delta_slow = 0.3; // degrees; at or below -> Slow
    double delta_high = 8.0; // degrees; above -> High
    bool normalize = true;   // scale increments by the final totals

    void validate() const {
        if (delta_slow < 0 || delta_high <= delta_slow)
            throw InputError("zig-zag thresholds must satisfy 0 <= slow < high");
    }
};

struct ZigZagStats {
    std::vector<double> angles_degrees; // one per segment with any movement
    std::optional<double> delta_degrees;
    std::optional<Cluster> cluster;
};

/// Turn-angle spread of the cumulative (downloads, citations) path. The
/// path starts at the origin; each calendar year appends one point, so
/// increments are nonnegative on both axes and every angle lies in [0, 90]
/// degrees. Segments with no movement on either axis carry no direction and
/// are skipped; fewer than two directed segments leave the spread undefined.
inline ZigZagStats zigzag_stats(const std::vector<AnnualPoint>& points,
                                const ZigZagConfig& config = {}) {
    config.validate();
    ZigZagStats stats;
    if (points.size() < 2) return stats;

    const double final_d = static_cast<double>(points.back().cum_downloads);
    const double final_c = static_cast<double>(points.back().cum_citations);
    const double d_scale = (config.normalize && final_d > 0) ? 1.0 / final_d : 1.0;
    const double c_scale = (config.normalize && final_c > 0) ? 1.0 / final_c : 1.0;

    std::int64_t prev_d = 0;
    std::int64_t prev_c = 0;
    for (const auto& point : points) {
        const double dd = static_cast<double>(point.cum_downloads - prev_d) * d_scale;
        const double dc = static_cast<double>(point.cum_citations - prev_c) * c_scale;
        prev_d = point.cum_downloads;
        prev_c = point.cum_citations;
        if (dd == 0 && dc == 0) continue;
        stats.angles_degrees.push_back(std::atan2(dc, dd) * 180.0 / M_PI);
    }
    if (stats.angles_degrees.size() < 2) return stats;

    const auto [lo, hi] =
        std::minmax_element(stats.angles_degrees.begin(), stats.angles_degrees.end());
    stats.delta_degrees = *hi - *lo;
    if (*stats.delta_degrees <= config.delta_slow)
        stats.cluster = Cluster::Slow;
    else if (*stats.delta_degrees <= config.delta_high)
        stats.cluster = Cluster::Medium;
    else
        stats.cluster = Cluster::High;
    return stats;
}

struct ClusterMembership {
    std::string paper_id;
    int pub_year = 0;
    double delta_degrees = 0;
    Cluster cluster = Cluster::Slow;
    std::int64_t final_downloads = 0;
    std::int64_t final_citations = 0;
};

/// Pearson coefficient for one group of papers; absent when the group is
/// too small or has no variance on either axis.
struct GroupStat {
    std::optional<double> pcc;
    std::size_t n = 0;
};

struct CorrelateConfig {
    ZigZagConfig zigzag;
    AccessFilter filter = AccessFilter::All;
    // Citations for the correlation are counted through window end plus
    // this many years, since citing papers trail the downloads they reflect.
    int citation_shift = 0;

    void validate() const {
        zigzag.validate();
        if (citation_shift < 0) throw InputError("citation shift must be nonnegative");
    }
};

struct CorrelationReport {
    GroupStat overall;
    std::map<int, GroupStat> by_pub_year;
    std::map<Cluster, GroupStat> by_cluster;
    std::map<AccessClass, GroupStat> by_access;
    std::vector<ClusterMembership> memberships; // sorted by paper_id
    std::vector<Exclusion> exclusions;          // sorted by paper_id
    std::size_t eligible_trajectories = 0;
    std::size_t excluded_no_citations = 0;
    std::size_t unclusterable = 0;
    int citation_shift = 0;
};

namespace detail {

inline GroupStat group_pearson(const std::vector<std::pair<double, double>>& xy) {
    GroupStat g;
    g.n = xy.size();
    std::vector<double> x, y;
    x.reserve(xy.size());
    y.reserve(xy.size());
    for (const auto& [a, b] : xy) {
        x.push_back(a);
        y.push_back(b);
    }
    g.pcc = pearson(x, y);
    return g;
}

} // namespace detail

/// Full downloads-vs-citations comparison: final-total correlations for the
/// whole cohort and per publication year, access class and zig-zag cluster.
inline CorrelationReport cluster_report(const Corpus& corpus, const CorrelateConfig& config = {}) {
    config.validate();
    auto build = build_trajectories(corpus, config.filter);

    CorrelationReport report;
    report.excluded_no_citations = build.excluded_no_citations;
    report.eligible_trajectories = build.trajectories.size();
    report.citation_shift = config.citation_shift;

    const int shifted_end = corpus.observation_end.year + config.citation_shift;

    std::vector<std::pair<double, double>> all_xy;
    std::map<int, std::vector<std::pair<double, double>>> year_xy;
    std::map<Cluster, std::vector<std::pair<double, double>>> cluster_xy;
    std::map<AccessClass, std::vector<std::pair<double, double>>> access_xy;

    for (const auto& traj : build.trajectories) {
        const std::int64_t final_d = traj.points.back().cum_downloads;
        std::int64_t final_c = 0;
        const auto& cit = corpus.citations.at(traj.paper_id);
        for (const auto& [year, count] : cit.annual_citations)
            if (year <= shifted_end) final_c += count;

        const std::pair<double, double> xy{static_cast<double>(final_d),
                                           static_cast<double>(final_c)};
        all_xy.push_back(xy);
        year_xy[traj.pub_year].push_back(xy);
        access_xy[traj.access].push_back(xy);

        const ZigZagStats stats = zigzag_stats(traj.points, config.zigzag);
        if (!stats.cluster) {
            ++report.unclusterable;
            report.exclusions.push_back({traj.paper_id, "trajectory_too_short_to_cluster"});
            continue;
        }
        cluster_xy[*stats.cluster].push_back(xy);
        report.memberships.push_back({traj.paper_id, traj.pub_year, *stats.delta_degrees,
                                      *stats.cluster, final_d, final_c});
    }

    report.overall = detail::group_pearson(all_xy);
    for (const auto& [year, xy] : year_xy) report.by_pub_year[year] = detail::group_pearson(xy);
    for (const auto& [cluster, xy] : cluster_xy)
        report.by_cluster[cluster] = detail::group_pearson(xy);
    for (const auto& [access, xy] : access_xy)
        report.by_access[access] = detail::group_pearson(xy);
    return report;
}

} // namespace downcite
