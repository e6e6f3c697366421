#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "downcite/records.hpp"
#include "downcite/stats.hpp"

namespace downcite {

/// Cumulative downloads of one paper by age: values[t] is the total over
/// the paper's first t+1 months.
struct CumulativeCurve {
    std::string paper_id;
    std::vector<std::int64_t> values;
};

/// Per-age median and 25th-percentile cumulative downloads over a cohort.
/// Statistics at age t use only the papers whose history reaches t, so the
/// support count is non-increasing with age.
struct CohortProfile {
    AccessFilter cohort = AccessFilter::All;
    std::vector<double> median;
    std::vector<double> p25;
    std::vector<std::size_t> support;

    const std::vector<double>& p50() const { return median; }
    std::size_t age_span() const { return median.size(); }
};

/// Relative cumulative age distribution of downloads within a calendar
/// window: share[x] is the fraction of the window's downloads that went to
/// papers aged at most x months at download time.
struct SynchronousDistribution {
    MonthWindow window;
    std::vector<double> share;
    std::int64_t total_downloads = 0;
};

struct DensityPoint {
    int age = 0;
    double rho = 0;                // downloads per paper of this age
    std::int64_t downloads = 0;    // numerator
    std::size_t paper_count = 0;   // denominator
};

/// Mean downloads per paper by age within a calendar window. Ages with no
/// papers in the window are omitted rather than reported as zero.
struct DensitySeries {
    MonthWindow window;
    std::vector<DensityPoint> points; // ascending age
};

/// Diachronous view: each paper on its own clock starting at publication.
inline std::vector<CumulativeCurve> cumulative_curves(const Corpus& corpus,
                                                      AccessFilter filter = AccessFilter::All) {
    std::vector<CumulativeCurve> curves;
    for (const auto& p : corpus.papers) {
        if (!matches(filter, p.access)) continue;
        CumulativeCurve curve;
        curve.paper_id = p.paper_id;
        curve.values.reserve(p.monthly_downloads.size());
        std::int64_t running = 0;
        for (auto v : p.monthly_downloads) {
            running += v;
            curve.values.push_back(running);
        }
        curves.push_back(std::move(curve));
    }
    if (curves.empty()) throw InputError("no papers match the requested access class");
    return curves;
}

/// The distribution of cumulative downloads at a given age is skewed, so the
/// cohort profile is built from medians rather than means.
inline CohortProfile cohort_profile(const std::vector<CumulativeCurve>& curves,
                                    AccessFilter cohort = AccessFilter::All) {
    if (curves.empty()) throw InputError("cohort_profile: no curves");
    std::size_t max_len = 0;
    for (const auto& c : curves) max_len = std::max(max_len, c.values.size());

    CohortProfile profile;
    profile.cohort = cohort;
    profile.median.reserve(max_len);
    profile.p25.reserve(max_len);
    profile.support.reserve(max_len);
    std::vector<double> at_age;
    for (std::size_t t = 0; t < max_len; ++t) {
        at_age.clear();
        for (const auto& c : curves)
            if (t < c.values.size()) at_age.push_back(static_cast<double>(c.values[t]));
        if (at_age.empty()) break;
        std::sort(at_age.begin(), at_age.end());
        profile.median.push_back(percentile_sorted(at_age, 0.50));
        profile.p25.push_back(percentile_sorted(at_age, 0.25));
        profile.support.push_back(at_age.size());
    }
    return profile;
}

/// Monthly increments of the cohort median curve; the benchmark series that
/// per-paper monthly counts are compared against.
inline std::vector<double> median_monthly_increments(const CohortProfile& profile) {
    std::vector<double> inc(profile.median.size());
    for (std::size_t t = 0; t < profile.median.size(); ++t)
        inc[t] = t == 0 ? profile.median[0] : profile.median[t] - profile.median[t - 1];
    return inc;
}

namespace detail {

inline void check_window(const Corpus& corpus, MonthWindow window) {
    if (!valid(window.first) || !valid(window.last) || window.last < window.first)
        throw InputError("invalid window " + to_string(window.first) + ".." + to_string(window.last));
    if (month_index(window.last) > month_index(corpus.observation_end))
        throw InputError("window extends past observation_end " + to_string(corpus.observation_end));
}

} // namespace detail

/// Synchronous view: fix the calendar window, tally downloads by the age of
/// the downloaded paper. A download in calendar month m of a paper published
/// in month p counts at age m - p.
inline SynchronousDistribution synchronous_distribution(const Corpus& corpus, MonthWindow window) {
    detail::check_window(corpus, window);
    std::vector<std::int64_t> by_age;
    std::int64_t total = 0;
    for (const auto& p : corpus.papers) {
        const int pub = month_index(p.published);
        const int lo = std::max(month_index(window.first), pub);
        const int hi = std::min(month_index(window.last),
                                pub + static_cast<int>(p.monthly_downloads.size()) - 1);
        for (int m = lo; m <= hi; ++m) {
            const int age = m - pub;
            const std::int64_t count = p.monthly_downloads[static_cast<std::size_t>(age)];
            if (count == 0) continue;
            if (by_age.size() <= static_cast<std::size_t>(age))
                by_age.resize(static_cast<std::size_t>(age) + 1, 0);
            by_age[static_cast<std::size_t>(age)] += count;
            total += count;
        }
    }
    if (total == 0) throw InputError("no downloads in window " + to_string(window.first) + ".." +
                                     to_string(window.last));

    SynchronousDistribution dist;
    dist.window = window;
    dist.total_downloads = total;
    dist.share.reserve(by_age.size());
    std::int64_t running = 0;
    for (auto count : by_age) {
        running += count;
        dist.share.push_back(static_cast<double>(running) / static_cast<double>(total));
    }
    return dist;
}

/// Downloads per paper by age within the window. A paper of publication
/// month p has age t in the window iff p + t falls inside it.
inline DensitySeries density_series(const Corpus& corpus, MonthWindow window,
                                    AccessFilter filter = AccessFilter::All) {
    detail::check_window(corpus, window);
    std::vector<std::int64_t> downloads;
    std::vector<std::size_t> alive;
    for (const auto& p : corpus.papers) {
        if (!matches(filter, p.access)) continue;
        const int pub = month_index(p.published);
        const int lo = std::max(month_index(window.first), pub);
        const int hi = std::min(month_index(window.last),
                                pub + static_cast<int>(p.monthly_downloads.size()) - 1);
        for (int m = lo; m <= hi; ++m) {
            const auto age = static_cast<std::size_t>(m - pub);
            if (alive.size() <= age) {
                alive.resize(age + 1, 0);
                downloads.resize(age + 1, 0);
            }
            alive[age] += 1;
            downloads[age] += p.monthly_downloads[age];
        }
    }

    DensitySeries series;
    series.window = window;
    for (std::size_t t = 0; t < alive.size(); ++t) {
        if (alive[t] == 0) continue; // age not represented in the window
        series.points.push_back({static_cast<int>(t),
                                 static_cast<double>(downloads[t]) / static_cast<double>(alive[t]),
                                 downloads[t], alive[t]});
    }
    if (series.points.empty())
        throw InputError("no papers alive in window " + to_string(window.first) + ".." +
                         to_string(window.last));
    return series;
}

/// Full observation span of the corpus: earliest publication month through
/// observation_end. The default window for whole-journal statistics.
inline MonthWindow full_window(const Corpus& corpus) {
    if (corpus.papers.empty()) throw InputError("empty corpus");
    YearMonth first = corpus.papers.front().published;
    for (const auto& p : corpus.papers)
        if (p.published < first) first = p.published;
    return {first, corpus.observation_end};
}

} // namespace downcite
