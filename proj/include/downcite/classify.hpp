#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "downcite/profiles.hpp"
#include "downcite/records.hpp"
#include "downcite/stats.hpp"

namespace downcite {

enum class Burstiness { NonBursty, BurstyEarly, SleepingBeauty };
enum class Attractiveness { Typical, MoreAttractive, LessAttractive, Crossing };
enum class Ageing { Usual, FlashInPan, Delayed };

inline const char* to_token(Burstiness b) {
    switch (b) {
    case Burstiness::NonBursty: return "non_bursty";
    case Burstiness::BurstyEarly: return "bursty_early";
    case Burstiness::SleepingBeauty: return "sleeping_beauty";
    }
    return "";
}

inline const char* to_token(Attractiveness a) {
    switch (a) {
    case Attractiveness::Typical: return "typical";
    case Attractiveness::MoreAttractive: return "more_attractive";
    case Attractiveness::LessAttractive: return "less_attractive";
    case Attractiveness::Crossing: return "crossing";
    }
    return "";
}

inline const char* to_token(Ageing a) {
    switch (a) {
    case Ageing::Usual: return "usual";
    case Ageing::FlashInPan: return "flash_in_pan";
    case Ageing::Delayed: return "delayed";
    }
    return "";
}

/// How the half-life bounds for the ageing label are derived.
enum class HalfLifeMode {
    /// Bounds are fractions of the paper's own observed lifetime (default).
    LifetimeFraction,
    /// Bounds are the P25/P50 percentiles of the cohort half-life
    /// distribution, per access class.
    CohortPercentile,
};

struct ClassifyConfig {
    double rmsd_critical_non_oa = 66.0;
    double rmsd_critical_oa = 105.0;
    double burst_ratio_threshold = 5.0;
    int sleeping_beauty_min_month = 6; // bursts strictly later are sleeping beauties
    double halflife_low_fraction = 0.25;
    double halflife_high_fraction = 0.50;
    HalfLifeMode halflife_mode = HalfLifeMode::LifetimeFraction;

    double rmsd_critical(AccessClass access) const {
        return access == AccessClass::OpenAccess ? rmsd_critical_oa : rmsd_critical_non_oa;
    }

    void validate() const {
        if (rmsd_critical_non_oa <= 0 || rmsd_critical_oa <= 0 || burst_ratio_threshold <= 0)
            throw InputError("classify thresholds must be positive");
        if (!(0 < halflife_low_fraction && halflife_low_fraction < halflife_high_fraction &&
              halflife_high_fraction < 1))
            throw InputError("half-life fractions must satisfy 0 < low < high < 1");
    }
};

/// Deviation statistics of one paper against the cohort benchmark.
/// sigma_paper is the standard deviation of the paper's monthly counts over
/// its full history of T months; sigma_reference is the same statistic for
/// the cohort median monthly increments over the first T months. Bursts show
/// up as a large |sigma_paper - sigma_reference| relative to the cohort mean.
struct BurstStats {
    double sigma_paper = 0;
    double sigma_reference = 0;
    double delta = 0;
    double ratio = 0;
    std::optional<int> burst_month; // set iff ratio exceeds the threshold
};

/// First pass: |sigma_paper - sigma_reference| for one paper, or nullopt for
/// histories shorter than two months.
inline std::optional<double> burst_delta(const PaperRecord& paper, const CohortProfile& profile) {
    const std::size_t span = paper.monthly_downloads.size();
    if (span < 2) return std::nullopt;
    std::vector<double> counts(paper.monthly_downloads.begin(), paper.monthly_downloads.end());
    std::vector<double> reference = median_monthly_increments(profile);
    reference.resize(std::min(reference.size(), span));
    if (reference.size() < 2) return std::nullopt;
    return std::abs(sample_stddev(counts) - sample_stddev(reference));
}

/// Second pass, once the cohort mean delta is known.
inline BurstStats burst_stats(const PaperRecord& paper, const CohortProfile& profile,
                              double cohort_mean_delta, const ClassifyConfig& config = {}) {
    BurstStats stats;
    const std::size_t span = paper.monthly_downloads.size();
    if (span < 2) return stats; // delta undefined; caller reports the exclusion

    std::vector<double> counts(paper.monthly_downloads.begin(), paper.monthly_downloads.end());
    std::vector<double> reference = median_monthly_increments(profile);
    reference.resize(std::min(reference.size(), span));
    stats.sigma_paper = sample_stddev(counts);
    stats.sigma_reference = sample_stddev(reference);
    stats.delta = std::abs(stats.sigma_paper - stats.sigma_reference);
    // A cohort whose every paper matches the benchmark has mean delta 0; no
    // paper deviates, so the ratio is 0 for all of them.
    stats.ratio = cohort_mean_delta > 0 ? stats.delta / cohort_mean_delta : 0.0;

    if (stats.ratio > config.burst_ratio_threshold) {
        // month of the largest deviation above the benchmark increment
        std::size_t best = 0;
        double best_dev = counts[0] - reference[0];
        for (std::size_t t = 1; t < reference.size(); ++t) {
            const double dev = counts[t] - reference[t];
            if (dev > best_dev) {
                best_dev = dev;
                best = t;
            }
        }
        stats.burst_month = static_cast<int>(best);
    }
    return stats;
}

inline Burstiness classify_burstiness(const BurstStats& stats, const ClassifyConfig& config = {}) {
    if (stats.ratio <= config.burst_ratio_threshold) return Burstiness::NonBursty;
    const int burst_month = stats.burst_month.value_or(0);
    return burst_month > config.sleeping_beauty_min_month ? Burstiness::SleepingBeauty
                                                          : Burstiness::BurstyEarly;
}

/// Root-mean-square deviation of the paper's cumulative curve from the
/// cohort median, over the ages both cover.
inline double curve_rmsd(const CumulativeCurve& curve, const CohortProfile& profile) {
    const std::size_t span = std::min(curve.values.size(), profile.median.size());
    if (span == 0) throw InputError("curve_rmsd: empty overlap with profile");
    double ss = 0;
    for (std::size_t t = 0; t < span; ++t) {
        const double dev = static_cast<double>(curve.values[t]) - profile.median[t];
        ss += dev * dev;
    }
    return std::sqrt(ss / static_cast<double>(span));
}

/// Papers within the critical RMSD of the median are typical. Atypical ones
/// split by whether the curve dominates the median, stays under it, or
/// crosses it.
inline Attractiveness classify_attractiveness(const CumulativeCurve& curve,
                                              const CohortProfile& profile,
                                              const ClassifyConfig& config, AccessClass access) {
    if (curve_rmsd(curve, profile) <= config.rmsd_critical(access)) return Attractiveness::Typical;
    const std::size_t span = std::min(curve.values.size(), profile.median.size());
    bool all_above = true, all_below = true;
    for (std::size_t t = 0; t < span; ++t) {
        const double v = static_cast<double>(curve.values[t]);
        if (v <= profile.median[t]) all_above = false;
        if (v >= profile.median[t]) all_below = false;
    }
    if (all_above) return Attractiveness::MoreAttractive;
    if (all_below) return Attractiveness::LessAttractive;
    return Attractiveness::Crossing;
}

/// M50: smallest age by which the paper accumulated half of its current
/// downloads. Undefined for papers with no downloads at all.
inline std::optional<int> half_life(const CumulativeCurve& curve) {
    if (curve.values.empty() || curve.values.back() <= 0) return std::nullopt;
    const std::int64_t total = curve.values.back();
    for (std::size_t t = 0; t < curve.values.size(); ++t)
        if (2 * curve.values[t] >= total) return static_cast<int>(t);
    return std::nullopt; // unreachable: the final value always qualifies
}

inline Ageing classify_ageing(int m50, int paper_age_months, const ClassifyConfig& config = {}) {
    const double low = config.halflife_low_fraction * paper_age_months;
    const double high = config.halflife_high_fraction * paper_age_months;
    if (m50 < low) return Ageing::FlashInPan;
    if (m50 > high) return Ageing::Delayed;
    return Ageing::Usual;
}

/// Ageing label against absolute month bounds (cohort-percentile mode).
inline Ageing classify_ageing_bounds(int m50, double low_months, double high_months) {
    if (m50 < low_months) return Ageing::FlashInPan;
    if (m50 > high_months) return Ageing::Delayed;
    return Ageing::Usual;
}

/// One paper's labels across the three categorization axes.
struct PaperLabels {
    std::string paper_id;
    AccessClass access = AccessClass::NonOpenAccess;
    Burstiness burstiness = Burstiness::NonBursty;
    std::optional<Attractiveness> attractiveness; // non-bursty papers only
    std::optional<Ageing> ageing;                 // non-bursty with defined half-life
    double rmsd = 0;
    std::optional<int> half_life_months;
    std::optional<double> delta_ratio; // absent when the history is too short
};

/// Counts per axis and access class, Table-style. Fractions are over the
/// axis' own denominator: all papers for burstiness, non-bursty papers for
/// attractiveness, non-bursty papers with a defined half-life for ageing.
struct ClassSummary {
    std::size_t papers = 0;
    std::size_t non_bursty = 0;
    std::size_t bursty_early = 0;
    std::size_t sleeping_beauty = 0;
    std::size_t typical = 0;
    std::size_t more_attractive = 0;
    std::size_t less_attractive = 0;
    std::size_t crossing = 0;
    std::size_t ageing_papers = 0;
    std::size_t usual = 0;
    std::size_t flash_in_pan = 0;
    std::size_t delayed = 0;
};

struct ClassificationResult {
    std::vector<PaperLabels> labels; // sorted by paper_id within the corpus order
    std::map<AccessClass, ClassSummary> summary;
    std::vector<Exclusion> exclusions;
    ClassifyConfig config;
};

/// Labels every paper: two sequential cohort passes (profile, mean delta)
/// then independent per-paper classification.
inline ClassificationResult classify_corpus(const Corpus& corpus, const ClassifyConfig& config = {}) {
    config.validate();
    if (corpus.papers.empty()) throw InputError("classify: empty corpus");

    ClassificationResult result;
    result.config = config;

    for (AccessClass access : {AccessClass::NonOpenAccess, AccessClass::OpenAccess}) {
        const AccessFilter filter = access == AccessClass::OpenAccess
                                        ? AccessFilter::OpenAccessOnly
                                        : AccessFilter::NonOpenAccessOnly;
        std::vector<const PaperRecord*> papers;
        for (const auto& p : corpus.papers)
            if (p.access == access) papers.push_back(&p);
        if (papers.empty()) continue;

        const auto curves = cumulative_curves(corpus, filter);
        const auto profile = cohort_profile(curves, filter);

        // pass 1: cohort mean of |sigma_i - sigma_ref|
        double delta_sum = 0;
        std::size_t delta_count = 0;
        for (const auto* p : papers) {
            if (auto d = burst_delta(*p, profile)) {
                delta_sum += *d;
                ++delta_count;
            }
        }
        const double mean_delta = delta_count ? delta_sum / static_cast<double>(delta_count) : 0.0;

        // pass 2: per-paper labels
        ClassSummary& summary = result.summary[access];
        std::vector<std::pair<std::size_t, int>> ageing_pending; // label index, m50
        for (std::size_t i = 0; i < papers.size(); ++i) {
            const PaperRecord& paper = *papers[i];
            const CumulativeCurve& curve = curves[i];
            PaperLabels labels;
            labels.paper_id = paper.paper_id;
            labels.access = access;
            labels.rmsd = curve_rmsd(curve, profile);
            ++summary.papers;

            const bool delta_defined = paper.monthly_downloads.size() >= 2;
            if (!delta_defined) {
                result.exclusions.push_back({paper.paper_id, "history_too_short_for_burst_stats"});
                labels.burstiness = Burstiness::NonBursty;
            } else {
                const BurstStats stats = burst_stats(paper, profile, mean_delta, config);
                labels.delta_ratio = stats.ratio;
                labels.burstiness = classify_burstiness(stats, config);
            }

            switch (labels.burstiness) {
            case Burstiness::NonBursty: ++summary.non_bursty; break;
            case Burstiness::BurstyEarly: ++summary.bursty_early; break;
            case Burstiness::SleepingBeauty: ++summary.sleeping_beauty; break;
            }

            if (labels.burstiness == Burstiness::NonBursty) {
                labels.attractiveness = classify_attractiveness(curve, profile, config, access);
                switch (*labels.attractiveness) {
                case Attractiveness::Typical: ++summary.typical; break;
                case Attractiveness::MoreAttractive: ++summary.more_attractive; break;
                case Attractiveness::LessAttractive: ++summary.less_attractive; break;
                case Attractiveness::Crossing: ++summary.crossing; break;
                }

                if (auto m50 = half_life(curve)) {
                    labels.half_life_months = m50;
                    ageing_pending.emplace_back(result.labels.size(), *m50);
                } else if (delta_defined) {
                    // short-history papers are already in the ledger; one
                    // bucket per paper
                    result.exclusions.push_back({paper.paper_id, "zero_downloads_no_half_life"});
                }
            } else if (auto m50 = half_life(curve)) {
                labels.half_life_months = m50; // informative even for bursty papers
            }
            result.labels.push_back(std::move(labels));
        }

        // ageing pass needs the cohort half-life percentiles in cohort mode
        double low_bound = 0, high_bound = 0;
        if (config.halflife_mode == HalfLifeMode::CohortPercentile && !ageing_pending.empty()) {
            std::vector<double> m50s;
            m50s.reserve(ageing_pending.size());
            for (auto [idx, m50] : ageing_pending) m50s.push_back(m50);
            std::sort(m50s.begin(), m50s.end());
            low_bound = percentile_sorted(m50s, config.halflife_low_fraction);
            high_bound = percentile_sorted(m50s, config.halflife_high_fraction);
        }
        for (auto [idx, m50] : ageing_pending) {
            PaperLabels& labels = result.labels[idx];
            const PaperRecord* paper = corpus.find_paper(labels.paper_id);
            const Ageing ageing =
                config.halflife_mode == HalfLifeMode::LifetimeFraction
                    ? classify_ageing(m50, paper->age_span_months(), config)
                    : classify_ageing_bounds(m50, low_bound, high_bound);
            labels.ageing = ageing;
            ++summary.ageing_papers;
            switch (ageing) {
            case Ageing::Usual: ++summary.usual; break;
            case Ageing::FlashInPan: ++summary.flash_in_pan; break;
            case Ageing::Delayed: ++summary.delayed; break;
            }
        }
    }

    std::sort(result.labels.begin(), result.labels.end(),
              [](const PaperLabels& a, const PaperLabels& b) { return a.paper_id < b.paper_id; });
    std::sort(result.exclusions.begin(), result.exclusions.end(),
              [](const Exclusion& a, const Exclusion& b) { return a.paper_id < b.paper_id; });
    return result;
}

} // namespace downcite
