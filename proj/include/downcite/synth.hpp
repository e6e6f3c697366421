#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "downcite/calendar.hpp"
#include "downcite/correlate.hpp"
#include "downcite/model.hpp"
#include "downcite/records.hpp"
#include "downcite/rng.hpp"

namespace downcite {

/// Burst injection: a chosen fraction of papers receives one single-month
/// spike of amplitude x the paper's median model level, at a month drawn
/// uniformly from [month_min, month_max] (clipped to the paper's history).
struct BurstInjection {
    double fraction = 0.0;
    double amplitude = 25.0;
    int month_min = 1;
    int month_max = 12;
};

struct SynthSpec {
    int paper_count = 0;
    int months = 0; // window length; observation ends months-1 after start
    DecayModelParams non_oa_params{30.0, 0.84, 0.86, 0.02};
    DecayModelParams oa_params{30.0, 0.71, 0.50, 0.03};
    double oa_fraction = 0.0;
    double noise_spread = 0.0; // sigma of the unit-mean log-normal factor
    BurstInjection burst;
    // annual citations = coupling * that year's downloads + N(0, noise_sd)
    double citation_coupling = 0.05;
    double citation_noise_sd = 0.0;
    YearMonth start{2007, 1};
    int pub_spread_months = 0; // publication offset drawn from [0, spread]
    std::uint64_t seed = 1;

    void validate() const {
        if (paper_count < 1) throw InputError("paper_count must be >= 1");
        if (months < 1) throw InputError("months must be >= 1");
        if (oa_fraction < 0 || oa_fraction > 1)
            throw InputError("oa_fraction must lie in [0,1]");
        if (burst.fraction < 0 || burst.fraction > 1)
            throw InputError("burst fraction must lie in [0,1]");
        if (burst.fraction > 0 && burst.amplitude <= 1)
            throw InputError("burst amplitude must exceed 1");
        if (burst.month_min < 1 || burst.month_max < burst.month_min)
            throw InputError("burst month range must satisfy 1 <= min <= max");
        if (noise_spread < 0) throw InputError("noise_spread must be nonnegative");
        if (citation_coupling < 0) throw InputError("citation_coupling must be nonnegative");
        if (citation_noise_sd < 0) throw InputError("citation_noise_sd must be nonnegative");
        if (pub_spread_months < 0) throw InputError("pub_spread_months must be nonnegative");
    }
};

/// What the generator actually did to one paper, for scoring detectors.
struct PaperTruth {
    std::string paper_id;
    AccessClass access = AccessClass::NonOpenAccess;
    YearMonth published;
    DecayModelParams params; // generating law for this paper
    bool bursty = false;
    std::optional<int> burst_month;
    std::optional<Cluster> cluster_intent; // set by the cluster scenario only
};

struct GroundTruth {
    std::vector<PaperTruth> papers; // one entry per generated paper, id order
};

struct SynthResult {
    Corpus corpus;
    GroundTruth truth;
};

namespace detail {

inline std::string synth_paper_id(int index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "P%06d", index);
    return buf;
}

inline double median_model_level(const DecayModelParams& params, int span) {
    std::vector<double> levels(static_cast<std::size_t>(span));
    for (int t = 0; t < span; ++t) levels[static_cast<std::size_t>(t)] = eval_model(params, t);
    return median(levels);
}

} // namespace detail

/// Draws a corpus from the decay law plus controlled violations. One RNG
/// stream, paper by paper, draw order fixed: access, publication offset,
/// monthly noise, burst coin, burst month, citation noise. Same spec (and
/// seed) always reproduces the same corpus and truth.
inline SynthResult generate(const SynthSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);

    SynthResult result;
    result.corpus.observation_end = add_months(spec.start, spec.months - 1);

    const int max_offset = std::min(spec.pub_spread_months, spec.months - 1);
    for (int i = 0; i < spec.paper_count; ++i) {
        PaperRecord paper;
        PaperTruth truth;
        paper.paper_id = detail::synth_paper_id(i + 1);
        truth.paper_id = paper.paper_id;

        paper.access = rng.bernoulli(spec.oa_fraction) ? AccessClass::OpenAccess
                                                       : AccessClass::NonOpenAccess;
        truth.access = paper.access;
        const auto& params =
            paper.access == AccessClass::OpenAccess ? spec.oa_params : spec.non_oa_params;
        truth.params = params;

        const int offset = static_cast<int>(rng.uniform_int(0, max_offset));
        paper.published = add_months(spec.start, offset);
        truth.published = paper.published;

        const int span = spec.months - offset;
        paper.monthly_downloads.resize(static_cast<std::size_t>(span));
        for (int t = 0; t < span; ++t) {
            const double level = eval_model(params, t) * rng.lognormal_unit_mean(spec.noise_spread);
            paper.monthly_downloads[static_cast<std::size_t>(t)] = std::llround(level);
        }

        if (rng.bernoulli(spec.burst.fraction) && span - 1 >= spec.burst.month_min) {
            const int hi = std::min(spec.burst.month_max, span - 1);
            const int burst_month =
                static_cast<int>(rng.uniform_int(spec.burst.month_min, hi));
            const double spike = spec.burst.amplitude * detail::median_model_level(params, span);
            paper.monthly_downloads[static_cast<std::size_t>(burst_month)] +=
                std::llround(spike);
            truth.bursty = true;
            truth.burst_month = burst_month;
        }

        CitationRecord cites;
        cites.paper_id = paper.paper_id;
        const int first_year = paper.published.year;
        const int last_year = result.corpus.observation_end.year;
        std::vector<std::int64_t> downloads_by_year(
            static_cast<std::size_t>(last_year - first_year + 1), 0);
        for (int t = 0; t < span; ++t) {
            const YearMonth when = add_months(paper.published, t);
            downloads_by_year[static_cast<std::size_t>(when.year - first_year)] +=
                paper.monthly_downloads[static_cast<std::size_t>(t)];
        }
        for (int year = first_year; year <= last_year; ++year) {
            double raw = spec.citation_coupling *
                         static_cast<double>(downloads_by_year[static_cast<std::size_t>(
                             year - first_year)]);
            if (spec.citation_noise_sd > 0) raw += rng.normal() * spec.citation_noise_sd;
            cites.annual_citations[year] = std::max<std::int64_t>(0, std::llround(raw));
        }

        result.corpus.papers.push_back(std::move(paper));
        result.corpus.citations.emplace(cites.paper_id, std::move(cites));
        result.truth.papers.push_back(std::move(truth));
    }
    return result;
}

/// Three-cluster fixture for the trajectory analysis. Downloads land in
/// January of each year so annual bucketing is unambiguous.
///   Slow: citations a fixed multiple of downloads every year (zero turn)
///   Medium: steady downloads, nearly steady citations (small final kink)
///   High: steady downloads, all citations arriving in the final year
struct ClusterScenarioSpec {
    int years = 4; // annual points per paper; at least 2
    int papers_per_cluster = 5;
    int start_year = 2007;

    void validate() const {
        if (years < 2) throw InputError("cluster scenario needs at least 2 years");
        if (papers_per_cluster < 1) throw InputError("papers_per_cluster must be >= 1");
    }
};

inline SynthResult generate_cluster_scenario(const ClusterScenarioSpec& spec = {}) {
    spec.validate();
    SynthResult result;
    result.corpus.observation_end = YearMonth{spec.start_year + spec.years - 1, 12};
    const YearMonth published{spec.start_year, 1};
    const int span = spec.years * 12;

    int next_id = 0;
    const auto add_paper = [&](Cluster intent, const std::vector<std::int64_t>& annual_d,
                               const std::vector<std::int64_t>& annual_c) {
        PaperRecord paper;
        paper.paper_id = detail::synth_paper_id(++next_id);
        paper.published = published;
        paper.monthly_downloads.assign(static_cast<std::size_t>(span), 0);
        CitationRecord cites;
        cites.paper_id = paper.paper_id;
        for (int y = 0; y < spec.years; ++y) {
            paper.monthly_downloads[static_cast<std::size_t>(12 * y)] =
                annual_d[static_cast<std::size_t>(y)];
            cites.annual_citations[spec.start_year + y] = annual_c[static_cast<std::size_t>(y)];
        }

        PaperTruth truth;
        truth.paper_id = paper.paper_id;
        truth.access = paper.access;
        truth.published = published;
        truth.cluster_intent = intent;

        result.corpus.papers.push_back(std::move(paper));
        result.corpus.citations.emplace(cites.paper_id, std::move(cites));
        result.truth.papers.push_back(std::move(truth));
    };

    for (int i = 0; i < spec.papers_per_cluster; ++i) {
        // proportional growth: every segment points the same way
        const std::int64_t annual = 80 + 20 * i;
        add_paper(Cluster::Slow, std::vector<std::int64_t>(spec.years, annual),
                  std::vector<std::int64_t>(spec.years, annual / 4));
    }
    static constexpr std::int64_t kKinkLevels[] = {24, 30, 40};
    for (int i = 0; i < spec.papers_per_cluster; ++i) {
        // one extra citation in the final year bends the path slightly
        const std::int64_t m = kKinkLevels[i % 3];
        std::vector<std::int64_t> annual_c(static_cast<std::size_t>(spec.years), m);
        annual_c.back() = m + 1;
        add_paper(Cluster::Medium, std::vector<std::int64_t>(spec.years, 100), annual_c);
    }
    for (int i = 0; i < spec.papers_per_cluster; ++i) {
        // flat citation record until everything arrives at once
        std::vector<std::int64_t> annual_c(static_cast<std::size_t>(spec.years), 0);
        annual_c.back() = 100;
        add_paper(Cluster::High, std::vector<std::int64_t>(spec.years, 100), annual_c);
    }

    // the construction must land in its intended bands; anything else is a
    // generator bug, not bad input
    const auto built = build_trajectories(result.corpus);
    for (std::size_t i = 0; i < built.trajectories.size(); ++i) {
        const auto stats = zigzag_stats(built.trajectories[i].points);
        const auto& truth = result.truth.papers[i];
        if (!stats.cluster || *stats.cluster != *truth.cluster_intent)
            throw std::logic_error("cluster scenario failed its own band check for " +
                                   truth.paper_id);
    }
    return result;
}

} // namespace downcite
