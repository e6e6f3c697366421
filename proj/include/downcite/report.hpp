#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "downcite/calendar.hpp"
#include "downcite/classify.hpp"
#include "downcite/correlate.hpp"
#include "downcite/model.hpp"
#include "downcite/records.hpp"

namespace downcite {

/// Percentages in tenths of a percent by largest remainder, so each axis
/// sums to exactly 100.0 whenever the counts sum to the denominator. Integer
/// arithmetic throughout; ties go to the earlier row.
inline std::vector<double> largest_remainder_pct(const std::vector<std::size_t>& counts,
                                                 std::size_t total) {
    std::vector<double> out(counts.size(), 0.0);
    if (total == 0) return out;
    std::vector<long long> tenths(counts.size());
    std::vector<std::size_t> order(counts.size());
    std::vector<unsigned long long> remainder(counts.size());
    long long assigned = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const unsigned long long scaled = static_cast<unsigned long long>(counts[i]) * 1000ull;
        tenths[i] = static_cast<long long>(scaled / total);
        remainder[i] = scaled % total;
        assigned += tenths[i];
        order[i] = i;
    }
    long long leftover = 1000 - assigned;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (remainder[a] != remainder[b]) return remainder[a] > remainder[b];
        return a < b;
    });
    for (std::size_t k = 0; k < order.size() && leftover > 0; ++k, --leftover)
        ++tenths[order[k]];
    for (std::size_t i = 0; i < counts.size(); ++i)
        out[i] = static_cast<double>(tenths[i]) / 10.0;
    return out;
}

struct CategoryShare {
    std::string category;
    std::size_t count = 0;
    double pct = 0;
};

struct AxisBreakdown {
    std::string axis;
    std::size_t total = 0; // the axis' own denominator
    std::vector<CategoryShare> rows;
};

struct ClassBlock {
    AccessClass access = AccessClass::NonOpenAccess;
    std::vector<AxisBreakdown> axes;
};

struct FitSummary {
    AccessClass access = AccessClass::NonOpenAccess;
    DecayModelParams params;
    double horizon_months = 0;
    HalfShareAge half_window;    // within the observation horizon
    HalfShareAge half_unbounded; // all downloads the model will ever predict
};

struct GroupLine {
    std::string group;
    std::optional<double> pcc;
    std::size_t n = 0;
};

struct CorrelationBlock {
    GroupLine overall;
    std::vector<GroupLine> by_year;
    std::vector<GroupLine> by_cluster;
    std::vector<GroupLine> by_access;
    std::size_t eligible = 0;
    std::size_t excluded_no_citations = 0;
    std::size_t unclusterable = 0;
    int citation_shift = 0;
};

/// Everything the run summary reports, already rounded to the precision the
/// document uses. The text and JSON renders read these exact values, so the
/// two formats cannot drift apart.
struct RunSummary {
    std::size_t papers = 0;
    std::size_t oa_papers = 0;
    std::size_t non_oa_papers = 0;
    YearMonth first_published;
    YearMonth window_end;
    std::vector<ClassBlock> classification; // empty: not computed
    std::vector<FitSummary> fits;           // empty: not computed
    std::optional<CorrelationBlock> correlation;
    std::vector<Exclusion> exclusions; // one reason bucket per paper
};

namespace detail {

inline double round_to(double x, int digits) {
    const double scale = std::pow(10.0, digits);
    return std::llround(x * scale) / scale;
}

inline std::optional<double> round_pcc(std::optional<double> pcc) {
    if (!pcc) return std::nullopt;
    return round_to(*pcc, 4);
}

template <class... Args>
std::string strf(const char* fmt, Args... args) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), fmt, args...);
    return buf;
}

inline AxisBreakdown make_axis(std::string axis, std::size_t total,
                               std::vector<std::pair<std::string, std::size_t>> rows) {
    AxisBreakdown breakdown;
    breakdown.axis = std::move(axis);
    breakdown.total = total;
    std::vector<std::size_t> counts;
    counts.reserve(rows.size());
    for (const auto& [name, count] : rows) counts.push_back(count);
    const auto pct = largest_remainder_pct(counts, total);
    for (std::size_t i = 0; i < rows.size(); ++i)
        breakdown.rows.push_back({std::move(rows[i].first), rows[i].second, pct[i]});
    return breakdown;
}

} // namespace detail

/// Table blocks for one classification run: per access class, the three
/// axes with counts and largest-remainder percentages over each axis' own
/// denominator.
inline std::vector<ClassBlock> classification_blocks(const ClassificationResult& result) {
    std::vector<ClassBlock> blocks;
    for (const auto& [access, s] : result.summary) {
        ClassBlock block;
        block.access = access;
        block.axes.push_back(
            detail::make_axis("burstiness", s.papers,
                              {{to_token(Burstiness::NonBursty), s.non_bursty},
                               {to_token(Burstiness::BurstyEarly), s.bursty_early},
                               {to_token(Burstiness::SleepingBeauty), s.sleeping_beauty}}));
        block.axes.push_back(
            detail::make_axis("attractiveness", s.non_bursty,
                              {{to_token(Attractiveness::Typical), s.typical},
                               {to_token(Attractiveness::MoreAttractive), s.more_attractive},
                               {to_token(Attractiveness::LessAttractive), s.less_attractive},
                               {to_token(Attractiveness::Crossing), s.crossing}}));
        block.axes.push_back(detail::make_axis("ageing", s.ageing_papers,
                                               {{to_token(Ageing::Usual), s.usual},
                                                {to_token(Ageing::FlashInPan), s.flash_in_pan},
                                                {to_token(Ageing::Delayed), s.delayed}}));
        blocks.push_back(std::move(block));
    }
    return blocks;
}

/// Assembles the summary from whichever analyses ran. Null sections render
/// as "not computed" rather than disappearing. The exclusion ledger merges
/// the sources, keeping the first reason seen per paper.
inline RunSummary build_run_summary(const Corpus& corpus,
                                    const ClassificationResult* classification,
                                    const std::vector<FitSummary>& fits,
                                    const CorrelationReport* correlation) {
    if (corpus.papers.empty()) throw InputError("summary: empty corpus");
    RunSummary summary;
    summary.papers = corpus.papers.size();
    summary.window_end = corpus.observation_end;
    summary.first_published = corpus.papers.front().published;
    for (const auto& paper : corpus.papers) {
        if (paper.access == AccessClass::OpenAccess)
            ++summary.oa_papers;
        else
            ++summary.non_oa_papers;
        if (paper.published < summary.first_published) summary.first_published = paper.published;
    }

    if (classification) summary.classification = classification_blocks(*classification);

    for (FitSummary fit : fits) {
        fit.params.rho0 = detail::round_to(fit.params.rho0, 4);
        fit.params.weight_a = detail::round_to(fit.params.weight_a, 4);
        fit.params.decay_fast = detail::round_to(fit.params.decay_fast, 4);
        fit.params.decay_slow = detail::round_to(fit.params.decay_slow, 4);
        fit.half_window.continuous_months = detail::round_to(fit.half_window.continuous_months, 2);
        fit.half_unbounded.continuous_months =
            detail::round_to(fit.half_unbounded.continuous_months, 2);
        summary.fits.push_back(fit);
    }

    if (correlation) {
        CorrelationBlock block;
        block.overall = {"overall", detail::round_pcc(correlation->overall.pcc),
                         correlation->overall.n};
        for (const auto& [year, stat] : correlation->by_pub_year)
            block.by_year.push_back(
                {std::to_string(year), detail::round_pcc(stat.pcc), stat.n});
        for (const auto& [cluster, stat] : correlation->by_cluster)
            block.by_cluster.push_back(
                {cluster_token(cluster), detail::round_pcc(stat.pcc), stat.n});
        for (const auto& [access, stat] : correlation->by_access)
            block.by_access.push_back(
                {access_token(access), detail::round_pcc(stat.pcc), stat.n});
        block.eligible = correlation->eligible_trajectories;
        block.excluded_no_citations = correlation->excluded_no_citations;
        block.unclusterable = correlation->unclusterable;
        block.citation_shift = correlation->citation_shift;
        summary.correlation = std::move(block);
    }

    std::set<std::string> seen;
    const auto merge = [&](const std::vector<Exclusion>& source) {
        for (const auto& e : source)
            if (seen.insert(e.paper_id).second) summary.exclusions.push_back(e);
    };
    if (classification) merge(classification->exclusions);
    if (correlation) merge(correlation->exclusions);
    std::sort(summary.exclusions.begin(), summary.exclusions.end(),
              [](const Exclusion& a, const Exclusion& b) { return a.paper_id < b.paper_id; });
    return summary;
}

inline std::string render_summary_text(const RunSummary& summary) {
    using detail::strf;
    std::string out;
    out += "run summary\n===========\n\n";
    out += "corpus\n";
    out += strf("  papers: %zu (OA %zu, non-OA %zu)\n", summary.papers, summary.oa_papers,
                summary.non_oa_papers);
    out += "  first published: " + to_string(summary.first_published) + "\n";
    out += "  window end: " + to_string(summary.window_end) + "\n\n";

    out += "classification\n";
    if (summary.classification.empty()) {
        out += "  not computed\n";
    } else {
        for (const auto& block : summary.classification) {
            out += strf("  access class %s\n", access_token(block.access));
            for (const auto& axis : block.axes) {
                out += strf("    %s (n=%zu)\n", axis.axis.c_str(), axis.total);
                for (const auto& row : axis.rows)
                    out += strf("      %-16s %6zu  %5.1f%%\n", row.category.c_str(), row.count,
                                row.pct);
            }
        }
    }
    out += "\ndecay fit\n";
    if (summary.fits.empty()) {
        out += "  not computed\n";
    } else {
        for (const auto& fit : summary.fits) {
            out += strf("  access class %s\n", access_token(fit.access));
            out += strf("    rho0=%.4f weight_a=%.4f decay_fast=%.4f decay_slow=%.4f\n",
                        fit.params.rho0, fit.params.weight_a, fit.params.decay_fast,
                        fit.params.decay_slow);
            out += strf("    converged=%s iterations=%d degenerate=%s\n",
                        fit.params.converged ? "yes" : "no", fit.params.iterations,
                        fit.params.degenerate ? "yes" : "no");
            out += strf("    half-share age (%.0f-month horizon): %.2f months, whole %d\n",
                        fit.horizon_months, fit.half_window.continuous_months,
                        fit.half_window.months);
            out += strf("    half-share age (unbounded): %.2f months, whole %d\n",
                        fit.half_unbounded.continuous_months, fit.half_unbounded.months);
        }
    }

    const auto group_line = [&](const GroupLine& g, const char* indent) {
        if (g.pcc)
            return strf("%s%s: pcc=%.4f n=%zu\n", indent, g.group.c_str(), *g.pcc, g.n);
        return strf("%s%s: pcc=n/a n=%zu\n", indent, g.group.c_str(), g.n);
    };
    out += "\ncorrelation\n";
    if (!summary.correlation) {
        out += "  not computed\n";
    } else {
        const auto& c = *summary.correlation;
        out += group_line(c.overall, "  ");
        out += "  by publication year\n";
        for (const auto& g : c.by_year) out += group_line(g, "    ");
        out += "  by cluster\n";
        for (const auto& g : c.by_cluster) out += group_line(g, "    ");
        out += "  by access class\n";
        for (const auto& g : c.by_access) out += group_line(g, "    ");
        out += strf("  eligible=%zu no_citations=%zu unclusterable=%zu citation_shift=%d\n",
                    c.eligible, c.excluded_no_citations, c.unclusterable, c.citation_shift);
    }

    out += "\nexclusions\n";
    if (summary.exclusions.empty()) {
        out += "  none\n";
    } else {
        for (const auto& e : summary.exclusions)
            out += strf("  %s: %s\n", e.paper_id.c_str(), e.reason.c_str());
    }
    return out;
}

inline nlohmann::json render_summary_json(const RunSummary& summary) {
    nlohmann::json doc;
    doc["corpus"] = {{"papers", summary.papers},
                     {"oa_papers", summary.oa_papers},
                     {"non_oa_papers", summary.non_oa_papers},
                     {"first_published", to_string(summary.first_published)},
                     {"window_end", to_string(summary.window_end)}};

    if (summary.classification.empty()) {
        doc["classification"] = nullptr;
    } else {
        auto& blocks = doc["classification"];
        blocks = nlohmann::json::array();
        for (const auto& block : summary.classification) {
            nlohmann::json jb;
            jb["access"] = access_token(block.access);
            for (const auto& axis : block.axes) {
                nlohmann::json ja;
                ja["total"] = axis.total;
                for (const auto& row : axis.rows)
                    ja["rows"].push_back(
                        {{"category", row.category}, {"count", row.count}, {"pct", row.pct}});
                jb[axis.axis] = std::move(ja);
            }
            blocks.push_back(std::move(jb));
        }
    }

    if (summary.fits.empty()) {
        doc["fit"] = nullptr;
    } else {
        auto& fits = doc["fit"];
        fits = nlohmann::json::array();
        for (const auto& fit : summary.fits) {
            fits.push_back(
                {{"access", access_token(fit.access)},
                 {"rho0", fit.params.rho0},
                 {"weight_a", fit.params.weight_a},
                 {"decay_fast", fit.params.decay_fast},
                 {"decay_slow", fit.params.decay_slow},
                 {"converged", fit.params.converged},
                 {"iterations", fit.params.iterations},
                 {"degenerate", fit.params.degenerate},
                 {"horizon_months", fit.horizon_months},
                 {"half_share_window",
                  {{"continuous_months", fit.half_window.continuous_months},
                   {"months", fit.half_window.months}}},
                 {"half_share_unbounded",
                  {{"continuous_months", fit.half_unbounded.continuous_months},
                   {"months", fit.half_unbounded.months}}}});
        }
    }

    const auto group_json = [](const GroupLine& g) {
        nlohmann::json j;
        j["group"] = g.group;
        j["n"] = g.n;
        if (g.pcc)
            j["pcc"] = *g.pcc;
        else
            j["pcc"] = nullptr;
        return j;
    };
    if (!summary.correlation) {
        doc["correlation"] = nullptr;
    } else {
        const auto& c = *summary.correlation;
        nlohmann::json jc;
        jc["overall"] = group_json(c.overall);
        jc["by_year"] = nlohmann::json::array();
        for (const auto& g : c.by_year) jc["by_year"].push_back(group_json(g));
        jc["by_cluster"] = nlohmann::json::array();
        for (const auto& g : c.by_cluster) jc["by_cluster"].push_back(group_json(g));
        jc["by_access"] = nlohmann::json::array();
        for (const auto& g : c.by_access) jc["by_access"].push_back(group_json(g));
        jc["eligible"] = c.eligible;
        jc["excluded_no_citations"] = c.excluded_no_citations;
        jc["unclusterable"] = c.unclusterable;
        jc["citation_shift"] = c.citation_shift;
        doc["correlation"] = std::move(jc);
    }

    doc["exclusions"] = nlohmann::json::array();
    for (const auto& e : summary.exclusions)
        doc["exclusions"].push_back({{"paper_id", e.paper_id}, {"reason", e.reason}});
    return doc;
}

} // namespace downcite
