#pragma once

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "downcite/classify.hpp"
#include "downcite/correlate.hpp"
#include "downcite/csv.hpp"
#include "downcite/model.hpp"
#include "downcite/profiles.hpp"
#include "downcite/records.hpp"
#include "downcite/report.hpp"
#include "downcite/schemas.hpp"
#include "downcite/synth.hpp"

namespace downcite {

inline const char* filter_token(AccessFilter f) {
    switch (f) {
        case AccessFilter::All: return "ALL";
        case AccessFilter::OpenAccessOnly: return "OA";
        case AccessFilter::NonOpenAccessOnly: return "NON_OA";
    }
    return "";
}

inline void write_curves_csv(std::ostream& out, const std::vector<CumulativeCurve>& curves) {
    out << schema::curves << '\n';
    for (const auto& curve : curves)
        for (std::size_t t = 0; t < curve.values.size(); ++t)
            out << curve.paper_id << ',' << t << ',' << curve.values[t] << '\n';
}

inline void write_cohort_profile_csv(std::ostream& out, const CohortProfile& profile) {
    out << schema::cohort_profile << '\n';
    for (std::size_t t = 0; t < profile.median.size(); ++t)
        out << filter_token(profile.cohort) << ',' << t << ',' << fmt_double(profile.median[t])
            << ',' << fmt_double(profile.p25[t]) << ',' << profile.support[t] << '\n';
}

inline void write_synchronous_csv(std::ostream& out, const SynchronousDistribution& dist) {
    out << schema::synchronous << '\n';
    for (std::size_t age = 0; age < dist.share.size(); ++age)
        out << age << ',' << fmt_double(dist.share[age]) << '\n';
}

inline void write_labels_csv(std::ostream& out, const std::vector<PaperLabels>& labels) {
    out << schema::labels << '\n';
    for (const auto& l : labels) {
        out << l.paper_id << ',' << access_token(l.access) << ',' << to_token(l.burstiness) << ',';
        if (l.attractiveness) out << to_token(*l.attractiveness);
        out << ',';
        if (l.ageing) out << to_token(*l.ageing);
        out << ',' << fmt_double(l.rmsd) << ',';
        if (l.half_life_months) out << *l.half_life_months;
        out << ',';
        if (l.delta_ratio) out << fmt_double(*l.delta_ratio);
        out << '\n';
    }
}

/// The thresholds ride along as a comment so a summary file is
/// self-describing; schema-check skips '#' lines.
inline void write_classify_summary_csv(std::ostream& out, const ClassificationResult& result) {
    const auto& c = result.config;
    out << "# thresholds: rmsd_non_oa=" << fmt_double(c.rmsd_critical_non_oa)
        << " rmsd_oa=" << fmt_double(c.rmsd_critical_oa)
        << " burst_ratio=" << fmt_double(c.burst_ratio_threshold)
        << " sleeping_beauty_month=" << c.sleeping_beauty_min_month << '\n';
    out << schema::classify_summary << '\n';
    for (const auto& block : classification_blocks(result))
        for (const auto& axis : block.axes)
            for (const auto& row : axis.rows)
                out << access_token(block.access) << ',' << axis.axis << ',' << row.category << ','
                    << row.count << ',' << fmt_double(row.pct) << '\n';
}

inline void write_fit_report_csv(std::ostream& out, const FitReport& report) {
    out << schema::fit_report << '\n';
    for (const auto& row : report.rows)
        out << fmt_double(row.age) << ',' << fmt_double(row.observed_rho) << ','
            << fmt_double(row.fitted_rho) << ',' << fmt_double(row.residual) << '\n';
}

inline void write_membership_csv(std::ostream& out, const std::vector<ClusterMembership>& rows) {
    out << schema::cluster_membership << '\n';
    for (const auto& m : rows)
        out << m.paper_id << ',' << m.pub_year << ',' << fmt_double(m.delta_degrees) << ','
            << cluster_token(m.cluster) << ',' << m.final_downloads << ',' << m.final_citations
            << '\n';
}

inline void write_exclusions_csv(std::ostream& out, const std::vector<Exclusion>& rows) {
    out << schema::exclusions << '\n';
    for (const auto& e : rows) out << e.paper_id << ',' << e.reason << '\n';
}

/// Fit parameters at full precision; the run summary rounds its own copy.
inline nlohmann::json fit_params_json(const std::vector<FitSummary>& fits) {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& fit : fits) {
        doc.push_back({{"access", access_token(fit.access)},
                       {"rho0", fit.params.rho0},
                       {"weight_a", fit.params.weight_a},
                       {"decay_fast", fit.params.decay_fast},
                       {"decay_slow", fit.params.decay_slow},
                       {"residual_ss", fit.params.residual_ss},
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
    return doc;
}

inline nlohmann::json correlation_json(const CorrelationReport& report) {
    const auto group = [](const GroupStat& g) {
        nlohmann::json j;
        j["n"] = g.n;
        if (g.pcc)
            j["pcc"] = *g.pcc;
        else
            j["pcc"] = nullptr;
        return j;
    };
    nlohmann::json doc;
    doc["overall"] = group(report.overall);
    doc["by_pub_year"] = nlohmann::json::object();
    for (const auto& [year, stat] : report.by_pub_year)
        doc["by_pub_year"][std::to_string(year)] = group(stat);
    doc["by_cluster"] = nlohmann::json::object();
    for (const auto& [cluster, stat] : report.by_cluster)
        doc["by_cluster"][cluster_token(cluster)] = group(stat);
    doc["by_access"] = nlohmann::json::object();
    for (const auto& [access, stat] : report.by_access)
        doc["by_access"][access_token(access)] = group(stat);
    doc["eligible_trajectories"] = report.eligible_trajectories;
    doc["excluded_no_citations"] = report.excluded_no_citations;
    doc["unclusterable"] = report.unclusterable;
    doc["citation_shift"] = report.citation_shift;
    return doc;
}

inline nlohmann::json ground_truth_json(const GroundTruth& truth) {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& p : truth.papers) {
        nlohmann::json j;
        j["paper_id"] = p.paper_id;
        j["access"] = access_token(p.access);
        j["published"] = to_string(p.published);
        j["params"] = {{"rho0", p.params.rho0},
                       {"weight_a", p.params.weight_a},
                       {"decay_fast", p.params.decay_fast},
                       {"decay_slow", p.params.decay_slow}};
        j["bursty"] = p.bursty;
        if (p.burst_month)
            j["burst_month"] = *p.burst_month;
        else
            j["burst_month"] = nullptr;
        if (p.cluster_intent)
            j["cluster_intent"] = cluster_token(*p.cluster_intent);
        else
            j["cluster_intent"] = nullptr;
        doc.push_back(std::move(j));
    }
    return doc;
}

namespace detail {

inline Burstiness parse_burstiness(const std::string& s, std::size_t line) {
    for (auto b : {Burstiness::NonBursty, Burstiness::BurstyEarly, Burstiness::SleepingBeauty})
        if (s == to_token(b)) return b;
    throw InputError("line " + std::to_string(line) + ": unknown burstiness '" + s + "'");
}

inline Attractiveness parse_attractiveness(const std::string& s, std::size_t line) {
    for (auto a : {Attractiveness::Typical, Attractiveness::MoreAttractive,
                   Attractiveness::LessAttractive, Attractiveness::Crossing})
        if (s == to_token(a)) return a;
    throw InputError("line " + std::to_string(line) + ": unknown attractiveness '" + s + "'");
}

inline Ageing parse_ageing(const std::string& s, std::size_t line) {
    for (auto a : {Ageing::Usual, Ageing::FlashInPan, Ageing::Delayed})
        if (s == to_token(a)) return a;
    throw InputError("line " + std::to_string(line) + ": unknown ageing '" + s + "'");
}

inline double parse_double(const std::string& s, std::size_t line, const char* column) {
    double value = 0;
    const auto* begin = s.data();
    const auto* end = begin + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        throw InputError("line " + std::to_string(line) + ": malformed " + column + " '" + s +
                         "'");
    return value;
}

} // namespace detail

/// Inverse of write_labels_csv, for consumers of persisted label files.
inline std::vector<PaperLabels> read_labels_csv(std::istream& in) {
    CsvReader reader(in, ',');
    std::vector<std::string> fields;
    if (!reader.next(fields) || fields.size() != 8 ||
        fields != split_fields(schema::labels, ','))
        throw InputError("labels file: bad or missing header");

    std::vector<PaperLabels> labels;
    while (reader.next(fields)) {
        const std::size_t line = reader.line_number();
        if (fields.size() == 1 && fields[0].empty()) continue; // trailing newline
        if (fields.size() != 8)
            throw InputError("line " + std::to_string(line) + ": expected 8 fields, got " +
                             std::to_string(fields.size()));
        PaperLabels l;
        l.paper_id = fields[0];
        l.access = parse_access_token(fields[1]);
        l.burstiness = detail::parse_burstiness(fields[2], line);
        if (!fields[3].empty()) l.attractiveness = detail::parse_attractiveness(fields[3], line);
        if (!fields[4].empty()) l.ageing = detail::parse_ageing(fields[4], line);
        l.rmsd = detail::parse_double(fields[5], line, "rmsd");
        if (!fields[6].empty())
            l.half_life_months = static_cast<int>(parse_nonnegative(fields[6], line, "half_life"));
        if (!fields[7].empty())
            l.delta_ratio = detail::parse_double(fields[7], line, "delta_ratio");
        labels.push_back(std::move(l));
    }
    return labels;
}

// ---------------------------------------------------------------------------
// schema-check: structural validation of any artifact CSV

enum class ColumnKind { Text, Int, Float, MaybeText, MaybeInt, MaybeFloat };

struct SchemaSpec {
    const char* header;
    std::vector<ColumnKind> columns;
};

inline const std::map<std::string, SchemaSpec>& known_schemas() {
    using K = ColumnKind;
    static const std::map<std::string, SchemaSpec> schemas = {
        {"downloads",
         {schema::downloads, {K::Text, K::Text, K::Int, K::Int, K::Int, K::Int, K::Int}}},
        {"citations", {schema::citations, {K::Text, K::Int, K::Int}}},
        {"curves", {schema::curves, {K::Text, K::Int, K::Int}}},
        {"cohort_profile", {schema::cohort_profile, {K::Text, K::Int, K::Float, K::Float, K::Int}}},
        {"synchronous", {schema::synchronous, {K::Int, K::Float}}},
        {"labels",
         {schema::labels,
          {K::Text, K::Text, K::Text, K::MaybeText, K::MaybeText, K::Float, K::MaybeInt,
           K::MaybeFloat}}},
        {"classify_summary", {schema::classify_summary, {K::Text, K::Text, K::Text, K::Int, K::Float}}},
        {"fit_report", {schema::fit_report, {K::Float, K::Float, K::Float, K::Float}}},
        {"cluster_membership",
         {schema::cluster_membership, {K::Text, K::Int, K::Float, K::Text, K::Int, K::Int}}},
        {"exclusions", {schema::exclusions, {K::Text, K::Text}}},
    };
    return schemas;
}

struct SchemaCheckResult {
    std::string schema_name;
    std::size_t data_rows = 0;
};

/// Header plus per-cell structural validation against one named schema.
/// Leading '#' comment lines are permitted before the header.
inline SchemaCheckResult schema_check(std::istream& in, const std::string& schema_name) {
    const auto it = known_schemas().find(schema_name);
    if (it == known_schemas().end()) {
        std::string names;
        for (const auto& [name, spec] : known_schemas()) {
            if (!names.empty()) names += ", ";
            names += name;
        }
        throw InputError("unknown schema '" + schema_name + "' (known: " + names + ")");
    }
    const SchemaSpec& spec = it->second;

    CsvReader reader(in, ',');
    std::vector<std::string> fields;
    bool have_header = false;
    while (reader.next(fields)) {
        if (!fields.empty() && !fields[0].empty() && fields[0][0] == '#') continue;
        have_header = true;
        break;
    }
    if (!have_header || fields != split_fields(spec.header, ','))
        throw InputError("schema '" + schema_name + "': bad or missing header (expected '" +
                         spec.header + "')");

    SchemaCheckResult result;
    result.schema_name = schema_name;
    const auto header_fields = split_fields(spec.header, ',');
    while (reader.next(fields)) {
        const std::size_t line = reader.line_number();
        if (fields.size() == 1 && fields[0].empty()) continue;
        if (fields.size() != spec.columns.size())
            throw InputError("line " + std::to_string(line) + ": expected " +
                             std::to_string(spec.columns.size()) + " fields, got " +
                             std::to_string(fields.size()));
        for (std::size_t i = 0; i < fields.size(); ++i) {
            const std::string& cell = fields[i];
            const char* column = header_fields[i].c_str();
            switch (spec.columns[i]) {
                case ColumnKind::Text:
                    if (cell.empty())
                        throw InputError("line " + std::to_string(line) + ": empty " +
                                         std::string(column));
                    break;
                case ColumnKind::Int: parse_count(cell, line, column); break;
                case ColumnKind::Float: detail::parse_double(cell, line, column); break;
                case ColumnKind::MaybeText: break;
                case ColumnKind::MaybeInt:
                    if (!cell.empty()) parse_count(cell, line, column);
                    break;
                case ColumnKind::MaybeFloat:
                    if (!cell.empty()) detail::parse_double(cell, line, column);
                    break;
            }
        }
        ++result.data_rows;
    }
    return result;
}

// ---------------------------------------------------------------------------
// path conveniences

inline std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot open '" + path + "' for writing");
    return out;
}

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    return in;
}

inline void write_json_file(const std::string& path, const nlohmann::json& doc) {
    auto out = open_output(path);
    out << doc.dump(2) << '\n';
}

inline SchemaCheckResult schema_check_file(const std::string& path,
                                           const std::string& schema_name) {
    auto in = open_input(path);
    return schema_check(in, schema_name);
}

} // namespace downcite
