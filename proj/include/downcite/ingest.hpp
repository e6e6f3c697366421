#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "downcite/csv.hpp"
#include "downcite/records.hpp"
#include "downcite/schemas.hpp"

namespace downcite {

struct IngestConfig {
    char delimiter = ',';
    /// Lenient mode skips malformed rows (collected in Corpus warnings is
    /// not kept; the loader reports them via the returned report) instead
    /// of failing the whole load. Structural duplicates stay hard errors.
    bool lenient = false;
    /// Explicit end of the observation period. When unset the maximum
    /// calendar month present in the file is used. Histories are
    /// zero-filled up to this month so same-vintage papers are comparable.
    std::optional<YearMonth> observation_end;
};

/// Rows skipped in lenient mode, one message each.
struct IngestReport {
    std::vector<std::string> skipped_rows;
};

namespace detail {

struct PaperMeta {
    AccessClass access;
    YearMonth published;
    std::size_t first_line;
};

inline void check_header(const std::vector<std::string>& fields, const char* expected, char delim) {
    std::string joined;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) joined += delim;
        joined += fields[i];
    }
    std::string want = expected;
    if (delim != ',')
        for (auto& c : want)
            if (c == ',') c = delim;
    if (joined != want)
        throw InputError("line 1: expected header '" + want + "', got '" + joined + "'");
}

} // namespace detail

/// Parses the long-format downloads CSV into a Corpus. One row per
/// paper-month; missing months inside a history and trailing months up to
/// observation_end are zero-filled. Age 0 is the publication month.
inline Corpus load_downloads(std::istream& in, const IngestConfig& config = {},
                             IngestReport* report = nullptr) {
    CsvReader reader(in, config.delimiter);
    std::vector<std::string> fields;
    if (!reader.next(fields)) throw InputError("empty downloads file");
    detail::check_header(fields, schema::downloads, config.delimiter);

    std::map<std::string, detail::PaperMeta> meta;
    // (paper_id, month index) -> count; map keeps assembly order-independent
    std::map<std::pair<std::string, int>, std::int64_t> cells;
    int max_month = 0;
    bool any_row = false;

    while (reader.next(fields)) {
        const std::size_t line = reader.line_number();
        if (fields.size() == 1 && fields[0].empty()) continue; // blank line
        try {
            if (fields.size() != 7)
                throw InputError("line " + std::to_string(line) + ": expected 7 fields, got " +
                                 std::to_string(fields.size()));
            const std::string& id = fields[0];
            if (id.empty()) throw InputError("line " + std::to_string(line) + ": empty paper_id");
            AccessClass access;
            try {
                access = parse_access_token(fields[1]);
            } catch (const InputError&) {
                throw InputError("line " + std::to_string(line) + ": unknown access class '" +
                                 fields[1] + "'");
            }
            const YearMonth pub{
                static_cast<int>(parse_count(fields[2], line, "pub_year")),
                static_cast<int>(parse_count(fields[3], line, "pub_month")),
            };
            if (!valid(pub))
                throw InputError("line " + std::to_string(line) + ": pub_month out of range");
            const YearMonth when{
                static_cast<int>(parse_count(fields[4], line, "year")),
                static_cast<int>(parse_count(fields[5], line, "month")),
            };
            if (!valid(when))
                throw InputError("line " + std::to_string(line) + ": month out of range");
            const std::int64_t count = parse_nonnegative(fields[6], line, "downloads count");
            if (month_index(when) < month_index(pub))
                throw InputError("line " + std::to_string(line) + ": download month " +
                                 to_string(when) + " precedes publication " + to_string(pub));

            auto [it, inserted] = meta.emplace(id, detail::PaperMeta{access, pub, line});
            if (!inserted && (it->second.access != access || it->second.published != pub))
                throw InputError("line " + std::to_string(line) + ": paper '" + id +
                                 "' metadata conflicts with line " +
                                 std::to_string(it->second.first_line));

            const auto key = std::make_pair(id, month_index(when));
            if (!cells.emplace(key, count).second)
                throw InputError("line " + std::to_string(line) + ": duplicate row for paper '" +
                                 id + "' month " + to_string(when));
            max_month = std::max(max_month, month_index(when));
            any_row = true;
        } catch (const InputError& e) {
            if (!config.lenient) throw;
            if (report) report->skipped_rows.push_back(e.what());
        }
    }
    if (!any_row) throw InputError("downloads file contains no data rows");

    Corpus corpus;
    corpus.observation_end =
        config.observation_end ? *config.observation_end : from_month_index(max_month);
    const int end_index = month_index(corpus.observation_end);
    if (max_month > end_index)
        throw InputError("rows extend past observation_end " + to_string(corpus.observation_end));

    for (const auto& [id, m] : meta) {
        const int pub_index = month_index(m.published);
        if (pub_index > end_index)
            throw InputError("paper '" + id + "': publication " + to_string(m.published) +
                             " is after observation_end " + to_string(corpus.observation_end));
        PaperRecord paper;
        paper.paper_id = id;
        paper.access = m.access;
        paper.published = m.published;
        paper.monthly_downloads.assign(static_cast<std::size_t>(end_index - pub_index + 1), 0);
        for (auto it = cells.lower_bound({id, pub_index});
             it != cells.end() && it->first.first == id; ++it)
            paper.monthly_downloads[static_cast<std::size_t>(it->first.second - pub_index)] =
                it->second;
        corpus.papers.push_back(std::move(paper));
    }
    return corpus; // std::map iteration already sorted papers by id
}

inline Corpus load_downloads(const std::filesystem::path& path, const IngestConfig& config = {},
                             IngestReport* report = nullptr) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open downloads file: " + path.string());
    return load_downloads(in, config, report);
}

/// Parses the annual citations CSV into `corpus`. Papers present in the
/// downloads but absent here stay in the corpus; papers_without_citations()
/// lists them and the correlation stage excludes them.
inline void load_citations(std::istream& in, Corpus& corpus, const IngestConfig& config = {},
                           IngestReport* report = nullptr) {
    CsvReader reader(in, config.delimiter);
    std::vector<std::string> fields;
    if (!reader.next(fields)) throw InputError("empty citations file");
    detail::check_header(fields, schema::citations, config.delimiter);

    while (reader.next(fields)) {
        const std::size_t line = reader.line_number();
        if (fields.size() == 1 && fields[0].empty()) continue;
        try {
            if (fields.size() != 3)
                throw InputError("line " + std::to_string(line) + ": expected 3 fields, got " +
                                 std::to_string(fields.size()));
            const std::string& id = fields[0];
            if (id.empty()) throw InputError("line " + std::to_string(line) + ": empty paper_id");
            const int year = static_cast<int>(parse_count(fields[1], line, "year"));
            const std::int64_t count = parse_nonnegative(fields[2], line, "citations count");
            auto& record = corpus.citations[id];
            record.paper_id = id;
            if (!record.annual_citations.emplace(year, count).second)
                throw InputError("line " + std::to_string(line) + ": duplicate citation row for paper '" +
                                 id + "' year " + std::to_string(year));
        } catch (const InputError& e) {
            if (!config.lenient) throw;
            if (report) report->skipped_rows.push_back(e.what());
        }
    }
}

inline void load_citations(const std::filesystem::path& path, Corpus& corpus,
                           const IngestConfig& config = {}, IngestReport* report = nullptr) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open citations file: " + path.string());
    load_citations(in, corpus, config, report);
}

/// Standalone citations load; observation_end is December of the last
/// citation year (citations are annual).
inline Corpus load_citations(std::istream& in, const IngestConfig& config = {}) {
    Corpus corpus;
    load_citations(in, corpus, config);
    int last_year = 0;
    for (const auto& [id, rec] : corpus.citations)
        for (const auto& [year, n] : rec.annual_citations) last_year = std::max(last_year, year);
    corpus.observation_end = {last_year, 12};
    return corpus;
}

/// Emits every month from age 0 through observation_end, zeros included,
/// so a reload reproduces the corpus exactly.
inline void write_downloads_csv(std::ostream& out, const Corpus& corpus) {
    out << schema::downloads << '\n';
    for (const auto& p : corpus.papers) {
        const int pub_index = month_index(p.published);
        for (std::size_t age = 0; age < p.monthly_downloads.size(); ++age) {
            const YearMonth when = from_month_index(pub_index + static_cast<int>(age));
            out << p.paper_id << ',' << access_token(p.access) << ',' << p.published.year << ','
                << p.published.month << ',' << when.year << ',' << when.month << ','
                << p.monthly_downloads[age] << '\n';
        }
    }
}

inline void write_citations_csv(std::ostream& out, const Corpus& corpus) {
    out << schema::citations << '\n';
    for (const auto& [id, rec] : corpus.citations)
        for (const auto& [year, count] : rec.annual_citations)
            out << id << ',' << year << ',' << count << '\n';
}

} // namespace downcite
