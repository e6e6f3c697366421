#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "downcite/calendar.hpp"

namespace downcite {

/// Error caused by invalid user input (files, flags, degenerate requests).
/// Everything else escaping the library is treated as an internal fault.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class AccessClass { OpenAccess, NonOpenAccess };

enum class AccessFilter { All, OpenAccessOnly, NonOpenAccessOnly };

inline bool matches(AccessFilter f, AccessClass c) {
    switch (f) {
    case AccessFilter::All: return true;
    case AccessFilter::OpenAccessOnly: return c == AccessClass::OpenAccess;
    case AccessFilter::NonOpenAccessOnly: return c == AccessClass::NonOpenAccess;
    }
    return false;
}

inline const char* access_token(AccessClass c) {
    return c == AccessClass::OpenAccess ? "OA" : "NON_OA";
}

inline AccessClass parse_access_token(const std::string& s) {
    if (s == "OA") return AccessClass::OpenAccess;
    if (s == "NON_OA") return AccessClass::NonOpenAccess;
    throw InputError("unknown access class '" + s + "' (expected OA or NON_OA)");
}

/// One paper's identity plus its monthly download history.
/// monthly_downloads[i] is the count for age i months; age 0 is the
/// publication month.
struct PaperRecord {
    std::string paper_id;
    AccessClass access = AccessClass::NonOpenAccess;
    YearMonth published;
    std::vector<std::int64_t> monthly_downloads;

    int age_span_months() const { return static_cast<int>(monthly_downloads.size()); }

    std::int64_t total_downloads() const {
        std::int64_t total = 0;
        for (auto v : monthly_downloads) total += v;
        return total;
    }

    friend bool operator==(const PaperRecord&, const PaperRecord&) = default;
};

/// Annual citation counts for one paper keyed by calendar year.
struct CitationRecord {
    std::string paper_id;
    std::map<int, std::int64_t> annual_citations;

    friend bool operator==(const CitationRecord&, const CitationRecord&) = default;
};

/// Immutable after ingest; analyses only read it.
struct Corpus {
    std::vector<PaperRecord> papers; // sorted by paper_id, ids unique
    std::map<std::string, CitationRecord> citations;
    YearMonth observation_end;

    const PaperRecord* find_paper(const std::string& id) const {
        auto it = std::lower_bound(papers.begin(), papers.end(), id,
                                   [](const PaperRecord& p, const std::string& key) { return p.paper_id < key; });
        if (it != papers.end() && it->paper_id == id) return &*it;
        return nullptr;
    }

    friend bool operator==(const Corpus&, const Corpus&) = default;
};

inline Corpus filter_corpus(const Corpus& corpus, AccessFilter filter) {
    if (filter == AccessFilter::All) return corpus;
    Corpus out;
    out.observation_end = corpus.observation_end;
    for (const auto& p : corpus.papers)
        if (matches(filter, p.access)) out.papers.push_back(p);
    for (const auto& p : out.papers) {
        auto it = corpus.citations.find(p.paper_id);
        if (it != corpus.citations.end()) out.citations.insert(*it);
    }
    return out;
}

/// A paper left out of some analysis, with the reason it was left out.
/// Each analysis keeps at most one entry per paper.
struct Exclusion {
    std::string paper_id;
    std::string reason;

    friend bool operator==(const Exclusion&, const Exclusion&) = default;
};

/// Papers present in the download data but absent from the citation data.
/// Mirrors records that cannot be matched in the citation source.
inline std::vector<std::string> papers_without_citations(const Corpus& corpus) {
    std::vector<std::string> ids;
    for (const auto& p : corpus.papers)
        if (!corpus.citations.count(p.paper_id)) ids.push_back(p.paper_id);
    return ids;
}

} // namespace downcite
