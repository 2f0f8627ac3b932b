#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "dsaudit/common.hpp"

namespace dsaudit {

struct LemmaDictionary {
    std::unordered_map<std::string, std::string> lemmas;  // surface -> lemma
    std::unordered_set<std::string> stopwords;

    // TSV "surface<TAB>lemma"; stopwords one token per line, "#" comments allowed.
    static LemmaDictionary load(const std::string& lemma_tsv_path,
                                const std::string& stopword_path);
};

/// Lowercase, split on whitespace/punctuation, map through the lemma
/// dictionary, drop stopwords. Unknown tokens pass through lowercased.
std::vector<std::string> normalize(std::string_view text, const LemmaDictionary& dict);

/// Raw tokenization only (lowercased word tokens, no lemma/stopword step).
std::vector<std::string> tokenize(std::string_view text);

struct InvertedIndex {
    std::vector<std::string> doc_ids;                               // row -> external id
    std::unordered_map<std::string, std::vector<std::uint32_t>> postings;
    std::vector<std::uint32_t> doc_lemma_counts;                    // multiset size per doc

    std::uint32_t doc_count() const { return static_cast<std::uint32_t>(doc_ids.size()); }

    void save(const std::string& path) const;
    static InvertedIndex load(const std::string& path);
};

InvertedIndex build_index(const std::vector<std::pair<std::string, std::string>>& docs,
                          const LemmaDictionary& dict, int threads = 1);

struct KeywordQuery {
    std::string phrase;
    std::vector<std::string> lemma_bag;  // deduplicated, nonempty
};

/// Throws ValidationError if the phrase normalizes to nothing.
KeywordQuery make_query(std::string_view phrase, const LemmaDictionary& dict);

/// All-lemmas-must-match (bag-of-words AND); returns sorted doc rows.
std::vector<std::uint32_t> query(const InvertedIndex& index, const KeywordQuery& q);

/// Brute-force scan with the same normalizer; test oracle for query().
std::vector<std::uint32_t> query_scan(
    const std::vector<std::pair<std::string, std::string>>& docs,
    const LemmaDictionary& dict, const KeywordQuery& q);

}  // namespace dsaudit
