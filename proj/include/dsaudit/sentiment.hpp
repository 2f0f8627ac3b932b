#pragma once

#include <string>
#include <vector>

#include "dsaudit/corpus.hpp"
#include "dsaudit/stats.hpp"
#include "dsaudit/vader.hpp"

namespace dsaudit {

/// Compound score per image alt-text, aligned with corpus.images.
std::vector<double> score_captions(const CorpusView& corpus,
                                   const SentimentLexicon& lexicon, int threads = 1);

void write_score_cache(const std::string& path, const CorpusView& corpus,
                       const std::vector<double>& scores);
std::vector<double> read_score_cache(const std::string& path, const CorpusView& corpus);

struct GroupSentimentEntry {
    std::string group;
    double negative_ratio = 0.0;  // over non-neutral captions
    double mean_compound = 0.0;
    std::int64_t counted = 0;     // non-neutral captions
    bool defined = false;
};

/// Groups are image-level labels; mixed/unclear images are excluded, as are
/// captions whose compound score is exactly zero.
std::vector<GroupSentimentEntry> group_sentiment(const CorpusView& corpus,
                                                 const std::vector<double>& scores,
                                                 Attribute attr);

enum class HateType { Hateful, Targeted, Aggressive };

struct HateScores {
    std::vector<std::string> ids;
    std::vector<std::array<double, 3>> scores;  // hateful, targeted, aggressive

    static HateScores load(const std::string& path);  // JSONL
};

/// Percentage of items whose score strictly exceeds tau.
double hcr(const HateScores& scores, HateType type, double tau);

}  // namespace dsaudit
