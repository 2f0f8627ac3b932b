#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include "dsaudit/common.hpp"

namespace dsaudit {

struct SentimentLexicon {
    std::unordered_map<std::string, double> valence;   // token -> mean valence
    std::unordered_map<std::string, double> boosters;  // token/phrase -> increment
    std::unordered_set<std::string> negations;
    std::unordered_map<std::string, double> idioms;    // special-case phrases

    // Lexicon: "token<TAB>valence<TAB>std<TAB>ratings", only columns 1-2 read.
    // Boosters/idioms: "phrase<TAB>value". Negations: one token per line.
    static SentimentLexicon load(const std::string& lexicon_path,
                                 const std::string& booster_path,
                                 const std::string& negation_path,
                                 const std::string& idiom_path);
};

/// Rule-based compound sentiment in [-1, 1]; empty or lexicon-free text -> 0.
double vader_compound(std::string_view text, const SentimentLexicon& lexicon);

}  // namespace dsaudit
