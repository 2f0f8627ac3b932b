#include "dsaudit/vader.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <vector>

namespace dsaudit {

namespace {

constexpr double kCapsIncrement = 0.733;   // ALL-CAPS emphasis
constexpr double kNegationScalar = -0.74;  // flip-and-dampen for negated terms
constexpr double kNormAlpha = 15.0;        // compound normalization constant

constexpr std::string_view kPunctuation = "!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~";

bool is_ascii_upper_token(std::string_view token) {
    bool has_alpha = false;
    for (unsigned char c : token) {
        if (std::isalpha(c)) {
            has_alpha = true;
            if (std::islower(c)) return false;
        }
    }
    return has_alpha;
}

std::string strip_punct_if_word(std::string_view token) {
    std::size_t begin = 0, end = token.size();
    while (begin < end && kPunctuation.find(token[begin]) != std::string_view::npos)
        ++begin;
    while (end > begin && kPunctuation.find(token[end - 1]) != std::string_view::npos)
        --end;
    std::string_view stripped = token.substr(begin, end - begin);
    if (stripped.size() <= 2) return std::string(token);
    return std::string(stripped);
}

struct Tokens {
    std::vector<std::string> words;  // original casing, punctuation stripped
    std::vector<std::string> lower;
    bool cap_differential = false;   // some but not all tokens are ALL-CAPS
};

Tokens split_tokens(std::string_view text) {
    Tokens tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i > start) tokens.words.push_back(strip_punct_if_word(text.substr(start, i - start)));
    }
    tokens.lower.reserve(tokens.words.size());
    std::size_t upper = 0;
    for (const auto& w : tokens.words) {
        tokens.lower.push_back(ascii_lower(w));
        if (is_ascii_upper_token(w)) ++upper;
    }
    tokens.cap_differential = upper > 0 && upper < tokens.words.size();
    return tokens;
}

bool negated(const std::string& word, const SentimentLexicon& lex) {
    if (lex.negations.contains(word)) return true;
    return word.find("n't") != std::string::npos;
}

double scalar_inc_dec(const std::string& word, const std::string& word_lower,
                      double valence, bool cap_diff, const SentimentLexicon& lex) {
    auto it = lex.boosters.find(word_lower);
    if (it == lex.boosters.end()) return 0.0;
    double scalar = it->second;
    if (valence < 0) scalar = -scalar;
    if (is_ascii_upper_token(word) && cap_diff)
        scalar += (valence > 0) ? kCapsIncrement : -kCapsIncrement;
    return scalar;
}

double negation_check(double valence, const Tokens& t, int start_i, std::size_t i,
                      const SentimentLexicon& lex) {
    const auto& w = t.lower;
    if (start_i == 0) {
        if (negated(w[i - 1], lex)) valence *= kNegationScalar;
    } else if (start_i == 1) {
        if (w[i - 2] == "never" && (w[i - 1] == "so" || w[i - 1] == "this")) {
            valence *= 1.25;
        } else if (w[i - 2] == "without" && w[i - 1] == "doubt") {
            // no change
        } else if (negated(w[i - 2], lex)) {
            valence *= kNegationScalar;
        }
    } else if (start_i == 2) {
        // Mirrors the reference operator precedence: the trailing so/this test
        // applies on its own, not only after "never".
        if ((w[i - 3] == "never" && (w[i - 2] == "so" || w[i - 2] == "this")) ||
            (w[i - 1] == "so" || w[i - 1] == "this")) {
            valence *= 1.25;
        } else if (w[i - 3] == "without" && (w[i - 2] == "doubt" || w[i - 1] == "doubt")) {
            // no change
        } else if (negated(w[i - 3], lex)) {
            valence *= kNegationScalar;
        }
    }
    return valence;
}

double special_idioms_check(double valence, const Tokens& t, std::size_t i,
                            const SentimentLexicon& lex) {
    const auto& w = t.lower;
    auto join2 = [&](std::size_t a, std::size_t b) { return w[a] + " " + w[b]; };
    auto join3 = [&](std::size_t a, std::size_t b, std::size_t c) {
        return w[a] + " " + w[b] + " " + w[c];
    };

    const std::string onezero = join2(i - 1, i);
    const std::string twoonezero = join3(i - 2, i - 1, i);
    const std::string twoone = join2(i - 2, i - 1);
    const std::string threetwoone = join3(i - 3, i - 2, i - 1);
    const std::string threetwo = join2(i - 3, i - 2);

    for (const std::string* seq : {&onezero, &twoonezero, &twoone, &threetwoone, &threetwo}) {
        auto it = lex.idioms.find(*seq);
        if (it != lex.idioms.end()) {
            valence = it->second;
            break;
        }
    }
    if (w.size() - 1 > i) {
        auto it = lex.idioms.find(join2(i, i + 1));
        if (it != lex.idioms.end()) valence = it->second;
    }
    if (w.size() - 1 > i + 1) {
        auto it = lex.idioms.find(join3(i, i + 1, i + 2));
        if (it != lex.idioms.end()) valence = it->second;
    }
    for (const std::string* gram : {&threetwoone, &threetwo, &twoone}) {
        auto it = lex.boosters.find(*gram);
        if (it != lex.boosters.end()) valence += it->second;
    }
    return valence;
}

double least_check(double valence, const Tokens& t, std::size_t i,
                   const SentimentLexicon& lex) {
    const auto& w = t.lower;
    if (i > 1 && !lex.valence.contains(w[i - 1]) && w[i - 1] == "least") {
        if (w[i - 2] != "at" && w[i - 2] != "very") valence *= kNegationScalar;
    } else if (i > 0 && !lex.valence.contains(w[i - 1]) && w[i - 1] == "least") {
        valence *= kNegationScalar;
    }
    return valence;
}

double sentiment_valence(const Tokens& t, std::size_t i, const SentimentLexicon& lex) {
    const std::string& lower = t.lower[i];
    auto lexit = lex.valence.find(lower);
    if (lexit == lex.valence.end()) return 0.0;
    double valence = lexit->second;

    // "no" as a modifier of the following lexicon word scores zero itself.
    if (lower == "no" && i != t.lower.size() - 1 && lex.valence.contains(t.lower[i + 1]))
        valence = 0.0;
    if ((i > 0 && t.lower[i - 1] == "no") || (i > 1 && t.lower[i - 2] == "no") ||
        (i > 2 && t.lower[i - 3] == "no" &&
         (t.lower[i - 1] == "or" || t.lower[i - 1] == "nor")))
        valence = lexit->second * kNegationScalar;

    if (is_ascii_upper_token(t.words[i]) && t.cap_differential)
        valence += (valence > 0) ? kCapsIncrement : -kCapsIncrement;

    for (int start_i = 0; start_i < 3; ++start_i) {
        if (i > static_cast<std::size_t>(start_i) &&
            !lex.valence.contains(t.lower[i - (start_i + 1)])) {
            double s = scalar_inc_dec(t.words[i - (start_i + 1)],
                                      t.lower[i - (start_i + 1)], valence,
                                      t.cap_differential, lex);
            if (start_i == 1 && s != 0) s *= 0.95;
            if (start_i == 2 && s != 0) s *= 0.9;
            valence += s;
            valence = negation_check(valence, t, start_i, i, lex);
            if (start_i == 2) valence = special_idioms_check(valence, t, i, lex);
        }
    }
    return least_check(valence, t, i, lex);
}

double punctuation_emphasis(std::string_view text) {
    long ep = std::count(text.begin(), text.end(), '!');
    if (ep > 4) ep = 4;
    double amp = static_cast<double>(ep) * 0.292;
    long qm = std::count(text.begin(), text.end(), '?');
    if (qm > 1) amp += (qm <= 3) ? static_cast<double>(qm) * 0.18 : 0.96;
    return amp;
}

}  // namespace

double vader_compound(std::string_view text, const SentimentLexicon& lexicon) {
    Tokens tokens = split_tokens(text);
    std::vector<double> sentiments;
    sentiments.reserve(tokens.words.size());
    for (std::size_t i = 0; i < tokens.words.size(); ++i) {
        if (lexicon.boosters.contains(tokens.lower[i])) {
            sentiments.push_back(0.0);
            continue;
        }
        if (i < tokens.words.size() - 1 && tokens.lower[i] == "kind" &&
            tokens.lower[i + 1] == "of") {
            sentiments.push_back(0.0);
            continue;
        }
        sentiments.push_back(sentiment_valence(tokens, i, lexicon));
    }

    // "but" shifts weight to the clause after it.
    auto but = std::find(tokens.lower.begin(), tokens.lower.end(), "but");
    if (but != tokens.lower.end()) {
        std::size_t bi = static_cast<std::size_t>(but - tokens.lower.begin());
        for (std::size_t si = 0; si < sentiments.size(); ++si) {
            if (si < bi)
                sentiments[si] *= 0.5;
            else if (si > bi)
                sentiments[si] *= 1.5;
        }
    }

    if (sentiments.empty()) return 0.0;
    double sum = 0.0;
    for (double s : sentiments) sum += s;
    double punct = punctuation_emphasis(text);
    if (sum > 0)
        sum += punct;
    else if (sum < 0)
        sum -= punct;
    double compound = sum / std::sqrt(sum * sum + kNormAlpha);
    return std::clamp(compound, -1.0, 1.0);
}

SentimentLexicon SentimentLexicon::load(const std::string& lexicon_path,
                                        const std::string& booster_path,
                                        const std::string& negation_path,
                                        const std::string& idiom_path) {
    SentimentLexicon lex;
    for (const auto& line : read_lines(lexicon_path)) {
        if (line.empty()) continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw DataError("lexicon line without tab: " + line);
        auto tab2 = line.find('\t', tab + 1);
        std::string value = line.substr(tab + 1, tab2 == std::string::npos
                                                      ? std::string::npos
                                                      : tab2 - tab - 1);
        double v = std::strtod(value.c_str(), nullptr);
        if (!std::isfinite(v)) throw DataError("non-finite lexicon valence: " + line);
        lex.valence.emplace(line.substr(0, tab), v);
    }
    for (const auto& line : read_lines(booster_path)) {
        if (line.empty() || line[0] == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw DataError("booster line without tab: " + line);
        lex.boosters.emplace(line.substr(0, tab),
                             std::strtod(line.c_str() + tab + 1, nullptr));
    }
    for (const auto& line : read_lines(negation_path)) {
        if (line.empty() || line[0] == '#') continue;
        lex.negations.insert(line);
    }
    for (const auto& line : read_lines(idiom_path)) {
        if (line.empty() || line[0] == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw DataError("idiom line without tab: " + line);
        lex.idioms.emplace(line.substr(0, tab),
                           std::strtod(line.c_str() + tab + 1, nullptr));
    }
    return lex;
}

}  // namespace dsaudit
