#include "dsaudit/sentiment.hpp"

#include <array>
#include <fstream>
#include <map>
#include <unordered_map>

#include <nlohmann/json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dsaudit {

using json = nlohmann::json;

std::vector<double> score_captions(const CorpusView& corpus,
                                   const SentimentLexicon& lexicon, int threads) {
    std::vector<double> scores(corpus.images.size(), 0.0);
    const std::int64_t n = static_cast<std::int64_t>(corpus.images.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(std::max(1, threads))
#endif
    for (std::int64_t i = 0; i < n; ++i)
        scores[i] = vader_compound(corpus.images[i].alt_text, lexicon);
    return scores;
}

void write_score_cache(const std::string& path, const CorpusView& corpus,
                       const std::vector<double>& scores) {
    if (scores.size() != corpus.images.size())
        throw ValidationError("score cache size mismatch");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write score cache: " + path);
    for (std::size_t i = 0; i < scores.size(); ++i) {
        json j{{"image_id", corpus.images[i].image_id}, {"compound", scores[i]}};
        out << j.dump() << '\n';
    }
}

std::vector<double> read_score_cache(const std::string& path, const CorpusView& corpus) {
    std::unordered_map<std::string, double> by_id;
    for (const auto& line : read_lines(path)) {
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw DataError("malformed score cache line: " + line);
        by_id[j.at("image_id").get<std::string>()] = j.at("compound").get<double>();
    }
    std::vector<double> scores;
    scores.reserve(corpus.images.size());
    for (const auto& img : corpus.images) {
        auto it = by_id.find(img.image_id);
        if (it == by_id.end())
            throw DataError("score cache missing image_id: " + img.image_id);
        scores.push_back(it->second);
    }
    return scores;
}

std::vector<GroupSentimentEntry> group_sentiment(const CorpusView& corpus,
                                                 const std::vector<double>& scores,
                                                 Attribute attr) {
    if (scores.size() != corpus.images.size())
        throw ValidationError("scores not aligned with corpus");

    struct Acc {
        std::int64_t negatives = 0, counted = 0;
        double sum = 0.0;
    };
    std::map<std::string, Acc> groups;
    for (std::size_t i = 0; i < corpus.images.size(); ++i) {
        const auto& img = corpus.images[i];
        std::string label;
        if (attr == Attribute::Gender) {
            if (img.image_gender != Gender::Male && img.image_gender != Gender::Female)
                continue;
            label = gender_name(img.image_gender);
        } else {
            if (img.image_race == Race::Unclear) continue;
            label = race_name(img.image_race);
        }
        double s = scores[i];
        if (s == 0.0) continue;  // neutral captions are discarded
        auto& acc = groups[label];
        acc.counted += 1;
        acc.sum += s;
        if (s < 0) acc.negatives += 1;
    }

    std::vector<GroupSentimentEntry> report;
    for (const auto& [label, acc] : groups) {
        GroupSentimentEntry entry;
        entry.group = label;
        entry.counted = acc.counted;
        if (acc.counted > 0) {
            entry.negative_ratio =
                static_cast<double>(acc.negatives) / static_cast<double>(acc.counted);
            entry.mean_compound = acc.sum / static_cast<double>(acc.counted);
            entry.defined = true;
        }
        report.push_back(std::move(entry));
    }
    return report;
}

HateScores HateScores::load(const std::string& path) {
    HateScores hs;
    for (const auto& line : read_lines(path)) {
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw DataError("malformed hate score line: " + line);
        std::array<double, 3> row{j.at("hateful").get<double>(),
                                  j.at("targeted").get<double>(),
                                  j.at("aggressive").get<double>()};
        for (double v : row)
            if (v < 0.0 || v > 1.0)
                throw DataError("hate score outside [0, 1]: " + line);
        hs.ids.push_back(j.at("image_id").get<std::string>());
        hs.scores.push_back(row);
    }
    return hs;
}

double hcr(const HateScores& scores, HateType type, double tau) {
    if (scores.scores.empty()) throw DataError("hcr: empty score set");
    const std::size_t column = static_cast<std::size_t>(type);
    std::int64_t over = 0;
    for (const auto& row : scores.scores)
        if (row[column] > tau) ++over;
    return 100.0 * static_cast<double>(over) / static_cast<double>(scores.scores.size());
}

}  // namespace dsaudit
