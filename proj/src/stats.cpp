#include "dsaudit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace dsaudit {

double Distribution::share(const std::string& category) const {
    if (total == 0) return 0.0;
    auto it = counts.find(category);
    if (it == counts.end()) return 0.0;
    return static_cast<double>(it->second) / static_cast<double>(total);
}

Distribution composition(const CorpusView& corpus, Attribute attr, Level level) {
    Distribution dist;
    if (corpus.images.empty()) throw DataError("composition: empty corpus");
    if (level == Level::Box) {
        for (const auto& box : corpus.boxes) {
            std::string key{attr == Attribute::Gender ? gender_name(box.gender)
                                                      : race_name(box.race)};
            dist.counts[key] += 1;
            dist.total += 1;
        }
    } else {
        for (const auto& img : corpus.images) {
            std::string key{attr == Attribute::Gender ? gender_name(img.image_gender)
                                                      : race_name(img.image_race)};
            dist.counts[key] += 1;
            dist.total += 1;
        }
    }
    return dist;
}

BoxStats box_stats(const CorpusView& corpus) {
    BoxStats stats;
    for (std::size_t i = 0; i < corpus.images.size(); ++i) {
        const auto& img = corpus.images[i];
        int n = static_cast<int>(corpus.boxes_of_image[i].size());
        stats.boxes_per_image[n] += 1;
        stats.max_boxes = std::max(stats.max_boxes, n);
        for (auto b : corpus.boxes_of_image[i]) {
            const auto& box = corpus.boxes[b];
            double ratio = static_cast<double>(box.w) * box.h /
                           (static_cast<double>(img.width) * img.height);
            int bin = std::min(9, static_cast<int>(ratio * 10.0));
            stats.area_ratio_bins[static_cast<std::size_t>(bin)] += 1;
        }
    }
    return stats;
}

KeywordSet KeywordSet::load(const std::string& path, const LemmaDictionary& dict) {
    KeywordSet set;
    set.name = path;
    for (const auto& line : read_lines(path)) {
        if (line.empty() || line[0] == '#') continue;
        set.queries.push_back(make_query(line, dict));
    }
    if (set.queries.empty()) throw DataError("empty keyword set: " + path);
    return set;
}

namespace {

// Maps index doc rows to corpus image rows; doc ids must resolve.
std::vector<std::size_t> doc_to_image(const CorpusView& corpus,
                                      const InvertedIndex& index) {
    std::vector<std::size_t> map(index.doc_count());
    for (std::uint32_t d = 0; d < index.doc_count(); ++d) {
        auto it = corpus.image_index.find(index.doc_ids[d]);
        if (it == corpus.image_index.end())
            throw DataError("index doc id not in corpus: " + index.doc_ids[d]);
        map[d] = it->second;
    }
    return map;
}

std::vector<std::string> support_labels(Attribute attr) {
    if (attr == Attribute::Gender) return {"female", "male"};
    std::vector<std::string> out;
    out.reserve(kNumCoreRaces);
    for (int r = 0; r < kNumCoreRaces; ++r)
        out.emplace_back(race_name(static_cast<Race>(r)));
    return out;
}

std::string image_label(const ImageRecord& img, Attribute attr) {
    return std::string(attr == Attribute::Gender ? gender_name(img.image_gender)
                                                 : race_name(img.image_race));
}

}  // namespace

std::vector<DeltaEntry> relative_change(const CorpusView& corpus,
                                        const InvertedIndex& index,
                                        const KeywordSet& keywords, Attribute attr,
                                        Level level) {
    auto d2i = doc_to_image(corpus, index);
    std::vector<bool> in_subset(corpus.images.size(), false);
    for (const auto& q : keywords.queries)
        for (auto d : query(index, q)) in_subset[d2i[d]] = true;

    const auto support = support_labels(attr);
    std::unordered_set<std::string> support_set(support.begin(), support.end());

    std::map<std::string, std::int64_t> base_counts, sub_counts;
    std::int64_t base_total = 0, sub_total = 0;

    auto tally = [&](const std::string& label, bool subset) {
        if (!support_set.contains(label)) return;
        base_counts[label] += 1;
        base_total += 1;
        if (subset) {
            sub_counts[label] += 1;
            sub_total += 1;
        }
    };

    if (level == Level::Image) {
        for (std::size_t i = 0; i < corpus.images.size(); ++i)
            tally(image_label(corpus.images[i], attr), in_subset[i]);
    } else {
        for (const auto& box : corpus.boxes) {
            std::string label{attr == Attribute::Gender ? gender_name(box.gender)
                                                        : race_name(box.race)};
            auto it = corpus.image_index.find(box.image_id);
            tally(label, in_subset[it->second]);
        }
    }

    std::vector<DeltaEntry> report;
    for (const auto& label : support) {
        DeltaEntry entry;
        entry.category = label;
        std::int64_t bc = base_counts.contains(label) ? base_counts[label] : 0;
        std::int64_t sc = sub_counts.contains(label) ? sub_counts[label] : 0;
        entry.subset_count = sc;
        if (base_total > 0)
            entry.baseline_share = static_cast<double>(bc) / base_total;
        if (sub_total > 0)
            entry.subset_share = static_cast<double>(sc) / sub_total;
        if (entry.baseline_share > 0 && sub_total > 0) {
            entry.delta = entry.subset_share / entry.baseline_share - 1.0;
            entry.defined = true;
        }
        report.push_back(std::move(entry));
    }
    return report;
}

CountrySet CountrySet::load(const std::string& path, const LemmaDictionary& dict) {
    CountrySet set;
    for (const auto& line : read_lines(path)) {
        if (line.empty() || line[0] == '#') continue;
        auto tab = line.find('\t');
        CountryEntry entry;
        entry.country = tab == std::string::npos ? line : line.substr(0, tab);
        entry.synonyms.push_back(make_query(entry.country, dict));
        if (tab != std::string::npos) {
            std::string rest = line.substr(tab + 1);
            std::size_t pos = 0;
            while (pos <= rest.size()) {
                auto bar = rest.find('|', pos);
                std::string syn = rest.substr(pos, bar == std::string::npos
                                                       ? std::string::npos
                                                       : bar - pos);
                if (!syn.empty()) entry.synonyms.push_back(make_query(syn, dict));
                if (bar == std::string::npos) break;
                pos = bar + 1;
            }
        }
        set.countries.push_back(std::move(entry));
    }
    if (set.countries.empty()) throw DataError("empty country set: " + path);
    return set;
}

std::vector<CountryMentions> country_mentions(const CorpusView& corpus,
                                              const InvertedIndex& index,
                                              const CountrySet& countries) {
    auto d2i = doc_to_image(corpus, index);
    std::vector<bool> has_person(corpus.images.size(), false);
    for (const auto& box : corpus.boxes) {
        if (box.gender == Gender::Male || box.gender == Gender::Female)
            has_person[corpus.image_index.at(box.image_id)] = true;
    }

    std::vector<CountryMentions> report;
    for (const auto& entry : countries.countries) {
        std::unordered_set<std::size_t> matched;
        for (const auto& q : entry.synonyms)
            for (auto d : query(index, q)) matched.insert(d2i[d]);
        CountryMentions m;
        m.country = entry.country;
        m.total_images = static_cast<std::int64_t>(matched.size());
        for (auto row : matched)
            if (has_person[row]) m.images_with_person += 1;
        report.push_back(std::move(m));
    }
    return report;
}

}  // namespace dsaudit
