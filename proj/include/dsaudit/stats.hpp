#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dsaudit/corpus.hpp"
#include "dsaudit/textindex.hpp"

namespace dsaudit {

enum class Attribute { Gender, Race };
enum class Level { Box, Image };

struct Distribution {
    std::map<std::string, std::int64_t> counts;
    std::int64_t total = 0;

    double share(const std::string& category) const;
};

/// Counts every box (or image) by its label, including mixed/unclear.
Distribution composition(const CorpusView& corpus, Attribute attr, Level level);

struct BoxStats {
    std::array<std::int64_t, 10> area_ratio_bins{};  // [0,10%) ... [90%,100%]
    std::map<int, std::int64_t> boxes_per_image;     // count -> images
    int max_boxes = 0;
};

BoxStats box_stats(const CorpusView& corpus);

struct DeltaEntry {
    std::string category;
    double baseline_share = 0.0;
    double subset_share = 0.0;
    double delta = 0.0;  // subset_share / baseline_share - 1
    std::int64_t subset_count = 0;
    bool defined = false;  // false when the baseline share is zero
};

struct KeywordSet {
    std::string name;
    std::vector<KeywordQuery> queries;

    // One phrase per line, "#" comments and blank lines skipped.
    static KeywordSet load(const std::string& path, const LemmaDictionary& dict);
};

/// Relative change of group shares inside the keyword-matching subset vs the
/// baseline corpus. Shares are over {male, female} (or the 7 core races);
/// mixed/unclear images are discarded from both sides. An image matching
/// several keywords counts once.
std::vector<DeltaEntry> relative_change(const CorpusView& corpus,
                                        const InvertedIndex& index,
                                        const KeywordSet& keywords, Attribute attr,
                                        Level level = Level::Image);

struct CountryEntry {
    std::string country;
    std::vector<KeywordQuery> synonyms;  // names and adjectives
};

struct CountrySet {
    std::vector<CountryEntry> countries;

    // TSV: "country<TAB>synonym|synonym|..."; the country name itself is
    // always included as a synonym.
    static CountrySet load(const std::string& path, const LemmaDictionary& dict);
};

struct CountryMentions {
    std::string country;
    std::int64_t total_images = 0;
    std::int64_t images_with_person = 0;  // >= 1 box labeled male or female
};

std::vector<CountryMentions> country_mentions(const CorpusView& corpus,
                                              const InvertedIndex& index,
                                              const CountrySet& countries);

}  // namespace dsaudit
