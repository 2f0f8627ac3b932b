#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "dsaudit/corpus.hpp"
#include "dsaudit/stats.hpp"
#include "dsaudit/textindex.hpp"

namespace dsaudit {

struct SocialCategory {
    std::string label;
    std::string source;  // "guilbeault" or "sobit"
    bool is_adjective = false;
    std::int64_t occurrence_count = 0;
};

// CSV "label,source,is_adjective" with header.
std::vector<SocialCategory> load_categories(const std::string& path);

struct CategoryFilterResult {
    std::vector<SocialCategory> kept;
    std::map<std::string, std::size_t> kept_per_source;
    std::size_t dropped_not_lemma = 0;
    std::size_t dropped_low_count = 0;
};

/// Keeps categories whose label appears in the lemma list and whose caption
/// occurrence count is at least min_count. Counts fill occurrence_count.
CategoryFilterResult filter_categories(std::vector<SocialCategory> cats,
                                       const std::string& lemma_list_path,
                                       const InvertedIndex& index,
                                       const LemmaDictionary& dict,
                                       std::int64_t min_count = 100);

struct DatasetBias {
    double female_ratio = 0.0;
    std::int64_t female = 0, male = 0;
    bool defined = false;
};

/// Female ratio over images whose alt-text matches the category and whose
/// image-level gender is male or female.
DatasetBias dataset_bias(const CorpusView& corpus, const InvertedIndex& index,
                         const KeywordQuery& category);

struct ModelBias {
    double d = 0.0;
    bool defined = false;  // false when the pooled stddev is zero
};

/// d(c) = (mean_F - mean_M) / population stddev over the pooled similarities.
ModelBias model_bias(std::span<const double> female_sims,
                     std::span<const double> male_sims);

struct GenerationBias {
    double female_ratio = 0.0;
    std::int64_t qualifying = 0;
    bool short_of_quota = false;  // fewer than `quota` qualifying labels
};

GenerationBias generation_bias(std::span<const Gender> labels, std::int64_t quota = 100);

struct BiasPoint {
    std::string category;
    double dataset_bias = 0.0;  // female ratio in [0, 1]
    double model_bias = 0.0;    // standardized d(c)
};

struct FitResult {
    double rho = 0.0;
    double r_squared = 0.0;
    double slope = 0.0;
    double intercept = 0.0;
    std::size_t n = 0;
    double sign_agreement = 0.0;  // dataset bias recentered at 0.5 vs model bias at 0
};

FitResult fit(std::span<const BiasPoint> points);

/// Generation prompts for the external diffusion step; adjectives get the
/// word "person" appended.
std::vector<std::string> prompt_manifest(std::span<const SocialCategory> cats);

double cosine_similarity(std::span<const float> a, std::span<const float> b);

}  // namespace dsaudit
