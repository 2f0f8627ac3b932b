#include "dsaudit/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace dsaudit {

std::vector<SocialCategory> load_categories(const std::string& path) {
    std::vector<SocialCategory> cats;
    auto lines = read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto& line = lines[i];
        if (line.empty() || line[0] == '#') continue;
        if (i == 0 && line.rfind("label,", 0) == 0) continue;
        auto c1 = line.find(',');
        auto c2 = line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw DataError("malformed category line: " + line);
        SocialCategory cat;
        cat.label = line.substr(0, c1);
        cat.source = line.substr(c1 + 1, c2 - c1 - 1);
        std::string adj = line.substr(c2 + 1);
        cat.is_adjective = adj == "1" || adj == "true";
        cats.push_back(std::move(cat));
    }
    return cats;
}

CategoryFilterResult filter_categories(std::vector<SocialCategory> cats,
                                       const std::string& lemma_list_path,
                                       const InvertedIndex& index,
                                       const LemmaDictionary& dict,
                                       std::int64_t min_count) {
    std::unordered_set<std::string> lemma_set;
    for (const auto& line : read_lines(lemma_list_path)) {
        if (line.empty() || line[0] == '#') continue;
        lemma_set.insert(ascii_lower(line));
    }

    CategoryFilterResult result;
    for (auto& cat : cats) {
        if (!lemma_set.contains(ascii_lower(cat.label))) {
            result.dropped_not_lemma += 1;
            continue;
        }
        auto q = make_query(cat.label, dict);
        cat.occurrence_count = static_cast<std::int64_t>(query(index, q).size());
        if (cat.occurrence_count < min_count) {
            result.dropped_low_count += 1;
            continue;
        }
        result.kept_per_source[cat.source] += 1;
        result.kept.push_back(std::move(cat));
    }
    return result;
}

DatasetBias dataset_bias(const CorpusView& corpus, const InvertedIndex& index,
                         const KeywordQuery& category) {
    DatasetBias bias;
    for (auto d : query(index, category)) {
        auto it = corpus.image_index.find(index.doc_ids[d]);
        if (it == corpus.image_index.end())
            throw DataError("index doc id not in corpus: " + index.doc_ids[d]);
        Gender g = corpus.images[it->second].image_gender;
        if (g == Gender::Female)
            bias.female += 1;
        else if (g == Gender::Male)
            bias.male += 1;
    }
    std::int64_t total = bias.female + bias.male;
    if (total > 0) {
        bias.female_ratio = static_cast<double>(bias.female) / static_cast<double>(total);
        bias.defined = true;
    }
    return bias;
}

ModelBias model_bias(std::span<const double> female_sims,
                     std::span<const double> male_sims) {
    if (female_sims.size() < 2 || male_sims.size() < 2)
        throw ValidationError("model_bias: need >= 2 similarities per gender set");
    double mean_f = 0, mean_m = 0;
    for (double v : female_sims) mean_f += v;
    for (double v : male_sims) mean_m += v;
    mean_f /= static_cast<double>(female_sims.size());
    mean_m /= static_cast<double>(male_sims.size());

    double pooled_mean = 0;
    const double n = static_cast<double>(female_sims.size() + male_sims.size());
    for (double v : female_sims) pooled_mean += v;
    for (double v : male_sims) pooled_mean += v;
    pooled_mean /= n;
    double var = 0;
    for (double v : female_sims) var += (v - pooled_mean) * (v - pooled_mean);
    for (double v : male_sims) var += (v - pooled_mean) * (v - pooled_mean);
    var /= n;  // population form

    ModelBias bias;
    if (var > 0) {
        bias.d = (mean_f - mean_m) / std::sqrt(var);
        bias.defined = true;
    }
    return bias;
}

GenerationBias generation_bias(std::span<const Gender> labels, std::int64_t quota) {
    GenerationBias bias;
    std::int64_t female = 0;
    for (Gender g : labels) {
        if (g == Gender::Female) {
            ++female;
            ++bias.qualifying;
        } else if (g == Gender::Male) {
            ++bias.qualifying;
        }
    }
    if (bias.qualifying == 0) throw DataError("generation_bias: no qualifying labels");
    bias.female_ratio = static_cast<double>(female) / static_cast<double>(bias.qualifying);
    bias.short_of_quota = bias.qualifying < quota;
    return bias;
}

FitResult fit(std::span<const BiasPoint> points) {
    if (points.size() < 3) throw ValidationError("fit: need >= 3 points");
    const double n = static_cast<double>(points.size());
    double sx = 0, sy = 0;
    for (const auto& p : points) {
        if (!std::isfinite(p.dataset_bias) || !std::isfinite(p.model_bias))
            throw DataError("fit: non-finite bias point");
        sx += p.dataset_bias;
        sy += p.model_bias;
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, syy = 0, sxy = 0;
    for (const auto& p : points) {
        double dx = p.dataset_bias - mx;
        double dy = p.model_bias - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0) throw DataError("fit: zero variance in dataset bias");

    FitResult result;
    result.n = points.size();
    result.slope = sxy / sxx;
    result.intercept = my - result.slope * mx;
    result.rho = syy > 0 ? sxy / std::sqrt(sxx * syy) : 0.0;

    double ss_res = 0;
    for (const auto& p : points) {
        double resid = p.model_bias - (result.slope * p.dataset_bias + result.intercept);
        ss_res += resid * resid;
    }
    result.r_squared = syy > 0 ? 1.0 - ss_res / syy : 1.0;

    std::size_t agree = 0;
    for (const auto& p : points) {
        bool data_female = p.dataset_bias >= 0.5;
        bool model_female = p.model_bias >= 0.0;
        if (data_female == model_female) ++agree;
    }
    result.sign_agreement = static_cast<double>(agree) / n;
    return result;
}

std::vector<std::string> prompt_manifest(std::span<const SocialCategory> cats) {
    std::vector<std::string> prompts;
    prompts.reserve(cats.size());
    for (const auto& cat : cats) {
        std::string prompt = "A picture of a " + cat.label;
        if (cat.is_adjective) prompt += " person";
        prompts.push_back(std::move(prompt));
    }
    return prompts;
}

double cosine_similarity(std::span<const float> a, std::span<const float> b) {
    if (a.size() != b.size())
        throw ValidationError("cosine_similarity: dimension mismatch");
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += static_cast<double>(a[i]) * b[i];
        na += static_cast<double>(a[i]) * a[i];
        nb += static_cast<double>(b[i]) * b[i];
    }
    if (na == 0 || nb == 0) throw DataError("cosine_similarity: zero vector");
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace dsaudit
