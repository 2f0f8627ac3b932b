#include "dsaudit/consensus.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dsaudit {

namespace {

void require_same_items(const Labeling& a, const Labeling& b) {
    if (a.labels.size() != b.labels.size())
        throw DataError("labelings cover different item sets");
    for (auto ia = a.labels.begin(), ib = b.labels.begin(); ia != a.labels.end();
         ++ia, ++ib) {
        if (ia->first != ib->first)
            throw DataError("labelings cover different item sets");
    }
}

}  // namespace

double cohen_kappa(const Labeling& a, const Labeling& b) {
    if (a.labels.empty()) throw DataError("cohen_kappa: empty item set");
    require_same_items(a, b);

    const double n = static_cast<double>(a.labels.size());
    std::unordered_map<std::string, double> marg_a, marg_b;
    double agree = 0;
    for (auto ia = a.labels.begin(), ib = b.labels.begin(); ia != a.labels.end();
         ++ia, ++ib) {
        if (ia->second == ib->second) agree += 1;
        marg_a[ia->second] += 1;
        marg_b[ib->second] += 1;
    }
    const double p_o = agree / n;
    double p_e = 0;
    for (const auto& [label, ca] : marg_a) {
        auto it = marg_b.find(label);
        if (it != marg_b.end()) p_e += (ca / n) * (it->second / n);
    }
    if (p_e >= 1.0) {
        if (p_o >= 1.0) return 1.0;
        throw DataError("cohen_kappa undefined: chance agreement is 1");
    }
    return (p_o - p_e) / (1.0 - p_e);
}

double fleiss_kappa(const std::vector<std::vector<int>>& counts, int raters_per_item) {
    if (counts.empty()) throw DataError("fleiss_kappa: empty item set");
    if (raters_per_item < 2) throw DataError("fleiss_kappa: need >= 2 raters");
    const std::size_t n_labels = counts.front().size();
    const double n = static_cast<double>(counts.size());
    const double r = raters_per_item;

    std::vector<double> p_label(n_labels, 0.0);
    double p_bar = 0;
    for (const auto& row : counts) {
        if (row.size() != n_labels) throw DataError("fleiss_kappa: ragged count matrix");
        long sum = 0, sq = 0;
        for (std::size_t j = 0; j < n_labels; ++j) {
            if (row[j] < 0) throw DataError("fleiss_kappa: negative count");
            sum += row[j];
            sq += static_cast<long>(row[j]) * row[j];
            p_label[j] += row[j];
        }
        if (sum != raters_per_item)
            throw DataError("fleiss_kappa: row does not sum to raters_per_item");
        p_bar += (static_cast<double>(sq) - r) / (r * (r - 1.0));
    }
    p_bar /= n;
    double p_e = 0;
    for (double c : p_label) {
        double p = c / (n * r);
        p_e += p * p;
    }
    if (p_e >= 1.0) {
        if (p_bar >= 1.0) return 1.0;
        throw DataError("fleiss_kappa undefined: chance agreement is 1");
    }
    return (p_bar - p_e) / (1.0 - p_e);
}

double jaccard_per_label(const Labeling& a, const Labeling& b, const std::string& label) {
    require_same_items(a, b);
    long inter = 0, uni = 0;
    for (auto ia = a.labels.begin(), ib = b.labels.begin(); ia != a.labels.end();
         ++ia, ++ib) {
        bool in_a = ia->second == label;
        bool in_b = ib->second == label;
        if (in_a && in_b) ++inter;
        if (in_a || in_b) ++uni;
    }
    if (uni == 0) return 1.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

ConsensusResult consensus_filter(std::span<const Labeling> labelings,
                                 const ConsensusPolicy& policy) {
    if (labelings.size() < 2) throw ValidationError("consensus requires >= 2 labelings");
    const int n = static_cast<int>(labelings.size());
    int k = policy.mode == ConsensusMode::Unanimous ? n : policy.k;
    if (k < 1 || k > n) throw ValidationError("consensus policy k out of range");
    for (const auto& l : labelings) require_same_items(labelings.front(), l);

    ConsensusResult result;
    for (const auto& [item, first_label] : labelings.front().labels) {
        std::unordered_map<std::string, int> votes;
        for (const auto& l : labelings) votes[l.labels.at(item)] += 1;
        std::vector<std::pair<std::string, int>> winners;
        for (const auto& [label, c] : votes)
            if (c >= k) winners.emplace_back(label, c);
        if (winners.size() == 1) {
            result.assigned.emplace(item, winners.front().first);
        } else if (winners.size() > 1) {
            result.ties++;
            result.dropped++;
        } else {
            result.dropped++;
        }
    }
    return result;
}

Gender image_gender(std::span<const PersonBox> boxes) {
    bool any_male = false, any_female = false, any_mixed = false, only_mu = true,
         only_fu = true;
    for (const auto& box : boxes) {
        switch (box.gender) {
            case Gender::Male:
                any_male = true;
                only_fu = false;
                break;
            case Gender::Female:
                any_female = true;
                only_mu = false;
                break;
            case Gender::Mixed:
                any_mixed = true;
                only_mu = only_fu = false;
                break;
            case Gender::Unclear:
                break;
        }
    }
    if (any_mixed || (any_male && any_female)) return Gender::Mixed;
    if (any_male && only_mu) return Gender::Male;
    if (any_female && only_fu) return Gender::Female;
    return Gender::Unclear;
}

Race image_race(std::span<const PersonBox> boxes) {
    Race found = Race::Unclear;
    for (const auto& box : boxes) {
        if (box.race == Race::Unclear) continue;
        if (found == Race::Unclear) {
            found = box.race;
        } else if (found != box.race) {
            return Race::Unclear;
        }
    }
    return found;
}

void aggregate_image_labels(CorpusView& corpus, int threads) {
    const std::int64_t n = static_cast<std::int64_t>(corpus.images.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(std::max(1, threads))
#endif
    for (std::int64_t i = 0; i < n; ++i) {
        std::vector<PersonBox> local;
        local.reserve(corpus.boxes_of_image[i].size());
        for (auto b : corpus.boxes_of_image[i]) local.push_back(corpus.boxes[b]);
        corpus.images[i].image_gender = image_gender(local);
        corpus.images[i].image_race = image_race(local);
    }
}

BalancedSample balanced_sample(std::span<const SampleItem> pool,
                               const std::map<std::string, std::size_t>& quotas,
                               std::uint64_t seed) {
    if (pool.empty()) throw DataError("balanced_sample: empty pool");

    std::map<std::string, std::vector<std::string>> by_stratum;
    for (const auto& item : pool) by_stratum[item.stratum].push_back(item.id);

    struct State {
        std::string stratum;
        std::size_t requested, size, taken, deficit;
    };
    std::vector<State> states;
    for (const auto& [stratum, quota] : quotas) {
        auto it = by_stratum.find(stratum);
        std::size_t size = it == by_stratum.end() ? 0 : it->second.size();
        std::size_t taken = std::min(quota, size);
        states.push_back({stratum, quota, size, taken, quota - taken});
    }

    std::size_t deficit = 0;
    for (const auto& s : states) deficit += s.deficit;

    // Redistribute shortage proportionally to remaining sibling capacity.
    while (deficit > 0) {
        std::size_t total_cap = 0;
        for (const auto& s : states) total_cap += s.size - s.taken;
        if (total_cap == 0) break;
        std::size_t grant = std::min(deficit, total_cap);
        std::size_t assigned = 0;
        std::vector<std::pair<double, std::size_t>> remainders;
        for (std::size_t i = 0; i < states.size(); ++i) {
            std::size_t cap = states[i].size - states[i].taken;
            double exact = static_cast<double>(grant) * cap / total_cap;
            std::size_t floor_take = std::min(cap, static_cast<std::size_t>(exact));
            states[i].taken += floor_take;
            assigned += floor_take;
            remainders.emplace_back(exact - static_cast<double>(floor_take), i);
        }
        // Largest remainder first, stratum order breaking ties.
        std::stable_sort(remainders.begin(), remainders.end(),
                         [](const auto& a, const auto& b) { return a.first > b.first; });
        for (const auto& [rem, i] : remainders) {
            if (assigned >= grant) break;
            if (states[i].taken < states[i].size) {
                states[i].taken += 1;
                assigned += 1;
            }
        }
        if (assigned == 0) break;
        deficit -= assigned;
    }

    BalancedSample result;
    for (const auto& s : states) {
        result.reports.push_back({s.stratum, s.requested, s.taken, s.deficit});
        auto it = by_stratum.find(s.stratum);
        if (it == by_stratum.end()) continue;
        auto ids = it->second;
        std::sort(ids.begin(), ids.end());
        std::mt19937_64 rng(seed ^ fnv1a64(s.stratum));
        std::shuffle(ids.begin(), ids.end(), rng);
        ids.resize(s.taken);

        std::size_t n = ids.size();
        std::size_t n_test = n / 10;
        std::size_t n_val = n / 10;
        std::size_t n_train = n - n_val - n_test;
        for (std::size_t i = 0; i < n; ++i) {
            if (i < n_train)
                result.train.push_back(ids[i]);
            else if (i < n_train + n_val)
                result.val.push_back(ids[i]);
            else
                result.test.push_back(ids[i]);
        }
    }
    return result;
}

double iou(const DetBox& a, const DetBox& b) {
    double ix = std::max(a.x, b.x);
    double iy = std::max(a.y, b.y);
    double ix2 = std::min(a.x + a.w, b.x + b.w);
    double iy2 = std::min(a.y + a.h, b.y + b.h);
    double iw = std::max(0.0, ix2 - ix);
    double ih = std::max(0.0, iy2 - iy);
    double inter = iw * ih;
    double uni = a.w * a.h + b.w * b.h - inter;
    if (uni <= 0) return 0.0;
    return inter / uni;
}

GtMatchConfig GtMatchConfig::coco_grid() {
    GtMatchConfig cfg;
    for (int i = 0; i < 10; ++i) cfg.thresholds.push_back(0.50 + 0.05 * i);
    return cfg;
}

RecallResult detection_recall(std::span<const DetBox> pred, std::span<const DetBox> gt,
                              const GtMatchConfig& cfg) {
    if (gt.empty()) throw DataError("detection_recall: no ground truth boxes");
    for (std::size_t i = 1; i < cfg.thresholds.size(); ++i)
        if (cfg.thresholds[i] <= cfg.thresholds[i - 1])
            throw ValidationError("iou thresholds must be strictly increasing");

    std::vector<std::size_t> order(pred.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return pred[a].confidence > pred[b].confidence;
    });

    RecallResult result;
    result.thresholds = cfg.thresholds;
    for (double t : cfg.thresholds) {
        std::vector<bool> matched(gt.size(), false);
        std::size_t hits = 0;
        for (std::size_t p : order) {
            double best = 0.0;
            std::size_t best_g = gt.size();
            for (std::size_t g = 0; g < gt.size(); ++g) {
                if (matched[g]) continue;
                double v = iou(pred[p], gt[g]);
                if (v > best) {
                    best = v;
                    best_g = g;
                }
            }
            if (best_g < gt.size() && best >= t) {
                matched[best_g] = true;
                ++hits;
            }
        }
        result.recall.push_back(static_cast<double>(hits) / static_cast<double>(gt.size()));
    }
    result.mean_recall =
        std::accumulate(result.recall.begin(), result.recall.end(), 0.0) /
        static_cast<double>(result.recall.size());
    return result;
}

}  // namespace dsaudit
