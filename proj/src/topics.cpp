#include "dsaudit/topics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dsaudit {

TopicVocabulary TopicVocabulary::load(const std::string& csv_path,
                                      const std::string& embedding_sidecar) {
    TopicVocabulary vocab;
    auto lines = read_lines(csv_path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto& line = lines[i];
        if (line.empty() || line[0] == '#') continue;
        if (i == 0 && line.rfind("label,", 0) == 0) continue;  // header
        auto comma = line.find(',');
        std::string label = comma == std::string::npos ? line : line.substr(0, comma);
        if (label.empty()) throw DataError("empty topic label in " + csv_path);
        vocab.labels.push_back(std::move(label));
    }
    {
        std::vector<std::string> sorted = vocab.labels;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw DataError("duplicate topic label in " + csv_path);
    }
    EmbeddingMatrix em = EmbeddingMatrix::load(embedding_sidecar);
    if (em.rows != static_cast<std::int64_t>(vocab.labels.size()))
        throw DataError("topic embedding row count does not match label count");
    vocab.dim = em.dim;
    vocab.embeddings = std::move(em.data);
    return vocab;
}

namespace {

double cosine(std::span<const float> a, std::span<const float> b) {
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += static_cast<double>(a[i]) * b[i];
        na += static_cast<double>(a[i]) * a[i];
        nb += static_cast<double>(b[i]) * b[i];
    }
    if (na == 0 || nb == 0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace

TopicClustering cluster_topics(const TopicVocabulary& vocab, double tau) {
    if (tau <= 0.0 || tau >= 1.0) throw ValidationError("tau must lie in (0, 1)");
    const int n = static_cast<int>(vocab.labels.size());
    TopicClustering result;
    result.tau = tau;

    // Cluster-level complete linkage, updated as min on merge.
    std::vector<std::vector<double>> link(n, std::vector<double>(n, 0.0));
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            link[a][b] = link[b][a] = cosine(vocab.row(a), vocab.row(b));

    std::vector<std::vector<int>> clusters(n);
    std::vector<bool> active(n, true);
    for (int i = 0; i < n; ++i) clusters[i] = {i};

    while (true) {
        int best_a = -1, best_b = -1;
        double best = tau;
        for (int a = 0; a < n; ++a) {
            if (!active[a]) continue;
            for (int b = a + 1; b < n; ++b) {
                if (!active[b]) continue;
                if (link[a][b] > best) {
                    best = link[a][b];
                    best_a = a;
                    best_b = b;
                }
            }
        }
        if (best_a < 0) break;
        auto& dst = clusters[best_a];
        dst.insert(dst.end(), clusters[best_b].begin(), clusters[best_b].end());
        std::sort(dst.begin(), dst.end());
        clusters[best_b].clear();
        active[best_b] = false;
        for (int c = 0; c < n; ++c) {
            if (!active[c] || c == best_a) continue;
            double merged = std::min(link[best_a][c], link[best_b][c]);
            link[best_a][c] = link[c][best_a] = merged;
        }
    }

    result.topic_to_cluster.assign(n, -1);
    for (int i = 0; i < n; ++i) {
        if (!active[i]) continue;
        int cluster_index = static_cast<int>(result.clusters.size());
        for (int t : clusters[i]) result.topic_to_cluster[t] = cluster_index;
        result.clusters.push_back(std::move(clusters[i]));
    }
    return result;
}

std::vector<double> tau_sweep() {
    std::vector<double> taus;
    for (int q = 1; q <= 20; ++q) taus.push_back(0.8 + q * (0.15 / 21.0));
    return taus;
}

ClusterEmbeddingCache ClusterEmbeddingCache::load(const std::string& sidecar_path) {
    ClusterEmbeddingCache cache;
    EmbeddingMatrix em = EmbeddingMatrix::load(sidecar_path);
    if (em.ids.empty())
        throw DataError("cluster embedding cache requires ids: " + sidecar_path);
    cache.dim = em.dim;
    for (std::int64_t r = 0; r < em.rows; ++r) {
        auto row = em.row(r);
        cache.by_hash.emplace(em.ids[static_cast<std::size_t>(r)],
                              std::vector<float>(row.begin(), row.end()));
    }
    return cache;
}

std::string ClusterEmbeddingCache::cluster_key(const TopicVocabulary& vocab,
                                               const std::vector<int>& members) {
    std::string joined;
    for (std::size_t i = 0; i < members.size(); ++i) {
        if (i) joined += ", ";
        joined += vocab.labels[static_cast<std::size_t>(members[i])];
    }
    return to_hex(fnv1a64(joined));
}

ClusterEmbeddings cluster_embeddings(const TopicVocabulary& vocab,
                                     const TopicClustering& clustering,
                                     const ClusterEmbeddingCache& cache) {
    ClusterEmbeddings out;
    out.dim = vocab.dim;
    out.embeddings.reserve(clustering.clusters.size() *
                           static_cast<std::size_t>(vocab.dim));
    for (const auto& members : clustering.clusters) {
        std::string key = ClusterEmbeddingCache::cluster_key(vocab, members);
        auto it = cache.by_hash.find(key);
        if (it != cache.by_hash.end()) {
            if (static_cast<int>(it->second.size()) != vocab.dim)
                throw DataError("cluster embedding dimension mismatch");
            out.embeddings.insert(out.embeddings.end(), it->second.begin(),
                                  it->second.end());
            continue;
        }
        // Missing cache entry: normalized mean of the member embeddings.
        out.fallbacks += 1;
        std::vector<double> mean(static_cast<std::size_t>(vocab.dim), 0.0);
        for (int t : members) {
            auto row = vocab.row(static_cast<std::size_t>(t));
            for (int i = 0; i < vocab.dim; ++i) mean[static_cast<std::size_t>(i)] += row[i];
        }
        double norm = 0;
        for (double v : mean) norm += v * v;
        norm = std::sqrt(norm);
        for (double v : mean)
            out.embeddings.push_back(static_cast<float>(norm > 0 ? v / norm : 0.0));
    }
    return out;
}

FeatureTopicDist feature_topic_dist(std::span<const float> decoder_rows, int features,
                                    int dim, std::span<const float> topic_embeddings,
                                    int n_topics, int top_n) {
    if (decoder_rows.size() != static_cast<std::size_t>(features) * dim)
        throw ValidationError("feature_topic_dist: decoder size mismatch");
    if (topic_embeddings.size() != static_cast<std::size_t>(n_topics) * dim)
        throw ValidationError("feature_topic_dist: topic embedding size mismatch");
    const int keep = std::min(top_n, n_topics);
    if (keep < 1) throw ValidationError("feature_topic_dist: no topics");

    FeatureTopicDist dist;
    dist.topics = n_topics;
    dist.rows.resize(static_cast<std::size_t>(features));

    for (int j = 0; j < features; ++j) {
        std::span<const float> row(decoder_rows.data() + static_cast<std::size_t>(j) * dim,
                                   static_cast<std::size_t>(dim));
        double row_norm = 0;
        for (float v : row) row_norm += static_cast<double>(v) * v;

        auto& entry = dist.rows[static_cast<std::size_t>(j)];
        if (row_norm == 0.0) {
            dist.flagged_rows += 1;
            for (int t = 0; t < keep; ++t)
                entry.emplace_back(t, 1.0 / static_cast<double>(keep));
            continue;
        }
        std::vector<double> sims(static_cast<std::size_t>(n_topics));
        for (int t = 0; t < n_topics; ++t)
            sims[static_cast<std::size_t>(t)] = cosine(
                row, std::span<const float>(
                         topic_embeddings.data() + static_cast<std::size_t>(t) * dim,
                         static_cast<std::size_t>(dim)));
        std::vector<int> order(static_cast<std::size_t>(n_topics));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return sims[static_cast<std::size_t>(a)] > sims[static_cast<std::size_t>(b)];
        });
        order.resize(static_cast<std::size_t>(keep));
        std::sort(order.begin(), order.end());

        double sum = 0;
        for (int t : order) sum += std::max(0.0, sims[static_cast<std::size_t>(t)]);
        if (sum <= 0.0) {
            for (int t : order) entry.emplace_back(t, 1.0 / static_cast<double>(keep));
        } else {
            for (int t : order)
                entry.emplace_back(t, std::max(0.0, sims[static_cast<std::size_t>(t)]) / sum);
        }
    }
    return dist;
}

namespace {

struct Conditionals {
    std::size_t n_i, n_j;
    std::vector<double> p_feature;       // P(F_j)
    std::vector<double> p_id_given;      // n_i x n_j
};

Conditionals conditionals_from_counts(const ActivationCounts& counts) {
    Conditionals c;
    c.n_i = counts.identity_names.size();
    c.n_j = static_cast<std::size_t>(counts.features);
    double grand = 0;
    for (auto t : counts.feature_totals) grand += static_cast<double>(t);
    if (grand <= 0) throw DataError("pmi: all-zero activation counts");
    c.p_feature.resize(c.n_j);
    c.p_id_given.assign(c.n_i * c.n_j, 0.0);
    for (std::size_t j = 0; j < c.n_j; ++j) {
        double total = static_cast<double>(counts.feature_totals[j]);
        c.p_feature[j] = total / grand;
        if (total > 0)
            for (std::size_t i = 0; i < c.n_i; ++i)
                c.p_id_given[i * c.n_j + j] = static_cast<double>(counts.at(i, j)) / total;
    }
    return c;
}

}  // namespace

PMIResult pmi(const ActivationCounts& counts, const FeatureTopicDist& topic_dist,
              double eps, int threads) {
    if (topic_dist.rows.size() != static_cast<std::size_t>(counts.features))
        throw ValidationError("pmi: feature count mismatch");
    Conditionals c = conditionals_from_counts(counts);
    const std::size_t n_i = c.n_i;
    const std::size_t n_t = static_cast<std::size_t>(topic_dist.topics);

    // Fixed feature shards merged in order; result independent of thread count.
    constexpr int kShards = 8;
    const std::size_t chunk = (c.n_j + kShards - 1) / kShards;
    std::vector<std::vector<double>> part_pi(kShards), part_pt(kShards), part_pit(kShards);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1, threads))
#endif
    for (int s = 0; s < kShards; ++s) {
        std::size_t begin = static_cast<std::size_t>(s) * chunk;
        std::size_t end = std::min(c.n_j, begin + chunk);
        if (begin >= end) continue;
        auto& pi = part_pi[s];
        auto& pt = part_pt[s];
        auto& pit = part_pit[s];
        pi.assign(n_i, 0.0);
        pt.assign(n_t, 0.0);
        pit.assign(n_i * n_t, 0.0);
        for (std::size_t j = begin; j < end; ++j) {
            double pf = c.p_feature[j];
            if (pf == 0) continue;
            for (std::size_t i = 0; i < n_i; ++i)
                pi[i] += c.p_id_given[i * c.n_j + j] * pf;
            for (const auto& [t, pt_given] : topic_dist.rows[j]) {
                pt[static_cast<std::size_t>(t)] += pt_given * pf;
                for (std::size_t i = 0; i < n_i; ++i)
                    pit[i * n_t + static_cast<std::size_t>(t)] +=
                        c.p_id_given[i * c.n_j + j] * pt_given * pf;
            }
        }
    }

    std::vector<double> p_i(n_i, 0.0), p_t(n_t, 0.0), p_it(n_i * n_t, 0.0);
    for (int s = 0; s < kShards; ++s) {
        if (part_pi[s].empty()) continue;
        for (std::size_t i = 0; i < n_i; ++i) p_i[i] += part_pi[s][i];
        for (std::size_t t = 0; t < n_t; ++t) p_t[t] += part_pt[s][t];
        for (std::size_t x = 0; x < p_it.size(); ++x) p_it[x] += part_pit[s][x];
    }

    PMIResult result;
    result.identity_names = counts.identity_names;
    result.topics = topic_dist.topics;
    result.values.resize(n_i * n_t);
    for (std::size_t i = 0; i < n_i; ++i) {
        for (std::size_t t = 0; t < n_t; ++t) {
            double joint = std::max(p_it[i * n_t + t], eps);
            double marg = std::max(p_i[i], eps) * std::max(p_t[t], eps);
            result.values[i * n_t + t] = std::log(joint / marg);
        }
    }
    return result;
}

PMIResult pmi_reference(const ActivationCounts& counts, const FeatureTopicDist& dist,
                        double eps) {
    Conditionals c = conditionals_from_counts(counts);
    const std::size_t n_i = c.n_i;
    const std::size_t n_t = static_cast<std::size_t>(dist.topics);

    // Dense P(t|F_j) for a direct evaluation of the three sums.
    std::vector<double> pt_given(c.n_j * n_t, 0.0);
    for (std::size_t j = 0; j < c.n_j; ++j)
        for (const auto& [t, p] : dist.rows[j])
            pt_given[j * n_t + static_cast<std::size_t>(t)] = p;

    PMIResult result;
    result.identity_names = counts.identity_names;
    result.topics = dist.topics;
    result.values.resize(n_i * n_t);
    for (std::size_t i = 0; i < n_i; ++i) {
        for (std::size_t t = 0; t < n_t; ++t) {
            double p_i = 0, p_t = 0, p_it = 0;
            for (std::size_t j = 0; j < c.n_j; ++j) {
                p_i += c.p_id_given[i * c.n_j + j] * c.p_feature[j];
                p_t += pt_given[j * n_t + t] * c.p_feature[j];
                p_it += c.p_id_given[i * c.n_j + j] * pt_given[j * n_t + t] *
                        c.p_feature[j];
            }
            result.values[i * n_t + t] = std::log(
                std::max(p_it, eps) / (std::max(p_i, eps) * std::max(p_t, eps)));
        }
    }
    return result;
}

std::vector<std::vector<TopicScore>> aggregate(const AggregateInput& input,
                                               const TopicVocabulary& vocab,
                                               int top_k, EnsembleOrder order) {
    if (input.results.empty() || input.clusterings.empty())
        throw ValidationError("aggregate: empty input");
    const std::size_t n_sae = input.results.size();
    const std::size_t n_clust = input.clusterings.size();
    const auto& names = input.results.front().front().identity_names;
    for (const auto& per_sae : input.results) {
        if (per_sae.size() != n_clust)
            throw ValidationError("aggregate: clustering count mismatch");
        for (const auto& r : per_sae)
            if (r.identity_names != names)
                throw DataError("aggregate: mismatched identity sets");
    }
    const std::size_t n_i = names.size();
    const std::size_t n_topics = vocab.labels.size();

    // score[i][topic]; both ensemble orders are computed as stated, the
    // combination is linear so they agree up to a positive scalar.
    std::vector<double> score(n_i * n_topics, 0.0);
    if (order == EnsembleOrder::MeanThenSum) {
        for (std::size_t cidx = 0; cidx < n_clust; ++cidx) {
            const auto& clustering = input.clusterings[cidx];
            for (std::size_t i = 0; i < n_i; ++i) {
                for (std::size_t t = 0; t < n_topics; ++t) {
                    std::size_t cluster =
                        static_cast<std::size_t>(clustering.topic_to_cluster[t]);
                    double mean = 0;
                    for (std::size_t s = 0; s < n_sae; ++s)
                        mean += input.results[s][cidx].at(i, cluster);
                    score[i * n_topics + t] += mean / static_cast<double>(n_sae);
                }
            }
        }
    } else {
        for (std::size_t s = 0; s < n_sae; ++s) {
            for (std::size_t cidx = 0; cidx < n_clust; ++cidx) {
                const auto& clustering = input.clusterings[cidx];
                for (std::size_t i = 0; i < n_i; ++i)
                    for (std::size_t t = 0; t < n_topics; ++t)
                        score[i * n_topics + t] +=
                            input.results[s][cidx].at(
                                i, static_cast<std::size_t>(clustering.topic_to_cluster[t])) /
                            static_cast<double>(n_sae);
            }
        }
    }

    std::vector<std::vector<TopicScore>> out(n_i);
    for (std::size_t i = 0; i < n_i; ++i) {
        std::vector<int> order_idx(n_topics);
        std::iota(order_idx.begin(), order_idx.end(), 0);
        std::sort(order_idx.begin(), order_idx.end(), [&](int a, int b) {
            double sa = score[i * n_topics + static_cast<std::size_t>(a)];
            double sb = score[i * n_topics + static_cast<std::size_t>(b)];
            if (sa != sb) return sa > sb;
            return vocab.labels[static_cast<std::size_t>(a)] <
                   vocab.labels[static_cast<std::size_t>(b)];
        });
        std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(top_k), n_topics);
        for (std::size_t r = 0; r < keep; ++r)
            out[i].push_back({vocab.labels[static_cast<std::size_t>(order_idx[r])],
                              score[i * n_topics + static_cast<std::size_t>(order_idx[r])]});
    }
    return out;
}

}  // namespace dsaudit
