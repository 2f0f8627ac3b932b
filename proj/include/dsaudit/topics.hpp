#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "dsaudit/sae.hpp"

namespace dsaudit {

struct TopicVocabulary {
    std::vector<std::string> labels;
    int dim = 0;
    std::vector<float> embeddings;  // labels.size() x dim

    std::span<const float> row(std::size_t i) const {
        return {embeddings.data() + i * static_cast<std::size_t>(dim),
                static_cast<std::size_t>(dim)};
    }

    // CSV "label,source" plus an embedding sidecar in the sae module format.
    static TopicVocabulary load(const std::string& csv_path,
                                const std::string& embedding_sidecar);
};

struct TopicClustering {
    double tau = 0.0;
    std::vector<std::vector<int>> clusters;  // disjoint cover of topic indices
    std::vector<int> topic_to_cluster;
};

/// Greedy complete-linkage agglomeration: repeatedly merge the cluster pair
/// with the largest minimum cross-pair cosine similarity, while it exceeds
/// tau. Ties merge the lowest cluster indices. Every resulting cluster has
/// all pairwise similarities > tau.
TopicClustering cluster_topics(const TopicVocabulary& vocab, double tau);

/// The 20 sweep thresholds strictly inside (0.8, 0.95).
std::vector<double> tau_sweep();

/// Per-cluster embeddings: taken from a cache keyed by the FNV-1a hash of the
/// comma-joined member labels; clusters missing from the cache fall back to
/// the normalized mean of their member embeddings (fallback count reported).
struct ClusterEmbeddings {
    std::vector<float> embeddings;  // clusters x dim
    int dim = 0;
    std::size_t fallbacks = 0;
};

struct ClusterEmbeddingCache {
    std::unordered_map<std::string, std::vector<float>> by_hash;
    int dim = 0;

    static ClusterEmbeddingCache load(const std::string& sidecar_path);
    static std::string cluster_key(const TopicVocabulary& vocab,
                                   const std::vector<int>& members);
};

ClusterEmbeddings cluster_embeddings(const TopicVocabulary& vocab,
                                     const TopicClustering& clustering,
                                     const ClusterEmbeddingCache& cache);

/// Row-stochastic sparse distribution over topics per feature: top_n topics by
/// cosine similarity (ties -> lower topic index), similarities floored at 0
/// and normalized; all-nonpositive or zero rows get a uniform distribution.
struct FeatureTopicDist {
    int topics = 0;
    std::vector<std::vector<std::pair<int, double>>> rows;  // per feature
    std::size_t flagged_rows = 0;  // zero decoder rows
};

FeatureTopicDist feature_topic_dist(std::span<const float> decoder_rows, int features,
                                    int dim, std::span<const float> topic_embeddings,
                                    int n_topics, int top_n = 5);

struct PMIResult {
    std::vector<std::string> identity_names;
    int topics = 0;
    std::vector<double> values;  // identities x topics, natural log

    double at(std::size_t i, std::size_t t) const {
        return values[i * static_cast<std::size_t>(topics) + t];
    }
};

/// PMI(i,t) = log P(i,t) / (P(i) P(t)) with the feature-marginalized
/// probabilities; all probabilities floored at eps before division/log.
PMIResult pmi(const ActivationCounts& counts, const FeatureTopicDist& topic_dist,
              double eps = 1e-12, int threads = 1);

/// Brute-force re-evaluation of the marginalization sums; test oracle.
PMIResult pmi_reference(const ActivationCounts& counts, const FeatureTopicDist& dist,
                        double eps = 1e-12);

enum class EnsembleOrder { MeanThenSum, SumThenMean };

struct TopicScore {
    std::string label;
    double score = 0.0;
};

struct AggregateInput {
    // results[sae][clustering] is a PMI over that clustering's clusters.
    std::vector<std::vector<PMIResult>> results;
    std::vector<TopicClustering> clusterings;  // shared across SAEs
};

/// Per identity: top_k individual topic labels by aggregated score,
/// descending, ties by label lexicographic order.
std::vector<std::vector<TopicScore>> aggregate(const AggregateInput& input,
                                               const TopicVocabulary& vocab,
                                               int top_k = 20,
                                               EnsembleOrder order = EnsembleOrder::MeanThenSum);

}  // namespace dsaudit
