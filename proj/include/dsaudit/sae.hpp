#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "dsaudit/common.hpp"

namespace dsaudit {

enum class SAEVariant { TopK, BatchTopK };

struct SAEConfig {
    SAEVariant variant = SAEVariant::TopK;
    int expansion = 16;
    int k = 20;
    double learning_rate = 1e-3;
    int batch_size = 256;
    int epochs = 10;
    std::uint64_t seed = 0;
    double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;
};

/// Row-major m x d weights; row j is the encoder/decoder direction of
/// feature j. Decoder rows are kept unit-norm after every optimizer step.
template <typename T>
struct SAEModelT {
    int d = 0, m = 0;
    std::vector<T> enc_w, enc_b, dec_w, dec_b;

    static SAEModelT init(int d, int m, std::uint64_t seed);
};

using SAEModel = SAEModelT<float>;
using SAEModelD = SAEModelT<double>;

SAEModelD widen(const SAEModel& model);

void save_checkpoint(const std::string& path, const SAEModel& model, const SAEConfig& cfg);
std::pair<SAEModel, SAEConfig> load_checkpoint(const std::string& path);

struct EmbeddingMatrix {
    std::int64_t rows = 0;
    int dim = 0;
    std::vector<float> data;              // row-major
    std::vector<std::string> ids;         // optional, empty or size rows
    std::vector<int> identity;            // optional; -1 = untagged
    std::vector<std::string> identity_names;

    std::span<const float> row(std::int64_t r) const {
        return {data.data() + r * dim, static_cast<std::size_t>(dim)};
    }

    // Sidecar JSON {"rows", "dim", "data", "ids", "identities"}; data is raw
    // little-endian float32, row-major; paths are relative to the sidecar.
    static EmbeddingMatrix load(const std::string& sidecar_path);
    void save(const std::string& sidecar_path) const;
};

/// Rectified pre-activations with per-sample top-k truncation; exactly
/// min(k, #positive) nonzeros, value ties keep the lower index.
template <typename T>
std::vector<T> encode(const SAEModelT<T>& model, std::span<const T> x, int k);

/// Batch of B rows; BatchTopK keeps the k*B largest rectified activations
/// across the whole batch. Returns B x m row-major codes.
template <typename T>
std::vector<T> encode_batch(const SAEModelT<T>& model, std::span<const T> X,
                            std::size_t batch, const SAEConfig& cfg);

/// Gradients accumulated in 64-bit regardless of the model scalar type.
struct SAEGradients {
    std::vector<double> enc_w, enc_b, dec_w, dec_b;
    double loss = 0.0;
};

template <typename T>
SAEGradients forward_backward(const SAEModelT<T>& model, std::span<const T> X,
                              std::size_t batch, const SAEConfig& cfg, int threads = 1);

template <typename T>
double reconstruction_loss(const SAEModelT<T>& model, std::span<const T> X,
                           std::size_t batch, const SAEConfig& cfg);

struct TrainResult {
    SAEModel model;
    std::vector<double> epoch_loss;
};

TrainResult train(const EmbeddingMatrix& data, const SAEConfig& cfg, int threads = 1);

struct ActivationCounts {
    std::vector<std::string> identity_names;         // fixed, sorted order
    int features = 0;
    std::vector<std::int64_t> counts;                // identities x features
    std::vector<std::int64_t> feature_totals;        // column sums
    std::int64_t rows = 0;
    std::int64_t rejected = 0;                       // untagged rows

    std::int64_t at(std::size_t identity, std::size_t feature) const {
        return counts[identity * static_cast<std::size_t>(features) + feature];
    }
};

ActivationCounts activation_stats(const SAEModel& model, const EmbeddingMatrix& data,
                                  const SAEConfig& cfg);

void save_activation_counts(const std::string& path, const ActivationCounts& counts);
ActivationCounts load_activation_counts(const std::string& path);

}  // namespace dsaudit
