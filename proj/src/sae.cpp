#include "dsaudit/sae.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>

#include <nlohmann/json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dsaudit {

using json = nlohmann::json;
namespace fs = std::filesystem;

template <typename T>
SAEModelT<T> SAEModelT<T>::init(int d, int m, std::uint64_t seed) {
    SAEModelT<T> model;
    model.d = d;
    model.m = m;
    model.enc_w.resize(static_cast<std::size_t>(m) * d);
    model.enc_b.assign(static_cast<std::size_t>(m), T(0));
    model.dec_w.resize(static_cast<std::size_t>(m) * d);
    model.dec_b.assign(static_cast<std::size_t>(d), T(0));

    std::mt19937_64 rng(seed);
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    std::uniform_real_distribution<double> dist(-scale, scale);
    for (auto& w : model.enc_w) w = static_cast<T>(dist(rng));
    // Decoder initialized from the encoder directions, then row-normalized.
    model.dec_w = model.enc_w;
    for (int j = 0; j < m; ++j) {
        double norm = 0;
        T* row = model.dec_w.data() + static_cast<std::size_t>(j) * d;
        for (int i = 0; i < d; ++i) norm += static_cast<double>(row[i]) * row[i];
        norm = std::sqrt(norm);
        if (norm > 0)
            for (int i = 0; i < d; ++i) row[i] = static_cast<T>(row[i] / norm);
    }
    return model;
}

template struct SAEModelT<float>;
template struct SAEModelT<double>;

SAEModelD widen(const SAEModel& model) {
    SAEModelD out;
    out.d = model.d;
    out.m = model.m;
    out.enc_w.assign(model.enc_w.begin(), model.enc_w.end());
    out.enc_b.assign(model.enc_b.begin(), model.enc_b.end());
    out.dec_w.assign(model.dec_w.begin(), model.dec_w.end());
    out.dec_b.assign(model.dec_b.begin(), model.dec_b.end());
    return out;
}

namespace {

template <typename T>
void compute_pre(const SAEModelT<T>& model, std::span<const T> X, std::size_t batch,
                 std::vector<T>& pre) {
    const int d = model.d, m = model.m;
    pre.assign(batch * static_cast<std::size_t>(m), T(0));
    for (std::size_t b = 0; b < batch; ++b) {
        const T* x = X.data() + b * d;
        T* out = pre.data() + b * m;
        for (int j = 0; j < m; ++j) {
            const T* w = model.enc_w.data() + static_cast<std::size_t>(j) * d;
            double acc = 0;
            for (int i = 0; i < d; ++i)
                acc += static_cast<double>(w[i]) * (static_cast<double>(x[i]) - model.dec_b[i]);
            out[j] = static_cast<T>(acc + model.enc_b[j]);
        }
    }
}

// Keeps the `keep` largest positive entries of `values` (ties -> lower index),
// zeroing everything else in-place.
template <typename T>
void truncate_topk(T* values, std::size_t n, std::size_t keep) {
    std::vector<std::size_t> positive;
    for (std::size_t i = 0; i < n; ++i) {
        if (values[i] > T(0))
            positive.push_back(i);
        else
            values[i] = T(0);
    }
    if (positive.size() <= keep) return;
    std::stable_sort(positive.begin(), positive.end(), [&](std::size_t a, std::size_t b) {
        return values[a] > values[b];
    });
    for (std::size_t r = keep; r < positive.size(); ++r) values[positive[r]] = T(0);
}

}  // namespace

template <typename T>
std::vector<T> encode(const SAEModelT<T>& model, std::span<const T> x, int k) {
    if (static_cast<int>(x.size()) != model.d)
        throw ValidationError("encode: input dimension mismatch");
    std::vector<T> pre;
    compute_pre(model, x, 1, pre);
    truncate_topk(pre.data(), pre.size(), static_cast<std::size_t>(k));
    return pre;
}

template <typename T>
std::vector<T> encode_batch(const SAEModelT<T>& model, std::span<const T> X,
                            std::size_t batch, const SAEConfig& cfg) {
    if (batch == 0) throw ValidationError("encode_batch: empty batch");
    if (X.size() != batch * static_cast<std::size_t>(model.d))
        throw ValidationError("encode_batch: input size mismatch");
    std::vector<T> codes;
    compute_pre(model, X, batch, codes);
    if (cfg.variant == SAEVariant::TopK) {
        for (std::size_t b = 0; b < batch; ++b)
            truncate_topk(codes.data() + b * model.m, static_cast<std::size_t>(model.m),
                          static_cast<std::size_t>(cfg.k));
    } else {
        truncate_topk(codes.data(), codes.size(),
                      static_cast<std::size_t>(cfg.k) * batch);
    }
    return codes;
}

template std::vector<float> encode(const SAEModel&, std::span<const float>, int);
template std::vector<double> encode(const SAEModelD&, std::span<const double>, int);
template std::vector<float> encode_batch(const SAEModel&, std::span<const float>,
                                         std::size_t, const SAEConfig&);
template std::vector<double> encode_batch(const SAEModelD&, std::span<const double>,
                                          std::size_t, const SAEConfig&);

template <typename T>
SAEGradients forward_backward(const SAEModelT<T>& model, std::span<const T> X,
                              std::size_t batch, const SAEConfig& cfg, int threads) {
    const int d = model.d, m = model.m;
    std::vector<T> codes = encode_batch(model, X, batch, cfg);

    SAEGradients g;
    g.enc_w.assign(static_cast<std::size_t>(m) * d, 0.0);
    g.enc_b.assign(static_cast<std::size_t>(m), 0.0);
    g.dec_w.assign(static_cast<std::size_t>(m) * d, 0.0);
    g.dec_b.assign(static_cast<std::size_t>(d), 0.0);

    // Fixed shard count: the merged result does not depend on thread count.
    constexpr int kShards = 8;
    const std::size_t chunk = (batch + kShards - 1) / kShards;
    std::vector<SAEGradients> partial(kShards);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1, threads))
#endif
    for (int s = 0; s < kShards; ++s) {
        std::size_t begin = static_cast<std::size_t>(s) * chunk;
        std::size_t end = std::min(batch, begin + chunk);
        if (begin >= end) continue;
        auto& p = partial[s];
        p.enc_w.assign(static_cast<std::size_t>(m) * d, 0.0);
        p.enc_b.assign(static_cast<std::size_t>(m), 0.0);
        p.dec_w.assign(static_cast<std::size_t>(m) * d, 0.0);
        p.dec_b.assign(static_cast<std::size_t>(d), 0.0);

        std::vector<double> recon(d), g_recon(d), centered(d), g_pre(m);
        for (std::size_t b = begin; b < end; ++b) {
            const T* x = X.data() + b * d;
            const T* z = codes.data() + b * m;
            for (int i = 0; i < d; ++i) {
                recon[i] = model.dec_b[i];
                centered[i] = static_cast<double>(x[i]) - model.dec_b[i];
            }
            for (int j = 0; j < m; ++j) {
                if (z[j] == T(0)) continue;
                const T* w = model.dec_w.data() + static_cast<std::size_t>(j) * d;
                for (int i = 0; i < d; ++i) recon[i] += static_cast<double>(z[j]) * w[i];
            }
            double sample_loss = 0;
            for (int i = 0; i < d; ++i) {
                double err = recon[i] - static_cast<double>(x[i]);
                sample_loss += err * err;
                g_recon[i] = 2.0 * err / static_cast<double>(batch);
                p.dec_b[i] += g_recon[i];
            }
            p.loss += sample_loss / static_cast<double>(batch);

            std::fill(g_pre.begin(), g_pre.end(), 0.0);
            for (int j = 0; j < m; ++j) {
                if (z[j] == T(0)) continue;
                const T* w = model.dec_w.data() + static_cast<std::size_t>(j) * d;
                double* gw = p.dec_w.data() + static_cast<std::size_t>(j) * d;
                double gz = 0;
                for (int i = 0; i < d; ++i) {
                    gw[i] += static_cast<double>(z[j]) * g_recon[i];
                    gz += static_cast<double>(w[i]) * g_recon[i];
                }
                g_pre[j] = gz;
            }
            for (int j = 0; j < m; ++j) {
                if (g_pre[j] == 0.0) continue;
                p.enc_b[j] += g_pre[j];
                double* gw = p.enc_w.data() + static_cast<std::size_t>(j) * d;
                const T* ew = model.enc_w.data() + static_cast<std::size_t>(j) * d;
                for (int i = 0; i < d; ++i) {
                    gw[i] += g_pre[j] * centered[i];
                    p.dec_b[i] -= g_pre[j] * static_cast<double>(ew[i]);
                }
            }
        }
    }

    for (const auto& p : partial) {
        if (p.enc_w.empty()) continue;
        g.loss += p.loss;
        for (std::size_t i = 0; i < g.enc_w.size(); ++i) g.enc_w[i] += p.enc_w[i];
        for (std::size_t i = 0; i < g.enc_b.size(); ++i) g.enc_b[i] += p.enc_b[i];
        for (std::size_t i = 0; i < g.dec_w.size(); ++i) g.dec_w[i] += p.dec_w[i];
        for (std::size_t i = 0; i < g.dec_b.size(); ++i) g.dec_b[i] += p.dec_b[i];
    }
    return g;
}

template SAEGradients forward_backward(const SAEModel&, std::span<const float>,
                                       std::size_t, const SAEConfig&, int);
template SAEGradients forward_backward(const SAEModelD&, std::span<const double>,
                                       std::size_t, const SAEConfig&, int);

template <typename T>
double reconstruction_loss(const SAEModelT<T>& model, std::span<const T> X,
                           std::size_t batch, const SAEConfig& cfg) {
    const int d = model.d, m = model.m;
    std::vector<T> codes = encode_batch(model, X, batch, cfg);
    double loss = 0;
    for (std::size_t b = 0; b < batch; ++b) {
        const T* x = X.data() + b * d;
        const T* z = codes.data() + b * m;
        for (int i = 0; i < d; ++i) {
            double recon = model.dec_b[i];
            for (int j = 0; j < m; ++j) {
                if (z[j] != T(0))
                    recon += static_cast<double>(z[j]) *
                             model.dec_w[static_cast<std::size_t>(j) * d + i];
            }
            double err = recon - static_cast<double>(x[i]);
            loss += err * err;
        }
    }
    return loss / static_cast<double>(batch);
}

template double reconstruction_loss(const SAEModel&, std::span<const float>, std::size_t,
                                    const SAEConfig&);
template double reconstruction_loss(const SAEModelD&, std::span<const double>,
                                    std::size_t, const SAEConfig&);

namespace {

struct AdamState {
    std::vector<double> m1, m2;
    std::int64_t step = 0;
};

void adam_update(std::vector<float>& param, const std::vector<double>& grad,
                 AdamState& state, const SAEConfig& cfg, double bias1, double bias2,
                 std::size_t offset) {
    for (std::size_t i = 0; i < param.size(); ++i) {
        double& m1 = state.m1[offset + i];
        double& m2 = state.m2[offset + i];
        m1 = cfg.beta1 * m1 + (1.0 - cfg.beta1) * grad[i];
        m2 = cfg.beta2 * m2 + (1.0 - cfg.beta2) * grad[i] * grad[i];
        double mhat = m1 / bias1;
        double vhat = m2 / bias2;
        param[i] = static_cast<float>(param[i] -
                                      cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.adam_eps));
    }
}

}  // namespace

TrainResult train(const EmbeddingMatrix& data, const SAEConfig& cfg, int threads) {
    if (data.rows < cfg.batch_size)
        throw ValidationError("train: fewer rows than one batch");
    const int d = data.dim;
    const int m = cfg.expansion * d;
    if (cfg.k > m) throw ValidationError("train: k exceeds feature count");
    for (float v : data.data)
        if (!std::isfinite(v)) throw DataError("train: non-finite embedding value");

    TrainResult result;
    result.model = SAEModel::init(d, m, cfg.seed);
    SAEModel& model = result.model;

    const std::size_t n_params = model.enc_w.size() + model.enc_b.size() +
                                 model.dec_w.size() + model.dec_b.size();
    AdamState state;
    state.m1.assign(n_params, 0.0);
    state.m2.assign(n_params, 0.0);

    const std::size_t off_encw = 0;
    const std::size_t off_encb = off_encw + model.enc_w.size();
    const std::size_t off_decw = off_encb + model.enc_b.size();
    const std::size_t off_decb = off_decw + model.dec_w.size();

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        double epoch_loss = 0;
        std::size_t batches = 0;
        for (std::int64_t start = 0; start < data.rows; start += cfg.batch_size) {
            std::size_t batch =
                static_cast<std::size_t>(std::min<std::int64_t>(cfg.batch_size, data.rows - start));
            std::span<const float> X(data.data.data() + start * d, batch * d);
            SAEGradients g = forward_backward(model, X, batch, cfg, threads);
            if (!std::isfinite(g.loss))
                throw DataError("train: loss diverged to NaN/Inf at epoch " +
                                std::to_string(epoch));
            epoch_loss += g.loss;
            ++batches;

            state.step += 1;
            double bias1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
            double bias2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
            adam_update(model.enc_w, g.enc_w, state, cfg, bias1, bias2, off_encw);
            adam_update(model.enc_b, g.enc_b, state, cfg, bias1, bias2, off_encb);
            adam_update(model.dec_w, g.dec_w, state, cfg, bias1, bias2, off_decw);
            adam_update(model.dec_b, g.dec_b, state, cfg, bias1, bias2, off_decb);

            for (int j = 0; j < m; ++j) {
                float* row = model.dec_w.data() + static_cast<std::size_t>(j) * d;
                double norm = 0;
                for (int i = 0; i < d; ++i) norm += static_cast<double>(row[i]) * row[i];
                norm = std::sqrt(norm);
                if (norm > 0)
                    for (int i = 0; i < d; ++i)
                        row[i] = static_cast<float>(row[i] / norm);
            }
        }
        result.epoch_loss.push_back(epoch_loss / static_cast<double>(batches));
    }
    return result;
}

ActivationCounts activation_stats(const SAEModel& model, const EmbeddingMatrix& data,
                                  const SAEConfig& cfg) {
    if (data.dim != model.d)
        throw ValidationError("activation_stats: dimension mismatch");
    ActivationCounts counts;
    counts.identity_names = data.identity_names;
    counts.features = model.m;
    counts.counts.assign(counts.identity_names.size() * static_cast<std::size_t>(model.m),
                         0);
    counts.feature_totals.assign(static_cast<std::size_t>(model.m), 0);

    const std::size_t step =
        cfg.variant == SAEVariant::BatchTopK ? static_cast<std::size_t>(cfg.batch_size) : 1024;
    for (std::int64_t start = 0; start < data.rows;
         start += static_cast<std::int64_t>(step)) {
        std::size_t batch = static_cast<std::size_t>(
            std::min<std::int64_t>(static_cast<std::int64_t>(step), data.rows - start));
        std::span<const float> X(data.data.data() + start * data.dim, batch * data.dim);
        std::vector<float> codes = encode_batch(model, X, batch, cfg);
        for (std::size_t b = 0; b < batch; ++b) {
            int id = data.identity.empty() ? -1 : data.identity[start + static_cast<std::int64_t>(b)];
            if (id < 0) {
                counts.rejected += 1;
                continue;
            }
            counts.rows += 1;
            const float* z = codes.data() + b * model.m;
            for (int j = 0; j < model.m; ++j) {
                if (z[j] > 0.0f) {
                    counts.counts[static_cast<std::size_t>(id) * model.m + j] += 1;
                    counts.feature_totals[static_cast<std::size_t>(j)] += 1;
                }
            }
        }
    }
    return counts;
}

// ---- file formats -----------------------------------------------------------

namespace {

constexpr char kCheckpointMagic[8] = {'D', 'S', 'A', 'S', 'A', 'E', '0', '1'};

template <typename T>
void write_pod(std::ofstream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in) {
    T v;
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw DataError("truncated checkpoint file");
    return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const SAEModel& model,
                     const SAEConfig& cfg) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write checkpoint: " + path);
    out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
    write_pod<std::int32_t>(out, model.d);
    write_pod<std::int32_t>(out, model.m);
    write_pod<std::int32_t>(out, cfg.variant == SAEVariant::TopK ? 0 : 1);
    write_pod<std::int32_t>(out, cfg.expansion);
    write_pod<std::int32_t>(out, cfg.k);
    write_pod<std::int32_t>(out, cfg.batch_size);
    write_pod<std::int32_t>(out, cfg.epochs);
    write_pod<std::uint64_t>(out, cfg.seed);
    write_pod<double>(out, cfg.learning_rate);
    auto write_block = [&](const std::vector<float>& block) {
        out.write(reinterpret_cast<const char*>(block.data()),
                  static_cast<std::streamsize>(block.size() * sizeof(float)));
    };
    write_block(model.enc_w);
    write_block(model.enc_b);
    write_block(model.dec_w);
    write_block(model.dec_b);
}

std::pair<SAEModel, SAEConfig> load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open checkpoint: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0)
        throw DataError("bad checkpoint magic: " + path);
    SAEModel model;
    SAEConfig cfg;
    model.d = read_pod<std::int32_t>(in);
    model.m = read_pod<std::int32_t>(in);
    cfg.variant = read_pod<std::int32_t>(in) == 0 ? SAEVariant::TopK : SAEVariant::BatchTopK;
    cfg.expansion = read_pod<std::int32_t>(in);
    cfg.k = read_pod<std::int32_t>(in);
    cfg.batch_size = read_pod<std::int32_t>(in);
    cfg.epochs = read_pod<std::int32_t>(in);
    cfg.seed = read_pod<std::uint64_t>(in);
    cfg.learning_rate = read_pod<double>(in);
    auto read_block = [&](std::vector<float>& block, std::size_t n) {
        block.resize(n);
        in.read(reinterpret_cast<char*>(block.data()),
                static_cast<std::streamsize>(n * sizeof(float)));
        if (!in) throw DataError("truncated checkpoint file");
    };
    std::size_t md = static_cast<std::size_t>(model.m) * model.d;
    read_block(model.enc_w, md);
    read_block(model.enc_b, static_cast<std::size_t>(model.m));
    read_block(model.dec_w, md);
    read_block(model.dec_b, static_cast<std::size_t>(model.d));
    return {std::move(model), cfg};
}

EmbeddingMatrix EmbeddingMatrix::load(const std::string& sidecar_path) {
    json j = json::parse(read_file(sidecar_path));
    EmbeddingMatrix em;
    em.rows = j.at("rows").get<std::int64_t>();
    em.dim = j.at("dim").get<int>();
    if (em.rows < 0 || em.dim < 1)
        throw DataError("invalid embedding sidecar dimensions: " + sidecar_path);
    fs::path base = fs::path(sidecar_path).parent_path();
    auto resolve = [&](const std::string& p) { return (base / p).string(); };

    std::string data = read_file(resolve(j.at("data").get<std::string>()));
    std::size_t expect = static_cast<std::size_t>(em.rows) * em.dim * sizeof(float);
    if (data.size() != expect)
        throw DataError("embedding data size mismatch: " + sidecar_path);
    em.data.resize(static_cast<std::size_t>(em.rows) * em.dim);
    std::memcpy(em.data.data(), data.data(), data.size());
    for (float v : em.data)
        if (!std::isfinite(v)) throw DataError("non-finite embedding value");

    if (j.contains("ids") && !j.at("ids").is_null()) {
        em.ids = read_lines(resolve(j.at("ids").get<std::string>()));
        if (static_cast<std::int64_t>(em.ids.size()) != em.rows)
            throw DataError("embedding ids size mismatch");
    }
    if (j.contains("identities") && !j.at("identities").is_null()) {
        auto raw = read_lines(resolve(j.at("identities").get<std::string>()));
        if (static_cast<std::int64_t>(raw.size()) != em.rows)
            throw DataError("embedding identities size mismatch");
        std::map<std::string, int> name_to_index;
        for (const auto& name : raw)
            if (!name.empty()) name_to_index.emplace(name, 0);
        int next = 0;
        for (auto& [name, idx] : name_to_index) idx = next++;
        em.identity_names.reserve(name_to_index.size());
        for (const auto& [name, idx] : name_to_index) em.identity_names.push_back(name);
        em.identity.reserve(raw.size());
        for (const auto& name : raw)
            em.identity.push_back(name.empty() ? -1 : name_to_index.at(name));
    }
    return em;
}

void EmbeddingMatrix::save(const std::string& sidecar_path) const {
    fs::path base = fs::path(sidecar_path).parent_path();
    std::string stem = fs::path(sidecar_path).stem().string();
    std::string data_name = stem + ".f32";
    {
        std::ofstream out((base / data_name).string(), std::ios::binary);
        if (!out) throw ValidationError("cannot write embedding data");
        out.write(reinterpret_cast<const char*>(data.data()),
                  static_cast<std::streamsize>(data.size() * sizeof(float)));
    }
    json j{{"rows", rows}, {"dim", dim}, {"data", data_name}};
    if (!ids.empty()) {
        std::string ids_name = stem + ".ids";
        std::ofstream out((base / ids_name).string(), std::ios::binary);
        for (const auto& id : ids) out << id << '\n';
        j["ids"] = ids_name;
    } else {
        j["ids"] = nullptr;
    }
    if (!identity.empty()) {
        std::string ident_name = stem + ".identities";
        std::ofstream out((base / ident_name).string(), std::ios::binary);
        for (int idx : identity)
            out << (idx < 0 ? std::string() : identity_names[static_cast<std::size_t>(idx)])
                << '\n';
        j["identities"] = ident_name;
    } else {
        j["identities"] = nullptr;
    }
    std::ofstream out(sidecar_path, std::ios::binary);
    if (!out) throw ValidationError("cannot write embedding sidecar");
    out << j.dump(2) << '\n';
}

void save_activation_counts(const std::string& path, const ActivationCounts& counts) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write activation counts: " + path);
    out << "# rows=" << counts.rows << " rejected=" << counts.rejected
        << " features=" << counts.features << '\n';
    out << "identity,feature,count\n";
    for (std::size_t i = 0; i < counts.identity_names.size(); ++i) {
        for (int j = 0; j < counts.features; ++j) {
            std::int64_t c = counts.at(i, static_cast<std::size_t>(j));
            if (c != 0)
                out << counts.identity_names[i] << ',' << j << ',' << c << '\n';
        }
    }
}

ActivationCounts load_activation_counts(const std::string& path) {
    auto lines = read_lines(path);
    if (lines.size() < 2) throw DataError("malformed activation counts file: " + path);
    ActivationCounts counts;
    {
        // "# rows=N rejected=N features=M"
        std::sscanf(lines[0].c_str(), "# rows=%lld rejected=%lld features=%d",
                    reinterpret_cast<long long*>(&counts.rows),
                    reinterpret_cast<long long*>(&counts.rejected), &counts.features);
        if (counts.features <= 0)
            throw DataError("bad activation counts header: " + path);
    }
    struct Entry {
        std::string identity;
        int feature;
        std::int64_t count;
    };
    std::vector<Entry> entries;
    std::map<std::string, int> names;
    for (std::size_t l = 2; l < lines.size(); ++l) {
        if (lines[l].empty()) continue;
        auto c1 = lines[l].find(',');
        auto c2 = lines[l].find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw DataError("malformed activation counts row: " + lines[l]);
        Entry e;
        e.identity = lines[l].substr(0, c1);
        e.feature = std::stoi(lines[l].substr(c1 + 1, c2 - c1 - 1));
        e.count = std::stoll(lines[l].substr(c2 + 1));
        names.emplace(e.identity, 0);
        entries.push_back(std::move(e));
    }
    int next = 0;
    for (auto& [name, idx] : names) idx = next++;
    for (const auto& [name, idx] : names) counts.identity_names.push_back(name);
    counts.counts.assign(counts.identity_names.size() *
                             static_cast<std::size_t>(counts.features),
                         0);
    counts.feature_totals.assign(static_cast<std::size_t>(counts.features), 0);
    for (const auto& e : entries) {
        if (e.feature < 0 || e.feature >= counts.features)
            throw DataError("activation counts feature out of range");
        counts.counts[static_cast<std::size_t>(names.at(e.identity)) * counts.features +
                      e.feature] += e.count;
        counts.feature_totals[static_cast<std::size_t>(e.feature)] += e.count;
    }
    return counts;
}

}  // namespace dsaudit
