#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>

#include "dsaudit/sae.hpp"

using namespace dsaudit;

namespace {

double row_norm(const std::vector<float>& w, int row, int d) {
    double n = 0;
    for (int i = 0; i < d; ++i) {
        double v = w[static_cast<std::size_t>(row) * d + i];
        n += v * v;
    }
    return std::sqrt(n);
}

std::vector<float> random_inputs(std::size_t n, int d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<float> x(n * static_cast<std::size_t>(d));
    for (auto& v : x) v = static_cast<float>(dist(rng));
    return x;
}

EmbeddingMatrix synthetic_embeddings(std::int64_t rows, int d, std::uint64_t seed,
                                     int identities = 0) {
    EmbeddingMatrix em;
    em.rows = rows;
    em.dim = d;
    em.data = random_inputs(static_cast<std::size_t>(rows), d, seed);
    if (identities > 0) {
        for (int i = 0; i < identities; ++i)
            em.identity_names.push_back("id" + std::to_string(i));
        std::mt19937_64 rng(seed + 1);
        std::uniform_int_distribution<int> pick(-1, identities - 1);  // -1 = untagged
        for (std::int64_t r = 0; r < rows; ++r) em.identity.push_back(pick(rng));
    }
    return em;
}

}  // namespace

TEST_CASE("init: seeded, bounded, decoder rows unit-norm") {
    auto a = SAEModel::init(16, 64, 7);
    auto b = SAEModel::init(16, 64, 7);
    auto c = SAEModel::init(16, 64, 8);
    CHECK(a.enc_w == b.enc_w);
    CHECK(a.enc_w != c.enc_w);
    const double bound = 1.0 / std::sqrt(16.0) + 1e-9;
    for (float w : a.enc_w) CHECK(std::abs(w) <= bound);
    for (float v : a.enc_b) CHECK(v == 0.0f);
    for (float v : a.dec_b) CHECK(v == 0.0f);
    for (int j = 0; j < a.m; ++j)
        CHECK(row_norm(a.dec_w, j, a.d) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("encode: support size and tie direction") {
    SAEModel model;
    model.d = 1;
    model.m = 4;
    model.enc_w = {1.0f, 1.0f, 2.0f, -1.0f};
    model.enc_b = {0, 0, 0, 0};
    model.dec_w = {1, 1, 1, 1};
    model.dec_b = {0};
    std::vector<float> x{2.0f};  // pre = (2, 2, 4, -2)

    auto z3 = encode<float>(model, x, 3);
    CHECK(z3 == std::vector<float>{2, 2, 4, 0});  // only 3 positive

    auto z2 = encode<float>(model, x, 2);
    CHECK(z2 == std::vector<float>{2, 0, 4, 0});  // 2-vs-2 tie keeps index 0

    auto z0 = encode<float>(model, std::vector<float>{-1.0f}, 2);
    CHECK(z0 == std::vector<float>{0, 0, 0, 1});  // pre = (-1,-1,-2, 1) -> ReLU
}

TEST_CASE("encode_batch: per-sample vs batch-level budget") {
    auto model = SAEModel::init(8, 32, 3);
    const std::size_t B = 16;
    auto X = random_inputs(B, 8, 5);
    SAEConfig cfg;
    cfg.k = 4;

    cfg.variant = SAEVariant::TopK;
    auto per_sample = encode_batch<float>(model, X, B, cfg);
    for (std::size_t b = 0; b < B; ++b) {
        int nz = 0;
        for (int j = 0; j < model.m; ++j)
            if (per_sample[b * model.m + j] != 0) ++nz;
        CHECK(nz <= cfg.k);
    }

    cfg.variant = SAEVariant::BatchTopK;
    auto pooled = encode_batch<float>(model, X, B, cfg);
    std::size_t total = 0, positives = 0;
    std::vector<float> raw = encode_batch<float>(model, X, B,
                                                 SAEConfig{.k = model.m});
    for (float v : pooled)
        if (v != 0) ++total;
    for (float v : raw)
        if (v > 0) ++positives;
    CHECK(total == std::min(positives, cfg.k * B));
    for (std::size_t i = 0; i < pooled.size(); ++i)
        if (pooled[i] != 0) CHECK(pooled[i] == raw[i]);
}

TEST_CASE("analytic gradients match central finite differences") {
    const int d = 4, m = 8;
    auto model = widen(SAEModel::init(d, m, 13));
    // Break the init ties (dec = normalized enc) so the top-k support is stable.
    std::mt19937_64 rng(99);
    std::normal_distribution<double> jitter(0.0, 0.01);
    for (auto& v : model.enc_b) v += jitter(rng);
    for (auto& v : model.dec_b) v += jitter(rng);

    const std::size_t B = 8;
    auto Xf = random_inputs(B, d, 21);
    std::vector<double> X(Xf.begin(), Xf.end());
    SAEConfig cfg;
    cfg.k = 3;

    for (auto variant : {SAEVariant::TopK, SAEVariant::BatchTopK}) {
        cfg.variant = variant;
        auto g = forward_backward<double>(model, X, B, cfg);
        CHECK(g.loss == doctest::Approx(reconstruction_loss<double>(model, X, B, cfg))
                            .epsilon(1e-12));

        const double h = 1e-6;
        auto check_block = [&](std::vector<double>& params,
                               const std::vector<double>& grads) {
            for (std::size_t i = 0; i < params.size(); i += 3) {  // sample every 3rd
                double save = params[i];
                params[i] = save + h;
                double up = reconstruction_loss<double>(model, X, B, cfg);
                params[i] = save - h;
                double down = reconstruction_loss<double>(model, X, B, cfg);
                params[i] = save;
                double fd = (up - down) / (2 * h);
                CHECK(grads[i] == doctest::Approx(fd).epsilon(1e-4).scale(1.0));
            }
        };
        check_block(model.enc_w, g.enc_w);
        check_block(model.enc_b, g.enc_b);
        check_block(model.dec_w, g.dec_w);
        check_block(model.dec_b, g.dec_b);
    }
}

TEST_CASE("forward_backward is thread-count independent") {
    auto model = SAEModel::init(8, 32, 3);
    const std::size_t B = 64;
    auto X = random_inputs(B, 8, 6);
    SAEConfig cfg;
    cfg.k = 5;
    auto g1 = forward_backward<float>(model, X, B, cfg, 1);
    auto g8 = forward_backward<float>(model, X, B, cfg, 8);
    CHECK(g1.loss == g8.loss);
    CHECK(g1.enc_w == g8.enc_w);
    CHECK(g1.enc_b == g8.enc_b);
    CHECK(g1.dec_w == g8.dec_w);
    CHECK(g1.dec_b == g8.dec_b);
}

TEST_CASE("train: loss decreases, decoder stays unit-norm, threads agree") {
    auto data = synthetic_embeddings(256, 8, 17);
    SAEConfig cfg;
    cfg.expansion = 4;  // m = 32
    cfg.k = 4;
    cfg.batch_size = 32;
    cfg.epochs = 6;
    cfg.seed = 2;

    auto r1 = train(data, cfg, 1);
    REQUIRE(r1.epoch_loss.size() == 6);
    CHECK(r1.epoch_loss.back() < r1.epoch_loss.front());
    for (int j = 0; j < r1.model.m; ++j)
        CHECK(row_norm(r1.model.dec_w, j, r1.model.d) ==
              doctest::Approx(1.0).epsilon(1e-5));

    auto r8 = train(data, cfg, 8);
    CHECK(r1.model.enc_w == r8.model.enc_w);
    CHECK(r1.model.dec_w == r8.model.dec_w);
    CHECK(r1.epoch_loss == r8.epoch_loss);
}

TEST_CASE("train input validation") {
    SAEConfig cfg;
    cfg.batch_size = 512;
    CHECK_THROWS_AS(train(synthetic_embeddings(16, 8, 1), cfg), ValidationError);
    auto bad = synthetic_embeddings(256, 8, 1);
    bad.data[7] = std::numeric_limits<float>::quiet_NaN();
    cfg.batch_size = 32;
    CHECK_THROWS_AS(train(bad, cfg), DataError);
}

TEST_CASE("checkpoint round-trip") {
    auto data = synthetic_embeddings(64, 4, 3);
    SAEConfig cfg;
    cfg.expansion = 2;
    cfg.k = 2;
    cfg.batch_size = 16;
    cfg.epochs = 1;
    cfg.variant = SAEVariant::BatchTopK;
    cfg.seed = 77;
    auto r = train(data, cfg);
    save_checkpoint("/tmp/dsaudit_sae.ckpt", r.model, cfg);
    auto [model, loaded_cfg] = load_checkpoint("/tmp/dsaudit_sae.ckpt");
    CHECK(model.enc_w == r.model.enc_w);
    CHECK(model.dec_w == r.model.dec_w);
    CHECK(model.enc_b == r.model.enc_b);
    CHECK(model.dec_b == r.model.dec_b);
    CHECK(loaded_cfg.variant == SAEVariant::BatchTopK);
    CHECK(loaded_cfg.k == 2);
    CHECK(loaded_cfg.seed == 77);

    std::ofstream("/tmp/dsaudit_sae_bad.ckpt", std::ios::binary) << "XXXXXXXXXX";
    CHECK_THROWS_AS(load_checkpoint("/tmp/dsaudit_sae_bad.ckpt"), DataError);
}

TEST_CASE("embedding sidecar round-trip") {
    auto em = synthetic_embeddings(32, 8, 4, 3);
    for (std::int64_t r = 0; r < em.rows; ++r)
        em.ids.push_back("row" + std::to_string(r));
    em.save("/tmp/dsaudit_emb.json");
    auto loaded = EmbeddingMatrix::load("/tmp/dsaudit_emb.json");
    CHECK(loaded.rows == em.rows);
    CHECK(loaded.dim == em.dim);
    CHECK(loaded.data == em.data);
    CHECK(loaded.ids == em.ids);
    CHECK(loaded.identity == em.identity);
    CHECK(loaded.identity_names == em.identity_names);
}

TEST_CASE("activation_stats: totals, rejection, serialization") {
    auto data = synthetic_embeddings(200, 8, 9, 4);
    auto model = SAEModel::init(8, 32, 1);
    SAEConfig cfg;
    cfg.k = 5;
    auto counts = activation_stats(model, data, cfg);

    std::int64_t untagged = 0;
    for (int id : data.identity)
        if (id < 0) ++untagged;
    CHECK(counts.rejected == untagged);
    CHECK(counts.rows == data.rows - untagged);

    for (int j = 0; j < counts.features; ++j) {
        std::int64_t col = 0;
        for (std::size_t i = 0; i < counts.identity_names.size(); ++i)
            col += counts.at(i, static_cast<std::size_t>(j));
        CHECK(col == counts.feature_totals[static_cast<std::size_t>(j)]);
    }

    save_activation_counts("/tmp/dsaudit_counts.csv", counts);
    auto loaded = load_activation_counts("/tmp/dsaudit_counts.csv");
    CHECK(loaded.rows == counts.rows);
    CHECK(loaded.rejected == counts.rejected);
    CHECK(loaded.features == counts.features);
    CHECK(loaded.feature_totals == counts.feature_totals);
    // Identities with no nonzero activations are absent from the sparse file;
    // everything recorded must agree.
    for (std::size_t li = 0; li < loaded.identity_names.size(); ++li) {
        auto it = std::find(counts.identity_names.begin(), counts.identity_names.end(),
                            loaded.identity_names[li]);
        REQUIRE(it != counts.identity_names.end());
        std::size_t ci = static_cast<std::size_t>(it - counts.identity_names.begin());
        for (int j = 0; j < counts.features; ++j)
            CHECK(loaded.at(li, static_cast<std::size_t>(j)) ==
                  counts.at(ci, static_cast<std::size_t>(j)));
    }
}
