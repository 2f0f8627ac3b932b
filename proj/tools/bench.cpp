// Serial vs parallel throughput for the hot kernels.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "dsaudit/sae.hpp"
#include "dsaudit/sentiment.hpp"
#include "dsaudit/textindex.hpp"
#include "dsaudit/topics.hpp"

using namespace dsaudit;

namespace {

std::vector<std::pair<std::string, std::string>> synthetic_docs(std::size_t n) {
    const char* words[] = {"man",   "woman", "police", "arrest", "beach", "city",
                           "happy", "sad",   "crowd",  "street", "photo", "dog"};
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::size_t> pick(0, std::size(words) - 1);
    std::uniform_int_distribution<int> len(4, 18);
    std::vector<std::pair<std::string, std::string>> docs;
    docs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::string text;
        for (int w = 0, m = len(rng); w < m; ++w) {
            if (w) text += ' ';
            text += words[pick(rng)];
        }
        docs.emplace_back("img" + std::to_string(i), std::move(text));
    }
    return docs;
}

LemmaDictionary tiny_dict() {
    LemmaDictionary d;
    d.stopwords = {"the", "a"};
    return d;
}

CorpusView sentiment_corpus(std::size_t n) {
    const char* captions[] = {
        "a very happy man at the beach", "the food was not good at all",
        "this is GREAT!!", "a sad and lonely street", "kind of bad but funny"};
    std::vector<ImageRecord> images;
    for (std::size_t i = 0; i < n; ++i) {
        ImageRecord r;
        r.image_id = "img" + std::to_string(i);
        r.width = 640;
        r.height = 480;
        r.alt_text = captions[i % std::size(captions)];
        images.push_back(std::move(r));
    }
    return CorpusView::build(std::move(images), {});
}

SentimentLexicon bench_lexicon() {
    SentimentLexicon lex;
    lex.valence = {{"happy", 2.7}, {"good", 1.9}, {"great", 3.1},
                   {"sad", -2.1},  {"bad", -2.5}, {"lonely", -1.5},
                   {"funny", 1.9}};
    lex.boosters = {{"very", 0.293}, {"kind of", -0.293}};
    lex.negations = {"not"};
    return lex;
}

EmbeddingMatrix random_embeddings(std::int64_t rows, int dim) {
    EmbeddingMatrix m;
    m.rows = rows;
    m.dim = dim;
    m.data.resize(static_cast<std::size_t>(rows) * dim);
    std::mt19937_64 rng(11);
    std::normal_distribution<float> g(0.0f, 1.0f);
    for (auto& v : m.data) v = g(rng);
    return m;
}

void bench_index_build(benchmark::State& state) {
    auto docs = synthetic_docs(20000);
    auto dict = tiny_dict();
    int threads = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto index = build_index(docs, dict, threads);
        benchmark::DoNotOptimize(index.doc_count());
    }
}

void bench_score_captions(benchmark::State& state) {
    auto corpus = sentiment_corpus(20000);
    auto lex = bench_lexicon();
    int threads = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto scores = score_captions(corpus, lex, threads);
        benchmark::DoNotOptimize(scores.data());
    }
}

void bench_forward_backward(benchmark::State& state) {
    constexpr int d = 64;
    auto data = random_embeddings(512, d);
    SAEConfig cfg;
    cfg.expansion = 8;
    cfg.k = 16;
    auto model = SAEModel::init(d, d * cfg.expansion, 3);
    std::span<const float> X(data.data);
    int threads = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto g = forward_backward(model, X, 512, cfg, threads);
        benchmark::DoNotOptimize(g.loss);
    }
}

void bench_pmi(benchmark::State& state) {
    constexpr int features = 1024, topics = 64, identities = 14;
    ActivationCounts counts;
    for (int i = 0; i < identities; ++i)
        counts.identity_names.push_back("g" + std::to_string(i));
    counts.features = features;
    counts.counts.resize(static_cast<std::size_t>(identities) * features);
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> c(0, 40);
    for (auto& v : counts.counts) v = c(rng);
    counts.feature_totals.assign(features, 0);
    for (int i = 0; i < identities; ++i)
        for (int f = 0; f < features; ++f)
            counts.feature_totals[f] += counts.at(i, f);

    FeatureTopicDist dist;
    dist.topics = topics;
    std::uniform_int_distribution<int> t(0, topics - 1);
    for (int f = 0; f < features; ++f) {
        std::vector<std::pair<int, double>> row = {{t(rng), 0.5}, {t(rng), 0.5}};
        if (row[0].first == row[1].first) row = {{row[0].first, 1.0}};
        dist.rows.push_back(std::move(row));
    }

    int threads = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto r = pmi(counts, dist, 1e-12, threads);
        benchmark::DoNotOptimize(r.values.data());
    }
}

}  // namespace

BENCHMARK(bench_index_build)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(bench_score_captions)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(bench_forward_backward)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(bench_pmi)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
