// Acceptance gate: one pass/fail line per criterion, exit 0 iff all pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dsaudit/consensus.hpp"
#include "dsaudit/corpus.hpp"
#include "dsaudit/sae.hpp"
#include "dsaudit/sentiment.hpp"
#include "dsaudit/stats.hpp"
#include "dsaudit/textindex.hpp"
#include "dsaudit/topics.hpp"
#include "dsaudit/transfer.hpp"
#include "dsaudit/vader.hpp"

namespace fs = std::filesystem;
using namespace dsaudit;
using clk = std::chrono::steady_clock;

namespace {

double seconds_since(clk::time_point t0) {
    return std::chrono::duration<double>(clk::now() - t0).count();
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

// ---- 1: agreement ----------------------------------------------------------

bool criterion_agreement() {
    auto t0 = clk::now();
    Labeling a{"a", {}}, b{"b", {}};
    // 2x2 table: counts m/m=4, m/f=1, f/m=1, f/f=4 over 10 items.
    int item = 0;
    auto add = [&](const std::string& la, const std::string& lb, int n) {
        for (int i = 0; i < n; ++i) {
            std::string id = "i" + std::to_string(item++);
            a.labels[id] = la;
            b.labels[id] = lb;
        }
    };
    add("m", "m", 4);
    add("m", "f", 1);
    add("f", "m", 1);
    add("f", "f", 4);
    // p_o = 0.8, p_e = 0.5 -> kappa = 0.6 exactly.
    if (!near(cohen_kappa(a, b), 0.6, 1e-12)) return false;
    if (!near(cohen_kappa(a, a), 1.0, 0.0)) return false;

    // Rows (2,0),(1,1),(0,2) with 2 raters: Pbar = 2/3, Pe = 1/2 -> 1/3.
    std::vector<std::vector<int>> rows{{2, 0}, {1, 1}, {0, 2}};
    if (!near(fleiss_kappa(rows, 2), 1.0 / 3.0, 1e-12)) return false;

    // Label "x" on {1,2} vs {2,3} -> 1/3 exactly.
    Labeling ja{"a", {{"1", "x"}, {"2", "x"}, {"3", "y"}}};
    Labeling jb{"b", {{"1", "y"}, {"2", "x"}, {"3", "x"}}};
    if (jaccard_per_label(ja, jb, "x") != 1.0 / 3.0) return false;
    return seconds_since(t0) < 1.0;
}

// ---- 2: sentiment ----------------------------------------------------------

bool criterion_sentiment() {
    auto t0 = clk::now();
    std::string vdir = std::string(DATA_DIR) + "/vader";
    auto lex = SentimentLexicon::load(vdir + "/lexicon.txt", vdir + "/boosters.tsv",
                                      vdir + "/negations.txt", vdir + "/idioms.tsv");
    if (vader_compound("", lex) != 0.0) return false;

    std::ifstream fixture(std::string(FIXTURE_DIR) + "/vader_fixture.tsv");
    if (!fixture) return false;
    std::string line;
    std::size_t checked = 0;
    while (std::getline(fixture, line)) {
        if (line.empty()) continue;
        auto tab = line.rfind('\t');
        double expected = std::stod(line.substr(tab + 1));
        if (!near(vader_compound(line.substr(0, tab), lex), expected, 1e-9))
            return false;
        ++checked;
    }
    return checked >= 100 && seconds_since(t0) < 1.0;
}

// ---- 3: delta closed form --------------------------------------------------

struct SyntheticCorpus {
    CorpusView corpus;
    InvertedIndex index;
    LemmaDictionary dict;
};

SyntheticCorpus programmed_corpus(int male_total, int female_total, int male_hits,
                                  int female_hits) {
    std::vector<ImageRecord> images;
    std::vector<PersonBox> boxes;
    int id = 0;
    auto add = [&](Gender g, bool with_keyword, int n) {
        for (int i = 0; i < n; ++i) {
            ImageRecord img;
            img.image_id = "s" + std::to_string(id++);
            img.width = 100;
            img.height = 100;
            img.alt_text = with_keyword ? "alpha scene" : "beta scene";
            PersonBox box;
            box.image_id = img.image_id;
            box.w = box.h = 50;
            box.confidence = 0.9;
            box.gender = g;
            images.push_back(std::move(img));
            boxes.push_back(std::move(box));
        }
    };
    add(Gender::Male, true, male_hits);
    add(Gender::Male, false, male_total - male_hits);
    add(Gender::Female, true, female_hits);
    add(Gender::Female, false, female_total - female_hits);

    SyntheticCorpus out;
    out.corpus = CorpusView::build(std::move(images), std::move(boxes));
    aggregate_image_labels(out.corpus);
    std::vector<std::pair<std::string, std::string>> docs;
    for (const auto& img : out.corpus.images)
        docs.emplace_back(img.image_id, img.alt_text);
    out.index = build_index(docs, out.dict);
    return out;
}

bool criterion_delta() {
    struct Case {
        int mt, ft, mh, fh;
    };
    for (const Case c : {Case{64, 64, 48, 16}, Case{96, 32, 24, 24},
                         Case{50, 150, 10, 30}}) {
        auto syn = programmed_corpus(c.mt, c.ft, c.mh, c.fh);
        KeywordSet kw;
        kw.queries.push_back(make_query("alpha", syn.dict));
        auto entries = relative_change(syn.corpus, syn.index, kw, Attribute::Gender);
        double base_m = double(c.mt) / (c.mt + c.ft);
        double base_f = double(c.ft) / (c.mt + c.ft);
        double sub_m = double(c.mh) / (c.mh + c.fh);
        double sub_f = double(c.fh) / (c.mh + c.fh);
        for (const auto& e : entries) {
            double expect = e.category == "male" ? sub_m / base_m - 1.0
                                                 : sub_f / base_f - 1.0;
            if (e.category != "male" && e.category != "female") continue;
            if (!e.defined || !near(e.delta, expect, 1e-12)) return false;
        }

        // Every caption matches the full vocabulary, so the subset is the
        // whole corpus and delta vanishes identically.
        KeywordSet full;
        full.queries.push_back(make_query("alpha", syn.dict));
        full.queries.push_back(make_query("beta", syn.dict));
        full.queries.push_back(make_query("scene", syn.dict));
        for (const auto& e :
             relative_change(syn.corpus, syn.index, full, Attribute::Gender))
            if (e.delta != 0.0) return false;
    }
    return true;
}

// ---- 4: index equivalence --------------------------------------------------

bool criterion_index() {
    auto t0 = clk::now();
    const char* words[] = {"red", "blue", "fast", "car", "dog", "park", "night",
                           "rain", "summer", "crowd", "boat", "river"};
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<std::size_t> pick(0, std::size(words) - 1);
    std::uniform_int_distribution<int> len(3, 12);
    std::vector<std::pair<std::string, std::string>> docs;
    for (int i = 0; i < 10000; ++i) {
        std::string text;
        for (int w = 0, m = len(rng); w < m; ++w) {
            if (w) text += ' ';
            text += words[pick(rng)];
        }
        docs.emplace_back("d" + std::to_string(i), std::move(text));
    }
    LemmaDictionary dict;
    auto index = build_index(docs, dict, 4);
    std::uniform_int_distribution<int> qlen(1, 3);
    for (int q = 0; q < 100; ++q) {
        std::string phrase;
        for (int w = 0, m = qlen(rng); w < m; ++w) {
            if (w) phrase += ' ';
            phrase += words[pick(rng)];
        }
        auto kq = make_query(phrase, dict);
        if (query(index, kq) != query_scan(docs, dict, kq)) return false;
    }
    return seconds_since(t0) < 5.0;
}

// ---- 5: SAE ----------------------------------------------------------------

bool criterion_sae() {
    auto t0 = clk::now();
    std::mt19937_64 rng(2024);
    std::normal_distribution<float> g(0.0f, 1.0f);

    // Top-K support cardinality on random inputs.
    auto model = SAEModel::init(6, 24, 3);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<float> x(6);
        for (auto& v : x) v = g(rng);
        for (int k : {1, 3, 24}) {
            auto z = encode<float>(model, x, k);
            int nz = 0, pos = 0;
            std::vector<float> pre(24, 0.0f);
            for (int j = 0; j < 24; ++j) {
                double p = model.enc_b[j];
                for (int i = 0; i < 6; ++i)
                    p += model.enc_w[j * 6 + i] * (x[i] - model.dec_b[i]);
                if (p > 0) ++pos;
            }
            for (float v : z)
                if (v != 0) ++nz;
            if (nz != std::min(k, pos)) return false;
        }
    }

    // Batch-Top-K with B = 1 equals Top-K elementwise.
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<float> x(6);
        for (auto& v : x) v = g(rng);
        SAEConfig ck;
        ck.k = 4;
        ck.variant = SAEVariant::TopK;
        auto zt = encode_batch<float>(model, x, 1, ck);
        ck.variant = SAEVariant::BatchTopK;
        auto zb = encode_batch<float>(model, x, 1, ck);
        if (zt != zb) return false;
    }

    // Analytic vs central finite-difference gradients on a 64-bit model.
    {
        auto wide = widen(SAEModel::init(4, 8, 7));
        std::mt19937_64 jrng(3);
        std::normal_distribution<double> jitter(0.0, 0.01);
        for (auto& v : wide.enc_b) v = jitter(jrng);
        for (auto& v : wide.dec_b) v = jitter(jrng);
        const std::size_t B = 6;
        std::vector<double> Xv(B * 4);
        for (auto& v : Xv) v = jitter(jrng) * 40.0;
        std::span<const double> X(Xv);
        SAEConfig cfg;
        cfg.k = 3;
        for (auto variant : {SAEVariant::TopK, SAEVariant::BatchTopK}) {
            cfg.variant = variant;
            auto grad = forward_backward(wide, X, B, cfg);
            auto check = [&](std::vector<double>& param, std::vector<double>& analytic) {
                for (std::size_t p = 0; p < param.size(); ++p) {
                    const double h = 1e-6;
                    double keep = param[p];
                    param[p] = keep + h;
                    double up = reconstruction_loss(wide, X, B, cfg);
                    param[p] = keep - h;
                    double down = reconstruction_loss(wide, X, B, cfg);
                    param[p] = keep;
                    double fd = (up - down) / (2 * h);
                    double denom = std::max({std::abs(fd), std::abs(analytic[p]), 1.0});
                    if (std::abs(fd - analytic[p]) / denom >= 1e-4) return false;
                }
                return true;
            };
            if (!check(wide.enc_w, grad.enc_w)) return false;
            if (!check(wide.enc_b, grad.enc_b)) return false;
            if (!check(wide.dec_w, grad.dec_w)) return false;
            if (!check(wide.dec_b, grad.dec_b)) return false;
        }
    }

    // Frozen-seed training on rank-2 synthetic data.
    {
        EmbeddingMatrix data;
        data.rows = 512;
        data.dim = 8;
        std::vector<float> u(8), v(8);
        for (auto& x : u) x = g(rng);
        for (auto& x : v) x = g(rng);
        for (int r = 0; r < 512; ++r) {
            float a = g(rng), b = g(rng);
            for (int i = 0; i < 8; ++i) data.data.push_back(a * u[i] + b * v[i]);
        }
        SAEConfig cfg;
        cfg.expansion = 4;
        cfg.k = 4;
        cfg.batch_size = 64;
        cfg.epochs = 12;
        cfg.seed = 5;
        cfg.learning_rate = 3e-3;
        auto result = train(data, cfg, 2);
        if (result.epoch_loss.back() >= 0.1 * result.epoch_loss.front()) return false;
    }
    return seconds_since(t0) < 30.0;
}

// ---- 6: PMI ----------------------------------------------------------------

bool criterion_pmi() {
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> count(0, 25);
    for (int identities = 1; identities <= 4; ++identities) {
        for (int features = 1; features <= 6; ++features) {
            for (int topics = 1; topics <= 8; ++topics) {
                ActivationCounts counts;
                for (int i = 0; i < identities; ++i)
                    counts.identity_names.push_back("id" + std::to_string(i));
                counts.features = features;
                counts.counts.resize(std::size_t(identities) * features);
                for (auto& c : counts.counts) c = count(rng);
                if (std::accumulate(counts.counts.begin(), counts.counts.end(),
                                    std::int64_t{0}) == 0)
                    counts.counts[0] = 1;
                counts.feature_totals.assign(features, 0);
                for (int i = 0; i < identities; ++i)
                    for (int f = 0; f < features; ++f)
                        counts.feature_totals[f] += counts.at(i, f);

                FeatureTopicDist dist;
                dist.topics = topics;
                std::uniform_int_distribution<int> t(0, topics - 1);
                for (int f = 0; f < features; ++f) {
                    int t1 = t(rng), t2 = t(rng);
                    if (t1 == t2)
                        dist.rows.push_back({{t1, 1.0}});
                    else
                        dist.rows.push_back({{std::min(t1, t2), 0.25},
                                             {std::max(t1, t2), 0.75}});
                }

                auto fast = pmi(counts, dist, 1e-12, 4);
                auto slow = pmi_reference(counts, dist);
                for (std::size_t k = 0; k < fast.values.size(); ++k)
                    if (!near(fast.values[k], slow.values[k], 1e-10)) return false;

                // The joint distribution the marginalization induces must sum
                // to one.
                double total = 0;
                for (const auto& c : counts.counts) total += double(c);
                double joint_sum = 0.0;
                for (int i = 0; i < identities; ++i)
                    for (int f = 0; f < features; ++f)
                        for (const auto& [topic, w] : dist.rows[f])
                            joint_sum += double(counts.at(i, f)) / total * w;
                if (!near(joint_sum, 1.0, 1e-10)) return false;

                // Uniform identity-conditionals: every identity row identical.
                ActivationCounts uni = counts;
                for (int i = 0; i < identities; ++i)
                    for (int f = 0; f < features; ++f)
                        uni.counts[std::size_t(i) * features + f] = 3 + f;
                uni.feature_totals.assign(features, 0);
                for (int i = 0; i < identities; ++i)
                    for (int f = 0; f < features; ++f)
                        uni.feature_totals[f] += uni.at(i, f);
                std::vector<bool> covered(std::size_t(topics), false);
                for (const auto& row : dist.rows)
                    for (const auto& [topic, w] : row)
                        if (w > 0) covered[std::size_t(topic)] = true;
                auto uniform = pmi(uni, dist);
                for (int i = 0; i < identities; ++i)
                    for (int tt = 0; tt < topics; ++tt)
                        if (covered[std::size_t(tt)] &&
                            std::abs(uniform.at(std::size_t(i), std::size_t(tt))) >=
                                1e-10)
                            return false;
            }
        }
    }
    return true;
}

// ---- 7: transfer -----------------------------------------------------------

bool criterion_transfer() {
    std::vector<double> f{0.3, 0.5}, m{0.2, 0.4};
    auto d = model_bias(f, m);
    if (!d.defined || !near(d.d, 0.894, 1e-3)) return false;

    // Affine invariance: shared positive scale and shift leave d unchanged.
    std::vector<double> f2, m2;
    for (double v : f) f2.push_back(2.5 * v + 0.125);
    for (double v : m) m2.push_back(2.5 * v + 0.125);
    if (!near(model_bias(f2, m2).d, d.d, 1e-12)) return false;
    if (!near(model_bias(m, f).d, -d.d, 1e-12)) return false;

    // 500 seeded points vs the normal-equations oracle.
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> ux(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, 0.3);
    std::vector<BiasPoint> pts;
    for (int i = 0; i < 500; ++i) {
        double x = ux(rng);
        pts.push_back({"c" + std::to_string(i), x, 1.7 * (x - 0.5) + noise(rng)});
    }
    auto r = fit(pts);
    double sx = 0, sy = 0;
    for (const auto& p : pts) {
        sx += p.dataset_bias;
        sy += p.model_bias;
    }
    double mx = sx / pts.size(), my = sy / pts.size();
    double sxx = 0, sxy = 0, syy = 0;
    for (const auto& p : pts) {
        sxx += (p.dataset_bias - mx) * (p.dataset_bias - mx);
        sxy += (p.dataset_bias - mx) * (p.model_bias - my);
        syy += (p.model_bias - my) * (p.model_bias - my);
    }
    double slope = sxy / sxx;
    double intercept = my - slope * mx;
    double rho = sxy / std::sqrt(sxx * syy);
    if (!near(r.slope, slope, 1e-9)) return false;
    if (!near(r.intercept, intercept, 1e-9)) return false;
    if (!near(r.rho, rho, 1e-9)) return false;
    return near(r.r_squared, r.rho * r.rho, 1e-12);
}

// ---- 8: recall -------------------------------------------------------------

bool criterion_recall() {
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> pos(0.0, 400.0), size(5.0, 80.0),
        conf(0.05, 1.0), shift(-20.0, 20.0);
    std::vector<DetBox> gt, pred;
    for (int i = 0; i < 100; ++i) {
        DetBox g{pos(rng), pos(rng), size(rng), size(rng), 1.0};
        gt.push_back(g);
        if (i % 7 != 0)  // some gt boxes go undetected
            pred.push_back({g.x + shift(rng), g.y + shift(rng), g.w, g.h, conf(rng)});
    }
    for (int i = 0; i < 15; ++i)  // spurious predictions
        pred.push_back({pos(rng), pos(rng), size(rng), size(rng), conf(rng)});

    auto cfg = GtMatchConfig::coco_grid();
    auto result = detection_recall(pred, gt, cfg);

    // Independent greedy trace.
    std::vector<std::size_t> order(pred.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return pred[a].confidence > pred[b].confidence;
    });
    for (std::size_t ti = 0; ti < cfg.thresholds.size(); ++ti) {
        std::vector<bool> used(gt.size(), false);
        std::size_t hits = 0;
        for (std::size_t p : order) {
            double best = 0.0;
            std::size_t arg = gt.size();
            for (std::size_t g = 0; g < gt.size(); ++g) {
                if (used[g]) continue;
                double v = iou(pred[p], gt[g]);
                if (v > best) {
                    best = v;
                    arg = g;
                }
            }
            if (arg < gt.size() && best >= cfg.thresholds[ti]) {
                used[arg] = true;
                ++hits;
            }
        }
        if (result.recall[ti] != double(hits) / double(gt.size())) return false;
        if (ti > 0 && result.recall[ti] > result.recall[ti - 1]) return false;
    }
    return true;
}

// ---- 9: HCR ----------------------------------------------------------------

bool criterion_hcr() {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    HateScores scores;
    for (int i = 0; i < 500; ++i) {
        scores.ids.push_back("h" + std::to_string(i));
        scores.scores.push_back({u(rng), u(rng), u(rng)});
    }
    for (int type = 0; type < 3; ++type) {
        double prev = 101.0;
        for (double tau : {0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0}) {
            double got = hcr(scores, static_cast<HateType>(type), tau);
            std::int64_t direct = 0;
            for (const auto& row : scores.scores)
                if (row[std::size_t(type)] > tau) ++direct;
            if (got != 100.0 * double(direct) / double(scores.scores.size()))
                return false;
            if (got > prev) return false;
            prev = got;
        }
    }
    return true;
}

// ---- 10: end-to-end --------------------------------------------------------

int run_cli(const std::string& args) {
    std::string cmd = std::string(CLI_PATH) + " " + args + " >/dev/null 2>&1";
    return std::system(cmd.c_str());
}

bool run_pipeline(const std::string& config, const std::string& out_dir, int threads) {
    std::string base = "--config " + config + " --set out_dir=" + out_dir +
                       " --set threads=" + std::to_string(threads) + " ";
    for (const char* step :
         {"ingest", "index", "agree", "audit-composition", "audit-crime",
          "audit-geo", "audit-sentiment", "hcr", "sae-train", "sae-stats",
          "topics-pmi", "transfer-bias", "transfer-fit", "report"}) {
        if (run_cli(step + (" " + base)) != 0) {
            std::fprintf(stderr, "pipeline step failed: %s\n", step);
            return false;
        }
    }
    return true;
}

bool criterion_end_to_end() {
    auto t0 = clk::now();
    std::string fix = FIXTURE_DIR;
    std::string work = "/tmp/dsaudit_accept";
    fs::remove_all(work);
    fs::create_directories(work);

    std::string config = work + "/pipeline.conf";
    {
        std::ofstream out(config);
        out << "data_dir=" << DATA_DIR << "\n"
            << "images=" << fix << "/images_1k.jsonl\n"
            << "boxes=" << fix << "/boxes_1k.jsonl\n"
            << "labels=" << fix << "/labels.jsonl\n"
            << "hate_scores=" << fix << "/hate_scores.jsonl\n"
            << "embeddings=" << fix << "/emb_1k.json\n"
            << "topics_csv=" << fix << "/topics.csv\n"
            << "topics_emb=" << fix << "/topics_emb.json\n"
            << "categories=" << fix << "/categories.csv\n"
            << "wordnet_lemmas=" << fix << "/wordnet_lemmas.txt\n"
            << "category_embeddings=" << fix << "/cat_emb.json\n"
            << "female_embeddings=" << fix << "/female_emb.json\n"
            << "male_embeddings=" << fix << "/male_emb.json\n"
            << "min_count=5\n"
            << "sae_expansion=4\n"
            << "sae_k=8\n"
            << "sae_epochs=3\n"
            << "seed=11\n";
    }

    std::string out_a = work + "/run_a", out_b = work + "/run_b";
    if (!run_pipeline(config, out_a, 1)) return false;
    if (!run_pipeline(config, out_b, 8)) return false;

    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(out_a)) {
        auto name = entry.path().filename().string();
        if (name.ends_with(".manifest.json")) continue;  // carries wall time
        names.push_back(name);
    }
    std::sort(names.begin(), names.end());
    if (names.empty()) return false;
    for (const auto& name : names) {
        if (!fs::exists(out_b + "/" + name)) return false;
        if (read_file(out_a + "/" + name) != read_file(out_b + "/" + name)) {
            std::fprintf(stderr, "determinism mismatch: %s\n", name.c_str());
            return false;
        }
    }
    return seconds_since(t0) < 60.0;
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        bool (*fn)();
    };
    const Criterion criteria[] = {
        {"1 agreement oracle", criterion_agreement},
        {"2 sentiment oracle", criterion_sentiment},
        {"3 delta closed form", criterion_delta},
        {"4 index equivalence", criterion_index},
        {"5 sae checks", criterion_sae},
        {"6 pmi oracle", criterion_pmi},
        {"7 transfer", criterion_transfer},
        {"8 recall", criterion_recall},
        {"9 hcr", criterion_hcr},
        {"10 end-to-end determinism", criterion_end_to_end},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        bool ok = false;
        try {
            ok = c.fn();
        } catch (const std::exception& e) {
            std::fprintf(stderr, "criterion %s threw: %s\n", c.name, e.what());
        }
        std::printf("criterion %s: %s\n", c.name, ok ? "PASS" : "FAIL");
        if (!ok) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
