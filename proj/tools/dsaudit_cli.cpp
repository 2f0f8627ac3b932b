// Pipeline driver: every stage is a subcommand reading a shared key=value
// config file, emitting CSV/JSON reports plus a run manifest per invocation.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dsaudit/consensus.hpp"
#include "dsaudit/corpus.hpp"
#include "dsaudit/report.hpp"
#include "dsaudit/sae.hpp"
#include "dsaudit/sentiment.hpp"
#include "dsaudit/stats.hpp"
#include "dsaudit/textindex.hpp"
#include "dsaudit/topics.hpp"
#include "dsaudit/transfer.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace dsaudit;

namespace {

struct Config {
    std::map<std::string, std::string> kv;

    bool has(const std::string& key) const { return kv.contains(key); }

    std::string get(const std::string& key, const std::string& fallback = "") const {
        auto it = kv.find(key);
        return it == kv.end() ? fallback : it->second;
    }

    std::string require(const std::string& key) const {
        auto it = kv.find(key);
        if (it == kv.end() || it->second.empty())
            throw ValidationError("missing required config key: " + key);
        return it->second;
    }

    double number(const std::string& key, double fallback) const {
        auto it = kv.find(key);
        if (it == kv.end()) return fallback;
        try {
            return std::stod(it->second);
        } catch (const std::exception&) {
            throw ValidationError("config key is not a number: " + key);
        }
    }

    std::int64_t integer(const std::string& key, std::int64_t fallback) const {
        auto it = kv.find(key);
        if (it == kv.end()) return fallback;
        try {
            return std::stoll(it->second);
        } catch (const std::exception&) {
            throw ValidationError("config key is not an integer: " + key);
        }
    }
};

void load_config_file(Config& cfg, const std::string& path) {
    for (const auto& raw : read_lines(path)) {
        std::string line = raw;
        if (auto h = line.find('#'); h != std::string::npos) line = line.substr(0, h);
        auto strip = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        line = strip(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config line without '=': " + raw);
        cfg.kv[strip(line.substr(0, eq))] = strip(line.substr(eq + 1));
    }
}

// Execution-environment keys are excluded so the hash identifies the analysis
// itself; reports stay byte-identical across thread counts and output dirs.
std::string config_hash(const std::string& subcommand, const Config& cfg) {
    std::string canon = subcommand;
    for (const auto& [k, v] : cfg.kv) {
        if (k == "threads" || k == "out_dir") continue;
        canon += '\n' + k + '=' + v;
    }
    return to_hex(fnv1a64(canon));
}

std::string data_path(const Config& cfg, const std::string& name) {
    return cfg.get("data_dir") + "/" + name;
}

std::string out_path(const Config& cfg, const std::string& name) {
    std::string dir = cfg.get("out_dir", "out");
    fs::create_directories(dir);
    return dir + "/" + name;
}

int threads_of(const Config& cfg) {
    return static_cast<int>(cfg.integer("threads", 1));
}

LemmaDictionary dictionary(const Config& cfg) {
    return LemmaDictionary::load(cfg.get("lemmas", data_path(cfg, "lemmas.tsv")),
                                 cfg.get("stopwords", data_path(cfg, "stopwords.txt")));
}

CorpusView load_corpus(const Config& cfg, json& stats, bool aggregate = true) {
    LoadOptions opts;
    opts.skip_bad = cfg.integer("skip_bad", 0) != 0;
    opts.min_confidence = cfg.number("min_conf", 0.25);
    auto images = load_images(cfg.require("images"), opts);
    auto boxes = load_boxes(cfg.require("boxes"), images.records, opts);
    auto kept = filter_boxes(boxes.boxes, static_cast<int>(cfg.integer("min_side", 30)),
                             cfg.number("min_conf", 0.25));
    stats["images_accepted"] = images.report.accepted;
    stats["images_rejected"] = images.report.rejected;
    stats["boxes_accepted"] = boxes.report.accepted;
    stats["boxes_rejected"] = boxes.report.rejected;
    stats["boxes_kept"] = kept.size();
    auto corpus = CorpusView::build(std::move(images.records), std::move(kept));
    if (aggregate) aggregate_image_labels(corpus, threads_of(cfg));
    return corpus;
}

std::vector<std::pair<std::string, std::string>> caption_docs(const CorpusView& corpus) {
    std::vector<std::pair<std::string, std::string>> docs;
    docs.reserve(corpus.images.size());
    for (const auto& img : corpus.images) docs.emplace_back(img.image_id, img.alt_text);
    return docs;
}

// ---- subcommands ------------------------------------------------------------

json run_ingest(const Config& cfg, const std::string& hash) {
    json stats;
    auto corpus = load_corpus(cfg, stats);
    write_images(out_path(cfg, "images_clean.jsonl"), corpus.images);
    write_boxes(out_path(cfg, "boxes_clean.jsonl"), corpus.boxes);

    auto gender = composition(corpus, Attribute::Gender, Level::Image);
    json summary{{"images", corpus.images.size()},
                 {"boxes", corpus.boxes.size()},
                 {"image_gender_counts", gender.counts}};
    write_json_report(out_path(cfg, "ingest.summary.json"), hash, summary);
    stats["images"] = corpus.images.size();
    stats["boxes"] = corpus.boxes.size();
    return stats;
}

json run_index(const Config& cfg, const std::string& hash) {
    json stats;
    auto corpus = load_corpus(cfg, stats, /*aggregate=*/false);
    auto dict = dictionary(cfg);
    auto index = build_index(caption_docs(corpus), dict, threads_of(cfg));
    index.save(cfg.get("index", out_path(cfg, "corpus.idx")));
    write_json_report(out_path(cfg, "index.summary.json"), hash,
                      json{{"documents", index.doc_count()},
                           {"lemmas", index.postings.size()}});
    stats["documents"] = index.doc_count();
    stats["lemmas"] = index.postings.size();
    return stats;
}

std::vector<Labeling> load_labelings(const std::string& path) {
    std::map<std::string, Labeling> by_annotator;
    for (const auto& line : read_lines(path)) {
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) throw DataError("malformed labeling line: " + line);
        auto who = j.at("annotator").get<std::string>();
        auto& l = by_annotator[who];
        l.annotator = who;
        l.labels[j.at("item_id").get<std::string>()] = j.at("label").get<std::string>();
    }
    std::vector<Labeling> out;
    for (auto& [who, l] : by_annotator) out.push_back(std::move(l));
    if (out.size() < 2) throw DataError("agreement needs >= 2 annotators: " + path);
    return out;
}

json run_agree(const Config& cfg, const std::string& hash) {
    auto labelings = load_labelings(cfg.require("labels"));

    std::set<std::string> label_set;
    const auto& items = labelings.front().labels;
    for (const auto& l : labelings)
        for (const auto& [item, label] : l.labels) label_set.insert(label);

    std::vector<std::vector<std::string>> rows;
    for (std::size_t a = 0; a < labelings.size(); ++a) {
        for (std::size_t b = a + 1; b < labelings.size(); ++b) {
            rows.push_back({"cohen_kappa", labelings[a].annotator,
                            labelings[b].annotator, "",
                            format_double(cohen_kappa(labelings[a], labelings[b]))});
            for (const auto& label : label_set)
                rows.push_back(
                    {"jaccard", labelings[a].annotator, labelings[b].annotator, label,
                     format_double(jaccard_per_label(labelings[a], labelings[b], label))});
        }
    }

    // Fleiss over the items every annotator labeled.
    std::vector<std::string> labels(label_set.begin(), label_set.end());
    std::vector<std::vector<int>> counts;
    for (const auto& [item, first_label] : items) {
        std::vector<int> row(labels.size(), 0);
        bool complete = true;
        for (const auto& l : labelings) {
            auto it = l.labels.find(item);
            if (it == l.labels.end()) {
                complete = false;
                break;
            }
            row[static_cast<std::size_t>(
                std::find(labels.begin(), labels.end(), it->second) - labels.begin())] += 1;
        }
        if (complete) counts.push_back(std::move(row));
    }
    if (!counts.empty())
        rows.push_back({"fleiss_kappa", "", "", "",
                        format_double(fleiss_kappa(counts, static_cast<int>(labelings.size())))});

    ConsensusPolicy policy;
    auto mode = cfg.get("consensus", "unanimous");
    if (mode == "unanimous") {
        policy.mode = ConsensusMode::Unanimous;
    } else if (mode == "k_of_n") {
        policy.mode = ConsensusMode::KOfN;
        policy.k = static_cast<int>(cfg.integer("consensus_k", 2));
    } else {
        throw ValidationError("unknown consensus mode: " + mode);
    }
    auto consensus = consensus_filter(labelings, policy);
    std::vector<std::vector<std::string>> assigned;
    for (const auto& [item, label] : consensus.assigned) assigned.push_back({item, label});

    write_csv_report(out_path(cfg, "agreement.csv"), hash,
                     "metric,annotator_a,annotator_b,label,value", rows);
    write_csv_report(out_path(cfg, "consensus.csv"), hash, "item_id,label", assigned);
    return json{{"annotators", labelings.size()},
                {"consensus_assigned", consensus.assigned.size()},
                {"consensus_dropped", consensus.dropped},
                {"consensus_ties", consensus.ties}};
}

json run_audit_composition(const Config& cfg, const std::string& hash) {
    json stats;
    auto corpus = load_corpus(cfg, stats);
    std::vector<std::vector<std::string>> rows;
    for (auto level : {Level::Box, Level::Image}) {
        for (auto attr : {Attribute::Gender, Attribute::Race}) {
            auto dist = composition(corpus, attr, level);
            for (const auto& [category, count] : dist.counts)
                rows.push_back({level == Level::Box ? "box" : "image",
                                attr == Attribute::Gender ? "gender" : "race", category,
                                std::to_string(count), format_double(dist.share(category))});
        }
    }
    write_csv_report(out_path(cfg, "composition.csv"), hash,
                     "level,attribute,category,count,share", rows);

    auto bstats = box_stats(corpus);
    std::vector<std::vector<std::string>> hist;
    for (std::size_t b = 0; b < bstats.area_ratio_bins.size(); ++b)
        hist.push_back({"area_ratio_bin", std::to_string(b),
                        std::to_string(bstats.area_ratio_bins[b])});
    for (const auto& [n, images] : bstats.boxes_per_image)
        hist.push_back({"boxes_per_image", std::to_string(n), std::to_string(images)});
    write_csv_report(out_path(cfg, "box_stats.csv"), hash, "metric,bucket,count", hist);
    stats["max_boxes_per_image"] = bstats.max_boxes;
    return stats;
}

json run_audit_crime(const Config& cfg, const std::string& hash) {
    json stats;
    auto corpus = load_corpus(cfg, stats);
    auto dict = dictionary(cfg);
    auto index = InvertedIndex::load(cfg.get("index", out_path(cfg, "corpus.idx")));
    auto keywords =
        KeywordSet::load(cfg.get("keywords", data_path(cfg, "crime_keywords.txt")), dict);

    std::vector<std::vector<std::string>> rows;
    for (auto level : {Level::Image, Level::Box}) {
        for (auto attr : {Attribute::Gender, Attribute::Race}) {
            for (const auto& e : relative_change(corpus, index, keywords, attr, level))
                rows.push_back({level == Level::Box ? "box" : "image",
                                attr == Attribute::Gender ? "gender" : "race", e.category,
                                format_double(e.baseline_share),
                                format_double(e.subset_share), format_double(e.delta),
                                std::to_string(e.subset_count), e.defined ? "1" : "0"});
        }
    }
    write_csv_report(out_path(cfg, "crime_delta.csv"), hash,
                     "level,attribute,category,baseline_share,subset_share,delta,"
                     "subset_count,defined",
                     rows);
    stats["keywords"] = keywords.queries.size();
    return stats;
}

json run_audit_geo(const Config& cfg, const std::string& hash) {
    json stats;
    auto corpus = load_corpus(cfg, stats);
    auto dict = dictionary(cfg);
    auto index = InvertedIndex::load(cfg.get("index", out_path(cfg, "corpus.idx")));
    auto countries =
        CountrySet::load(cfg.get("countries", data_path(cfg, "countries.tsv")), dict);
    std::vector<std::vector<std::string>> rows;
    for (const auto& m : country_mentions(corpus, index, countries))
        rows.push_back({m.country, std::to_string(m.total_images),
                        std::to_string(m.images_with_person)});
    write_csv_report(out_path(cfg, "geo.csv"), hash,
                     "country,total_images,images_with_person", rows);
    stats["countries"] = countries.countries.size();
    return stats;
}

json run_audit_sentiment(const Config& cfg, const std::string& hash) {
    json stats;
    auto corpus = load_corpus(cfg, stats);
    std::vector<double> scores;
    std::string cache = cfg.get("score_cache");
    if (!cache.empty() && fs::exists(cache)) {
        scores = read_score_cache(cache, corpus);
        stats["scores"] = "cached";
    } else {
        std::string vdir = cfg.get("vader_dir", data_path(cfg, "vader"));
        auto lexicon =
            SentimentLexicon::load(vdir + "/lexicon.txt", vdir + "/boosters.tsv",
                                   vdir + "/negations.txt", vdir + "/idioms.tsv");
        scores = score_captions(corpus, lexicon, threads_of(cfg));
        write_score_cache(cache.empty() ? out_path(cfg, "scores.jsonl") : cache, corpus,
                          scores);
        stats["scores"] = "computed";
    }
    std::vector<std::vector<std::string>> rows;
    for (auto attr : {Attribute::Gender, Attribute::Race}) {
        for (const auto& e : group_sentiment(corpus, scores, attr))
            rows.push_back({attr == Attribute::Gender ? "gender" : "race", e.group,
                            format_double(e.negative_ratio),
                            format_double(e.mean_compound), std::to_string(e.counted),
                            e.defined ? "1" : "0"});
    }
    write_csv_report(out_path(cfg, "sentiment.csv"), hash,
                     "attribute,group,negative_ratio,mean_compound,counted,defined",
                     rows);
    return stats;
}

json run_hcr(const Config& cfg, const std::string& hash) {
    auto scores = HateScores::load(cfg.require("hate_scores"));
    std::vector<double> taus;
    {
        std::string grid = cfg.get("tau_grid", "0.3,0.5,0.7,0.9");
        std::size_t pos = 0;
        while (pos <= grid.size()) {
            auto comma = grid.find(',', pos);
            std::string tok =
                grid.substr(pos, comma == std::string::npos ? std::string::npos
                                                            : comma - pos);
            if (!tok.empty()) taus.push_back(std::stod(tok));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (taus.empty()) throw ValidationError("empty tau_grid");
    }
    const char* names[] = {"hateful", "targeted", "aggressive"};
    std::vector<std::vector<std::string>> rows;
    for (int t = 0; t < 3; ++t)
        for (double tau : taus)
            rows.push_back({names[t], format_double(tau, 6),
                            format_double(hcr(scores, static_cast<HateType>(t), tau))});
    write_csv_report(out_path(cfg, "hcr.csv"), hash, "type,tau,hcr_percent", rows);
    return json{{"items", scores.ids.size()}, {"taus", taus.size()}};
}

SAEConfig sae_config(const Config& cfg) {
    SAEConfig sae;
    auto variant = cfg.get("sae_variant", "topk");
    if (variant == "topk")
        sae.variant = SAEVariant::TopK;
    else if (variant == "batch_topk")
        sae.variant = SAEVariant::BatchTopK;
    else
        throw ValidationError("unknown sae_variant: " + variant);
    sae.expansion = static_cast<int>(cfg.integer("sae_expansion", 16));
    sae.k = static_cast<int>(cfg.integer("sae_k", 20));
    sae.learning_rate = cfg.number("sae_lr", 1e-3);
    sae.batch_size = static_cast<int>(cfg.integer("sae_batch", 256));
    sae.epochs = static_cast<int>(cfg.integer("sae_epochs", 10));
    sae.seed = static_cast<std::uint64_t>(cfg.integer("seed", 0));
    return sae;
}

json run_sae_train(const Config& cfg, const std::string& hash) {
    auto data = EmbeddingMatrix::load(cfg.require("embeddings"));
    auto sae = sae_config(cfg);
    auto result = train(data, sae, threads_of(cfg));
    save_checkpoint(cfg.get("checkpoint", out_path(cfg, "sae.ckpt")), result.model, sae);
    write_json_report(out_path(cfg, "sae_train.summary.json"), hash,
                      json{{"epoch_loss", result.epoch_loss},
                           {"features", result.model.m},
                           {"dim", result.model.d}});
    return json{{"epochs", result.epoch_loss.size()},
                {"final_loss", result.epoch_loss.back()}};
}

json run_sae_stats(const Config& cfg, const std::string& hash) {
    auto data = EmbeddingMatrix::load(cfg.require("embeddings"));
    auto [model, sae] = load_checkpoint(cfg.get("checkpoint", out_path(cfg, "sae.ckpt")));
    auto counts = activation_stats(model, data, sae);
    save_activation_counts(cfg.get("activations", out_path(cfg, "activations.csv")),
                           counts);
    write_json_report(out_path(cfg, "sae_stats.summary.json"), hash,
                      json{{"rows", counts.rows},
                           {"rejected", counts.rejected},
                           {"features", counts.features},
                           {"identities", counts.identity_names}});
    return json{{"rows", counts.rows}, {"rejected", counts.rejected}};
}

json run_topics_pmi(const Config& cfg, const std::string& hash) {
    auto vocab = TopicVocabulary::load(cfg.require("topics_csv"), cfg.require("topics_emb"));
    auto counts = load_activation_counts(
        cfg.get("activations", out_path(cfg, "activations.csv")));
    auto [model, sae] = load_checkpoint(cfg.get("checkpoint", out_path(cfg, "sae.ckpt")));
    if (model.m != counts.features)
        throw DataError("activation counts do not match the checkpoint feature count");

    ClusterEmbeddingCache cache;
    cache.dim = vocab.dim;
    if (cfg.has("cluster_cache")) cache = ClusterEmbeddingCache::load(cfg.get("cluster_cache"));

    std::vector<float> decoder(model.dec_w);

    AggregateInput input;
    input.results.resize(1);
    std::size_t fallbacks = 0;
    for (double tau : tau_sweep()) {
        auto clustering = cluster_topics(vocab, tau);
        auto cluster_emb = cluster_embeddings(vocab, clustering, cache);
        fallbacks += cluster_emb.fallbacks;
        auto dist = feature_topic_dist(decoder, model.m, model.d, cluster_emb.embeddings,
                                       static_cast<int>(clustering.clusters.size()),
                                       static_cast<int>(cfg.integer("dist_top_n", 5)));
        input.results[0].push_back(pmi(counts, dist, 1e-12, threads_of(cfg)));
        input.clusterings.push_back(std::move(clustering));
    }

    auto order = cfg.get("ensemble_order", "mean_then_sum") == "sum_then_mean"
                     ? EnsembleOrder::SumThenMean
                     : EnsembleOrder::MeanThenSum;
    auto top = aggregate(input, vocab, static_cast<int>(cfg.integer("top_k", 20)), order);

    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < top.size(); ++i)
        for (std::size_t r = 0; r < top[i].size(); ++r)
            rows.push_back({counts.identity_names[i], std::to_string(r + 1),
                            top[i][r].label, format_double(top[i][r].score)});
    write_csv_report(out_path(cfg, "topics_top.csv"), hash,
                     "identity,rank,topic,score", rows);
    return json{{"identities", top.size()},
                {"clusterings", input.clusterings.size()},
                {"cache_fallbacks", fallbacks}};
}

json run_transfer_bias(const Config& cfg, const std::string& hash) {
    json stats;
    auto corpus = load_corpus(cfg, stats);
    auto dict = dictionary(cfg);
    auto index = InvertedIndex::load(cfg.get("index", out_path(cfg, "corpus.idx")));
    auto cats = load_categories(cfg.require("categories"));
    auto filtered = filter_categories(
        cats, cfg.get("wordnet_lemmas", data_path(cfg, "wordnet_lemmas.txt")), index,
        dict, cfg.integer("min_count", 100));

    auto cat_emb = EmbeddingMatrix::load(cfg.require("category_embeddings"));
    if (cat_emb.ids.empty())
        throw DataError("category embeddings must carry ids (category labels)");
    std::map<std::string, std::int64_t> emb_row;
    for (std::int64_t r = 0; r < cat_emb.rows; ++r) emb_row[cat_emb.ids[r]] = r;
    auto female = EmbeddingMatrix::load(cfg.require("female_embeddings"));
    auto male = EmbeddingMatrix::load(cfg.require("male_embeddings"));

    std::vector<std::vector<std::string>> rows;
    std::size_t skipped = 0;
    for (const auto& cat : filtered.kept) {
        auto it = emb_row.find(cat.label);
        if (it == emb_row.end()) {
            ++skipped;
            continue;
        }
        auto text = cat_emb.row(it->second);
        std::vector<double> f_sims, m_sims;
        for (std::int64_t r = 0; r < female.rows; ++r)
            f_sims.push_back(cosine_similarity(text, female.row(r)));
        for (std::int64_t r = 0; r < male.rows; ++r)
            m_sims.push_back(cosine_similarity(text, male.row(r)));

        auto db = dataset_bias(corpus, index, make_query(cat.label, dict));
        auto mb = model_bias(f_sims, m_sims);
        rows.push_back({cat.label, cat.source, std::to_string(cat.occurrence_count),
                        format_double(db.female_ratio), format_double(mb.d),
                        db.defined && mb.defined ? "1" : "0"});
    }
    write_csv_report(out_path(cfg, "bias_points.csv"), hash,
                     "category,source,occurrences,dataset_bias,model_bias,defined", rows);

    std::ofstream prompts(out_path(cfg, "prompts.txt"), std::ios::binary);
    for (const auto& p : prompt_manifest(filtered.kept)) prompts << p << '\n';

    stats["kept"] = filtered.kept.size();
    stats["dropped_not_lemma"] = filtered.dropped_not_lemma;
    stats["dropped_low_count"] = filtered.dropped_low_count;
    stats["skipped_no_embedding"] = skipped;
    return stats;
}

json run_transfer_fit(const Config& cfg, const std::string& hash) {
    auto path = cfg.get("bias_points", out_path(cfg, "bias_points.csv"));
    std::vector<BiasPoint> points;
    auto lines = read_lines(path);
    for (const auto& line : lines) {
        if (line.empty() || line[0] == '#' || line.rfind("category,", 0) == 0) continue;
        std::vector<std::string> cols;
        std::size_t pos = 0;
        while (true) {
            auto comma = line.find(',', pos);
            cols.push_back(line.substr(pos, comma == std::string::npos ? std::string::npos
                                                                       : comma - pos));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (cols.size() != 6) throw DataError("malformed bias point row: " + line);
        if (cols[5] != "1") continue;  // undefined points never enter the fit
        points.push_back({cols[0], std::stod(cols[3]), std::stod(cols[4])});
    }
    auto result = fit(points);
    write_json_report(out_path(cfg, "fit.json"), hash,
                      json{{"rho", result.rho},
                           {"r_squared", result.r_squared},
                           {"slope", result.slope},
                           {"intercept", result.intercept},
                           {"n", result.n},
                           {"sign_agreement", result.sign_agreement}});
    return json{{"points", result.n}};
}

json run_report(const Config& cfg, const std::string& hash) {
    std::string dir = cfg.get("out_dir", "out");
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        auto name = entry.path().filename().string();
        if (name.ends_with(".manifest.json") || name == "report.json") continue;
        files.push_back(name);
    }
    std::sort(files.begin(), files.end());
    json artifacts = json::object();
    for (const auto& name : files)
        artifacts[name] = to_hex(fnv1a64_file(dir + "/" + name));
    write_json_report(dir + "/report.json", hash, json{{"artifacts", artifacts}});
    return json{{"artifacts", files.size()}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dataset audit pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    app.add_option("--config", config_path, "key=value config file");
    app.add_option("--set", overrides, "override config entries (key=value)");

    const std::vector<std::pair<std::string, json (*)(const Config&, const std::string&)>>
        subcommands = {{"ingest", run_ingest},
                       {"index", run_index},
                       {"agree", run_agree},
                       {"audit-composition", run_audit_composition},
                       {"audit-crime", run_audit_crime},
                       {"audit-geo", run_audit_geo},
                       {"audit-sentiment", run_audit_sentiment},
                       {"hcr", run_hcr},
                       {"sae-train", run_sae_train},
                       {"sae-stats", run_sae_stats},
                       {"topics-pmi", run_topics_pmi},
                       {"transfer-bias", run_transfer_bias},
                       {"transfer-fit", run_transfer_fit},
                       {"report", run_report}};
    for (const auto& [name, fn] : subcommands) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "key=value config file");
        sub->add_option("--set", overrides, "override config entries (key=value)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        Config cfg;
        if (const char* env = std::getenv("DSAUDIT_DATA")) cfg.kv["data_dir"] = env;
        if (!cfg.kv.contains("data_dir")) cfg.kv["data_dir"] = "data";
        if (!config_path.empty()) load_config_file(cfg, config_path);
        for (const auto& ov : overrides) {
            auto eq = ov.find('=');
            if (eq == std::string::npos)
                throw ValidationError("--set expects key=value, got: " + ov);
            cfg.kv[ov.substr(0, eq)] = ov.substr(eq + 1);
        }

        std::string name = app.get_subcommands().front()->get_name();
        auto it = std::find_if(subcommands.begin(), subcommands.end(),
                               [&](const auto& s) { return s.first == name; });
        std::string hash = config_hash(name, cfg);

        auto start = std::chrono::steady_clock::now();
        json stats = it->second(cfg, hash);
        auto elapsed = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - start)
                           .count();

        RunManifest manifest;
        manifest.subcommand = name;
        manifest.config_hash = hash;
        manifest.config = cfg.kv;
        manifest.wall_seconds = elapsed;
        manifest.stats = stats;
        for (const std::string key :
             {"images", "boxes", "index", "labels", "embeddings", "categories",
              "hate_scores", "topics_csv", "topics_emb"}) {
            if (cfg.has(key) && fs::exists(cfg.get(key)))
                manifest.input_hashes[cfg.get(key)] = to_hex(fnv1a64_file(cfg.get(key)));
        }
        manifest.write(out_path(cfg, name + ".manifest.json"));
        return 0;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
