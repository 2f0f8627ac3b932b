#include <doctest.h>

#include <fstream>

#include "dsaudit/consensus.hpp"
#include "dsaudit/stats.hpp"

using namespace dsaudit;

namespace {

LemmaDictionary bare_dict() {
    LemmaDictionary dict;
    dict.lemmas = {{"criminals", "criminal"}};
    dict.stopwords = {"the", "a", "of"};
    return dict;
}

struct SyntheticCorpus {
    CorpusView view;
    InvertedIndex index;
};

// n_per[label] images with the given alt text; labels set directly.
SyntheticCorpus make_corpus(
    const std::vector<std::tuple<Gender, std::string, int>>& groups,
    const LemmaDictionary& dict) {
    std::vector<ImageRecord> images;
    std::vector<std::pair<std::string, std::string>> docs;
    int n = 0;
    for (const auto& [gender, text, count] : groups) {
        for (int i = 0; i < count; ++i, ++n) {
            ImageRecord rec;
            rec.image_id = "img" + std::to_string(n);
            rec.width = rec.height = 100;
            rec.alt_text = text;
            rec.image_gender = gender;
            docs.emplace_back(rec.image_id, text);
            images.push_back(std::move(rec));
        }
    }
    SyntheticCorpus out;
    out.view = CorpusView::build(std::move(images), {});
    out.index = build_index(docs, dict);
    return out;
}

std::string write_temp(const std::string& name, const std::string& content) {
    std::string path = std::string("/tmp/dsaudit_stats_") + name;
    std::ofstream(path, std::ios::binary) << content;
    return path;
}

}  // namespace

TEST_CASE("composition counts by label") {
    auto dict = bare_dict();
    auto c = make_corpus({{Gender::Male, "man", 6},
                          {Gender::Female, "woman", 3},
                          {Gender::Unclear, "scene", 1}},
                         dict);
    auto dist = composition(c.view, Attribute::Gender, Level::Image);
    CHECK(dist.total == 10);
    CHECK(dist.counts.at("male") == 6);
    CHECK(dist.counts.at("female") == 3);
    CHECK(dist.counts.at("unclear") == 1);
    CHECK(dist.share("male") == doctest::Approx(0.6));
    CHECK(dist.share("mixed") == 0.0);

    CHECK_THROWS_AS(composition(CorpusView{}, Attribute::Gender, Level::Image),
                    DataError);
}

TEST_CASE("box_stats area bins and per-image counts") {
    std::vector<ImageRecord> images(2);
    images[0].image_id = "a";
    images[0].width = images[0].height = 100;
    images[1].image_id = "b";
    images[1].width = images[1].height = 100;
    auto mk = [](const char* id, int w, int h) {
        PersonBox b;
        b.image_id = id;
        b.w = w;
        b.h = h;
        return b;
    };
    // Ratios: 0.09 -> bin 0, 0.10 -> bin 1, 0.25 -> bin 2, 1.0 -> bin 9.
    std::vector<PersonBox> boxes{mk("a", 30, 30), mk("a", 10, 100), mk("a", 50, 50),
                                 mk("b", 100, 100)};
    auto view = CorpusView::build(images, boxes);
    auto stats = box_stats(view);
    CHECK(stats.area_ratio_bins[0] == 1);
    CHECK(stats.area_ratio_bins[1] == 1);
    CHECK(stats.area_ratio_bins[2] == 1);
    CHECK(stats.area_ratio_bins[9] == 1);
    CHECK(stats.boxes_per_image.at(3) == 1);
    CHECK(stats.boxes_per_image.at(1) == 1);
    CHECK(stats.max_boxes == 3);
}

TEST_CASE("keyword set load") {
    auto dict = bare_dict();
    auto path = write_temp("kw.txt", "# crime terms\ncriminals\nmoney laundering\n\n");
    auto set = KeywordSet::load(path, dict);
    REQUIRE(set.queries.size() == 2);
    CHECK(set.queries[0].lemma_bag == std::vector<std::string>{"criminal"});

    auto empty = write_temp("kw_empty.txt", "# nothing\n");
    CHECK_THROWS_AS(KeywordSet::load(empty, dict), DataError);
}

TEST_CASE("relative_change closed form") {
    auto dict = bare_dict();
    // Baseline: 60 male, 40 female images. Subset (mentions "criminal"):
    // 30 male, 10 female. Male delta = 0.75/0.6 - 1 = 0.25;
    // female delta = 0.25/0.4 - 1 = -0.375.
    auto c = make_corpus({{Gender::Male, "a criminal here", 30},
                          {Gender::Male, "a dog", 30},
                          {Gender::Female, "the criminals", 10},
                          {Gender::Female, "a cat", 30},
                          {Gender::Mixed, "criminal crowd", 5},
                          {Gender::Unclear, "criminal scene", 5}},
                         dict);
    KeywordSet kw;
    kw.queries = {make_query("criminal", dict), make_query("criminals", dict)};
    auto report = relative_change(c.view, c.index, kw, Attribute::Gender);
    REQUIRE(report.size() == 2);
    const auto& female = report[0];
    const auto& male = report[1];
    CHECK(female.category == "female");
    CHECK(male.category == "male");
    CHECK(male.baseline_share == doctest::Approx(0.6));
    CHECK(male.subset_share == doctest::Approx(0.75));
    CHECK(male.delta == doctest::Approx(0.25));
    CHECK(male.subset_count == 30);
    CHECK(male.defined);
    CHECK(female.delta == doctest::Approx(-0.375));
    // An image matching both queries is counted once: subset totals 40.
    CHECK(male.subset_count + female.subset_count == 40);
}

TEST_CASE("relative_change undefined when baseline share is zero") {
    auto dict = bare_dict();
    auto c = make_corpus({{Gender::Male, "a criminal", 10}}, dict);
    KeywordSet kw;
    kw.queries = {make_query("criminal", dict)};
    auto report = relative_change(c.view, c.index, kw, Attribute::Gender);
    CHECK(!report[0].defined);  // no female images at all
    CHECK(report[1].defined);
}

TEST_CASE("country set load and synonym union") {
    auto dict = bare_dict();
    auto path = write_temp("countries.tsv",
                           "netherlands\tholland|dutch\n"
                           "france\tfrench\n");
    auto set = CountrySet::load(path, dict);
    REQUIRE(set.countries.size() == 2);
    CHECK(set.countries[0].synonyms.size() == 3);  // name + 2 synonyms

    auto c = make_corpus({{Gender::Male, "a dutch painter", 4},
                          {Gender::Unclear, "holland landscape", 3},
                          {Gender::Unclear, "dutch holland scene", 2},
                          {Gender::Female, "french woman", 5},
                          {Gender::Unclear, "a dog", 6}},
                         dict);
    // Attach one gendered box to each male/female image so has-person works.
    std::vector<PersonBox> boxes;
    for (const auto& img : c.view.images) {
        if (img.image_gender == Gender::Unclear) continue;
        PersonBox b;
        b.image_id = img.image_id;
        b.gender = img.image_gender == Gender::Male ? Gender::Male : Gender::Female;
        b.w = b.h = 40;
        b.confidence = 0.9;
        boxes.push_back(b);
    }
    auto view = CorpusView::build(c.view.images, boxes);

    auto mentions = country_mentions(view, c.index, set);
    REQUIRE(mentions.size() == 2);
    CHECK(mentions[0].country == "netherlands");
    CHECK(mentions[0].total_images == 9);  // overlap images counted once
    CHECK(mentions[0].images_with_person == 4);
    CHECK(mentions[1].total_images == 5);
    CHECK(mentions[1].images_with_person == 5);
}

TEST_CASE("shipped crime keyword list covers the audit vocabulary") {
    auto dict = LemmaDictionary::load(std::string(DATA_DIR) + "/lemmas.tsv",
                                      std::string(DATA_DIR) + "/stopwords.txt");
    auto set = KeywordSet::load(std::string(DATA_DIR) + "/crime_keywords.txt", dict);
    CHECK(set.queries.size() == 71);
}

TEST_CASE("shipped country list parses") {
    auto dict = LemmaDictionary::load(std::string(DATA_DIR) + "/lemmas.tsv",
                                      std::string(DATA_DIR) + "/stopwords.txt");
    auto set = CountrySet::load(std::string(DATA_DIR) + "/countries.tsv", dict);
    CHECK(set.countries.size() >= 100);
    bool found = false;
    for (const auto& entry : set.countries)
        if (entry.country == "netherlands") {
            found = true;
            CHECK(entry.synonyms.size() >= 2);  // holland at minimum
        }
    CHECK(found);
}
