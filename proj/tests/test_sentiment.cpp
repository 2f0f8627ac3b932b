#include <doctest.h>

#include <cmath>
#include <fstream>

#include "dsaudit/sentiment.hpp"

using namespace dsaudit;

namespace {

double norm15(double s) { return s / std::sqrt(s * s + 15.0); }

SentimentLexicon tiny_lexicon() {
    SentimentLexicon lex;
    lex.valence = {{"good", 1.9}, {"great", 3.1}, {"bad", -2.5}, {"horrible", -2.5}};
    lex.boosters = {{"very", 0.293}, {"extremely", 0.293}, {"slightly", -0.293}};
    // "no" is deliberately absent: it has its own modifier rule.
    lex.negations = {"not", "never", "none", "without"};
    lex.idioms = {{"bad ass", 1.5}, {"the bomb", 3.0}};
    return lex;
}

CorpusView corpus_with(const std::vector<std::pair<Gender, std::string>>& rows) {
    std::vector<ImageRecord> images;
    int i = 0;
    for (const auto& [g, text] : rows) {
        ImageRecord rec;
        rec.image_id = "img" + std::to_string(i++);
        rec.width = rec.height = 10;
        rec.alt_text = text;
        rec.image_gender = g;
        images.push_back(std::move(rec));
    }
    return CorpusView::build(std::move(images), {});
}

}  // namespace

TEST_CASE("compound closed forms on a tiny lexicon") {
    auto lex = tiny_lexicon();
    CHECK(vader_compound("", lex) == 0.0);
    CHECK(vader_compound("a table by the window", lex) == 0.0);
    CHECK(vader_compound("good", lex) == doctest::Approx(norm15(1.9)).epsilon(1e-12));
    CHECK(vader_compound("good", lex) == doctest::Approx(0.4404).epsilon(1e-4));
    CHECK(vader_compound("bad", lex) == doctest::Approx(norm15(-2.5)).epsilon(1e-12));
    CHECK(vader_compound("good bad", lex) ==
          doctest::Approx(norm15(1.9 - 2.5)).epsilon(1e-12));
}

TEST_CASE("booster increments decay with distance") {
    auto lex = tiny_lexicon();
    CHECK(vader_compound("very good", lex) ==
          doctest::Approx(norm15(1.9 + 0.293)).epsilon(1e-12));
    CHECK(vader_compound("very truly good", lex) ==
          doctest::Approx(norm15(1.9 + 0.293 * 0.95)).epsilon(1e-12));
    CHECK(vader_compound("very truly really good", lex) ==
          doctest::Approx(norm15(1.9 + 0.293 * 0.9)).epsilon(1e-12));
    CHECK(vader_compound("slightly bad", lex) ==
          doctest::Approx(norm15(-2.5 + 0.293)).epsilon(1e-12));
}

TEST_CASE("negation flips and dampens") {
    auto lex = tiny_lexicon();
    CHECK(vader_compound("not good", lex) ==
          doctest::Approx(norm15(1.9 * -0.74)).epsilon(1e-12));
    CHECK(vader_compound("isn't good", lex) ==
          doctest::Approx(norm15(1.9 * -0.74)).epsilon(1e-12));
    CHECK(vader_compound("no good", lex) ==
          doctest::Approx(norm15(1.9 * -0.74)).epsilon(1e-12));
    // "no" scores zero itself when modifying a following lexicon word.
    CHECK(vader_compound("good no bad", lex) ==
          doctest::Approx(norm15(1.9 - 2.5 * -0.74)).epsilon(1e-12));
}

TEST_CASE("ALL-CAPS emphasis requires a mixed-case sentence") {
    auto lex = tiny_lexicon();
    CHECK(vader_compound("GOOD", lex) == doctest::Approx(norm15(1.9)).epsilon(1e-12));
    CHECK(vader_compound("GOOD day", lex) ==
          doctest::Approx(norm15(1.9 + 0.733)).epsilon(1e-12));
    CHECK(vader_compound("BAD day", lex) ==
          doctest::Approx(norm15(-2.5 - 0.733)).epsilon(1e-12));
}

TEST_CASE("punctuation amplification") {
    auto lex = tiny_lexicon();
    CHECK(vader_compound("good!", lex) ==
          doctest::Approx(norm15(1.9 + 0.292)).epsilon(1e-12));
    CHECK(vader_compound("good!!!!!!", lex) ==
          doctest::Approx(norm15(1.9 + 4 * 0.292)).epsilon(1e-12));  // capped at 4
    CHECK(vader_compound("bad??", lex) ==
          doctest::Approx(norm15(-2.5 - 2 * 0.18)).epsilon(1e-12));
    CHECK(vader_compound("bad?????", lex) ==
          doctest::Approx(norm15(-2.5 - 0.96)).epsilon(1e-12));
}

TEST_CASE("but-clause reweighting") {
    auto lex = tiny_lexicon();
    CHECK(vader_compound("good but bad", lex) ==
          doctest::Approx(norm15(1.9 * 0.5 - 2.5 * 1.5)).epsilon(1e-12));
}

TEST_CASE("idioms override word valence") {
    auto lex = tiny_lexicon();
    // "bad ass" replaces the -2.5 of "bad" via the forward bigram at i("bad").
    CHECK(vader_compound("he is one bad ass", lex) ==
          doctest::Approx(norm15(1.5)).epsilon(1e-12));
}

TEST_CASE("least-check") {
    auto lex = tiny_lexicon();
    CHECK(vader_compound("least good", lex) ==
          doctest::Approx(norm15(1.9 * -0.74)).epsilon(1e-12));
    CHECK(vader_compound("at least good", lex) ==
          doctest::Approx(norm15(1.9)).epsilon(1e-12));
    // "very" still boosts at distance 2 even though it blocks the least-flip.
    CHECK(vader_compound("very least good", lex) ==
          doctest::Approx(norm15(1.9 + 0.293 * 0.95)).epsilon(1e-12));
}

TEST_CASE("trailing punctuation stripped only from longer tokens") {
    auto lex = tiny_lexicon();
    CHECK(vader_compound("good.", lex) == doctest::Approx(norm15(1.9)).epsilon(1e-12));
    CHECK(vader_compound("Good,", lex) == doctest::Approx(norm15(1.9)).epsilon(1e-12));
}

TEST_CASE("shipped rule data matches the frozen reference fixture") {
    auto data = std::string(DATA_DIR) + "/vader";
    auto lex = SentimentLexicon::load(data + "/lexicon.txt", data + "/boosters.tsv",
                                      data + "/negations.txt", data + "/idioms.tsv");
    std::ifstream fixture(std::string(FIXTURE_DIR) + "/vader_fixture.tsv");
    REQUIRE(fixture.good());
    std::string line;
    int checked = 0;
    while (std::getline(fixture, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto tab = line.rfind('\t');
        REQUIRE(tab != std::string::npos);
        std::string sentence = line.substr(0, tab);
        double expected = std::stod(line.substr(tab + 1));
        CAPTURE(sentence);
        CHECK(vader_compound(sentence, lex) ==
              doctest::Approx(expected).epsilon(1e-9));
        ++checked;
    }
    CHECK(checked >= 100);
}

TEST_CASE("score_captions is thread-count independent and cache round-trips") {
    auto lex = tiny_lexicon();
    std::vector<std::pair<Gender, std::string>> rows;
    for (int i = 0; i < 200; ++i)
        rows.emplace_back(Gender::Male,
                          i % 3 ? "a very good day" : "not a good sign!");
    auto corpus = corpus_with(rows);
    auto s1 = score_captions(corpus, lex, 1);
    auto s8 = score_captions(corpus, lex, 8);
    CHECK(s1 == s8);

    write_score_cache("/tmp/dsaudit_scores.jsonl", corpus, s1);
    auto loaded = read_score_cache("/tmp/dsaudit_scores.jsonl", corpus);
    CHECK(loaded == s1);
}

TEST_CASE("group_sentiment excludes neutral captions and unclear images") {
    auto lex = tiny_lexicon();
    auto corpus = corpus_with({{Gender::Male, "good"},
                               {Gender::Male, "bad"},
                               {Gender::Male, "a chair"},       // neutral, dropped
                               {Gender::Female, "great"},
                               {Gender::Mixed, "horrible"},     // excluded group
                               {Gender::Unclear, "horrible"}}); // excluded group
    auto scores = score_captions(corpus, lex);
    auto report = group_sentiment(corpus, scores, Attribute::Gender);
    REQUIRE(report.size() == 2);
    const auto& female = report[0];
    const auto& male = report[1];
    CHECK(female.group == "female");
    CHECK(female.counted == 1);
    CHECK(female.negative_ratio == 0.0);
    CHECK(male.group == "male");
    CHECK(male.counted == 2);
    CHECK(male.negative_ratio == doctest::Approx(0.5));
    CHECK(male.mean_compound ==
          doctest::Approx((norm15(1.9) + norm15(-2.5)) / 2).epsilon(1e-12));
}

TEST_CASE("hate score loading and HCR threshold strictness") {
    std::string path = "/tmp/dsaudit_hate.jsonl";
    std::ofstream(path)
        << R"({"image_id":"a","hateful":0.9,"targeted":0.4,"aggressive":0.0})" "\n"
        << R"({"image_id":"b","hateful":0.5,"targeted":0.6,"aggressive":0.2})" "\n"
        << R"({"image_id":"c","hateful":0.1,"targeted":0.5,"aggressive":0.8})" "\n"
        << R"({"image_id":"d","hateful":0.5,"targeted":0.0,"aggressive":0.0})" "\n";
    auto hs = HateScores::load(path);
    REQUIRE(hs.ids.size() == 4);
    CHECK(hcr(hs, HateType::Hateful, 0.5) == doctest::Approx(25.0));  // strict >
    CHECK(hcr(hs, HateType::Targeted, 0.4) == doctest::Approx(50.0));
    CHECK(hcr(hs, HateType::Aggressive, 0.0) == doctest::Approx(50.0));

    std::ofstream(path) << R"({"image_id":"x","hateful":1.2,"targeted":0,"aggressive":0})" "\n";
    CHECK_THROWS_AS(HateScores::load(path), DataError);
    std::ofstream(path) << "";
    CHECK_THROWS_AS(hcr(HateScores::load(path), HateType::Hateful, 0.5), DataError);
}
