#include "dsaudit/corpus.hpp"

#include <fstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

namespace dsaudit {

using json = nlohmann::json;

Gender parse_gender(std::string_view token) {
    if (token == "male") return Gender::Male;
    if (token == "female") return Gender::Female;
    if (token == "mixed") return Gender::Mixed;
    if (token == "unclear") return Gender::Unclear;
    throw DataError("unknown gender token: " + std::string(token));
}

Race parse_race(std::string_view token) {
    if (token == "black") return Race::Black;
    if (token == "east_asian") return Race::EastAsian;
    if (token == "latino") return Race::Latino;
    if (token == "middle_eastern") return Race::MiddleEastern;
    if (token == "south_asian") return Race::SouthAsian;
    if (token == "southeast_asian") return Race::SoutheastAsian;
    if (token == "white") return Race::White;
    if (token == "unclear") return Race::Unclear;
    throw DataError("unknown race token: " + std::string(token));
}

std::string_view gender_name(Gender g) {
    switch (g) {
        case Gender::Male: return "male";
        case Gender::Female: return "female";
        case Gender::Mixed: return "mixed";
        case Gender::Unclear: return "unclear";
    }
    return "unclear";
}

std::string_view race_name(Race r) {
    switch (r) {
        case Race::Black: return "black";
        case Race::EastAsian: return "east_asian";
        case Race::Latino: return "latino";
        case Race::MiddleEastern: return "middle_eastern";
        case Race::SouthAsian: return "south_asian";
        case Race::SoutheastAsian: return "southeast_asian";
        case Race::White: return "white";
        case Race::Unclear: return "unclear";
    }
    return "unclear";
}

namespace {

constexpr std::size_t kMaxMessages = 32;

void note(LoadReport& report, const LoadOptions& opts, std::size_t row,
          const std::string& what) {
    if (!opts.skip_bad) throw DataError("row " + std::to_string(row) + ": " + what);
    report.rejected++;
    if (report.messages.size() < kMaxMessages)
        report.messages.push_back("row " + std::to_string(row) + ": " + what);
}

}  // namespace

ImageTable load_images(const std::string& path, const LoadOptions& opts) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open image file: " + path);
    ImageTable table;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            note(table.report, opts, row, "malformed record");
            continue;
        }
        try {
            ImageRecord rec;
            rec.image_id = j.at("image_id").get<std::string>();
            rec.width = j.at("width").get<int>();
            rec.height = j.at("height").get<int>();
            rec.alt_text = j.at("alt_text").get<std::string>();
            if (rec.width < 1 || rec.height < 1)
                throw DataError("nonpositive image dimensions");
            if (!seen.insert(rec.image_id).second)
                throw DataError("duplicate image_id: " + rec.image_id);
            table.records.push_back(std::move(rec));
            table.report.accepted++;
        } catch (const json::exception& e) {
            note(table.report, opts, row, std::string("malformed record: ") + e.what());
        } catch (const DataError& e) {
            note(table.report, opts, row, e.what());
        }
    }
    return table;
}

BoxTable load_boxes(const std::string& path, const std::vector<ImageRecord>& images,
                    const LoadOptions& opts) {
    std::unordered_map<std::string, const ImageRecord*> by_id;
    by_id.reserve(images.size());
    for (const auto& img : images) by_id.emplace(img.image_id, &img);

    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open box file: " + path);
    BoxTable table;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            note(table.report, opts, row, "malformed record");
            continue;
        }
        try {
            PersonBox box;
            box.image_id = j.at("image_id").get<std::string>();
            box.x = j.at("x").get<int>();
            box.y = j.at("y").get<int>();
            box.w = j.at("w").get<int>();
            box.h = j.at("h").get<int>();
            box.confidence = j.at("confidence").get<double>();
            box.gender = parse_gender(j.at("gender").get<std::string>());
            box.race = parse_race(j.at("race").get<std::string>());
            if (j.contains("person_caption") && !j.at("person_caption").is_null())
                box.person_caption = j.at("person_caption").get<std::string>();

            auto it = by_id.find(box.image_id);
            if (it == by_id.end())
                throw DataError("orphan box for image_id: " + box.image_id);
            const ImageRecord& img = *it->second;
            if (box.w < 1 || box.h < 1 || box.x < 0 || box.y < 0)
                throw DataError("degenerate box geometry");
            if (box.x + box.w > img.width || box.y + box.h > img.height)
                throw DataError("box exceeds image bounds for image_id: " + box.image_id);
            if (box.confidence < opts.min_confidence || box.confidence > 1.0)
                throw DataError("confidence outside [" +
                                std::to_string(opts.min_confidence) + ", 1]");
            table.boxes.push_back(std::move(box));
            table.report.accepted++;
        } catch (const json::exception& e) {
            note(table.report, opts, row, std::string("malformed record: ") + e.what());
        } catch (const DataError& e) {
            note(table.report, opts, row, e.what());
        }
    }
    return table;
}

void write_images(const std::string& path, std::span<const ImageRecord> images) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write file: " + path);
    for (const auto& img : images) {
        json j{{"image_id", img.image_id},
               {"width", img.width},
               {"height", img.height},
               {"alt_text", img.alt_text}};
        out << j.dump() << '\n';
    }
}

void write_boxes(const std::string& path, std::span<const PersonBox> boxes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write file: " + path);
    for (const auto& box : boxes) {
        json j{{"image_id", box.image_id},
               {"x", box.x},
               {"y", box.y},
               {"w", box.w},
               {"h", box.h},
               {"confidence", box.confidence},
               {"gender", std::string(gender_name(box.gender))},
               {"race", std::string(race_name(box.race))}};
        if (box.person_caption)
            j["person_caption"] = *box.person_caption;
        else
            j["person_caption"] = nullptr;
        out << j.dump() << '\n';
    }
}

std::vector<PersonBox> filter_boxes(std::span<const PersonBox> boxes, int min_side,
                                    double min_conf) {
    std::vector<PersonBox> kept;
    kept.reserve(boxes.size());
    for (const auto& box : boxes) {
        if (std::min(box.w, box.h) >= min_side && box.confidence >= min_conf)
            kept.push_back(box);
    }
    return kept;
}

CorpusView CorpusView::build(std::vector<ImageRecord> images, std::vector<PersonBox> boxes) {
    CorpusView view;
    view.images = std::move(images);
    view.boxes = std::move(boxes);
    view.image_index.reserve(view.images.size());
    for (std::size_t i = 0; i < view.images.size(); ++i)
        view.image_index.emplace(view.images[i].image_id, i);
    view.boxes_of_image.assign(view.images.size(), {});
    for (std::size_t b = 0; b < view.boxes.size(); ++b) {
        auto it = view.image_index.find(view.boxes[b].image_id);
        if (it == view.image_index.end())
            throw DataError("box references unknown image_id: " + view.boxes[b].image_id);
        view.boxes_of_image[it->second].push_back(b);
    }
    return view;
}

}  // namespace dsaudit
