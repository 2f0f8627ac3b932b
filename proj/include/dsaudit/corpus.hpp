#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "dsaudit/common.hpp"

namespace dsaudit {

enum class Gender { Male, Female, Mixed, Unclear };
enum class Race {
    Black,
    EastAsian,
    Latino,
    MiddleEastern,
    SouthAsian,
    SoutheastAsian,
    White,
    Unclear
};

// Box-level race has no "mixed" member; multi-category images aggregate to Unclear.
Gender parse_gender(std::string_view token);
Race parse_race(std::string_view token);
std::string_view gender_name(Gender g);
std::string_view race_name(Race r);

inline constexpr int kNumRaces = 8;       // incl. unclear
inline constexpr int kNumCoreRaces = 7;   // excl. unclear

/// One detected person: geometry in integer pixels, top-left origin.
struct PersonBox {
    std::string image_id;
    int x = 0, y = 0, w = 0, h = 0;
    double confidence = 0.0;
    Gender gender = Gender::Unclear;
    Race race = Race::Unclear;
    std::optional<std::string> person_caption;
};

struct ImageRecord {
    std::string image_id;
    int width = 0, height = 0;
    std::string alt_text;
    // Derived by the aggregation ops in the consensus module; never read from input.
    Gender image_gender = Gender::Unclear;
    Race image_race = Race::Unclear;
};

struct LoadOptions {
    bool skip_bad = false;  // skip-and-count instead of fail-fast
    double min_confidence = 0.25;
};

struct LoadReport {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::vector<std::string> messages;  // populated in skip mode, capped
};

struct ImageTable {
    std::vector<ImageRecord> records;
    LoadReport report;
};

struct BoxTable {
    std::vector<PersonBox> boxes;
    LoadReport report;
};

ImageTable load_images(const std::string& path, const LoadOptions& opts = {});
BoxTable load_boxes(const std::string& path, const std::vector<ImageRecord>& images,
                    const LoadOptions& opts = {});

void write_images(const std::string& path, std::span<const ImageRecord> images);
void write_boxes(const std::string& path, std::span<const PersonBox> boxes);

std::vector<PersonBox> filter_boxes(std::span<const PersonBox> boxes, int min_side = 30,
                                    double min_conf = 0.25);

/// Immutable join of images and boxes; safe for concurrent reads.
struct CorpusView {
    std::vector<ImageRecord> images;
    std::vector<PersonBox> boxes;
    std::unordered_map<std::string, std::size_t> image_index;   // image_id -> row
    std::vector<std::vector<std::size_t>> boxes_of_image;       // aligned with images

    static CorpusView build(std::vector<ImageRecord> images, std::vector<PersonBox> boxes);

    std::span<const std::size_t> image_boxes(std::size_t image_row) const {
        return boxes_of_image[image_row];
    }
};

}  // namespace dsaudit
