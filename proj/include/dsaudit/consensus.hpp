#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "dsaudit/corpus.hpp"

namespace dsaudit {

struct Labeling {
    std::string annotator;
    std::map<std::string, std::string> labels;  // item_id -> label
};

/// Chance-corrected pairwise agreement with marginal-product chance term.
/// Degenerate case p_e = 1: returns 1 when observed agreement is also perfect,
/// throws DataError otherwise.
double cohen_kappa(const Labeling& a, const Labeling& b);

/// counts: items x labels, each row summing to raters_per_item.
double fleiss_kappa(const std::vector<std::vector<int>>& counts, int raters_per_item);

/// Jaccard index of the item sets assigned `label`; 1.0 when both sets empty.
double jaccard_per_label(const Labeling& a, const Labeling& b, const std::string& label);

enum class ConsensusMode { Unanimous, KOfN };

struct ConsensusPolicy {
    ConsensusMode mode = ConsensusMode::Unanimous;
    int k = 0;  // used for KOfN
};

struct ConsensusResult {
    std::map<std::string, std::string> assigned;
    std::size_t dropped = 0;  // no label reached the required support
    std::size_t ties = 0;     // two labels tied at k <= n/2 (both dropped)
};

ConsensusResult consensus_filter(std::span<const Labeling> labelings,
                                 const ConsensusPolicy& policy);

Gender image_gender(std::span<const PersonBox> boxes);
Race image_race(std::span<const PersonBox> boxes);

/// Fills image_gender / image_race for every image from its boxes.
void aggregate_image_labels(CorpusView& corpus, int threads = 1);

struct SampleItem {
    std::string id;
    std::string stratum;
};

struct StratumReport {
    std::string stratum;
    std::size_t requested = 0;
    std::size_t taken = 0;
    std::size_t deficit = 0;  // shortfall before redistribution
};

struct BalancedSample {
    std::vector<std::string> train, val, test;
    std::vector<StratumReport> reports;  // sorted by stratum name
};

/// Deterministic under (pool order, quotas, seed). Short strata redistribute
/// their deficit proportionally to the remaining capacity of their siblings.
BalancedSample balanced_sample(std::span<const SampleItem> pool,
                               const std::map<std::string, std::size_t>& quotas,
                               std::uint64_t seed);

struct DetBox {
    double x = 0, y = 0, w = 0, h = 0;
    double confidence = 1.0;
};

double iou(const DetBox& a, const DetBox& b);

struct GtMatchConfig {
    std::vector<double> thresholds;  // strictly increasing, in (0, 1]

    static GtMatchConfig coco_grid();  // 0.50:0.05:0.95
};

struct RecallResult {
    std::vector<double> thresholds;
    std::vector<double> recall;
    double mean_recall = 0.0;
};

/// Greedy one-to-one matching in descending prediction confidence; confidence
/// ties break toward the lower box index.
RecallResult detection_recall(std::span<const DetBox> pred, std::span<const DetBox> gt,
                              const GtMatchConfig& cfg);

}  // namespace dsaudit
