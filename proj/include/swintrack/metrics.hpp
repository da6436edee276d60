#pragma once

#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "swintrack/bbox.hpp"

namespace swintrack {

inline constexpr std::size_t kSuccessThresholds = 21;    // 0, 0.05, ..., 1
inline constexpr std::size_t kNormPrecisionThresholds = 51;  // 0, 0.01, ..., 0.5
inline constexpr double kPrecisionPixels = 20.0;

inline double success_threshold(std::size_t k) { return static_cast<double>(k) / 20.0; }
inline double norm_precision_threshold(std::size_t k) { return static_cast<double>(k) / 100.0; }

// Fraction of frames with IoU >= t, for each of the 21 thresholds.
std::vector<double> success_curve(std::span<const double> ious);
// Mean of the success curve. Throws std::invalid_argument on an empty list.
double success_auc(std::span<const double> ious);
// Fraction of frames with centre error <= threshold pixels.
double precision(std::span<const double> center_errors, double threshold = kPrecisionPixels);
// Mean over the 51-point grid of the fraction of normalised errors <= t.
double normalized_precision(std::span<const double> normalized_errors);
// Centre offset scaled per axis by the ground-truth width and height.
double normalized_center_error(const BBox& pred, const BBox& gt);

struct OverlapSummary {
  double mao = 0.0;
  double msr50 = 0.0;
  double msr75 = 0.0;
};
// AO is the mean IoU of a sequence, SR@t the fraction of frames with IoU > t;
// each is averaged over sequences.
OverlapSummary average_overlap(const std::vector<std::vector<double>>& per_sequence_ious);

struct SequenceMetrics {
  std::string name;
  std::size_t frames = 0;
  double suc = 0.0, pre = 0.0, npre = 0.0, ao = 0.0, sr50 = 0.0, sr75 = 0.0;
};

struct MetricReport {
  double suc = 0.0, pre = 0.0, npre = 0.0, mao = 0.0, msr50 = 0.0, msr75 = 0.0;
  std::vector<SequenceMetrics> per_sequence;

  nlohmann::json to_json() const;
  std::string table() const;
};

SequenceMetrics evaluate_sequence(const std::string& name, std::span<const BBox> predicted,
                                  std::span<const BBox> gt);
// Overall values are means over sequences.
MetricReport summarize(std::vector<SequenceMetrics> sequences);

// Predicts the first ground-truth box for every frame.
std::vector<BBox> static_box_baseline(std::span<const BBox> gt);

}  // namespace swintrack
