#include "swintrack/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace swintrack {

namespace {

void require_nonempty(std::size_t n, const char* what) {
  if (n == 0) throw std::invalid_argument(std::string(what) + ": empty list");
}

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Number of sorted values <= t.
double fraction_at_most(const std::vector<double>& sorted, double t) {
  const auto it = std::upper_bound(sorted.begin(), sorted.end(), t);
  return static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
}

}  // namespace

std::vector<double> success_curve(std::span<const double> ious) {
  require_nonempty(ious.size(), "success_curve");
  std::vector<double> sorted(ious.begin(), ious.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> curve(kSuccessThresholds);
  for (std::size_t k = 0; k < kSuccessThresholds; ++k) {
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), success_threshold(k));
    curve[k] = static_cast<double>(sorted.end() - it) / static_cast<double>(sorted.size());
  }
  return curve;
}

double success_auc(std::span<const double> ious) {
  const std::vector<double> curve = success_curve(ious);
  return mean(curve);
}

double precision(std::span<const double> center_errors, double threshold) {
  require_nonempty(center_errors.size(), "precision");
  std::vector<double> sorted(center_errors.begin(), center_errors.end());
  std::sort(sorted.begin(), sorted.end());
  return fraction_at_most(sorted, threshold);
}

double normalized_precision(std::span<const double> normalized_errors) {
  require_nonempty(normalized_errors.size(), "normalized_precision");
  std::vector<double> sorted(normalized_errors.begin(), normalized_errors.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> curve(kNormPrecisionThresholds);
  for (std::size_t k = 0; k < kNormPrecisionThresholds; ++k) {
    curve[k] = fraction_at_most(sorted, norm_precision_threshold(k));
  }
  return mean(curve);
}

double normalized_center_error(const BBox& pred, const BBox& gt) {
  if (!gt.valid()) throw std::invalid_argument("normalized_center_error: degenerate gt " + to_string(gt));
  return std::hypot((pred.cx() - gt.cx()) / gt.w, (pred.cy() - gt.cy()) / gt.h);
}

OverlapSummary average_overlap(const std::vector<std::vector<double>>& per_sequence_ious) {
  require_nonempty(per_sequence_ious.size(), "average_overlap");
  OverlapSummary s;
  for (const auto& ious : per_sequence_ious) {
    require_nonempty(ious.size(), "average_overlap sequence");
    double sr50 = 0.0, sr75 = 0.0;
    for (double v : ious) {
      sr50 += v > 0.5 ? 1.0 : 0.0;
      sr75 += v > 0.75 ? 1.0 : 0.0;
    }
    const double n = static_cast<double>(ious.size());
    s.mao += mean(ious);
    s.msr50 += sr50 / n;
    s.msr75 += sr75 / n;
  }
  const double m = static_cast<double>(per_sequence_ious.size());
  s.mao /= m;
  s.msr50 /= m;
  s.msr75 /= m;
  return s;
}

SequenceMetrics evaluate_sequence(const std::string& name, std::span<const BBox> predicted,
                                  std::span<const BBox> gt) {
  if (predicted.size() != gt.size()) {
    throw std::invalid_argument(name + ": " + std::to_string(predicted.size()) + " predictions for " +
                                std::to_string(gt.size()) + " groundtruth frames");
  }
  require_nonempty(gt.size(), "evaluate_sequence");
  std::vector<double> ious, errors, norm_errors;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    ious.push_back(iou(predicted[i], gt[i]));
    errors.push_back(center_distance(predicted[i], gt[i]));
    norm_errors.push_back(normalized_center_error(predicted[i], gt[i]));
  }
  SequenceMetrics m;
  m.name = name;
  m.frames = gt.size();
  m.suc = success_auc(ious);
  m.pre = precision(errors);
  m.npre = normalized_precision(norm_errors);
  const OverlapSummary ao = average_overlap({ious});
  m.ao = ao.mao;
  m.sr50 = ao.msr50;
  m.sr75 = ao.msr75;
  return m;
}

MetricReport summarize(std::vector<SequenceMetrics> sequences) {
  require_nonempty(sequences.size(), "summarize");
  MetricReport r;
  for (const SequenceMetrics& s : sequences) {
    r.suc += s.suc;
    r.pre += s.pre;
    r.npre += s.npre;
    r.mao += s.ao;
    r.msr50 += s.sr50;
    r.msr75 += s.sr75;
  }
  const double n = static_cast<double>(sequences.size());
  r.suc /= n;
  r.pre /= n;
  r.npre /= n;
  r.mao /= n;
  r.msr50 /= n;
  r.msr75 /= n;
  r.per_sequence = std::move(sequences);
  return r;
}

nlohmann::json MetricReport::to_json() const {
  nlohmann::json j = {{"suc", suc}, {"pre", pre}, {"npre", npre},
                      {"mao", mao}, {"msr50", msr50}, {"msr75", msr75}};
  j["per_sequence"] = nlohmann::json::array();
  for (const SequenceMetrics& s : per_sequence) {
    j["per_sequence"].push_back({{"name", s.name}, {"frames", s.frames}, {"suc", s.suc},
                                 {"pre", s.pre}, {"npre", s.npre}, {"ao", s.ao},
                                 {"sr50", s.sr50}, {"sr75", s.sr75}});
  }
  return j;
}

std::string MetricReport::table() const {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-24s %6s %6s %6s %6s %6s %6s %6s\n", "sequence", "frames", "SUC",
                "PRE", "NPRE", "AO", "SR50", "SR75");
  out << line;
  for (const SequenceMetrics& s : per_sequence) {
    std::snprintf(line, sizeof line, "%-24s %6zu %6.3f %6.3f %6.3f %6.3f %6.3f %6.3f\n", s.name.c_str(),
                  s.frames, s.suc, s.pre, s.npre, s.ao, s.sr50, s.sr75);
    out << line;
  }
  std::snprintf(line, sizeof line, "%-24s %6s %6.3f %6.3f %6.3f %6.3f %6.3f %6.3f\n", "overall", "",
                suc, pre, npre, mao, msr50, msr75);
  out << line;
  return out.str();
}

std::vector<BBox> static_box_baseline(std::span<const BBox> gt) {
  require_nonempty(gt.size(), "static_box_baseline");
  return std::vector<BBox>(gt.size(), gt.front());
}

}  // namespace swintrack
