#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "swintrack/dataset.hpp"
#include "swintrack/metrics.hpp"
#include "swintrack/synth.hpp"
#include "oracles.hpp"

using namespace swintrack;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("swintrack_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Synth, SameSeedSameFrames) {
  SynthConfig c;
  c.frames = 6;
  c.seed = 3;
  const Sequence a = generate_sequence(c), b = generate_sequence(c);
  ASSERT_EQ(a.size(), 6u);
  EXPECT_EQ(a.name, "synth-3");
  for (std::size_t f = 0; f < 6; ++f) {
    EXPECT_EQ(a.frames[f], b.frames[f]);
    EXPECT_EQ(a.gt[f], b.gt[f]);
  }
  c.seed = 4;
  EXPECT_NE(generate_sequence(c).frames[0], a.frames[0]);
}

TEST(Synth, StillTargetHasConstantGroundTruth) {
  SynthConfig c;
  c.max_speed = 0;
  c.random_walk_sigma = 0;
  c.scale_jitter = 0;
  c.seed = 5;
  const SyntheticScene s(c);
  for (std::size_t f = 1; f < s.size(); ++f) EXPECT_EQ(s.gt(f), s.gt(0));
}

TEST(Synth, GroundTruthStaysInFrame) {
  SynthConfig c;
  c.frames = 300;
  c.max_speed = 8;
  c.random_walk_sigma = 2;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    c.seed = seed;
    const SyntheticScene s(c);
    for (std::size_t f = 0; f < s.size(); ++f) {
      const BBox& b = s.gt(f);
      ASSERT_TRUE(b.valid());
      EXPECT_GE(b.x, -1e-9);
      EXPECT_GE(b.y, -1e-9);
      EXPECT_LE(b.right(), 160 + 1e-9);
      EXPECT_LE(b.bottom(), 160 + 1e-9);
    }
  }
}

TEST(Synth, TargetIsPaintedOverDistractors) {
  // Distractors are drawn from the generator after the target, so adding
  // them leaves the target track and background alone.
  SynthConfig c;
  c.distractors = 0;
  c.distractor_similarity = 0.5;
  c.seed = 6;
  const SyntheticScene plain(c);
  c.distractors = 4;
  const SyntheticScene busy(c);
  for (std::size_t f : {0u, 10u, 39u}) {
    ASSERT_EQ(plain.gt(f), busy.gt(f));
    const Image a = plain.render(f), b = busy.render(f);
    const BBox& g = plain.gt(f);
    for (std::size_t y = static_cast<std::size_t>(std::ceil(g.y)); y + 1 < g.bottom(); ++y)
      for (std::size_t x = static_cast<std::size_t>(std::ceil(g.x)); x + 1 < g.right(); ++x)
        for (std::size_t ch = 0; ch < 3; ++ch) ASSERT_EQ(a.at(x, y, ch), b.at(x, y, ch));
    EXPECT_NE(a, b);
  }
}

TEST(Synth, TargetLargerThanFrameRejected) {
  SynthConfig c;
  c.frame_width = 20;
  c.frame_height = 20;
  EXPECT_THROW(SyntheticScene{c}, ConfigError);
}

TEST(Synth, WeakPairsAreCentred) {
  SynthConfig c;
  c.seed = 7;
  const Sequence seq = generate_sequence(c);
  Rng rng(1);
  const PairGeometry g;
  for (int t = 0; t < 20; ++t) {
    const TrainingPair p = sample_training_pair(seq, AugMode::kWeak, rng, g);
    EXPECT_NEAR(p.gt_in_search.cx(), 64.0, 1e-9);
    EXPECT_NEAR(p.gt_in_search.cy(), 64.0, 1e-9);
    EXPECT_NEAR(std::sqrt(p.gt_in_search.area()), 32.0, 1e-9);
    EXPECT_EQ(p.search_crop.width, 128u);
    EXPECT_EQ(p.template_crop.width, 64u);
  }
}

TEST(Synth, StrongPairsJitterWithinBoundsAndReproduce) {
  SynthConfig c;
  c.seed = 8;
  const Sequence seq = generate_sequence(c);
  Rng a(2), b(2);
  const PairGeometry g;
  bool moved = false;
  for (int t = 0; t < 50; ++t) {
    const TrainingPair p = sample_training_pair(seq, AugMode::kStrong, a, g);
    const TrainingPair q = sample_training_pair(seq, AugMode::kStrong, b, g);
    EXPECT_EQ(p.gt_in_search, q.gt_in_search);
    const double side = std::sqrt(p.gt_in_search.area());
    // 32 px nominal, scaled by 1 / [0.75, 1.33].
    EXPECT_GE(side, 32.0 / 1.33 - 1e-9);
    EXPECT_LE(side, 32.0 / 0.75 + 1e-9);
    EXPECT_LE(std::abs(p.gt_in_search.cx() - 64.0), 0.25 * 128 + 1e-9);
    moved |= std::abs(p.gt_in_search.cx() - 64.0) > 1.0;
    // Back to the frame through the crop spec.
    const BBox frame_box = p.search_spec.box_to_frame(p.gt_in_search);
    bool matches = false;
    for (const BBox& gt : seq.gt)
      matches |= std::abs(gt.x - frame_box.x) < 0.5 && std::abs(gt.y - frame_box.y) < 0.5 &&
                 std::abs(gt.w - frame_box.w) < 0.5;
    EXPECT_TRUE(matches);
  }
  EXPECT_TRUE(moved);
}

TEST(Metrics, HandValues) {
  const std::vector<double> ones(7, 1.0), halves(9, 0.5), zeros(4, 0.0);
  EXPECT_DOUBLE_EQ(success_auc(ones), 1.0);
  EXPECT_DOUBLE_EQ(success_auc(halves), 11.0 / 21.0);
  EXPECT_DOUBLE_EQ(success_auc(zeros), 1.0 / 21.0);
  EXPECT_DOUBLE_EQ(precision(zeros), 1.0);
  EXPECT_DOUBLE_EQ(normalized_precision(zeros), 1.0);
  EXPECT_DOUBLE_EQ(precision(std::vector<double>{20.0, 20.0001}), 0.5);
  EXPECT_THROW(success_auc(std::vector<double>{}), std::invalid_argument);
  EXPECT_THROW(precision(std::vector<double>{}), std::invalid_argument);
  EXPECT_EQ(success_curve(halves).size(), 21u);
}

TEST(Metrics, MatchBruteForceOnRandomLists) {
  Rng rng(9);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + rng.index(60);
    std::vector<double> ious(n), errors(n);
    for (std::size_t i = 0; i < n; ++i) {
      // Snap some values onto thresholds to exercise the >= boundary.
      ious[i] = rng.uniform(0, 1) < 0.3 ? static_cast<double>(rng.index(21)) / 20.0 : rng.uniform(0, 1);
      errors[i] = rng.uniform(0, 1) < 0.2 ? 20.0 : rng.uniform(0, 40);
    }
    EXPECT_EQ(success_auc(ious), oracles::success_auc(ious));
    EXPECT_EQ(precision(errors), oracles::precision(errors));
    double mean = 0, sr50 = 0, sr75 = 0;
    for (double v : ious) {
      mean += v;
      sr50 += v > 0.5;
      sr75 += v > 0.75;
    }
    const OverlapSummary ao = average_overlap({ious});
    EXPECT_EQ(ao.mao, mean / static_cast<double>(n));
    EXPECT_EQ(ao.msr50, sr50 / static_cast<double>(n));
    EXPECT_EQ(ao.msr75, sr75 / static_cast<double>(n));
  }
}

TEST(Metrics, NormalizedErrorScalesPerAxis) {
  EXPECT_NEAR(normalized_center_error({10, 0, 20, 10}, {0, 0, 20, 10}), 0.5, 1e-15);
  EXPECT_NEAR(normalized_center_error({0, 5, 20, 10}, {0, 0, 20, 10}), 0.5, 1e-15);
  const std::vector<double> e = {0.0, 0.25, 1.0};
  // 0 passes all 51 thresholds, 0.25 passes 26 of them, 1.0 none.
  EXPECT_NEAR(normalized_precision(e), (51.0 + 26.0) / (3.0 * 51.0), 1e-15);
}

TEST(Metrics, SequenceAndSummary) {
  const std::vector<BBox> gt = {{0, 0, 10, 10}, {5, 5, 10, 10}, {10, 10, 10, 10}};
  const std::vector<BBox> still = static_box_baseline(gt);
  EXPECT_EQ(still, std::vector<BBox>(3, gt[0]));
  const SequenceMetrics perfect = evaluate_sequence("a", gt, gt);
  EXPECT_EQ(perfect.suc, 1.0);
  EXPECT_EQ(perfect.frames, 3u);
  const SequenceMetrics lazy = evaluate_sequence("b", still, gt);
  EXPECT_LT(lazy.suc, 1.0);
  const MetricReport r = summarize({perfect, lazy});
  EXPECT_DOUBLE_EQ(r.suc, 0.5 * (perfect.suc + lazy.suc));
  EXPECT_EQ(r.to_json()["per_sequence"].size(), 2u);
  EXPECT_NE(r.table().find("b"), std::string::npos);
  EXPECT_THROW(evaluate_sequence("c", still, std::vector<BBox>(2, gt[0])), std::invalid_argument);
  EXPECT_THROW(summarize({}), std::invalid_argument);
}

TEST(Dataset, ParseGroundTruthFormats) {
  std::istringstream in("1,2,3,4\r\n5\t6\t7\t8\n\n9 10 11 12\n");
  const auto boxes = parse_groundtruth(in);
  ASSERT_EQ(boxes.size(), 3u);
  EXPECT_EQ(boxes[1], (BBox{5, 6, 7, 8}));
  EXPECT_EQ(boxes[2], (BBox{9, 10, 11, 12}));
  std::istringstream bad("1,2,3,4\n1,2,x,4\n");
  try {
    parse_groundtruth(bad, "gt.txt");
    FAIL();
  } catch (const DatasetError& e) {
    EXPECT_NE(std::string(e.what()).find("gt.txt:2"), std::string::npos) << e.what();
  }
  std::istringstream short_line("1,2,3\n");
  EXPECT_THROW(parse_groundtruth(short_line), DatasetError);
}

TEST(Dataset, SequenceDirRoundTrip) {
  SynthConfig c;
  c.frames = 3;
  c.seed = 10;
  const Sequence seq = generate_sequence(c);
  const fs::path dir = temp_dir("seq");
  save_sequence_dir(seq, dir);
  const Sequence back = load_sequence_dir(dir);
  ASSERT_EQ(back.size(), 3u);
  EXPECT_EQ(back.gt.size(), 3u);
  EXPECT_EQ(back.frames[0].width, 160u);
  // PNG stores 8 bits per channel.
  for (std::size_t i = 0; i < seq.frames[2].pixels.size(); ++i)
    ASSERT_NEAR(back.frames[2].pixels[i], seq.frames[2].pixels[i], 0.5 / 255.0 + 1e-6);
  for (std::size_t f = 0; f < 3; ++f) EXPECT_NEAR(back.gt[f].x, seq.gt[f].x, 1e-6);
}

TEST(Dataset, CountMismatchIsAnError) {
  SynthConfig c;
  c.frames = 3;
  c.seed = 11;
  const fs::path dir = temp_dir("mismatch");
  save_sequence_dir(generate_sequence(c), dir);
  {
    std::ofstream gt(dir / "groundtruth.txt");
    gt << "1,1,5,5\n2,2,5,5\n";
  }
  EXPECT_THROW(load_sequence_dir(dir), DatasetError);
  EXPECT_THROW(load_sequence_dir(dir / "missing"), DatasetError);
}

TEST(Dataset, ResultsRoundTrip) {
  const fs::path dir = temp_dir("results");
  const std::vector<BBox> boxes = {{1.5, 2.25, 30, 40}, {0.125, 7, 3, 9.75}};
  write_results(dir / "r.txt", boxes);
  EXPECT_EQ(read_results(dir / "r.txt"), boxes);
  {
    std::ofstream out(dir / "gap.txt");
    out << "1,0,0,1,1\n3,0,0,1,1\n";
  }
  EXPECT_THROW(read_results(dir / "gap.txt"), DatasetError);
}
