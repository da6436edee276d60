#pragma once

#include <array>
#include <string>
#include <vector>

#include "swintrack/bbox.hpp"
#include "swintrack/config.hpp"
#include "swintrack/crop.hpp"
#include "swintrack/image.hpp"
#include "swintrack/random.hpp"

namespace swintrack {

struct Sequence {
  std::string name;
  std::vector<Image> frames;
  std::vector<BBox> gt;  // one per frame

  std::size_t size() const { return frames.size(); }
};

// A rendered-on-demand synthetic video: a patterned rectangle moving over a
// textured background among distractor rectangles. Trajectories are fixed at
// construction, so any frame can be rendered independently.
class SyntheticScene {
 public:
  explicit SyntheticScene(const SynthConfig& config);

  std::size_t size() const { return config_.frames; }
  const BBox& gt(std::size_t frame) const { return target_.boxes.at(frame); }
  Image render(std::size_t frame) const;
  const SynthConfig& config() const { return config_; }

 private:
  struct Appearance {
    std::array<float, 3> primary{};
    std::array<float, 3> secondary{};
    int pattern = 0;  // 0 checker, 1 horizontal stripes, 2 vertical stripes, 3 bordered
    double period = 0.25;  // pattern period as a fraction of the object size
  };
  struct Track {
    Appearance look;
    std::vector<BBox> boxes;
  };

  static Appearance random_appearance(Rng& rng);
  std::vector<BBox> simulate(Rng& rng, bool keep_inside) const;
  void paint(Image& image, const Track& track, std::size_t frame) const;

  SynthConfig config_;
  Image background_;
  Track target_;
  std::vector<Track> distractors_;
};

// Renders every frame of a synthetic scene.
Sequence generate_sequence(const SynthConfig& config);

// Crops produced for one training sample.
struct TrainingPair {
  Image template_crop;
  Image search_crop;
  BBox gt_in_search;  // search-crop pixel coordinates
  CropSpec search_spec;
};

struct PairGeometry {
  std::size_t template_size = 64;
  std::size_t search_size = 128;
  double template_factor = 2.0;
  double search_factor = 4.0;
};

// Strong augmentation: the search window is shifted by up to 25 % of its
// side in each axis and its side scaled by a log-uniform factor in
// [0.75, 1.33]. Weak augmentation centres the target with no jitter.
inline constexpr double kMaxShiftFraction = 0.25;
inline constexpr double kMinScaleJitter = 0.75;
inline constexpr double kMaxScaleJitter = 1.33;

TrainingPair sample_training_pair(const Image& template_frame, const BBox& template_gt,
                                  const Image& search_frame, const BBox& search_gt, AugMode aug,
                                  Rng& rng, const PairGeometry& geometry);

// Picks two frames at most `max_gap` apart from `sequence` and crops them.
TrainingPair sample_training_pair(const Sequence& sequence, AugMode aug, Rng& rng,
                                  const PairGeometry& geometry, std::size_t max_gap = 30);

}  // namespace swintrack
