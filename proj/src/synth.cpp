#include "swintrack/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace swintrack {

namespace {

std::array<float, 3> random_colour(Rng& rng) {
  return {static_cast<float>(rng.uniform(0.05, 0.95)), static_cast<float>(rng.uniform(0.05, 0.95)),
          static_cast<float>(rng.uniform(0.05, 0.95))};
}

std::array<float, 3> mix(const std::array<float, 3>& a, const std::array<float, 3>& b, double t) {
  return {static_cast<float>(t * a[0] + (1.0 - t) * b[0]), static_cast<float>(t * a[1] + (1.0 - t) * b[1]),
          static_cast<float>(t * a[2] + (1.0 - t) * b[2])};
}

Image make_background(const SynthConfig& config, Rng& rng) {
  Image bg(config.frame_width, config.frame_height);
  struct Wave {
    double fx, fy, phase, amplitude;
  };
  for (std::size_t c = 0; c < 3; ++c) {
    const double base = rng.uniform(0.25, 0.75);
    std::vector<Wave> waves;
    for (int k = 0; k < 4; ++k) {
      const double wavelength = rng.uniform(8.0, 60.0);
      const double angle = rng.uniform(0.0, 2.0 * M_PI);
      waves.push_back({2.0 * M_PI * std::cos(angle) / wavelength, 2.0 * M_PI * std::sin(angle) / wavelength,
                       rng.uniform(0.0, 2.0 * M_PI), rng.uniform(0.04, 0.12)});
    }
    for (std::size_t y = 0; y < bg.height; ++y) {
      for (std::size_t x = 0; x < bg.width; ++x) {
        double v = base;
        for (const Wave& w : waves) {
          v += w.amplitude * std::sin(w.fx * static_cast<double>(x) + w.fy * static_cast<double>(y) + w.phase);
        }
        v += rng.uniform(-0.03, 0.03);
        bg.at(x, y, c) = static_cast<float>(std::clamp(v, 0.0, 1.0));
      }
    }
  }
  return bg;
}

}  // namespace

SyntheticScene::Appearance SyntheticScene::random_appearance(Rng& rng) {
  Appearance look;
  look.primary = random_colour(rng);
  look.secondary = random_colour(rng);
  look.pattern = static_cast<int>(rng.index(4));
  look.period = rng.uniform(0.2, 0.5);
  return look;
}

std::vector<BBox> SyntheticScene::simulate(Rng& rng, bool keep_inside) const {
  const SynthConfig& c = config_;
  const double fw = static_cast<double>(c.frame_width), fh = static_cast<double>(c.frame_height);
  const double side = rng.uniform(c.target_min_size, c.target_max_size);
  const double aspect = std::exp(rng.uniform(std::log(0.6), std::log(1.6)));
  double w = side * std::sqrt(aspect), h = side / std::sqrt(aspect);
  double cx = rng.uniform(0.5 * w + 1.0, fw - 0.5 * w - 1.0);
  double cy = rng.uniform(0.5 * h + 1.0, fh - 0.5 * h - 1.0);
  const double heading = rng.uniform(0.0, 2.0 * M_PI);
  const double speed = rng.uniform(0.3, 1.0) * c.max_speed;
  double vx = speed * std::cos(heading), vy = speed * std::sin(heading);
  const double min_side = 0.8 * c.target_min_size, max_side = 1.2 * c.target_max_size;

  std::vector<BBox> boxes;
  boxes.reserve(c.frames);
  for (std::size_t f = 0; f < c.frames; ++f) {
    if (f > 0) {
      vx += rng.normal(0.0, c.random_walk_sigma);
      vy += rng.normal(0.0, c.random_walk_sigma);
      const double cap = 2.0 * c.max_speed;
      const double norm = std::hypot(vx, vy);
      if (norm > cap && norm > 0.0) {
        vx *= cap / norm;
        vy *= cap / norm;
      }
      const double growth = std::exp(rng.normal(0.0, c.scale_jitter));
      if (std::sqrt(w * h) * growth >= min_side && std::sqrt(w * h) * growth <= max_side) {
        w *= growth;
        h *= growth;
      }
      cx += vx;
      cy += vy;
    }
    if (keep_inside) {
      // Reflect off the walls so the box never leaves the frame.
      if (cx - 0.5 * w < 0.0) {
        cx = w - cx;
        vx = std::abs(vx);
      } else if (cx + 0.5 * w > fw) {
        cx = 2.0 * fw - w - cx;
        vx = -std::abs(vx);
      }
      if (cy - 0.5 * h < 0.0) {
        cy = h - cy;
        vy = std::abs(vy);
      } else if (cy + 0.5 * h > fh) {
        cy = 2.0 * fh - h - cy;
        vy = -std::abs(vy);
      }
      cx = std::clamp(cx, 0.5 * w, fw - 0.5 * w);
      cy = std::clamp(cy, 0.5 * h, fh - 0.5 * h);
    }
    boxes.push_back(BBox::from_center(cx, cy, w, h));
  }
  return boxes;
}

SyntheticScene::SyntheticScene(const SynthConfig& config) : config_(config) {
  config_.validate();
  Rng rng(config_.seed);
  background_ = make_background(config_, rng);
  target_.look = random_appearance(rng);
  target_.boxes = simulate(rng, true);
  for (std::size_t d = 0; d < config_.distractors; ++d) {
    Track track;
    track.look = random_appearance(rng);
    track.look.primary = mix(target_.look.primary, track.look.primary, config_.distractor_similarity);
    track.look.secondary = mix(target_.look.secondary, track.look.secondary, config_.distractor_similarity);
    track.boxes = simulate(rng, true);
    distractors_.push_back(std::move(track));
  }
}

void SyntheticScene::paint(Image& image, const Track& track, std::size_t frame) const {
  const BBox& b = track.boxes.at(frame);
  const Appearance& look = track.look;
  const long x_lo = std::max(0L, static_cast<long>(std::floor(b.x - 0.5)));
  const long x_hi = std::min(static_cast<long>(image.width) - 1, static_cast<long>(std::ceil(b.right())));
  const long y_lo = std::max(0L, static_cast<long>(std::floor(b.y - 0.5)));
  const long y_hi = std::min(static_cast<long>(image.height) - 1, static_cast<long>(std::ceil(b.bottom())));
  for (long py = y_lo; py <= y_hi; ++py) {
    const double v = (static_cast<double>(py) + 0.5 - b.y) / b.h;
    if (v < 0.0 || v >= 1.0) continue;
    for (long px = x_lo; px <= x_hi; ++px) {
      const double u = (static_cast<double>(px) + 0.5 - b.x) / b.w;
      if (u < 0.0 || u >= 1.0) continue;
      bool alt = false;
      switch (look.pattern) {
        case 0:
          alt = (static_cast<int>(u / look.period) + static_cast<int>(v / look.period)) % 2 == 1;
          break;
        case 1:
          alt = static_cast<int>(v / look.period) % 2 == 1;
          break;
        case 2:
          alt = static_cast<int>(u / look.period) % 2 == 1;
          break;
        default:
          alt = u < 0.18 || u > 0.82 || v < 0.18 || v > 0.82;
          break;
      }
      const auto& colour = alt ? look.secondary : look.primary;
      for (std::size_t c = 0; c < 3; ++c) {
        image.at(static_cast<std::size_t>(px), static_cast<std::size_t>(py), c) = colour[c];
      }
    }
  }
}

Image SyntheticScene::render(std::size_t frame) const {
  if (frame >= config_.frames) throw std::out_of_range("frame " + std::to_string(frame));
  Image image = background_;
  for (const Track& d : distractors_) paint(image, d, frame);
  paint(image, target_, frame);
  return image;
}

Sequence generate_sequence(const SynthConfig& config) {
  const SyntheticScene scene(config);
  Sequence seq;
  seq.name = "synth-" + std::to_string(config.seed);
  for (std::size_t f = 0; f < scene.size(); ++f) {
    seq.frames.push_back(scene.render(f));
    seq.gt.push_back(scene.gt(f));
  }
  return seq;
}

TrainingPair sample_training_pair(const Image& template_frame, const BBox& template_gt,
                                  const Image& search_frame, const BBox& search_gt, AugMode aug,
                                  Rng& rng, const PairGeometry& geometry) {
  TrainingPair pair;
  pair.template_crop =
      make_crop(template_frame, template_gt, geometry.template_factor, geometry.template_size).first;

  double side = crop_side(search_gt, geometry.search_factor);
  double cx = search_gt.cx(), cy = search_gt.cy();
  if (aug == AugMode::kStrong) {
    side *= std::exp(rng.uniform(std::log(kMinScaleJitter), std::log(kMaxScaleJitter)));
    cx += rng.uniform(-kMaxShiftFraction, kMaxShiftFraction) * side;
    cy += rng.uniform(-kMaxShiftFraction, kMaxShiftFraction) * side;
  }
  auto [crop, spec] = crop_window(search_frame, cx, cy, side, geometry.search_size, geometry.search_factor);
  pair.search_crop = std::move(crop);
  pair.search_spec = spec;
  pair.gt_in_search = spec.box_to_crop(search_gt);
  return pair;
}

TrainingPair sample_training_pair(const Sequence& sequence, AugMode aug, Rng& rng,
                                  const PairGeometry& geometry, std::size_t max_gap) {
  if (sequence.size() == 0) throw std::invalid_argument("sample_training_pair: empty sequence");
  const std::size_t a = rng.index(sequence.size());
  const std::size_t lo = a > max_gap ? a - max_gap : 0;
  const std::size_t hi = std::min(sequence.size() - 1, a + max_gap);
  const std::size_t b = lo + rng.index(hi - lo + 1);
  return sample_training_pair(sequence.frames[a], sequence.gt[a], sequence.frames[b], sequence.gt[b],
                              aug, rng, geometry);
}

}  // namespace swintrack
