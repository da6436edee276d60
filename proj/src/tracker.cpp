#include "swintrack/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace swintrack::inline SWINTRACK_PRECISION_NS {

namespace {

// Keeps the box inside the frame with at least one pixel of extent.
BBox clip_to_frame(BBox box, const Image& frame) {
  const double fw = static_cast<double>(frame.width), fh = static_cast<double>(frame.height);
  const double cx = std::clamp(box.cx(), 0.0, fw), cy = std::clamp(box.cy(), 0.0, fh);
  const double w = std::clamp(box.w, 1.0, fw), h = std::clamp(box.h, 1.0, fh);
  return BBox::from_center(cx, cy, w, h);
}

}  // namespace

TrackState init_track(const Image& first_frame, const BBox& gt, const SwinTrackModel& model,
                      const TrackerConfig& config) {
  config.validate();
  if (!gt.valid()) throw std::invalid_argument("init_track: degenerate box " + to_string(gt));
  const auto [crop, spec] =
      make_crop(first_frame, gt, config.template_factor, model.config().template_size);
  TrackState state;
  // Detached: the template is a constant for the rest of the sequence.
  TokenSet tokens = model.embed(crop, SourceKind::kTemplate);
  state.template_tokens = TokenSet{detach(tokens.tokens), tokens.tag};
  state.previous = gt;
  state.crop_scale = spec.scale();
  state.config = config;
  return state;
}

TrackOutput track_step(TrackState& state, const Image& frame, const SwinTrackModel& model,
                       AttentionRecorder* recorder) {
  const ModelConfig& mc = model.config();
  if (state.template_tokens.tag.grid != mc.template_grid()) {
    throw std::invalid_argument("track_step: state was built for a different model configuration");
  }
  const auto [crop, spec] = make_crop(frame, state.previous, state.config.search_factor, mc.search_size);
  const ResponseMap response =
      model.forward(state.template_tokens, model.embed(crop, SourceKind::kSearch), recorder);

  TrackOutput out;
  out.search_crop = spec;
  out.scores.assign(response.cls.data().begin(), response.cls.data().end());
  out.penalized = hanning_penalty(out.scores, response.grid, state.config.gamma);
  out.best_index = static_cast<std::size_t>(
      std::max_element(out.penalized.begin(), out.penalized.end()) - out.penalized.begin());
  const BBox in_crop = decode_box(out.best_index, response.reg.data().subspan(out.best_index * 4, 4),
                                  response.grid, mc.stride);
  out.box = clip_to_frame(spec.box_to_frame(in_crop), frame);
  state.previous = out.box;
  state.crop_scale = spec.scale();
  return out;
}

}  // namespace swintrack::inline SWINTRACK_PRECISION_NS
