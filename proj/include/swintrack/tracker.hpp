#pragma once

#include "swintrack/config.hpp"
#include "swintrack/crop.hpp"
#include "swintrack/model.hpp"

namespace swintrack::inline SWINTRACK_PRECISION_NS {

// Per-sequence memory. The template tokens are computed once, from the
// first frame, and never updated.
struct TrackState {
  TokenSet template_tokens;
  BBox previous;          // frame coordinates
  double crop_scale = 1.0;  // frame pixels per search-crop pixel at the last step
  TrackerConfig config;
};

// Result of one step, with intermediate maps kept for inspection.
struct TrackOutput {
  BBox box;                    // frame coordinates
  std::size_t best_index = 0;  // argmax cell of the penalised map
  std::vector<double> scores;  // post-sigmoid classification map
  std::vector<double> penalized;
  CropSpec search_crop;
};

TrackState init_track(const Image& first_frame, const BBox& gt, const SwinTrackModel& model,
                      const TrackerConfig& config);

// Crops around the previous centre, runs the model, applies the Hanning
// penalty, decodes the argmax cell and maps the box back into the frame.
// The box is written back into `state.previous`.
TrackOutput track_step(TrackState& state, const Image& frame, const SwinTrackModel& model,
                       AttentionRecorder* recorder = nullptr);

}  // namespace swintrack::inline SWINTRACK_PRECISION_NS
