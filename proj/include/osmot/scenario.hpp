#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "osmot/embedding.hpp"
#include "osmot/mot_format.hpp"
#include "osmot/tracker.hpp"

namespace osmot {

class KeyValueFile;

enum class MotionModel { linear, crossing, scale_ramp };

MotionModel parse_motion_model(const std::string& name);
std::string to_string(MotionModel m);

/// Frames [first, last] during which identity `identity` (1-based) is hidden.
struct OcclusionWindow {
  int identity = 1;
  long first = 1;
  long last = 1;
};

struct ScenarioConfig {
  int num_identities = 5;
  long num_frames = 200;
  double image_width = 1920;
  double image_height = 1080;
  double target_width = 40;
  double target_height = 100;
  MotionModel motion = MotionModel::crossing;
  double embedding_noise_sigma = 0;  // expected norm of the noise vector
  double box_noise_sigma = 0;        // pixels, per box coordinate
  double detection_dropout_rate = 0;
  double false_positive_rate = 0;    // chance of one clutter box per frame
  std::vector<OcclusionWindow> occlusion_windows;
  Eigen::Index embedding_dim = kEmbeddingDim;
  std::uint64_t seed = 0;

  /// Throws ConfigError for invalid rates or geometry that cannot fit.
  void validate() const;

  /// Keys: num_identities, num_frames, image_width, image_height,
  /// target_width, target_height, motion (linear|crossing|scale-ramp),
  /// embedding_noise_sigma, box_noise_sigma, detection_dropout_rate,
  /// false_positive_rate, occlusion (id:first-last[,id:first-last...]),
  /// embedding_dim, seed.
  static ScenarioConfig from_keyvalue(const KeyValueFile& kv);
};

struct FrameCandidates {
  long frame = 1;
  std::vector<Candidate> candidates;
};

struct SyntheticSequence {
  SequenceResult gt;  // extra = (class 1, visibility 1 or 0 when occluded, −1)
  std::vector<FrameCandidates> frames;  // one entry per frame 1..num_frames
};

/// Deterministic in (config, seed). Streams: 1 geometry, 2 detections,
/// 3 embedding noise, 4 clutter, 5 identity embeddings (only when the
/// identities outnumber the embedding axes).
SyntheticSequence generate(const ScenarioConfig& cfg);

/// Detection rows (id −1) and the matching embedding rows, in file order.
struct DetectionSet {
  SequenceResult detections;
  Matrix<double> embeddings;
};

DetectionSet to_detection_set(const SyntheticSequence& s);

/// Pairs file-order detection rows with their embedding rows, then orders
/// both by frame (stable).
DetectionSet make_detection_set(std::vector<MotRecord> rows, Matrix<double> embeddings);

/// Groups detections per frame 1..last frame; row i of `embeddings` belongs
/// to detection record i.
std::vector<FrameCandidates> to_frames(const DetectionSet& d);

/// Runs a fresh tracker over every frame and collects its output.
SequenceResult run_tracker(const std::vector<FrameCandidates>& frames, const AssocConfig& cfg);

}  // namespace osmot
