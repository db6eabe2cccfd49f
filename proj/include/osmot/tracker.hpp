#pragma once

#include <optional>
#include <span>
#include <vector>

#include "osmot/box.hpp"
#include "osmot/embedding.hpp"
#include "osmot/hungarian.hpp"
#include "osmot/kalman.hpp"

namespace osmot {

class KeyValueFile;

struct AssocConfig {
  double epsilon = 0.9;                     // template momentum
  int max_lost = 30;                        // frames a track may go unmatched
  double appearance_cost_threshold = 0.7;   // larger cosine costs are infeasible
  double iou_match_threshold = 0.5;         // second-stage minimum IoU
  double nms_iou = 0.45;
  double gating_threshold = 9.4877;         // chi-square 0.95, 4 dof
  bool use_appearance = true;               // false: IoU-only ablation
  KalmanConfig kalman;

  void validate() const;

  /// Keys mirror the field names; missing keys keep their defaults.
  static AssocConfig from_keyvalue(const KeyValueFile& kv);
};

struct Candidate {
  Box box;
  double score = 1.0;
  Embedding embedding;
};

enum class TrackStatus { active, inactive };

struct Track {
  int id = 0;
  KalmanTrackState kstate;
  Embedding appearance;  // EMA template
  TrackStatus status = TrackStatus::active;
  int frames_since_update = 0;
  long start_frame = 0;
};

struct TrackOutput {
  int id = 0;
  Box box;

  bool operator==(const TrackOutput&) const = default;
};

/// Greedy suppression in descending score order (stable for equal scores);
/// kept boxes pairwise overlap below iou_thresh.
std::vector<Candidate> nms(std::span<const Candidate> cands, double iou_thresh);

/// cost[i][j] = 1 − t_i · e_j.
CostMatrix appearance_cost(std::span<const Track> tracks, std::span<const Candidate> cands);

/// Marks entries whose squared Mahalanobis distance exceeds the gating
/// threshold as infeasible; a distance equal to the threshold is kept.
CostMatrix gate_costs(CostMatrix costs, std::span<const Track> tracks,
                      std::span<const Candidate> cands, const AssocConfig& cfg);

/// Hungarian matching on 1 − IoU(predicted track box, candidate box);
/// pairs below iou_match_threshold are infeasible. Indices refer to the
/// given spans.
std::vector<Match> iou_stage(std::span<const Track> tracks, std::span<const Candidate> cands,
                             const AssocConfig& cfg);

/// ε·prev + (1 − ε)·next without normalisation.
Eigen::VectorXd blend_templates(const Eigen::VectorXd& prev, const Eigen::VectorXd& next,
                                double epsilon);

/// Blended template renormalised to unit length.
Embedding update_template(const Embedding& prev, const Embedding& next, double epsilon);

/// Online association engine for one sequence. Not thread-safe; one
/// instance per sequence, distinct instances are independent.
class Tracker {
 public:
  explicit Tracker(AssocConfig cfg = {});

  /// Associates one frame of candidates and returns the tracks matched or
  /// born in this frame, ordered by id. Frame indices must strictly
  /// increase (SequencingError otherwise).
  std::vector<TrackOutput> step(long frame_index, std::span<const Candidate> cands);

  const std::vector<Track>& tracks() const { return tracks_; }
  const AssocConfig& config() const { return cfg_; }

 private:
  AssocConfig cfg_;
  std::vector<Track> tracks_;
  int next_id_ = 1;
  std::optional<long> last_frame_;
};

}  // namespace osmot
