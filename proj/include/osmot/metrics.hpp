#pragma once

#include <string>
#include <utility>
#include <vector>

#include "osmot/mot_format.hpp"

namespace osmot {

/// Which ground-truth rows are scored. With the filter enabled a row is kept
/// when its class (extra[0]) is unset (−1) or the pedestrian class, and its
/// visibility (extra[1]) is unset (−1) or positive.
struct GtFilter {
  bool enabled = true;
  int pedestrian_class = 1;
};

SequenceResult filter_ground_truth(const SequenceResult& gt, const GtFilter& filter = {});

struct ClearCounts {
  long fp = 0;
  long fn = 0;
  long idsw = 0;
  long matches = 0;
  long gt_total = 0;
};

struct FrameCorrespondence {
  long frame = 0;
  std::vector<std::pair<long, long>> pairs;  // (gt id, hypothesis id)
};

struct ClearResult {
  std::vector<FrameCorrespondence> frames;
  ClearCounts counts;
};

/// Per-frame CLEAR correspondences. Pairs need IoU >= iou_thresh. A
/// target's last hypothesis is kept while still valid; the remainder is
/// matched optimally on 1 − IoU. A switch is a target whose hypothesis
/// differs from the one it had at its previous matched frame.
ClearResult clear_match(const SequenceResult& gt, const SequenceResult& hyp,
                        double iou_thresh = 0.5);

/// 100·(1 − (FP + FN + IDSW) / gt_total). Throws DegenerateError when
/// gt_total is 0.
double mota(const ClearCounts& counts);

struct IdentityScores {
  double idf1 = 0;
  double idp = 0;
  double idr = 0;
  long idtp = 0;
  long idfp = 0;
  long idfn = 0;
};

/// Number of frames in which each (gt, hyp) trajectory pair overlaps with
/// IoU >= iou_thresh; rows follow ascending gt id, columns ascending hyp id.
struct TrajectoryOverlap {
  std::vector<long> gt_ids;
  std::vector<long> hyp_ids;
  std::vector<long> gt_lengths;
  std::vector<long> hyp_lengths;
  std::vector<std::vector<long>> shared;
};

TrajectoryOverlap trajectory_overlap(const SequenceResult& gt, const SequenceResult& hyp,
                                     double iou_thresh);

/// Identity precision/recall/F1 from the one-to-one trajectory matching
/// with the most identity true positives.
IdentityScores identity_metrics(const SequenceResult& gt, const SequenceResult& hyp,
                                double iou_thresh = 0.5);

struct TrackedRatios {
  double mt = 0;  // percent of targets matched in more than 80% of their frames
  double ml = 0;  // percent matched in less than 20%
  long mt_count = 0;
  long ml_count = 0;
  long trajectories = 0;
};

TrackedRatios mt_ml(const SequenceResult& gt, const ClearResult& correspondences);

struct MetricsReport {
  double mota = 0;
  double idf1 = 0;
  double idp = 0;
  double idr = 0;
  double mt = 0;
  double ml = 0;
  long fp = 0;
  long fn = 0;
  long idsw = 0;
  long gt_boxes = 0;
  long trajectories = 0;
};

/// Filters the ground truth, then runs CLEAR, identity and MT/ML scoring.
MetricsReport evaluate(const SequenceResult& gt, const SequenceResult& hyp,
                       double iou_thresh = 0.5, const GtFilter& filter = {});

std::string format_report_table(const MetricsReport& r);
std::string format_report_kv(const MetricsReport& r);

}  // namespace osmot
