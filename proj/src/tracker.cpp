#include "osmot/tracker.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "osmot/errors.hpp"
#include "osmot/keyvalue.hpp"

namespace osmot {

namespace {

CostMatrix iou_costs(std::span<const Track> tracks, std::span<const Candidate> cands,
                     std::span<const Index> track_idx, std::span<const Index> cand_idx,
                     double min_iou) {
  CostMatrix costs(track_idx.size(), cand_idx.size());
  for (std::size_t i = 0; i < track_idx.size(); ++i) {
    const Box predicted = tracks[track_idx[i]].kstate.box();
    for (std::size_t j = 0; j < cand_idx.size(); ++j) {
      const double overlap = iou(predicted, cands[cand_idx[j]].box);
      costs(i, j) = overlap < min_iou ? kInfeasible : 1.0 - overlap;
    }
  }
  return costs;
}

std::vector<Index> iota_indices(std::size_t n) {
  std::vector<Index> v(n);
  std::iota(v.begin(), v.end(), Index{0});
  return v;
}

}  // namespace

void AssocConfig::validate() const {
  if (!(epsilon >= 0 && epsilon <= 1)) throw ConfigError("epsilon must lie in [0, 1]");
  if (max_lost < 0) throw ConfigError("max_lost must be non-negative");
  if (!(appearance_cost_threshold >= 0 && appearance_cost_threshold <= 2)) {
    throw ConfigError("appearance_cost_threshold must lie in [0, 2]");
  }
  if (!(iou_match_threshold >= 0 && iou_match_threshold <= 1)) {
    throw ConfigError("iou_match_threshold must lie in [0, 1]");
  }
  if (!(nms_iou > 0 && nms_iou <= 1)) throw ConfigError("nms_iou must lie in (0, 1]");
  if (!(gating_threshold > 0)) throw ConfigError("gating_threshold must be positive");
  if (!(kalman.std_weight_position > 0) || !(kalman.std_weight_velocity > 0)) {
    throw ConfigError("kalman noise weights must be positive");
  }
}

AssocConfig AssocConfig::from_keyvalue(const KeyValueFile& kv) {
  AssocConfig c;
  c.epsilon = kv.get_double("epsilon", c.epsilon);
  c.max_lost = static_cast<int>(kv.get_int("max_lost", c.max_lost));
  c.appearance_cost_threshold =
      kv.get_double("appearance_cost_threshold", c.appearance_cost_threshold);
  c.iou_match_threshold = kv.get_double("iou_match_threshold", c.iou_match_threshold);
  c.nms_iou = kv.get_double("nms_iou", c.nms_iou);
  c.gating_threshold = kv.get_double("gating_threshold", c.gating_threshold);
  c.use_appearance = kv.get_bool("use_appearance", c.use_appearance);
  c.kalman.std_weight_position =
      kv.get_double("std_weight_position", c.kalman.std_weight_position);
  c.kalman.std_weight_velocity =
      kv.get_double("std_weight_velocity", c.kalman.std_weight_velocity);
  c.validate();
  return c;
}

std::vector<Candidate> nms(std::span<const Candidate> cands, double iou_thresh) {
  std::vector<std::size_t> order(cands.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return cands[a].score > cands[b].score;
  });
  std::vector<Candidate> kept;
  for (std::size_t idx : order) {
    const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](const Candidate& k) {
      return iou(k.box, cands[idx].box) >= iou_thresh;
    });
    if (!suppressed) kept.push_back(cands[idx]);
  }
  return kept;
}

CostMatrix appearance_cost(std::span<const Track> tracks, std::span<const Candidate> cands) {
  CostMatrix costs(tracks.size(), cands.size());
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    for (std::size_t j = 0; j < cands.size(); ++j) {
      if (tracks[i].appearance.dim() != cands[j].embedding.dim()) {
        throw InvalidInputError("appearance_cost: embedding dimensions differ");
      }
      costs(i, j) = 1.0 - tracks[i].appearance.cosine(cands[j].embedding);
    }
  }
  return costs;
}

CostMatrix gate_costs(CostMatrix costs, std::span<const Track> tracks,
                      std::span<const Candidate> cands, const AssocConfig& cfg) {
  if (costs.rows() != static_cast<Index>(tracks.size()) ||
      costs.cols() != static_cast<Index>(cands.size())) {
    throw ShapeError("gate_costs: cost matrix does not match tracks x candidates");
  }
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    for (std::size_t j = 0; j < cands.size(); ++j) {
      if (gating_distance(tracks[i].kstate, cands[j].box, cfg.kalman) > cfg.gating_threshold) {
        costs(i, j) = kInfeasible;
      }
    }
  }
  return costs;
}

std::vector<Match> iou_stage(std::span<const Track> tracks, std::span<const Candidate> cands,
                             const AssocConfig& cfg) {
  const auto ti = iota_indices(tracks.size());
  const auto ci = iota_indices(cands.size());
  return hungarian(iou_costs(tracks, cands, ti, ci, cfg.iou_match_threshold));
}

Eigen::VectorXd blend_templates(const Eigen::VectorXd& prev, const Eigen::VectorXd& next,
                                double epsilon) {
  if (prev.size() != next.size()) {
    throw InvalidInputError("blend_templates: embedding dimensions differ");
  }
  return epsilon * prev + (1.0 - epsilon) * next;
}

Embedding update_template(const Embedding& prev, const Embedding& next, double epsilon) {
  return Embedding::normalized(blend_templates(prev.values(), next.values(), epsilon));
}

Tracker::Tracker(AssocConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

std::vector<TrackOutput> Tracker::step(long frame_index, std::span<const Candidate> cands) {
  if (last_frame_ && frame_index <= *last_frame_) {
    throw SequencingError("frame " + std::to_string(frame_index) + " does not follow frame " +
                          std::to_string(*last_frame_));
  }
  last_frame_ = frame_index;

  const std::vector<Candidate> dets = nms(cands, cfg_.nms_iou);
  for (Track& t : tracks_) t.kstate = kalman_predict(t.kstate, cfg_.kalman);

  std::vector<Index> track_of_det(dets.size(), -1);
  std::vector<bool> track_matched(tracks_.size(), false);

  // Stage 1: appearance, gated by the motion model.
  if (cfg_.use_appearance && !tracks_.empty() && !dets.empty()) {
    CostMatrix costs = gate_costs(appearance_cost(tracks_, dets), tracks_, dets, cfg_);
    costs = (costs.array() > cfg_.appearance_cost_threshold).select(kInfeasible, costs);
    for (const Match& m : hungarian(costs)) {
      track_of_det[m.col] = m.row;
      track_matched[m.row] = true;
    }
  }

  // Stage 2: IoU on whatever stage 1 left over.
  std::vector<Index> open_tracks, open_dets;
  for (std::size_t i = 0; i < tracks_.size(); ++i) {
    if (!track_matched[i]) open_tracks.push_back(static_cast<Index>(i));
  }
  for (std::size_t j = 0; j < dets.size(); ++j) {
    if (track_of_det[j] < 0) open_dets.push_back(static_cast<Index>(j));
  }
  if (!open_tracks.empty() && !open_dets.empty()) {
    const CostMatrix costs =
        iou_costs(tracks_, dets, open_tracks, open_dets, cfg_.iou_match_threshold);
    for (const Match& m : hungarian(costs)) {
      track_of_det[open_dets[m.col]] = open_tracks[m.row];
      track_matched[open_tracks[m.row]] = true;
    }
  }

  std::vector<TrackOutput> out;
  for (std::size_t j = 0; j < dets.size(); ++j) {
    if (track_of_det[j] < 0) continue;
    Track& t = tracks_[track_of_det[j]];
    t.kstate = kalman_update(t.kstate, dets[j].box, cfg_.kalman);
    t.appearance = update_template(t.appearance, dets[j].embedding, cfg_.epsilon);
    t.status = TrackStatus::active;
    t.frames_since_update = 0;
    out.push_back({t.id, dets[j].box});
  }
  for (std::size_t i = 0; i < tracks_.size(); ++i) {
    if (track_matched[i]) continue;
    tracks_[i].status = TrackStatus::inactive;
    ++tracks_[i].frames_since_update;
  }
  std::erase_if(tracks_, [&](const Track& t) { return t.frames_since_update > cfg_.max_lost; });

  for (std::size_t j = 0; j < dets.size(); ++j) {
    if (track_of_det[j] >= 0) continue;
    Track t{next_id_++, kalman_initiate(dets[j].box, cfg_.kalman), dets[j].embedding,
            TrackStatus::active, 0, frame_index};
    out.push_back({t.id, dets[j].box});
    tracks_.push_back(std::move(t));
  }

  std::sort(out.begin(), out.end(),
            [](const TrackOutput& a, const TrackOutput& b) { return a.id < b.id; });
  return out;
}

}  // namespace osmot
