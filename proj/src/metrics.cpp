#include "osmot/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>

#include "osmot/errors.hpp"
#include "osmot/hungarian.hpp"

namespace osmot {

namespace {

std::map<long, std::vector<const MotRecord*>> group_by_frame(const SequenceResult& s) {
  std::map<long, std::vector<const MotRecord*>> out;
  for (const MotRecord& r : s.records()) out[r.frame].push_back(&r);
  for (auto& [frame, rows] : out) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const MotRecord* a, const MotRecord* b) { return a->id < b->id; });
  }
  return out;
}

double percent(long num, long den) {
  return den == 0 ? 0.0 : 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

SequenceResult filter_ground_truth(const SequenceResult& gt, const GtFilter& filter) {
  if (!filter.enabled) return gt;
  std::vector<MotRecord> kept;
  for (const MotRecord& r : gt.records()) {
    const double cls = r.extra[0];
    const double vis = r.extra[1];
    const bool class_ok = cls == -1 || cls == filter.pedestrian_class;
    const bool visible = vis == -1 || vis > 0;
    if (class_ok && visible) kept.push_back(r);
  }
  return SequenceResult::from_records(std::move(kept));
}

ClearResult clear_match(const SequenceResult& gt, const SequenceResult& hyp,
                        double iou_thresh) {
  const auto gt_frames = group_by_frame(gt);
  const auto hyp_frames = group_by_frame(hyp);
  std::set<long> all_frames;
  for (const auto& [f, _] : gt_frames) all_frames.insert(f);
  for (const auto& [f, _] : hyp_frames) all_frames.insert(f);

  static const std::vector<const MotRecord*> none;
  std::map<long, long> last_hyp;  // gt id -> hyp id at its latest match
  ClearResult result;

  for (long frame : all_frames) {
    const auto git = gt_frames.find(frame);
    const auto hit = hyp_frames.find(frame);
    const auto& g = git == gt_frames.end() ? none : git->second;
    const auto& h = hit == hyp_frames.end() ? none : hit->second;

    CostMatrix dist(static_cast<Index>(g.size()), static_cast<Index>(h.size()));
    for (std::size_t i = 0; i < g.size(); ++i) {
      for (std::size_t j = 0; j < h.size(); ++j) {
        const double overlap = iou(g[i]->box(), h[j]->box());
        dist(i, j) = overlap >= iou_thresh ? 1.0 - overlap : kInfeasible;
      }
    }

    std::vector<bool> g_used(g.size(), false), h_used(h.size(), false);
    FrameCorrespondence fc{frame, {}};

    // Keep last frame's pairing where it is still valid.
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto prev = last_hyp.find(g[i]->id);
      if (prev == last_hyp.end()) continue;
      for (std::size_t j = 0; j < h.size(); ++j) {
        if (h_used[j] || h[j]->id != prev->second) continue;
        if (dist(i, j) != kInfeasible) {
          g_used[i] = h_used[j] = true;
          fc.pairs.emplace_back(g[i]->id, h[j]->id);
        }
        break;
      }
    }

    std::vector<Index> gi, hi;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!g_used[i]) gi.push_back(static_cast<Index>(i));
    }
    for (std::size_t j = 0; j < h.size(); ++j) {
      if (!h_used[j]) hi.push_back(static_cast<Index>(j));
    }
    CostMatrix rest(static_cast<Index>(gi.size()), static_cast<Index>(hi.size()));
    for (std::size_t a = 0; a < gi.size(); ++a) {
      for (std::size_t b = 0; b < hi.size(); ++b) rest(a, b) = dist(gi[a], hi[b]);
    }
    for (const Match& m : hungarian(rest)) {
      const MotRecord& go = *g[gi[m.row]];
      const MotRecord& ho = *h[hi[m.col]];
      g_used[gi[m.row]] = h_used[hi[m.col]] = true;
      const auto prev = last_hyp.find(go.id);
      if (prev != last_hyp.end() && prev->second != ho.id) ++result.counts.idsw;
      fc.pairs.emplace_back(go.id, ho.id);
    }

    for (const auto& [gid, hid] : fc.pairs) last_hyp[gid] = hid;
    result.counts.matches += static_cast<long>(fc.pairs.size());
    result.counts.fn += static_cast<long>(std::count(g_used.begin(), g_used.end(), false));
    result.counts.fp += static_cast<long>(std::count(h_used.begin(), h_used.end(), false));
    result.counts.gt_total += static_cast<long>(g.size());
    std::sort(fc.pairs.begin(), fc.pairs.end());
    result.frames.push_back(std::move(fc));
  }
  return result;
}

double mota(const ClearCounts& c) {
  if (c.gt_total <= 0) throw DegenerateError("mota: no ground-truth boxes");
  return 100.0 * (1.0 - static_cast<double>(c.fp + c.fn + c.idsw) /
                            static_cast<double>(c.gt_total));
}

TrajectoryOverlap trajectory_overlap(const SequenceResult& gt, const SequenceResult& hyp,
                                     double iou_thresh) {
  TrajectoryOverlap t;
  std::map<long, std::size_t> gidx, hidx;
  for (const MotRecord& r : gt.records()) gidx[r.id];
  for (const MotRecord& r : hyp.records()) hidx[r.id];
  for (auto& [id, idx] : gidx) {
    idx = t.gt_ids.size();
    t.gt_ids.push_back(id);
  }
  for (auto& [id, idx] : hidx) {
    idx = t.hyp_ids.size();
    t.hyp_ids.push_back(id);
  }
  t.gt_lengths.assign(t.gt_ids.size(), 0);
  t.hyp_lengths.assign(t.hyp_ids.size(), 0);
  t.shared.assign(t.gt_ids.size(), std::vector<long>(t.hyp_ids.size(), 0));
  for (const MotRecord& r : gt.records()) ++t.gt_lengths[gidx[r.id]];
  for (const MotRecord& r : hyp.records()) ++t.hyp_lengths[hidx[r.id]];

  const auto gt_frames = group_by_frame(gt);
  const auto hyp_frames = group_by_frame(hyp);
  for (const auto& [frame, g] : gt_frames) {
    const auto hit = hyp_frames.find(frame);
    if (hit == hyp_frames.end()) continue;
    for (const MotRecord* go : g) {
      for (const MotRecord* ho : hit->second) {
        if (iou(go->box(), ho->box()) >= iou_thresh) {
          ++t.shared[gidx[go->id]][hidx[ho->id]];
        }
      }
    }
  }
  return t;
}

IdentityScores identity_metrics(const SequenceResult& gt, const SequenceResult& hyp,
                                double iou_thresh) {
  const TrajectoryOverlap t = trajectory_overlap(gt, hyp, iou_thresh);
  long total_gt = 0, total_hyp = 0;
  for (long n : t.gt_lengths) total_gt += n;
  for (long n : t.hyp_lengths) total_hyp += n;

  // Maximising shared frames over one-to-one trajectory pairings is the
  // same as minimising IDFN + IDFP.
  CostMatrix cost(static_cast<Index>(t.gt_ids.size()), static_cast<Index>(t.hyp_ids.size()));
  for (std::size_t i = 0; i < t.gt_ids.size(); ++i) {
    for (std::size_t j = 0; j < t.hyp_ids.size(); ++j) {
      cost(i, j) = -static_cast<double>(t.shared[i][j]);
    }
  }
  long idtp = 0;
  for (const Match& m : hungarian(cost)) idtp += t.shared[m.row][m.col];

  IdentityScores s;
  s.idtp = idtp;
  s.idfn = total_gt - idtp;
  s.idfp = total_hyp - idtp;
  s.idp = percent(idtp, total_hyp);
  s.idr = percent(idtp, total_gt);
  s.idf1 = percent(2 * idtp, total_gt + total_hyp);
  return s;
}

TrackedRatios mt_ml(const SequenceResult& gt, const ClearResult& correspondences) {
  std::map<long, long> present, matched;
  for (const MotRecord& r : gt.records()) ++present[r.id];
  for (const FrameCorrespondence& fc : correspondences.frames) {
    for (const auto& [gid, hid] : fc.pairs) ++matched[gid];
  }
  TrackedRatios out;
  out.trajectories = static_cast<long>(present.size());
  for (const auto& [id, n] : present) {
    const auto it = matched.find(id);
    const long m = it == matched.end() ? 0 : it->second;
    // Strict inequalities: exactly 80% is not mostly tracked.
    if (5 * m > 4 * n) ++out.mt_count;
    if (5 * m < n) ++out.ml_count;
  }
  out.mt = percent(out.mt_count, out.trajectories);
  out.ml = percent(out.ml_count, out.trajectories);
  return out;
}

MetricsReport evaluate(const SequenceResult& gt_raw, const SequenceResult& hyp,
                       double iou_thresh, const GtFilter& filter) {
  const SequenceResult gt = filter_ground_truth(gt_raw, filter);
  const ClearResult clear = clear_match(gt, hyp, iou_thresh);
  const IdentityScores ids = identity_metrics(gt, hyp, iou_thresh);
  const TrackedRatios tracked = mt_ml(gt, clear);
  MetricsReport r;
  r.mota = mota(clear.counts);
  r.idf1 = ids.idf1;
  r.idp = ids.idp;
  r.idr = ids.idr;
  r.mt = tracked.mt;
  r.ml = tracked.ml;
  r.fp = clear.counts.fp;
  r.fn = clear.counts.fn;
  r.idsw = clear.counts.idsw;
  r.gt_boxes = clear.counts.gt_total;
  r.trajectories = tracked.trajectories;
  return r;
}

std::string format_report_table(const MetricsReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "%8s %8s %8s %8s %8s %8s %8s %8s %8s %8s\n"
                "%8.3f %8.3f %8.3f %8.3f %8.3f %8.3f %8ld %8ld %8ld %8ld\n",
                "MOTA", "IDF1", "IDP", "IDR", "MT", "ML", "FP", "FN", "IDSW", "GT", r.mota,
                r.idf1, r.idp, r.idr, r.mt, r.ml, r.fp, r.fn, r.idsw, r.gt_boxes);
  return buf;
}

std::string format_report_kv(const MetricsReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "MOTA=%.3f\nIDF1=%.3f\nIDP=%.3f\nIDR=%.3f\nMT=%.3f\nML=%.3f\n"
                "FP=%ld\nFN=%ld\nIDSW=%ld\nGT=%ld\n",
                r.mota, r.idf1, r.idp, r.idr, r.mt, r.ml, r.fp, r.fn, r.idsw, r.gt_boxes);
  return buf;
}

}  // namespace osmot
