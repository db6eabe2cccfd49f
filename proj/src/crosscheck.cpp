#include "osmot/crosscheck.hpp"

#include <cmath>
#include <cstdio>
#include <vector>

#include "osmot/prng.hpp"

namespace osmot {

namespace {

struct AssignSearch {
  const CostMatrix& costs;
  std::vector<bool> used;
  BruteForceAssignment best{-1, 0};

  void visit(Index row, long matched, double cost) {
    if (row == costs.rows()) {
      if (matched > best.matched || (matched == best.matched && cost < best.cost)) {
        best = {matched, cost};
      }
      return;
    }
    visit(row + 1, matched, cost);
    for (Index c = 0; c < costs.cols(); ++c) {
      if (used[c] || std::isinf(costs(row, c))) continue;
      used[c] = true;
      visit(row + 1, matched + 1, cost + costs(row, c));
      used[c] = false;
    }
  }
};

struct IdentitySearch {
  const TrajectoryOverlap& ov;
  std::vector<bool> used;
  long best = 0;

  void visit(std::size_t g, long total) {
    if (g == ov.gt_ids.size()) {
      best = std::max(best, total);
      return;
    }
    visit(g + 1, total);
    for (std::size_t h = 0; h < ov.hyp_ids.size(); ++h) {
      if (used[h]) continue;
      used[h] = true;
      visit(g + 1, total + ov.shared[g][h]);
      used[h] = false;
    }
  }
};

// Small random sequence: up to `ids` trajectories wandering on a coarse
// grid so overlaps and identity mixups are common.
SequenceResult random_sequence(SplitMix64& rng, int ids, long frames, double presence) {
  std::vector<MotRecord> rows;
  for (long f = 1; f <= frames; ++f) {
    for (int id = 1; id <= ids; ++id) {
      if (!rng.bernoulli(presence)) continue;
      MotRecord r;
      r.frame = f;
      r.id = id;
      r.left = 10.0 * static_cast<double>(rng.below(4));
      r.top = 10.0 * static_cast<double>(rng.below(2));
      r.width = 10;
      r.height = 10;
      rows.push_back(r);
    }
  }
  return SequenceResult::from_records(std::move(rows));
}

bool same_scores(const IdentityScores& a, const IdentityScores& b) {
  return a.idtp == b.idtp && a.idfp == b.idfp && a.idfn == b.idfn;
}

}  // namespace

BruteForceAssignment brute_force_assignment(const CostMatrix& costs) {
  AssignSearch s{costs, std::vector<bool>(static_cast<std::size_t>(costs.cols()), false)};
  s.visit(0, 0, 0.0);
  return s.best;
}

IdentityScores brute_force_identity(const SequenceResult& gt, const SequenceResult& hyp,
                                    double iou_thresh) {
  const TrajectoryOverlap ov = trajectory_overlap(gt, hyp, iou_thresh);
  IdentitySearch s{ov, std::vector<bool>(ov.hyp_ids.size(), false)};
  s.visit(0, 0);
  long total_gt = 0, total_hyp = 0;
  for (long n : ov.gt_lengths) total_gt += n;
  for (long n : ov.hyp_lengths) total_hyp += n;
  IdentityScores r;
  r.idtp = s.best;
  r.idfn = total_gt - s.best;
  r.idfp = total_hyp - s.best;
  if (total_gt + total_hyp > 0) {
    r.idf1 = 100.0 * 2.0 * static_cast<double>(s.best) / static_cast<double>(total_gt + total_hyp);
  }
  if (total_hyp > 0) r.idp = 100.0 * static_cast<double>(s.best) / static_cast<double>(total_hyp);
  if (total_gt > 0) r.idr = 100.0 * static_cast<double>(s.best) / static_cast<double>(total_gt);
  return r;
}

CrossCheckSummary run_cross_checks(std::uint64_t seed, long count) {
  CrossCheckSummary out;
  SplitMix64 rng = SplitMix64::stream(seed, 1);
  for (long k = 0; k < count; ++k) {
    const Index rows = 1 + static_cast<Index>(rng.below(7));
    const Index cols = 1 + static_cast<Index>(rng.below(7));
    CostMatrix c(rows, cols);
    for (Index i = 0; i < rows; ++i) {
      for (Index j = 0; j < cols; ++j) {
        c(i, j) = rng.bernoulli(0.15) ? kInfeasible : rng.uniform(0.0, 10.0);
      }
    }
    const std::vector<Match> m = hungarian(c);
    const BruteForceAssignment ref = brute_force_assignment(c);
    ++out.assignment_cases;
    if (static_cast<long>(m.size()) != ref.matched || assignment_cost(c, m) != ref.cost) {
      ++out.assignment_mismatches;
    }
  }
  SplitMix64 seq_rng = SplitMix64::stream(seed, 2);
  for (long k = 0; k < count; ++k) {
    const int ids = 1 + static_cast<int>(seq_rng.below(3));
    const SequenceResult gt = random_sequence(seq_rng, ids, 6, 0.8);
    const SequenceResult hyp = random_sequence(seq_rng, ids, 6, 0.8);
    ++out.identity_cases;
    if (!same_scores(identity_metrics(gt, hyp), brute_force_identity(gt, hyp))) {
      ++out.identity_mismatches;
    }
  }
  return out;
}

std::string format_cross_checks(const CrossCheckSummary& s) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "assignment_cases=%ld\nassignment_mismatches=%ld\n"
                "identity_cases=%ld\nidentity_mismatches=%ld\n",
                s.assignment_cases, s.assignment_mismatches, s.identity_cases,
                s.identity_mismatches);
  return buf;
}

}  // namespace osmot
