#pragma once

#include <cstdint>
#include <string>

#include "osmot/hungarian.hpp"
#include "osmot/metrics.hpp"

namespace osmot {

// Exhaustive reference solvers for small instances, used by the `oracle`
// command to cross-check the fast paths.

struct BruteForceAssignment {
  long matched = 0;
  double cost = 0;  // summed in row order
};

/// Best over all partial row→column injections: most feasible pairs first,
/// then least total cost. Intended for sizes up to about 8×8.
BruteForceAssignment brute_force_assignment(const CostMatrix& costs);

/// Identity scores from an exhaustive search over trajectory bijections.
IdentityScores brute_force_identity(const SequenceResult& gt, const SequenceResult& hyp,
                                    double iou_thresh = 0.5);

struct CrossCheckSummary {
  long assignment_cases = 0;
  long assignment_mismatches = 0;
  long identity_cases = 0;
  long identity_mismatches = 0;
};

/// Random Hungarian and identity-metric instances drawn from `seed`.
CrossCheckSummary run_cross_checks(std::uint64_t seed, long count);

std::string format_cross_checks(const CrossCheckSummary& s);

}  // namespace osmot
