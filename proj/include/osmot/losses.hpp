#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "osmot/box.hpp"

namespace osmot {

struct LossConfig {
  double alpha = 0.25;  // focal balance
  double gamma = 0.0;   // focal exponent
  double beta = 0.05;   // box-regression weight
  double eta = 0.02;    // identity-loss weight
  std::vector<int> downsample_ratios = {8, 16, 32};

  void validate() const;
  bool has_ratio(int r) const;
};

/// Annotated object; id is the 1-based identity label.
struct GtBox {
  Box box;
  int id = 1;
};

/// One prediction location on the map of downsample ratio `ratio`.
struct PredCell {
  long grid_x = 0;
  long grid_y = 0;
  int ratio = 8;
  Box box;
  double p = 0;  // foreground probability
};

/// Predicted class distribution over identities 1..C (stored 0-based).
class IdDistribution {
 public:
  explicit IdDistribution(Eigen::VectorXd probs);

  const Eigen::VectorXd& probs() const { return probs_; }
  Eigen::Index classes() const { return probs_.size(); }
  /// Probability of the 1-based label.
  double prob(int label) const { return probs_[label - 1]; }

 private:
  Eigen::VectorXd probs_;
};

struct GridCell {
  long x = 0;
  long y = 0;

  bool operator==(const GridCell&) const = default;
};

/// Lowest probability allowed inside a logarithm.
inline constexpr double kProbFloor = 1e-12;

/// Grid location (floor(cx / r), floor(cy / r)) that is the positive sample.
GridCell assign_positive(const GtBox& gt, int ratio);

/// −α(1 − p_t)^γ log p_t, p_t = p for positives and 1 − p otherwise.
double cls_loss(double p, bool positive, const LossConfig& cfg);

/// Complete IoU: IoU − ρ²/c² − α_v·v.
double ciou(const Box& a, const Box& b);

/// Focal classification over every cell plus β(1 − CIoU) on positive
/// cells, normalised by the positive count.
double det_loss(std::span<const PredCell> cells, std::span<const GtBox> gts,
                const LossConfig& cfg);

/// Mean negative log-likelihood of the 1-based target labels.
double id_loss(std::span<const IdDistribution> preds, std::span<const int> labels);

double total_loss(double l_det, double l_id, const LossConfig& cfg);

}  // namespace osmot
