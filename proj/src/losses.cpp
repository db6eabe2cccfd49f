#include "osmot/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "osmot/errors.hpp"

namespace osmot {

void LossConfig::validate() const {
  if (!(alpha > 0 && alpha < 1)) throw InvalidParameterError("alpha must lie in (0, 1)");
  if (!(gamma >= 0)) throw InvalidParameterError("gamma must be non-negative");
  if (!(beta > 0) || !(eta > 0)) throw InvalidParameterError("beta and eta must be positive");
  if (downsample_ratios.empty()) throw InvalidParameterError("no downsample ratios");
}

bool LossConfig::has_ratio(int r) const {
  return std::find(downsample_ratios.begin(), downsample_ratios.end(), r) !=
         downsample_ratios.end();
}

IdDistribution::IdDistribution(Eigen::VectorXd probs) : probs_(std::move(probs)) {
  if (probs_.size() == 0 || !probs_.allFinite() || (probs_.array() < 0).any() ||
      std::abs(probs_.sum() - 1.0) > 1e-9) {
    throw InvalidInputError("identity distribution must be non-negative and sum to 1");
  }
}

GridCell assign_positive(const GtBox& gt, int ratio) {
  if (ratio <= 0) throw InvalidParameterError("downsample ratio must be positive");
  return {static_cast<long>(std::floor(gt.box.cx / ratio)),
          static_cast<long>(std::floor(gt.box.cy / ratio))};
}

double cls_loss(double p, bool positive, const LossConfig& cfg) {
  if (!(p >= 0 && p <= 1)) {
    throw InvalidInputError("probability " + std::to_string(p) + " outside [0, 1]");
  }
  const double pt = std::max(positive ? p : 1.0 - p, kProbFloor);
  return -cfg.alpha * std::pow(1.0 - pt, cfg.gamma) * std::log(pt);
}

double ciou(const Box& a, const Box& b) {
  if (!(a.w > 0 && a.h > 0 && b.w > 0 && b.h > 0)) {
    throw InvalidInputError("ciou: boxes must have positive size");
  }
  const double overlap = iou(a, b);
  const double dx = a.cx - b.cx;
  const double dy = a.cy - b.cy;
  const double rho2 = dx * dx + dy * dy;
  const double ew = std::max(a.right(), b.right()) - std::min(a.left(), b.left());
  const double eh = std::max(a.bottom(), b.bottom()) - std::min(a.top(), b.top());
  const double c2 = ew * ew + eh * eh;
  const double dtheta = std::atan(b.w / b.h) - std::atan(a.w / a.h);
  const double v = 4.0 / (std::numbers::pi * std::numbers::pi) * dtheta * dtheta;
  const double alpha_v = v == 0.0 ? 0.0 : v / (1.0 - overlap + v);
  return overlap - rho2 / c2 - alpha_v * v;
}

double det_loss(std::span<const PredCell> cells, std::span<const GtBox> gts,
                const LossConfig& cfg) {
  double sum = 0;
  std::size_t positives = 0;
  for (const PredCell& cell : cells) {
    if (!cfg.has_ratio(cell.ratio)) {
      throw InvalidParameterError("cell ratio " + std::to_string(cell.ratio) +
                                  " is not a configured downsample ratio");
    }
    const GridCell here{cell.grid_x, cell.grid_y};
    const auto gt = std::find_if(gts.begin(), gts.end(), [&](const GtBox& g) {
      return assign_positive(g, cell.ratio) == here;
    });
    if (gt == gts.end()) {
      sum += cls_loss(cell.p, false, cfg);
      continue;
    }
    ++positives;
    sum += cls_loss(cell.p, true, cfg) + cfg.beta * (1.0 - ciou(gt->box, cell.box));
  }
  if (positives == 0) {
    throw DegenerateError("det_loss: batch has no positive cells");
  }
  return sum / static_cast<double>(positives);
}

double id_loss(std::span<const IdDistribution> preds, std::span<const int> labels) {
  if (preds.empty()) throw DegenerateError("id_loss: empty batch");
  if (preds.size() != labels.size()) {
    throw InvalidInputError("id_loss: prediction and label counts differ");
  }
  double sum = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const int label = labels[i];
    if (label < 1 || label > preds[i].classes()) {
      throw InvalidInputError("id_loss: label " + std::to_string(label) + " out of range");
    }
    sum -= std::log(std::max(preds[i].prob(label), kProbFloor));
  }
  return sum / static_cast<double>(preds.size());
}

double total_loss(double l_det, double l_id, const LossConfig& cfg) {
  return l_det + cfg.eta * l_id;
}

}  // namespace osmot
