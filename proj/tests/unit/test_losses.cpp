#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "osmot/fixtures.hpp"
#include "osmot/losses.hpp"

using namespace osmot;

namespace {

constexpr double kQuarterLn2 = 0.17328679513998633;     // 0.25 ln 2
constexpr double kQuarterLnInv07 = 0.08916873598468309; // 0.25 ln(1/0.7)
constexpr double kLn10 = 2.302585092994046;

GtBox gt_at(double cx, double cy, double w = 20, double h = 40, int id = 1) {
  return {{cx, cy, w, h}, id};
}

}  // namespace

TEST(AssignPositive, Examples) {
  EXPECT_EQ(assign_positive(gt_at(100.7, 50.2), 8), (GridCell{12, 6}));
  for (int r : {8, 16, 32}) EXPECT_EQ(assign_positive(gt_at(0, 0), r), (GridCell{0, 0}));
  EXPECT_EQ(assign_positive(gt_at(255.9, 10), 32).x, 7);
}

TEST(ClsLoss, Examples) {
  const LossConfig cfg;
  EXPECT_EQ(cls_loss(1.0, true, cfg), 0.0);
  EXPECT_NEAR(cls_loss(0.5, true, cfg), kQuarterLn2, 1e-15);
  EXPECT_NEAR(cls_loss(0.3, false, cfg), kQuarterLnInv07, 1e-15);
  EXPECT_EQ(cls_loss(0.0, false, cfg), 0.0);
  EXPECT_TRUE(std::isfinite(cls_loss(0.0, true, cfg)));
  EXPECT_THROW(cls_loss(1.2, true, cfg), InvalidInputError);
  EXPECT_THROW(cls_loss(-0.1, false, cfg), InvalidInputError);
}

TEST(ClsLoss, StrictlyDecreasingAndNonNegative) {
  const LossConfig cfg;
  double prev = INFINITY;
  for (int k = 1; k <= 100; ++k) {
    const double v = cls_loss(k / 100.0, true, cfg);
    EXPECT_GE(v, 0.0);
    EXPECT_LT(v, prev);
    prev = v;
  }
  LossConfig focal = cfg;
  focal.gamma = 2;
  EXPECT_NEAR(cls_loss(0.5, true, focal), 0.25 * 0.25 * std::log(2.0), 1e-15);
}

TEST(Iou, Examples) {
  const Box a{0.5, 0.5, 1, 1};
  EXPECT_EQ(iou(a, a), 1.0);
  EXPECT_EQ(iou(a, {5, 5, 1, 1}), 0.0);
  EXPECT_NEAR(iou(a, {1.0, 0.5, 1, 1}), 1.0 / 3, 1e-15);
}

TEST(Ciou, Examples) {
  const Box a = Box::from_tlwh(0, 0, 2, 2);
  const Box b = Box::from_tlwh(2, 0, 2, 2);
  EXPECT_EQ(ciou(a, a), 1.0);
  EXPECT_NEAR(ciou(a, b), -0.2, 1e-9);
  const Box outer{5, 5, 4, 2}, inner{5, 5, 2, 1};
  EXPECT_NEAR(ciou(outer, inner), iou(outer, inner), 1e-15);
  EXPECT_THROW(ciou(a, {0, 0, 0, 1}), InvalidInputError);
}

TEST(Ciou, Properties) {
  SplitMix64 rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    const Box a{rng.uniform(0, 50), rng.uniform(0, 50), rng.uniform(1, 20), rng.uniform(1, 20)};
    const Box b{rng.uniform(0, 50), rng.uniform(0, 50), rng.uniform(1, 20), rng.uniform(1, 20)};
    const double c = ciou(a, b), i = iou(a, b);
    EXPECT_LE(c, i + 1e-15);
    EXPECT_LE(i, 1.0);
    EXPECT_GE(1.0 - c, 0.0);
    const double tx = rng.uniform(-100, 100), ty = rng.uniform(-100, 100);
    const Box a2{a.cx + tx, a.cy + ty, a.w, a.h}, b2{b.cx + tx, b.cy + ty, b.w, b.h};
    EXPECT_NEAR(ciou(a2, b2), c, 1e-9);
    EXPECT_NEAR(iou(a2, b2), i, 1e-9);
  }
}

TEST(Ciou, MonotoneAlongCentreSegment) {
  const Box target{50, 40, 10, 20};
  const Box start{10, 90, 10, 20};
  double prev = INFINITY;
  for (int k = 0; k <= 50; ++k) {
    const double t = k / 50.0;
    const Box p{start.cx + t * (target.cx - start.cx), start.cy + t * (target.cy - start.cy),
                10, 20};
    const double loss = 1.0 - ciou(target, p);
    EXPECT_LT(loss, prev);
    prev = loss;
  }
  EXPECT_EQ(prev, 0.0);
}

TEST(DetLoss, Examples) {
  const LossConfig cfg;
  const GtBox g = gt_at(100.7, 50.2);
  const std::vector<GtBox> gts = {g};
  const std::vector<PredCell> perfect = {{12, 6, 8, g.box, 1.0}, {0, 0, 8, {4, 4, 8, 8}, 0.0},
                                         {1, 1, 16, {20, 20, 8, 8}, 0.0}};
  EXPECT_EQ(det_loss(perfect, gts, cfg), 0.0);

  const std::vector<PredCell> half = {{12, 6, 8, g.box, 0.5}};
  EXPECT_NEAR(det_loss(half, gts, cfg), kQuarterLn2, 1e-15);

  const std::vector<PredCell> off = {{12, 6, 8, {103, 52, 22, 36}, 0.5},
                                     {0, 0, 8, {4, 4, 8, 8}, 0.2}};
  LossConfig doubled = cfg;
  doubled.beta = 2 * cfg.beta;
  const double reg = cfg.beta * (1 - ciou(g.box, off[0].box));
  EXPECT_NEAR(det_loss(off, gts, doubled) - det_loss(off, gts, cfg), reg, 1e-15);
  EXPECT_NEAR(det_loss(off, gts, cfg),
              cls_loss(0.5, true, cfg) + reg + cls_loss(0.2, false, cfg), 1e-15);
}

TEST(DetLoss, MatchesPerTermSummation) {
  SplitMix64 rng(2);
  const LossConfig cfg;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<GtBox> gts;
    for (int i = 0; i < 3; ++i) {
      gts.push_back(gt_at(rng.uniform(0, 256), rng.uniform(0, 256), rng.uniform(4, 30),
                          rng.uniform(4, 60), i + 1));
    }
    std::vector<PredCell> cells;
    double want = 0;
    long pos = 0;
    for (int r : {8, 16, 32}) {
      for (const GtBox& g : gts) {
        const GridCell c = assign_positive(g, r);
        const PredCell cell{c.x, c.y, r,
                            {g.box.cx + rng.uniform(-2, 2), g.box.cy + rng.uniform(-2, 2),
                             g.box.w * rng.uniform(0.8, 1.2), g.box.h * rng.uniform(0.8, 1.2)},
                            rng.uniform()};
        // Skip duplicates of an already listed positive cell.
        bool dup = false;
        for (const PredCell& e : cells) {
          dup |= e.ratio == r && e.grid_x == c.x && e.grid_y == c.y;
        }
        if (dup) continue;
        cells.push_back(cell);
        const GtBox* first = nullptr;
        for (const GtBox& h : gts) {
          if (!first && assign_positive(h, r) == c) first = &h;
        }
        want += -0.25 * std::log(cell.p) + 0.05 * (1 - ciou(first->box, cell.box));
        ++pos;
      }
      const PredCell neg{1000, 1000, r, {1, 1, 1, 1}, rng.uniform()};
      cells.push_back(neg);
      want += -0.25 * std::log(1 - neg.p);
    }
    EXPECT_NEAR(det_loss(cells, gts, cfg), want / pos, 1e-12);
  }
}

TEST(DetLoss, Errors) {
  const LossConfig cfg;
  const std::vector<GtBox> gts = {gt_at(100, 100)};
  const std::vector<PredCell> none = {{0, 0, 8, {4, 4, 8, 8}, 0.1}};
  EXPECT_THROW(det_loss(none, gts, cfg), DegenerateError);
  const std::vector<PredCell> bad_ratio = {{12, 12, 4, {4, 4, 8, 8}, 0.1}};
  EXPECT_THROW(det_loss(bad_ratio, gts, cfg), InvalidParameterError);
}

TEST(IdLoss, Examples) {
  std::vector<IdDistribution> onehot;
  for (int c = 0; c < 3; ++c) onehot.emplace_back(Eigen::VectorXd::Unit(3, c));
  const std::vector<int> labels = {1, 2, 3};
  EXPECT_EQ(id_loss(onehot, labels), 0.0);

  const std::vector<IdDistribution> uniform = {IdDistribution(Eigen::VectorXd::Constant(10, 0.1))};
  const std::vector<int> l3 = {3};
  EXPECT_NEAR(id_loss(uniform, l3), kLn10, 1e-15);

  Eigen::VectorXd p(2);
  p << std::exp(-2.0), 1 - std::exp(-2.0);
  const std::vector<IdDistribution> two = {IdDistribution(Eigen::VectorXd::Unit(2, 0)),
                                           IdDistribution(p)};
  const std::vector<int> l11 = {1, 1};
  EXPECT_NEAR(id_loss(two, l11), 1.0, 1e-15);
}

TEST(IdLoss, Errors) {
  const std::vector<IdDistribution> none;
  const std::vector<int> empty;
  EXPECT_THROW(id_loss(none, empty), DegenerateError);
  const std::vector<IdDistribution> one = {IdDistribution(Eigen::VectorXd::Constant(4, 0.25))};
  const std::vector<int> bad = {5};
  EXPECT_THROW(id_loss(one, bad), InvalidInputError);
  const std::vector<int> two = {1, 2};
  EXPECT_THROW(id_loss(one, two), InvalidInputError);
  EXPECT_THROW(IdDistribution(Eigen::VectorXd::Constant(4, 0.3)), InvalidInputError);
}

TEST(TotalLoss, Examples) {
  LossConfig cfg;
  EXPECT_EQ(total_loss(1.0, 5.0, cfg), 1.1);
  EXPECT_EQ(total_loss(0.37, 0.0, cfg), 0.37);
  cfg.eta = 0;
  EXPECT_EQ(total_loss(0.37, 12.0, cfg), 0.37);
}

TEST(TotalLoss, Linear) {
  const LossConfig cfg;
  SplitMix64 rng(3);
  for (int i = 0; i < 100; ++i) {
    const double a = rng.uniform(0, 10), b = rng.uniform(0, 10), c = rng.uniform(0, 10);
    EXPECT_NEAR(total_loss(a + b, c, cfg), total_loss(a, c, cfg) + b, 1e-12);
    EXPECT_NEAR(total_loss(a, b + c, cfg) - total_loss(a, b, cfg), cfg.eta * c, 1e-12);
  }
}

TEST(LossConfig, Validation) {
  LossConfig c;
  EXPECT_NO_THROW(c.validate());
  c.alpha = 1.0;
  EXPECT_THROW(c.validate(), InvalidParameterError);
  c = {};
  c.beta = 0;
  EXPECT_THROW(c.validate(), InvalidParameterError);
}

TEST(LossFixture, Values) {
  const LossBatch b =
      load_loss_batch(KeyValueFile::load(testutil::fixture_dir() / "loss" / "manifest.kv"));
  ASSERT_EQ(b.gts.size(), 1u);
  ASSERT_EQ(b.cells.size(), 2u);
  EXPECT_NEAR(det_loss(b.cells, b.gts, b.cfg), kQuarterLn2, 1e-6);
  EXPECT_NEAR(id_loss(b.id_preds, b.id_labels), kLn10, 1e-6);
}
