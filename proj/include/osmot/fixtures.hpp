#pragma once

#include <filesystem>
#include <vector>

#include "osmot/keyvalue.hpp"
#include "osmot/losses.hpp"
#include "osmot/ren.hpp"
#include "osmot/saan.hpp"
#include "osmot/tensor_file.hpp"

namespace osmot {

// Fixture bundles: a key=value manifest naming one CSTN file per tensor
// role (paths relative to the manifest) plus scalar settings.

/// Roles: input; proj_t1/proj_t2/proj_feat .weight and .bias; scalars
/// lambda_preset (initial | converged) and/or lambda_1, lambda_2 (explicit
/// values win), pooled_h, pooled_w.
struct RenFixture {
  Tensor3<double> input;
  RenParams<double> params;
};

/// Roles: input_8, input_16, input_32; encode_16, encode_32, sam_8, sam_16,
/// sam_32, head, cam_conv, cam_fc each with .weight and .bias.
struct SaanFixture {
  Tensor3<double> f8;
  Tensor3<double> f16;
  Tensor3<double> f32;
  SaanParams<double> params;
};

/// Roles: gt (N×5: cx, cy, w, h, id), cells (M×8: grid_x, grid_y, ratio,
/// cx, cy, w, h, p), optional id_probs (K×C) with id_labels (K); scalars
/// alpha, gamma, beta, eta.
struct LossBatch {
  std::vector<GtBox> gts;
  std::vector<PredCell> cells;
  std::vector<IdDistribution> id_preds;
  std::vector<int> id_labels;
  LossConfig cfg;
};

RenFixture load_ren_fixture(const KeyValueFile& manifest);
SaanFixture load_saan_fixture(const KeyValueFile& manifest);
LossBatch load_loss_batch(const KeyValueFile& manifest);

/// Writes tensors and a manifest.kv into dir.
void save_ren_fixture(const std::filesystem::path& dir, const RenFixture& f);
void save_saan_fixture(const std::filesystem::path& dir, const SaanFixture& f);

/// Both task features stacked as a rank-4 2×C×H×W tensor (detection first).
CstnTensor pack_task_features(const TaskFeatures<double>& t);

}  // namespace osmot
