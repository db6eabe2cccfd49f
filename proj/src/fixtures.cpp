#include "osmot/fixtures.hpp"

#include <fstream>

#include "osmot/errors.hpp"
#include "osmot/tensor_file.hpp"

namespace osmot {

namespace {

CstnTensor load(const KeyValueFile& m, const std::string& role) {
  return read_cstn_file(m.require_path(role));
}

ConvKernel<double> load_kernel(const KeyValueFile& m, const std::string& name) {
  return to_kernel<double>(load(m, name + ".weight"), load(m, name + ".bias"));
}

double load_scalar(const KeyValueFile& m, const std::string& role) {
  const Vector<double> v = to_vector<double>(load(m, role));
  if (v.size() != 1) throw ShapeError(role + " must hold exactly one value");
  return v[0];
}

void save(const std::filesystem::path& dir, std::ofstream& manifest, const std::string& role,
          const CstnTensor& t) {
  const std::string file = role + ".cstn";
  write_cstn_file(dir / file, t);
  manifest << role << " = " << file << "\n";
}

void save_kernel(const std::filesystem::path& dir, std::ofstream& manifest,
                 const std::string& name, const ConvKernel<double>& k) {
  save(dir, manifest, name + ".weight", kernel_weights(k));
  save(dir, manifest, name + ".bias", kernel_bias(k));
}

std::ofstream open_manifest(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "manifest.kv");
  if (!out) throw IoError("cannot write " + (dir / "manifest.kv").string());
  return out;
}

}  // namespace

RenFixture load_ren_fixture(const KeyValueFile& m) {
  RenFixture f;
  f.input = to_tensor3<double>(load(m, "input"));
  f.params.proj_t1 = load_kernel(m, "proj_t1");
  f.params.proj_t2 = load_kernel(m, "proj_t2");
  f.params.proj_feat = load_kernel(m, "proj_feat");
  if (const auto preset = m.find("lambda_preset")) {
    if (*preset == "initial") {
      f.params.set_lambdas(kInitialLambdas);
    } else if (*preset == "converged") {
      f.params.set_lambdas(kConvergedLambdas);
    } else {
      throw ConfigError("unknown lambda_preset '" + *preset + "'");
    }
  }
  f.params.lambda_1 = m.get_double("lambda_1", f.params.lambda_1);
  f.params.lambda_2 = m.get_double("lambda_2", f.params.lambda_2);
  f.params.pooled_h = m.get_int("pooled_h", f.params.pooled_h);
  f.params.pooled_w = m.get_int("pooled_w", f.params.pooled_w);
  f.params.validate(f.input.channels());
  return f;
}

SaanFixture load_saan_fixture(const KeyValueFile& m) {
  SaanFixture f;
  f.f8 = to_tensor3<double>(load(m, "input_8"));
  f.f16 = to_tensor3<double>(load(m, "input_16"));
  f.f32 = to_tensor3<double>(load(m, "input_32"));
  SaanParams<double>& p = f.params;
  p.encode_16 = load_kernel(m, "encode_16");
  p.encode_32 = load_kernel(m, "encode_32");
  p.sam_8 = load_kernel(m, "sam_8");
  p.sam_16 = load_kernel(m, "sam_16");
  p.sam_32 = load_kernel(m, "sam_32");
  p.head = load_kernel(m, "head");
  p.cam.conv_weights = to_vector<double>(load(m, "cam_conv.weight"));
  p.cam.conv_bias = load_scalar(m, "cam_conv.bias");
  p.cam.fc_weights = to_vector<double>(load(m, "cam_fc.weight"));
  p.cam.fc_bias = load_scalar(m, "cam_fc.bias");
  p.validate(f.f8.channels(), f.f16.channels(), f.f32.channels());
  return f;
}

LossBatch load_loss_batch(const KeyValueFile& m) {
  LossBatch b;
  b.cfg.alpha = m.get_double("alpha", b.cfg.alpha);
  b.cfg.gamma = m.get_double("gamma", b.cfg.gamma);
  b.cfg.beta = m.get_double("beta", b.cfg.beta);
  b.cfg.eta = m.get_double("eta", b.cfg.eta);
  b.cfg.validate();

  const Matrix<double> gt = to_matrix<double>(load(m, "gt"));
  if (gt.cols() != 5) throw ShapeError("gt must have 5 columns");
  for (Index i = 0; i < gt.rows(); ++i) {
    b.gts.push_back({{gt(i, 0), gt(i, 1), gt(i, 2), gt(i, 3)}, static_cast<int>(gt(i, 4))});
  }
  const Matrix<double> cells = to_matrix<double>(load(m, "cells"));
  if (cells.cols() != 8) throw ShapeError("cells must have 8 columns");
  for (Index i = 0; i < cells.rows(); ++i) {
    b.cells.push_back({static_cast<long>(cells(i, 0)), static_cast<long>(cells(i, 1)),
                       static_cast<int>(cells(i, 2)),
                       {cells(i, 3), cells(i, 4), cells(i, 5), cells(i, 6)},
                       cells(i, 7)});
  }
  if (m.contains("id_probs")) {
    const Matrix<double> probs = to_matrix<double>(load(m, "id_probs"));
    const Vector<double> labels = to_vector<double>(load(m, "id_labels"));
    if (labels.size() != probs.rows()) {
      throw ShapeError("id_labels must have one entry per id_probs row");
    }
    for (Index i = 0; i < probs.rows(); ++i) {
      // Stored as float32; renormalise so rows sum to 1 in double precision.
      Eigen::VectorXd row = probs.row(i).transpose();
      row /= row.sum();
      b.id_preds.emplace_back(std::move(row));
      b.id_labels.push_back(static_cast<int>(labels[i]));
    }
  }
  return b;
}

void save_ren_fixture(const std::filesystem::path& dir, const RenFixture& f) {
  std::ofstream m = open_manifest(dir);
  save(dir, m, "input", from_tensor3(f.input));
  save_kernel(dir, m, "proj_t1", f.params.proj_t1);
  save_kernel(dir, m, "proj_t2", f.params.proj_t2);
  save_kernel(dir, m, "proj_feat", f.params.proj_feat);
  m << "lambda_1 = " << f.params.lambda_1 << "\n";
  m << "lambda_2 = " << f.params.lambda_2 << "\n";
  m << "pooled_h = " << f.params.pooled_h << "\n";
  m << "pooled_w = " << f.params.pooled_w << "\n";
}

void save_saan_fixture(const std::filesystem::path& dir, const SaanFixture& f) {
  std::ofstream m = open_manifest(dir);
  save(dir, m, "input_8", from_tensor3(f.f8));
  save(dir, m, "input_16", from_tensor3(f.f16));
  save(dir, m, "input_32", from_tensor3(f.f32));
  const SaanParams<double>& p = f.params;
  save_kernel(dir, m, "encode_16", p.encode_16);
  save_kernel(dir, m, "encode_32", p.encode_32);
  save_kernel(dir, m, "sam_8", p.sam_8);
  save_kernel(dir, m, "sam_16", p.sam_16);
  save_kernel(dir, m, "sam_32", p.sam_32);
  save_kernel(dir, m, "head", p.head);
  save(dir, m, "cam_conv.weight", from_vector(p.cam.conv_weights));
  save(dir, m, "cam_conv.bias", from_vector<double>(Vector<double>::Constant(1, p.cam.conv_bias)));
  save(dir, m, "cam_fc.weight", from_vector(p.cam.fc_weights));
  save(dir, m, "cam_fc.bias", from_vector<double>(Vector<double>::Constant(1, p.cam.fc_bias)));
}

CstnTensor pack_task_features(const TaskFeatures<double>& t) {
  const CstnTensor det = from_tensor3(t.det);
  const CstnTensor reid = from_tensor3(t.reid);
  CstnTensor out{{2, det.dims[0], det.dims[1], det.dims[2]}, det.values};
  out.values.insert(out.values.end(), reid.values.begin(), reid.values.end());
  return out;
}

}  // namespace osmot
