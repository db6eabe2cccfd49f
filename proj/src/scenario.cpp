#include "osmot/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "osmot/errors.hpp"
#include "osmot/keyvalue.hpp"
#include "osmot/prng.hpp"

namespace osmot {

namespace {

enum Stream : std::uint64_t {
  kGeometry = 1,
  kDetections = 2,
  kEmbeddingNoise = 3,
  kClutter = 4,
  kIdentities = 5,
};

// Lane layouts: crossing lanes overlap vertically by 35% of the target
// height (IoU at most 0.21 when two targets pass); linear lanes never touch.
constexpr double kCrossingLaneSpacing = 0.65;
constexpr double kLinearLaneSpacing = 1.25;
constexpr double kRampStart = 0.6;
constexpr double kRampEnd = 1.4;

double lane_block_height(const ScenarioConfig& c, double spacing) {
  return (c.num_identities - 1) * spacing * c.target_height + c.target_height;
}

Eigen::VectorXd gaussian_vector(SplitMix64& rng, Eigen::Index dim) {
  Eigen::VectorXd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = rng.normal();
  return v;
}

std::vector<OcclusionWindow> parse_occlusions(const std::string& text) {
  std::vector<OcclusionWindow> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
    if (item.empty()) continue;
    OcclusionWindow w;
    const auto colon = item.find(':');
    const auto dash = item.find('-', colon == std::string::npos ? 0 : colon);
    if (colon == std::string::npos || dash == std::string::npos) {
      throw ConfigError("occlusion entry '" + item + "' must look like id:first-last");
    }
    auto to_long = [&](std::string_view s) {
      long v = 0;
      const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || p != s.data() + s.size()) {
        throw ConfigError("bad number in occlusion entry '" + item + "'");
      }
      return v;
    };
    const std::string_view sv(item);
    w.identity = static_cast<int>(to_long(sv.substr(0, colon)));
    w.first = to_long(sv.substr(colon + 1, dash - colon - 1));
    w.last = to_long(sv.substr(dash + 1));
    out.push_back(w);
  }
  return out;
}

struct Trajectory {
  double x_a, x_b, y_a, y_b;  // top-left endpoints (scale-ramp: centres)
};

}  // namespace

MotionModel parse_motion_model(const std::string& name) {
  if (name == "linear") return MotionModel::linear;
  if (name == "crossing") return MotionModel::crossing;
  if (name == "scale-ramp" || name == "scale_ramp") return MotionModel::scale_ramp;
  throw ConfigError("unknown motion model '" + name + "'");
}

std::string to_string(MotionModel m) {
  switch (m) {
    case MotionModel::linear: return "linear";
    case MotionModel::crossing: return "crossing";
    case MotionModel::scale_ramp: return "scale-ramp";
  }
  return "?";
}

void ScenarioConfig::validate() const {
  if (num_identities < 1) throw ConfigError("num_identities must be >= 1");
  if (num_frames < 1) throw ConfigError("num_frames must be >= 1");
  auto rate_ok = [](double r) { return r >= 0 && r <= 1; };
  if (!rate_ok(detection_dropout_rate) || !rate_ok(false_positive_rate)) {
    throw ConfigError("rates must lie in [0, 1]");
  }
  if (!(embedding_noise_sigma >= 0) || !(box_noise_sigma >= 0)) {
    throw ConfigError("noise sigmas must be non-negative");
  }
  if (embedding_dim < 1) throw ConfigError("embedding_dim must be >= 1");
  if (!(target_width > 0 && target_height > 0)) {
    throw ConfigError("target size must be positive");
  }
  if (target_width > image_width || target_height > image_height) {
    throw ConfigError("target is larger than the image");
  }
  switch (motion) {
    case MotionModel::linear:
      if (lane_block_height(*this, kLinearLaneSpacing) > image_height) {
        throw ConfigError("image too short for " + std::to_string(num_identities) +
                          " linear lanes");
      }
      break;
    case MotionModel::crossing:
      if (lane_block_height(*this, kCrossingLaneSpacing) > image_height) {
        throw ConfigError("image too short for " + std::to_string(num_identities) +
                          " crossing lanes");
      }
      break;
    case MotionModel::scale_ramp:
      if (kRampEnd * target_width > image_width / num_identities ||
          kRampEnd * target_height > image_height) {
        throw ConfigError("grown targets do not fit their image columns");
      }
      break;
  }
  for (const OcclusionWindow& w : occlusion_windows) {
    if (w.identity < 1 || w.identity > num_identities || w.first > w.last) {
      throw ConfigError("invalid occlusion window for identity " + std::to_string(w.identity));
    }
  }
}

ScenarioConfig ScenarioConfig::from_keyvalue(const KeyValueFile& kv) {
  ScenarioConfig c;
  c.num_identities = static_cast<int>(kv.get_int("num_identities", c.num_identities));
  c.num_frames = kv.get_int("num_frames", c.num_frames);
  c.image_width = kv.get_double("image_width", c.image_width);
  c.image_height = kv.get_double("image_height", c.image_height);
  c.target_width = kv.get_double("target_width", c.target_width);
  c.target_height = kv.get_double("target_height", c.target_height);
  c.motion = parse_motion_model(kv.get_string("motion", to_string(c.motion)));
  c.embedding_noise_sigma = kv.get_double("embedding_noise_sigma", c.embedding_noise_sigma);
  c.box_noise_sigma = kv.get_double("box_noise_sigma", c.box_noise_sigma);
  c.detection_dropout_rate = kv.get_double("detection_dropout_rate", c.detection_dropout_rate);
  c.false_positive_rate = kv.get_double("false_positive_rate", c.false_positive_rate);
  c.occlusion_windows = parse_occlusions(kv.get_string("occlusion", ""));
  c.embedding_dim = kv.get_int("embedding_dim", c.embedding_dim);
  const long long seed = kv.get_int("seed", 0);
  c.seed = static_cast<std::uint64_t>(seed);
  c.validate();
  return c;
}

SyntheticSequence generate(const ScenarioConfig& cfg) {
  cfg.validate();
  const int n = cfg.num_identities;
  const double W = cfg.image_width;
  const double H = cfg.image_height;
  const double tw = cfg.target_width;
  const double th = cfg.target_height;

  SplitMix64 geometry = SplitMix64::stream(cfg.seed, kGeometry);
  SplitMix64 detections = SplitMix64::stream(cfg.seed, kDetections);
  SplitMix64 emb_noise = SplitMix64::stream(cfg.seed, kEmbeddingNoise);
  SplitMix64 clutter = SplitMix64::stream(cfg.seed, kClutter);

  std::vector<Embedding> identity;
  if (n <= cfg.embedding_dim) {
    for (int k = 0; k < n; ++k) identity.push_back(Embedding::basis(cfg.embedding_dim, k));
  } else {
    SplitMix64 ids = SplitMix64::stream(cfg.seed, kIdentities);
    for (int k = 0; k < n; ++k) {
      identity.push_back(Embedding::normalized(gaussian_vector(ids, cfg.embedding_dim)));
    }
  }

  std::vector<Trajectory> paths(n);
  const double span_x = W - tw;
  for (int k = 0; k < n; ++k) {
    Trajectory& p = paths[k];
    switch (cfg.motion) {
      case MotionModel::linear: {
        const double top = (H - lane_block_height(cfg, kLinearLaneSpacing)) / 2 +
                           k * kLinearLaneSpacing * th;
        p.x_a = geometry.uniform(0, span_x);
        p.x_b = geometry.uniform(0, span_x);
        p.y_a = p.y_b = top;
        break;
      }
      case MotionModel::crossing: {
        const double top = (H - lane_block_height(cfg, kCrossingLaneSpacing)) / 2 +
                           k * kCrossingLaneSpacing * th;
        const double near = geometry.uniform(0, 0.1 * span_x);
        const double far = span_x - geometry.uniform(0, 0.1 * span_x);
        p.x_a = k % 2 == 0 ? near : far;
        p.x_b = k % 2 == 0 ? far : near;
        p.y_a = p.y_b = top;
        break;
      }
      case MotionModel::scale_ramp: {
        const double half = kRampEnd * th / 2;
        p.x_a = p.x_b = (k + 0.5) * W / n;
        p.y_a = geometry.uniform(half, H - half);
        p.y_b = geometry.uniform(half, H - half);
        break;
      }
    }
  }

  auto occluded = [&](int id, long frame) {
    return std::any_of(cfg.occlusion_windows.begin(), cfg.occlusion_windows.end(),
                       [&](const OcclusionWindow& w) {
                         return w.identity == id && frame >= w.first && frame <= w.last;
                       });
  };

  SyntheticSequence seq;
  std::vector<MotRecord> gt;
  const double noise_scale =
      cfg.embedding_noise_sigma / std::sqrt(static_cast<double>(cfg.embedding_dim));
  for (long t = 0; t < cfg.num_frames; ++t) {
    const long frame = t + 1;
    const double s = cfg.num_frames == 1 ? 0.0 : static_cast<double>(t) / (cfg.num_frames - 1);
    FrameCandidates fc{frame, {}};
    for (int k = 0; k < n; ++k) {
      const Trajectory& p = paths[k];
      Box box;
      if (cfg.motion == MotionModel::scale_ramp) {
        const double scale = kRampStart + (kRampEnd - kRampStart) * s;
        box = {p.x_a, p.y_a + (p.y_b - p.y_a) * s, tw * scale, th * scale};
      } else {
        box = Box::from_tlwh(p.x_a + (p.x_b - p.x_a) * s, p.y_a + (p.y_b - p.y_a) * s, tw, th);
      }
      const int id = k + 1;
      const bool hidden = occluded(id, frame);
      gt.push_back({frame, id, box.left(), box.top(), box.w, box.h, 1.0,
                    {1.0, hidden ? 0.0 : 1.0, -1.0}});
      // Detections start from the stored row so noiseless output matches it bit for bit.
      box = gt.back().box();

      const bool dropped = detections.bernoulli(cfg.detection_dropout_rate);
      const double score = detections.uniform(0.6, 1.0);
      if (hidden || dropped) continue;
      Box det = box;
      if (cfg.box_noise_sigma > 0) {
        det.cx += cfg.box_noise_sigma * detections.normal();
        det.cy += cfg.box_noise_sigma * detections.normal();
        det.w = std::max(1.0, det.w + cfg.box_noise_sigma * detections.normal());
        det.h = std::max(1.0, det.h + cfg.box_noise_sigma * detections.normal());
      }
      Embedding e = identity[k];
      if (noise_scale > 0) {
        e = Embedding::normalized(identity[k].values() +
                                  noise_scale * gaussian_vector(emb_noise, cfg.embedding_dim));
      }
      fc.candidates.push_back({det, score, std::move(e)});
    }
    if (clutter.bernoulli(cfg.false_positive_rate)) {
      const double w = tw * clutter.uniform(0.5, 1.5);
      const double h = std::min(H, th * clutter.uniform(0.5, 1.5));
      const double left = clutter.uniform(0, std::max(0.0, W - w));
      const double top = clutter.uniform(0, std::max(0.0, H - h));
      const double score = clutter.uniform(0.3, 0.9);
      fc.candidates.push_back({Box::from_tlwh(left, top, w, h), score,
                               Embedding::normalized(gaussian_vector(clutter, cfg.embedding_dim))});
    }
    seq.frames.push_back(std::move(fc));
  }
  seq.gt = SequenceResult::from_records(std::move(gt));
  return seq;
}

DetectionSet to_detection_set(const SyntheticSequence& s) {
  std::vector<MotRecord> rows;
  std::vector<const Embedding*> embs;
  for (const FrameCandidates& fc : s.frames) {
    for (const Candidate& c : fc.candidates) {
      rows.push_back({fc.frame, -1, c.box.left(), c.box.top(), c.box.w, c.box.h, c.score,
                      {-1, -1, -1}});
      embs.push_back(&c.embedding);
    }
  }
  const Eigen::Index dim = embs.empty() ? 0 : embs.front()->dim();
  Matrix<double> e(static_cast<Eigen::Index>(embs.size()), dim);
  for (std::size_t i = 0; i < embs.size(); ++i) e.row(i) = embs[i]->values().transpose();
  return {SequenceResult::from_records(std::move(rows)), std::move(e)};
}

DetectionSet make_detection_set(std::vector<MotRecord> rows, Matrix<double> embeddings) {
  if (static_cast<Eigen::Index>(rows.size()) != embeddings.rows()) {
    throw InvalidInputError("detection file has " + std::to_string(rows.size()) +
                            " rows but the embedding file has " +
                            std::to_string(embeddings.rows()));
  }
  std::vector<std::size_t> order(rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rows[a].frame < rows[b].frame; });
  std::vector<MotRecord> sorted;
  Matrix<double> e(embeddings.rows(), embeddings.cols());
  for (std::size_t i = 0; i < order.size(); ++i) {
    sorted.push_back(rows[order[i]]);
    e.row(i) = embeddings.row(order[i]);
  }
  return {SequenceResult::from_records(std::move(sorted)), std::move(e)};
}

std::vector<FrameCandidates> to_frames(const DetectionSet& d) {
  if (static_cast<Eigen::Index>(d.detections.size()) != d.embeddings.rows()) {
    throw InvalidInputError("detection count " + std::to_string(d.detections.size()) +
                            " does not match embedding rows " +
                            std::to_string(d.embeddings.rows()));
  }
  std::vector<FrameCandidates> frames;
  const long last = d.detections.last_frame();
  for (long f = 1; f <= last; ++f) frames.push_back({f, {}});
  const auto& rows = d.detections.records();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const MotRecord& r = rows[i];
    frames[r.frame - 1].candidates.push_back(
        {r.box(), r.conf, Embedding::normalized(d.embeddings.row(i).transpose())});
  }
  return frames;
}

SequenceResult run_tracker(const std::vector<FrameCandidates>& frames, const AssocConfig& cfg) {
  Tracker tracker(cfg);
  std::vector<MotRecord> out;
  for (const FrameCandidates& fc : frames) {
    for (const TrackOutput& o : tracker.step(fc.frame, fc.candidates)) {
      out.push_back({fc.frame, o.id, o.box.left(), o.box.top(), o.box.w, o.box.h, 1.0,
                     {-1, -1, -1}});
    }
  }
  return SequenceResult::from_records(std::move(out));
}

}  // namespace osmot
