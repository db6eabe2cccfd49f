#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "osmot/cli.hpp"
#include "osmot/keyvalue.hpp"
#include "osmot/metrics.hpp"
#include "osmot/scenario.hpp"
#include "osmot/tensor_file.hpp"

using namespace osmot;
namespace fs = std::filesystem;

namespace {

KeyValueFile kv(const std::string& text) {
  std::istringstream in(text);
  return KeyValueFile::parse(in);
}

ScenarioConfig crossing(std::uint64_t seed) {
  ScenarioConfig c;
  c.seed = seed;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("osmot_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
             "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

struct CliRun {
  int code;
  std::string out, err;
};

CliRun cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

// ---- key=value ------------------------------------------------------------

TEST(KeyValue, ParsesAndTypes) {
  const auto f = kv("# header\na = 1.5\n  b=hello  # trailing\n\nflag = yes\nn = -3\n");
  EXPECT_EQ(f.require_double("a"), 1.5);
  EXPECT_EQ(f.require("b"), "hello");
  EXPECT_TRUE(f.get_bool("flag", false));
  EXPECT_EQ(f.require_int("n"), -3);
  EXPECT_EQ(f.get_int("missing", 7), 7);
  EXPECT_THROW(f.require("missing"), ConfigError);
  EXPECT_THROW(f.require_int("a"), ConfigError);
  EXPECT_THROW(f.get_bool("b", true), ConfigError);
  EXPECT_THROW(kv("novalue\n"), ParseError);
  EXPECT_THROW(kv("a=1\na=2\n"), ParseError);
  EXPECT_THROW(KeyValueFile::load("/nonexistent/osmot.kv"), IoError);
}

TEST(KeyValue, PathsResolveAgainstBaseDir) {
  std::istringstream in("w = x.cstn\nabs = /tmp/y\n");
  const auto f = KeyValueFile::parse(in, "/data/fix");
  EXPECT_EQ(f.require_path("w"), fs::path("/data/fix/x.cstn"));
  EXPECT_EQ(f.require_path("abs"), fs::path("/tmp/y"));
}

// ---- scenario ---------------------------------------------------------------

TEST(Scenario, NoiselessCandidatesEqualGroundTruth) {
  for (MotionModel m : {MotionModel::linear, MotionModel::crossing, MotionModel::scale_ramp}) {
    ScenarioConfig c = crossing(3);
    c.motion = m;
    const SyntheticSequence s = generate(c);
    ASSERT_EQ(s.frames.size(), 200u);
    std::size_t total = 0;
    for (const auto& frame : s.gt.frames()) {
      const FrameCandidates& fc = s.frames[std::size_t(frame.frame - 1)];
      ASSERT_EQ(fc.frame, frame.frame);
      ASSERT_EQ(fc.candidates.size(), frame.records.size());
      for (std::size_t i = 0; i < frame.records.size(); ++i) {
        const MotRecord& g = frame.records[i];
        const Candidate& k = fc.candidates[i];
        EXPECT_EQ(k.box, g.box());
        EXPECT_EQ(k.embedding, Embedding::basis(kEmbeddingDim, g.id - 1));
      }
      total += frame.records.size();
    }
    EXPECT_EQ(total, 5u * 200u);
  }
}

TEST(Scenario, DeterministicAndSeedSensitive) {
  ScenarioConfig c = crossing(9);
  c.embedding_noise_sigma = 0.3;
  c.box_noise_sigma = 2;
  c.detection_dropout_rate = 0.1;
  c.false_positive_rate = 0.2;
  auto bytes = [&](const ScenarioConfig& cfg) {
    const DetectionSet d = to_detection_set(generate(cfg));
    std::ostringstream det, emb;
    write_mot(det, d.detections);
    write_cstn(emb, from_matrix(d.embeddings));
    return det.str() + emb.str();
  };
  EXPECT_EQ(bytes(c), bytes(c));
  ScenarioConfig other = c;
  other.seed = 10;
  EXPECT_NE(bytes(c), bytes(other));
}

TEST(Scenario, FullDropoutLeavesNoCandidates) {
  ScenarioConfig c = crossing(1);
  c.detection_dropout_rate = 1.0;
  for (const auto& f : generate(c).frames) EXPECT_TRUE(f.candidates.empty());
}

TEST(Scenario, OcclusionMarksInvisibleAndHides) {
  ScenarioConfig c = crossing(1);
  c.occlusion_windows = {{2, 10, 20}};
  const SyntheticSequence s = generate(c);
  for (const MotRecord& r : s.gt.records()) {
    const bool hidden = r.id == 2 && r.frame >= 10 && r.frame <= 20;
    EXPECT_EQ(r.extra[1], hidden ? 0.0 : 1.0);
  }
  EXPECT_EQ(s.frames[14].candidates.size(), 4u);
}

TEST(Scenario, ConfigErrors) {
  ScenarioConfig c;
  c.target_width = 5000;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.detection_dropout_rate = 1.5;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.num_frames = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.embedding_noise_sigma = -1;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_THROW(ScenarioConfig::from_keyvalue(kv("motion = zigzag\n")), ConfigError);
  const auto parsed = ScenarioConfig::from_keyvalue(
      kv("num_identities = 3\nmotion = scale-ramp\nocclusion = 1:5-9,3:2-2\nseed = 42\n"));
  EXPECT_EQ(parsed.num_identities, 3);
  EXPECT_EQ(parsed.motion, MotionModel::scale_ramp);
  ASSERT_EQ(parsed.occlusion_windows.size(), 2u);
  EXPECT_EQ(parsed.occlusion_windows[1].identity, 3);
  EXPECT_EQ(parsed.seed, 42u);
}

TEST(Scenario, NoiselessPipelineIsPerfect) {
  for (MotionModel m : {MotionModel::linear, MotionModel::crossing, MotionModel::scale_ramp}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      ScenarioConfig c = crossing(seed);
      c.motion = m;
      const SyntheticSequence s = generate(c);
      const MetricsReport r = evaluate(s.gt, run_tracker(s.frames, AssocConfig{}));
      EXPECT_EQ(r.mota, 100.0) << to_string(m) << " seed " << seed;
      EXPECT_EQ(r.idf1, 100.0);
      EXPECT_EQ(r.idsw, 0);
    }
  }
}

TEST(Scenario, IdentityScoreDoesNotRiseWithEmbeddingNoise) {
  double prev = 101;
  for (double sigma : {0.0, 0.5, 1.0, 2.0, 4.0}) {
    double sum = 0;
    const int seeds = 20;
    for (int seed = 1; seed <= seeds; ++seed) {
      ScenarioConfig c = crossing(std::uint64_t(seed));
      c.embedding_noise_sigma = sigma;
      c.detection_dropout_rate = 0.1;
      const SyntheticSequence s = generate(c);
      sum += evaluate(s.gt, run_tracker(s.frames, AssocConfig{})).idf1;
    }
    const double mean = sum / seeds;
    EXPECT_LE(mean, prev) << "sigma " << sigma;
    prev = mean;
  }
}

// ---- CLI ------------------------------------------------------------------

TEST(Cli, ExitCodes) {
  EXPECT_EQ(cli({}).code, 1);
  EXPECT_EQ(cli({"bogus"}).code, 1);
  EXPECT_EQ(cli({"eval", "--gt", "x"}).code, 1);
  EXPECT_EQ(cli({"eval", "--gt", "/nonexistent/gt.txt", "--hyp", "/nonexistent/h.txt"}).code, 2);
  EXPECT_EQ(cli({"--help"}).code, 0);
  const CliRun r = cli({"eval", "--gt", "a", "--hyp", "b", "--report", "xml"});
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, EvalSelfIsPerfect) {
  const auto sample = (testutil::fixture_dir() / "sample_mot.txt").string();
  const CliRun r = cli({"eval", "--gt", sample, "--hyp", sample});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("100.000"), std::string::npos);
  const CliRun k = cli({"eval", "--gt", sample, "--hyp", sample, "--report", "kv"});
  EXPECT_NE(k.out.find("MOTA=100.000\n"), std::string::npos);
  EXPECT_NE(k.out.find("IDF1=100.000\n"), std::string::npos);
}

TEST(Cli, SynthTrackEval) {
  TempDir tmp;
  const auto dir = tmp.path() / "seq";
  ASSERT_EQ(cli({"synth", "--out", dir.string(), "--seed", "4"}).code, 0);
  const auto hyp = tmp.path() / "hyp.txt";
  const CliRun t = cli({"track", "--det", (dir / "det.txt").string(), "--emb",
                        (dir / "emb.cstn").string(), "--out", hyp.string()});
  ASSERT_EQ(t.code, 0) << t.err;
  const CliRun e =
      cli({"eval", "--gt", (dir / "gt.txt").string(), "--hyp", hyp.string(), "--report", "kv"});
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_NE(e.out.find("MOTA=100.000\n"), std::string::npos) << e.out;
  EXPECT_NE(e.out.find("IDF1=100.000\n"), std::string::npos);
  EXPECT_NE(e.out.find("IDSW=0\n"), std::string::npos);

  // Re-running gives byte-identical output.
  const auto again = tmp.path() / "again.txt";
  cli({"track", "--det", (dir / "det.txt").string(), "--emb", (dir / "emb.cstn").string(),
       "--out", again.string()});
  EXPECT_EQ(slurp(hyp), slurp(again));
}

TEST(Cli, DirectoryModeMatchesSingleRuns) {
  TempDir tmp;
  for (const char* seed : {"1", "2", "3"}) {
    ASSERT_EQ(cli({"synth", "--out", (tmp.path() / "in" / seed).string(), "--seed", seed}).code,
              0);
  }
  const CliRun r = cli({"track", "--det", (tmp.path() / "in").string(), "--out",
                        (tmp.path() / "res").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "tracked 3 sequences\n");
  const auto single = tmp.path() / "single.txt";
  cli({"track", "--det", (tmp.path() / "in" / "2" / "det.txt").string(), "--emb",
       (tmp.path() / "in" / "2" / "emb.cstn").string(), "--out", single.string()});
  EXPECT_EQ(slurp(single), slurp(tmp.path() / "res" / "2.txt"));
}

TEST(Cli, ForwardCommandsReproduceGoldens) {
  TempDir tmp;
  for (const char* name : {"ren", "ren_converged"}) {
    const auto out = tmp.path() / (std::string(name) + ".cstn");
    const auto dir = testutil::fixture_dir() / name;
    const CliRun r =
        cli({"ren-forward", "--config", (dir / "manifest.kv").string(), "--out", out.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(slurp(out), slurp(dir / "golden.cstn")) << name;
  }
  for (const char* name : {"saan_a", "saan_b"}) {
    const auto out = tmp.path() / (std::string(name) + ".cstn");
    const auto dir = testutil::fixture_dir() / name;
    const CliRun r =
        cli({"saan-forward", "--config", (dir / "manifest.kv").string(), "--out", out.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const CstnTensor got = read_cstn_file(out), want = read_cstn_file(dir / "golden.cstn");
    EXPECT_EQ(got.dims, want.dims);
    EXPECT_EQ(got.dims[0], 512u);
    ASSERT_EQ(got.values.size(), want.values.size());
    double worst = 0;
    for (std::size_t i = 0; i < got.values.size(); ++i) {
      worst = std::max(worst, std::abs(double(got.values[i]) - double(want.values[i])));
    }
    EXPECT_LE(worst, 1e-9) << name;
  }
}

TEST(Cli, LossAndOracle) {
  const CliRun l =
      cli({"loss", "--config", (testutil::fixture_dir() / "loss" / "manifest.kv").string()});
  ASSERT_EQ(l.code, 0) << l.err;
  EXPECT_NE(l.out.find("det_loss="), std::string::npos);
  EXPECT_NE(l.out.find("id_loss=2.30258509"), std::string::npos);
  const CliRun o = cli({"oracle", "--seed", "5", "--count", "50"});
  EXPECT_EQ(o.code, 0) << o.out;
}
