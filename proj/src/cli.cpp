#include "osmot/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <future>
#include <ostream>

#include "osmot/crosscheck.hpp"
#include "osmot/errors.hpp"
#include "osmot/fixtures.hpp"
#include "osmot/keyvalue.hpp"
#include "osmot/metrics.hpp"
#include "osmot/scenario.hpp"
#include "osmot/tensor_file.hpp"

namespace osmot {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string gt, hyp, det, emb, out, config;
  std::uint64_t seed = 0;
  bool seed_given = false;
  double iou_thresh = 0.5;
  std::string report = "table";
  bool no_filter = false;
  long count = 1000;
};

AssocConfig tracker_config(const Options& o) {
  if (o.config.empty()) return {};
  return AssocConfig::from_keyvalue(KeyValueFile::load(o.config));
}

void track_one(const fs::path& det, const fs::path& emb, const fs::path& out,
               const AssocConfig& cfg) {
  const DetectionSet d =
      make_detection_set(parse_mot_rows_file(det), to_matrix<double>(read_cstn_file(emb)));
  write_mot_file(out, run_tracker(to_frames(d), cfg));
}

int cmd_track(const Options& o, std::ostream& out) {
  const AssocConfig cfg = tracker_config(o);
  if (!fs::is_directory(o.det)) {
    if (o.emb.empty()) throw InvalidInputError("track: --emb is required with a detection file");
    track_one(o.det, o.emb, o.out, cfg);
    return kExitOk;
  }
  // Directory mode: every subdirectory holding det.txt and emb.cstn is one
  // sequence; results go to <out>/<name>.txt.
  std::vector<fs::path> seqs;
  for (const auto& entry : fs::directory_iterator(o.det)) {
    if (entry.is_directory() && fs::exists(entry.path() / "det.txt")) seqs.push_back(entry.path());
  }
  std::sort(seqs.begin(), seqs.end());
  fs::create_directories(o.out);
  std::vector<std::future<void>> jobs;
  for (const fs::path& s : seqs) {
    const fs::path target = fs::path(o.out) / (s.filename().string() + ".txt");
    jobs.push_back(std::async(std::launch::async, track_one, s / "det.txt", s / "emb.cstn",
                              target, cfg));
  }
  for (auto& j : jobs) j.get();
  out << "tracked " << seqs.size() << " sequences\n";
  return kExitOk;
}

int cmd_eval(const Options& o, std::ostream& out) {
  const SequenceResult gt = parse_mot_file(o.gt);
  const SequenceResult hyp = parse_mot_file(o.hyp);
  const MetricsReport r = evaluate(gt, hyp, o.iou_thresh, GtFilter{!o.no_filter, 1});
  out << (o.report == "kv" ? format_report_kv(r) : format_report_table(r));
  return kExitOk;
}

int cmd_synth(const Options& o, std::ostream& out) {
  ScenarioConfig cfg;
  if (!o.config.empty()) cfg = ScenarioConfig::from_keyvalue(KeyValueFile::load(o.config));
  if (o.seed_given) cfg.seed = o.seed;
  cfg.validate();
  const SyntheticSequence s = generate(cfg);
  const DetectionSet d = to_detection_set(s);
  const fs::path dir(o.out);
  fs::create_directories(dir);
  write_mot_file(dir / "gt.txt", s.gt);
  write_mot_file(dir / "det.txt", d.detections);
  write_cstn_file(dir / "emb.cstn", from_matrix(d.embeddings));
  out << "wrote " << s.gt.size() << " gt rows, " << d.detections.size() << " detections\n";
  return kExitOk;
}

int cmd_ren(const Options& o, std::ostream& out) {
  const RenFixture f = load_ren_fixture(KeyValueFile::load(o.config));
  const TaskFeatures<double> t = ren_forward(f.input, f.params);
  write_cstn_file(o.out, pack_task_features(t));
  out << "wrote 2x" << t.det.channels() << "x" << t.det.height() << "x" << t.det.width() << "\n";
  return kExitOk;
}

int cmd_saan(const Options& o, std::ostream& out) {
  const SaanFixture f = load_saan_fixture(KeyValueFile::load(o.config));
  const EmbeddingMap<double> e = saan_forward(f.f8, f.f16, f.f32, f.params);
  write_cstn_file(o.out, from_tensor3(e.tensor()));
  out << "wrote " << e.tensor().channels() << "x" << e.height() << "x" << e.width() << "\n";
  return kExitOk;
}

int cmd_loss(const Options& o, std::ostream& out) {
  const LossBatch b = load_loss_batch(KeyValueFile::load(o.config));
  const double l_det = det_loss(b.cells, b.gts, b.cfg);
  char buf[128];
  std::snprintf(buf, sizeof buf, "det_loss=%.9g\n", l_det);
  out << buf;
  if (!b.id_preds.empty()) {
    const double l_id = id_loss(b.id_preds, b.id_labels);
    std::snprintf(buf, sizeof buf, "id_loss=%.9g\ntotal_loss=%.9g\n", l_id,
                  total_loss(l_det, l_id, b.cfg));
    out << buf;
  }
  return kExitOk;
}

int cmd_oracle(const Options& o, std::ostream& out) {
  const CrossCheckSummary s = run_cross_checks(o.seed, o.count);
  out << format_cross_checks(s);
  return s.assignment_mismatches + s.identity_mismatches == 0 ? kExitOk : kExitValidation;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"osmot: joint detection/embedding tracking toolkit"};
  app.require_subcommand(1);
  Options o;

  auto* track = app.add_subcommand("track", "associate detections into tracks");
  track->add_option("--det", o.det, "detection file or directory of sequences")->required();
  track->add_option("--emb", o.emb, "embedding tensor, one row per detection");
  track->add_option("--out", o.out, "result file (directory in directory mode)")->required();
  track->add_option("--config", o.config, "tracker key=value config");

  auto* eval = app.add_subcommand("eval", "score results against ground truth");
  eval->add_option("--gt", o.gt, "ground-truth file")->required();
  eval->add_option("--hyp,--out", o.hyp, "tracker result file")->required();
  eval->add_option("--iou-thresh", o.iou_thresh, "match threshold");
  eval->add_option("--report", o.report, "table or kv")
      ->check(CLI::IsMember({"table", "kv"}));
  eval->add_flag("--no-filter", o.no_filter, "score every ground-truth row");

  auto* synth = app.add_subcommand("synth", "generate a synthetic sequence");
  synth->add_option("--config", o.config, "scenario key=value config");
  synth->add_option("--out", o.out, "output directory")->required();
  auto* synth_seed = synth->add_option("--seed", o.seed, "overrides the config seed");

  auto* ren = app.add_subcommand("ren-forward", "relation network on a fixture");
  ren->add_option("--config", o.config, "fixture manifest")->required();
  ren->add_option("--out", o.out, "output tensor")->required();

  auto* saan = app.add_subcommand("saan-forward", "embedding aggregation on a fixture");
  saan->add_option("--config", o.config, "fixture manifest")->required();
  saan->add_option("--out", o.out, "output tensor")->required();

  auto* loss = app.add_subcommand("loss", "loss values for a fixture batch");
  loss->add_option("--config", o.config, "batch manifest")->required();

  auto* oracle = app.add_subcommand("oracle", "cross-check solvers against brute force");
  oracle->add_option("--seed", o.seed, "random seed");
  oracle->add_option("--count", o.count, "instances per check")->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  o.seed_given = synth_seed->count() > 0;

  try {
    if (track->parsed()) return cmd_track(o, out);
    if (eval->parsed()) return cmd_eval(o, out);
    if (synth->parsed()) return cmd_synth(o, out);
    if (ren->parsed()) return cmd_ren(o, out);
    if (saan->parsed()) return cmd_saan(o, out);
    if (loss->parsed()) return cmd_loss(o, out);
    if (oracle->parsed()) return cmd_oracle(o, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}

}  // namespace osmot
