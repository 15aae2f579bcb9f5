#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "seqlat/detect.hpp"
#include "seqlat/error.hpp"
#include "seqlat/eval.hpp"
#include "seqlat/ingest.hpp"
#include "seqlat/parallel.hpp"
#include "seqlat/report.hpp"
#include "seqlat/synth.hpp"
#include "seqlat/text.hpp"

namespace seqlat::cli {
namespace {

namespace fs = std::filesystem;

std::string manifest_text(const report::RunManifest& m) { return report::manifest_json(m).dump(2) + "\n"; }

report::RunManifest new_manifest(const std::string& command) {
  report::RunManifest m;
  m.command = command;
  m.timestamp = report::reproducible_timestamp();
  return m;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create directory " + dir + ": " + ec.message());
}

std::string join_path(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

ingest::SplitSpec parse_split(const std::string& text, std::uint64_t seed) {
  const auto fields = text::split_fields(text);
  if (fields.size() != 3) throw InputError("--split expects train,test,validation fractions");
  std::vector<double> f;
  for (auto field : fields) {
    auto v = text::parse_real(field);
    if (!v) throw InputError("--split: invalid fraction '" + std::string(field) + "'");
    f.push_back(*v);
  }
  ingest::SplitSpec spec{f[0], f[1], f[2], seed};
  spec.validate();
  return spec;
}

struct CalibrationFlags {
  std::string data;
  std::string scores;
  bool in_sample = false;

  void add_to(CLI::App& app) {
    auto* cal = app.add_option("--calibrate", data, "Held-out sequence CSV used to fit the threshold");
    auto* cal_scores = app.add_option("--calibrate-scores", scores, "Score CSV for the --calibrate data");
    auto* in = app.add_flag("--in-sample", in_sample, "Fit the threshold on the evaluated data itself");
    cal->needs(cal_scores);
    cal_scores->needs(cal);
    in->excludes(cal);
  }

  void check() const {
    if (!in_sample && data.empty()) throw InputError("either --calibrate/--calibrate-scores or --in-sample is required");
  }
};

/// Evaluation inputs shared by `eval` and `sweep`.
struct EvalInputs {
  Dataset data;
  std::vector<ScoreSeries> scores;
  Dataset calibration_data;
  std::vector<ScoreSeries> calibration_scores;
  bool in_sample = false;

  eval::CalibrationSource source() const {
    return in_sample ? eval::CalibrationSource::in_sample()
                     : eval::CalibrationSource::held_out(calibration_data, calibration_scores);
  }
};

EvalInputs load_eval_inputs(const std::string& data_path, const std::string& scores_path,
                            const CalibrationFlags& cal, report::RunManifest& manifest) {
  cal.check();
  EvalInputs in;
  in.data = ingest::load_dataset(data_path);
  in.scores = detect::load_scores(scores_path, in.data);
  manifest.input_digests["data"] = report::file_digest(data_path);
  manifest.input_digests["scores"] = report::file_digest(scores_path);
  in.in_sample = cal.in_sample;
  if (!cal.in_sample) {
    in.calibration_data = ingest::load_dataset(cal.data);
    in.calibration_scores = detect::load_scores(cal.scores, in.calibration_data);
    manifest.input_digests["calibration_data"] = report::file_digest(cal.data);
    manifest.input_digests["calibration_scores"] = report::file_digest(cal.scores);
  }
  manifest.parameters["calibration"] = cal.in_sample ? "in-sample" : "held-out";
  return in;
}

void print_warnings(std::ostream& err, const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) err << "warning: " << w << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Latency-aware evaluation of anomaly detectors on sequence time series", "seqlat"};
  app.require_subcommand(1);
  std::size_t workers = default_workers();
  app.add_option("--workers", workers, "Worker threads (default: SEQLAT_WORKERS or 1)")->check(CLI::PositiveNumber);

  // segment
  auto* segment = app.add_subcommand("segment", "Cut a flat labeled stream into normal*anomalous* sequences");
  std::string seg_in, seg_out, seg_prefix = "seq";
  segment->add_option("--in", seg_in, "Flat-stream CSV")->required();
  segment->add_option("--out", seg_out, "Sequence CSV to write")->required();
  segment->add_option("--prefix", seg_prefix, "Prefix for generated sequence ids");

  // prepare
  auto* prepare = app.add_subcommand("prepare", "Augment, downsample, shuffle and split a sequence dataset");
  std::string prep_in, prep_out, prep_split = "0.6,0.3,0.1";
  std::uint64_t prep_seed = 0;
  int prep_augment = 0;
  bool prep_downsample = false;
  prepare->add_option("--in", prep_in, "Sequence CSV")->required();
  prepare->add_option("--out-dir", prep_out, "Directory for train/test/validation CSVs")->required();
  prepare->add_option("--split", prep_split, "train,test,validation fractions");
  prepare->add_option("--seed", prep_seed, "Shuffle seed");
  prepare->add_option("--augment", prep_augment, "Copies inserted after each anomalous point");
  prepare->add_flag("--downsample", prep_downsample, "Drop the third row of every consecutive triple");

  // score
  auto* score = app.add_subcommand("score", "Fit a reference baseline on training data and score a dataset");
  std::string score_model = "punctual", score_train, score_in, score_out;
  std::size_t score_window = 10;
  score->add_option("--model", score_model, "punctual, delta or window");
  score->add_option("--train", score_train, "Training sequence CSV")->required();
  score->add_option("--window", score_window, "Window length for the window model")->check(CLI::PositiveNumber);
  score->add_option("--in", score_in, "Sequence CSV to score")->required();
  score->add_option("--out", score_out, "Score CSV to write")->required();

  // eval
  auto* evalc = app.add_subcommand("eval", "Calibrate a threshold and report classical metrics, SDR and AL");
  std::string eval_data, eval_scores, eval_out;
  double eval_target = 0.01;
  CalibrationFlags eval_cal;
  evalc->add_option("--data", eval_data, "Sequence CSV")->required();
  evalc->add_option("--scores", eval_scores, "Score CSV")->required();
  evalc->add_option("--target-fpr", eval_target, "FPR budget for the threshold");
  evalc->add_option("--out", eval_out, "Report JSON to write")->required();
  eval_cal.add_to(*evalc);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Latency/SDR against target FPR");
  std::string sweep_data, sweep_scores, sweep_grid = "0.0001:0.2:log20", sweep_out, sweep_plot, sweep_label;
  CalibrationFlags sweep_cal;
  sweep->add_option("--data", sweep_data, "Sequence CSV")->required();
  sweep->add_option("--scores", sweep_scores, "Score CSV")->required();
  sweep->add_option("--fpr-grid", sweep_grid, "lo:hi:logN, lo:hi:linN or a comma-separated list");
  sweep->add_option("--out", sweep_out, "Curve CSV to write")->required();
  sweep->add_option("--plot", sweep_plot, "Optional SVG plot");
  sweep->add_option("--label", sweep_label, "Series name in the plot");
  sweep_cal.add_to(*sweep);

  // synth
  auto* synthc = app.add_subcommand("synth", "Generate a synthetic dataset with known manifestation delay");
  synth::SynthConfig cfg;
  std::string synth_out, normal_len = "20:40", anomalous_len = "15:30", delay = "0";
  std::optional<std::size_t> affected;
  synthc->add_option("--n", cfg.n_sequences, "Number of sequences");
  synthc->add_option("--normal-len", normal_len, "Normal prefix length, n or lo:hi");
  synthc->add_option("--anomalous-len", anomalous_len, "Anomalous suffix length, n or lo:hi");
  synthc->add_option("--arity", cfg.arity, "Feature count");
  synthc->add_option("--affected", affected, "Features carrying the shift (default: all)");
  synthc->add_option("--shift", cfg.shift, "Mean shift in standard deviations");
  synthc->add_option("--delay", delay, "Manifestation delay in points, n or lo:hi");
  synthc->add_option("--visibility", cfg.visibility, "Fraction of post-manifestation points that are shifted");
  synthc->add_option("--seed", cfg.seed, "Generator seed");
  synthc->add_option("--kind", cfg.kind, "Anomaly kind tag");
  synthc->add_option("--out-dir", synth_out, "Output directory")->required();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, er;
    const int code = app.exit(e, o, er);
    out << o.str();
    err << er.str();
    return code == 0 ? kOk : kInvalidInput;
  }

  try {
    if (*segment) {
      auto stream = ingest::load_stream(seg_in);
      auto seg = ingest::segment_stream(stream, seg_prefix);
      print_warnings(err, seg.warnings);
      text::write_file(seg_out, ingest::render_dataset(seg.dataset));
      auto m = new_manifest("segment");
      m.parameters["prefix"] = seg_prefix;
      m.input_digests["stream"] = report::file_digest(seg_in);
      text::write_file(seg_out + ".manifest.json", manifest_text(m));
      out << "segmented " << stream.points.size() << " rows into " << seg.dataset.sequences.size() << " sequences\n";
    } else if (*prepare) {
      const auto spec = parse_split(prep_split, prep_seed);
      auto ds = ingest::load_dataset(prep_in);
      auto m = new_manifest("prepare");
      m.input_digests["data"] = report::file_digest(prep_in);
      m.parameters["split"] = prep_split;
      m.seeds["shuffle"] = prep_seed;
      if (prepare->count("--augment") > 0) {
        ds = ingest::augment_replicate(ds, prep_augment);
        m.parameters["augment"] = std::to_string(prep_augment);
      }
      if (prep_downsample) {
        auto r = ingest::downsample(ds);
        print_warnings(err, r.warnings);
        ds = std::move(r.dataset);
        m.parameters["downsample"] = "drop 3rd of every 3";
      }
      const auto split = ingest::split_dataset(ds, spec);
      ensure_dir(prep_out);
      text::write_file(join_path(prep_out, "train.csv"), ingest::render_dataset(split.train));
      text::write_file(join_path(prep_out, "test.csv"), ingest::render_dataset(split.test));
      text::write_file(join_path(prep_out, "validation.csv"), ingest::render_dataset(split.validation));
      text::write_file(join_path(prep_out, "manifest.json"), manifest_text(m));
      out << "train " << split.train.sequences.size() << ", test " << split.test.sequences.size() << ", validation "
          << split.validation.sequences.size() << " sequences\n";
    } else if (*score) {
      const auto mode = detect::parse_mode(score_model);
      const auto train = ingest::load_dataset(score_train);
      const auto ds = ingest::load_dataset(score_in);
      const auto model = detect::fit_baseline(train, mode, score_window);
      print_warnings(err, model.warnings);
      const auto scores = detect::score_dataset(model, ds, workers);
      text::write_file(score_out, detect::render_scores(ds, scores));
      auto m = new_manifest("score");
      m.parameters["model"] = std::string(detect::mode_name(mode));
      if (mode == detect::Mode::Window) m.parameters["window"] = std::to_string(score_window);
      m.input_digests["train"] = report::file_digest(score_train);
      m.input_digests["data"] = report::file_digest(score_in);
      text::write_file(score_out + ".manifest.json", manifest_text(m));
      out << "scored " << ds.point_count() << " points in " << ds.sequences.size() << " sequences\n";
    } else if (*evalc) {
      auto m = new_manifest("eval");
      m.parameters["target_fpr"] = text::format_real(eval_target);
      const auto in = load_eval_inputs(eval_data, eval_scores, eval_cal, m);
      const auto rep = eval::evaluate(in.data, in.scores, eval_target, in.source(), workers);
      text::write_file(eval_out, report::render_report(rep, m));
      out << "threshold " << text::format_real(rep.calibration.threshold) << ", fpr "
          << text::format_metric(rep.metrics.fpr) << ", sdr " << text::format_metric(rep.sdr) << ", al_points "
          << text::format_metric(rep.al_points) << '\n';
    } else if (*sweep) {
      const auto grid = eval::FprGrid::parse(sweep_grid);
      auto m = new_manifest("sweep");
      m.parameters["fpr_grid"] = sweep_grid;
      const auto in = load_eval_inputs(sweep_data, sweep_scores, sweep_cal, m);
      const auto curve = eval::latency_fpr_sweep(in.data, in.scores, grid, in.source(), workers);
      text::write_file(sweep_out, report::render_curve_csv(curve));
      text::write_file(sweep_out + ".manifest.json", manifest_text(m));
      if (!sweep_plot.empty()) {
        const auto name = sweep_label.empty() ? fs::path(sweep_scores).stem().string() : sweep_label;
        text::write_file(sweep_plot, report::render_tradeoff_svg({{name, curve}}, "Average latency vs target FPR"));
      }
      out << "wrote " << curve.points.size() << " curve points\n";
    } else if (*synthc) {
      cfg.normal_len = synth::Range::parse(normal_len);
      cfg.anomalous_len = synth::Range::parse(anomalous_len);
      cfg.delay = synth::Range::parse(delay);
      cfg.affected_features = affected.value_or(cfg.arity);
      const auto result = synth::generate(cfg, workers);
      ensure_dir(synth_out);
      text::write_file(join_path(synth_out, "dataset.csv"), ingest::render_dataset(result.dataset));
      text::write_file(join_path(synth_out, "ground_truth.csv"), synth::render_ground_truth(result.truth));
      auto m = new_manifest("synth");
      m.parameters = {{"n", std::to_string(cfg.n_sequences)},
                      {"normal_len", normal_len},
                      {"anomalous_len", anomalous_len},
                      {"arity", std::to_string(cfg.arity)},
                      {"affected", std::to_string(cfg.affected_features)},
                      {"shift", text::format_real(cfg.shift)},
                      {"delay", delay},
                      {"visibility", text::format_real(cfg.visibility)},
                      {"kind", cfg.kind}};
      m.seeds["generator"] = cfg.seed;
      text::write_file(join_path(synth_out, "manifest.json"), manifest_text(m));
      out << "generated " << result.dataset.sequences.size() << " sequences\n";
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kOk;
}

}  // namespace seqlat::cli
