#include <doctest.h>

#include <sstream>

#include "../tools/cli.hpp"
#include "oracle/brute_force.hpp"
#include "oracle/fixtures.hpp"
#include "oracle/random_data.hpp"
#include "seqlat/detect.hpp"
#include "seqlat/ingest.hpp"
#include "seqlat/report.hpp"
#include "seqlat/text.hpp"
#include "support.hpp"

using namespace seqlat;
using seqlat::testing::make_dataset;
using seqlat::testing::make_sequence;
using seqlat::testing::read_text;
using seqlat::testing::TempDir;
using seqlat::testing::write_text;

namespace {

struct Invocation {
  int code = -1;
  std::string out;
  std::string err;
};

Invocation invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "seqlat");
  std::ostringstream out, err;
  Invocation r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::size_t line_count(const std::string& text) {
  std::size_t n = 0;
  for (char c : text) n += c == '\n' ? 1 : 0;
  return n;
}

std::size_t anomalous_rows(const Dataset& ds) { return ds.anomalous_point_count(); }

std::string ten_sequence_csv() {
  std::vector<Sequence> seqs;
  for (int i = 0; i < 10; ++i) seqs.push_back(make_sequence("s" + std::to_string(i), {0, 0, 0, 1, 1, 1}, "dos"));
  return ingest::render_dataset(make_dataset(std::move(seqs)));
}

std::string oracle_scores_csv(const Dataset& ds) {
  std::vector<ScoreSeries> scores;
  for (const auto& s : ds.sequences) scores.push_back(detect::oracle_scores(s));
  return detect::render_scores(ds, scores);
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("segment writes a sequence CSV and a manifest") {
  TempDir dir("cli_segment");
  write_text(dir.file("flat.csv"), "t,label,kind,x\n0,0,,1\n1,0,,1\n2,1,dos,5\n3,0,,1\n4,1,scan,6\n");
  const auto r = invoke({"segment", "--in", dir.file("flat.csv"), "--out", dir.file("seq.csv")});
  REQUIRE(r.code == 0);
  const auto ds = ingest::load_dataset(dir.file("seq.csv"));
  CHECK(ds.sequences.size() == 2);
  const auto manifest = nlohmann::json::parse(read_text(dir.file("seq.csv.manifest.json")));
  CHECK(manifest["command"] == "segment");
  CHECK(manifest["input_digests"].contains("stream"));
}

TEST_CASE("segment rejects malformed streams with exit 2") {
  TempDir dir("cli_segment_bad");
  write_text(dir.file("empty.csv"), "");
  auto r = invoke({"segment", "--in", dir.file("empty.csv"), "--out", dir.file("o.csv")});
  CHECK(r.code == 2);
  CHECK(r.err.find("no data rows") != std::string::npos);

  write_text(dir.file("dec.csv"), "t,label,kind,x\n0,0,,1\n5,0,,1\n3,0,,1\n");
  r = invoke({"segment", "--in", dir.file("dec.csv"), "--out", dir.file("o.csv")});
  CHECK(r.code == 2);
  CHECK(r.err.find("line 4") != std::string::npos);

  r = invoke({"segment", "--in", dir.file("missing.csv"), "--out", dir.file("o.csv")});
  CHECK(r.code == 2);
  CHECK(invoke({"segment"}).code == 2);
  CHECK(invoke({"frobnicate"}).code == 2);
  CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("prepare splits 10 sequences into 6/3/1 deterministically") {
  TempDir dir("cli_prepare");
  write_text(dir.file("ten.csv"), ten_sequence_csv());
  auto r = invoke({"prepare", "--in", dir.file("ten.csv"), "--out-dir", dir.file("a"), "--seed", "7"});
  REQUIRE(r.code == 0);
  CHECK(ingest::load_dataset(dir.file("a/train.csv")).sequences.size() == 6);
  CHECK(ingest::load_dataset(dir.file("a/test.csv")).sequences.size() == 3);
  CHECK(ingest::load_dataset(dir.file("a/validation.csv")).sequences.size() == 1);

  r = invoke({"prepare", "--in", dir.file("ten.csv"), "--out-dir", dir.file("b"), "--seed", "7"});
  REQUIRE(r.code == 0);
  for (const char* f : {"train.csv", "test.csv", "validation.csv", "manifest.json"}) {
    CHECK(read_text(dir.file(std::string("a/") + f)) == read_text(dir.file(std::string("b/") + f)));
  }

  CHECK(invoke({"prepare", "--in", dir.file("ten.csv"), "--out-dir", dir.file("c"), "--split", "0.9,0.1,0"}).code ==
        2);
}

TEST_CASE("prepare --augment 3 multiplies anomalous rows by four") {
  TempDir dir("cli_augment");
  write_text(dir.file("ten.csv"), ten_sequence_csv());
  const auto before = anomalous_rows(ingest::load_dataset(dir.file("ten.csv")));
  REQUIRE(invoke({"prepare", "--in", dir.file("ten.csv"), "--out-dir", dir.file("o"), "--augment", "3"}).code == 0);
  std::size_t after = 0;
  for (const char* f : {"o/train.csv", "o/test.csv", "o/validation.csv"}) {
    after += anomalous_rows(ingest::load_dataset(dir.file(f)));
  }
  CHECK(after == 4 * before);
}

TEST_CASE("score aligns rows and honours the window warm-up") {
  TempDir dir("cli_score");
  write_text(dir.file("data.csv"), seqlat::testing::kTwoSequenceCsv);
  auto r = invoke({"score", "--train", dir.file("data.csv"), "--in", dir.file("data.csv"), "--out",
                   dir.file("p.csv")});
  REQUIRE(r.code == 0);
  const auto ds = ingest::load_dataset(dir.file("data.csv"));
  const auto lines = split_lines(read_text(dir.file("p.csv")));
  CHECK(lines.size() == ds.point_count() + 1);
  CHECK(lines[1].rfind("a,0,", 0) == 0);
  CHECK(lines[7].rfind("b,10.5,", 0) == 0);

  std::vector<Sequence> seqs{make_sequence("long", std::vector<int>(12, 0))};
  seqs[0].points[11].label = Label::Anomalous;
  seqs[0].points[11].kind = "k";
  write_text(dir.file("long.csv"), ingest::render_dataset(make_dataset(seqs)));
  r = invoke({"score", "--model", "window", "--window", "10", "--train", dir.file("long.csv"), "--in",
              dir.file("long.csv"), "--out", dir.file("w.csv")});
  REQUIRE(r.code == 0);
  const auto w = detect::load_scores(dir.file("w.csv"), ingest::load_dataset(dir.file("long.csv")));
  for (std::size_t i = 0; i < 9; ++i) CHECK(w[0].scores[i] == 0.0);

  write_text(dir.file("anom.csv"), "seq_id,t,label,kind,x\na,0,1,k,1\na,1,1,k,2\n");
  r = invoke({"score", "--train", dir.file("anom.csv"), "--in", dir.file("data.csv"), "--out", dir.file("x.csv")});
  CHECK(r.code == 2);
  CHECK(r.err.find("no normal points") != std::string::npos);
  CHECK(invoke({"score", "--model", "lstm", "--train", dir.file("data.csv"), "--in", dir.file("data.csv"), "--out",
                dir.file("x.csv")})
            .code == 2);
}

TEST_CASE("eval with oracle scores reports perfect detection") {
  TempDir dir("cli_eval");
  write_text(dir.file("data.csv"), seqlat::testing::kTwoSequenceCsv);
  const auto ds = ingest::load_dataset(dir.file("data.csv"));
  write_text(dir.file("oracle.csv"), oracle_scores_csv(ds));
  const auto r = invoke({"eval", "--data", dir.file("data.csv"), "--scores", dir.file("oracle.csv"), "--in-sample",
                         "--out", dir.file("report.json")});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(read_text(dir.file("report.json")));
  CHECK(j["sdr"] == 1.0);
  CHECK(j["al_points"] == 0.0);
  CHECK(j["metrics"]["fpr"] == 0.0);
  CHECK(j["calibration"]["target_fpr"] == 0.01);
  CHECK(j["manifest"]["parameters"]["calibration"] == "in-sample");

  CHECK(invoke({"eval", "--data", dir.file("data.csv"), "--scores", dir.file("oracle.csv"), "--out",
                dir.file("r2.json")})
            .code == 2);
}

TEST_CASE("eval report matches the brute-force evaluator field for field") {
  TempDir dir("cli_eval_brute");
  std::mt19937_64 rng(404);
  for (int trial = 0; trial < 10; ++trial) {
    auto rc = seqlat::testing::random_case(rng, 8, 20);
    auto cal = seqlat::testing::random_case(rng, 8, 20);
    write_text(dir.file("d.csv"), ingest::render_dataset(rc.dataset));
    write_text(dir.file("s.csv"), detect::render_scores(rc.dataset, rc.scores));
    write_text(dir.file("cd.csv"), ingest::render_dataset(cal.dataset));
    write_text(dir.file("cs.csv"), detect::render_scores(cal.dataset, cal.scores));
    const auto r = invoke({"eval", "--data", dir.file("d.csv"), "--scores", dir.file("s.csv"), "--calibrate",
                           dir.file("cd.csv"), "--calibrate-scores", dir.file("cs.csv"), "--target-fpr", "0.2",
                           "--out", dir.file("r.json")});
    REQUIRE(r.code == 0);
    const auto parsed = report::parse_report(read_text(dir.file("r.json")));
    const auto want = oracle::brute_evaluate(ingest::load_dataset(dir.file("d.csv")), rc.scores, 0.2, &cal.dataset,
                                             &cal.scores);
    CHECK(oracle::compare_reports(parsed.report, want) == "");
  }
}

TEST_CASE("sweep writes the default 20-point grid and an SVG") {
  TempDir dir("cli_sweep");
  const auto f = seqlat::testing::spike_fixture();
  write_text(dir.file("spike.csv"), ingest::render_dataset(f.dataset));
  write_text(dir.file("spike_scores.csv"), detect::render_scores(f.dataset, f.scores));
  const auto r = invoke({"sweep", "--data", dir.file("spike.csv"), "--scores", dir.file("spike_scores.csv"),
                         "--in-sample", "--out", dir.file("curve.csv"), "--plot", dir.file("curve.svg")});
  REQUIRE(r.code == 0);
  const auto lines = text::read_lines(dir.file("curve.csv"));
  REQUIRE(lines.size() == 21);
  const auto curve = report::parse_curve_csv(lines);
  bool rose_together = false;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    CHECK(curve.points[i].target_fpr > curve.points[i - 1].target_fpr);
    if (*curve.points[i].al_points > *curve.points[i - 1].al_points &&
        *curve.points[i].sdr > *curve.points[i - 1].sdr) {
      rose_together = true;
      CHECK(*curve.points[i].al_points == 25.5);
    }
  }
  CHECK(rose_together);
  const auto svg = read_text(dir.file("curve.svg"));
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(invoke({"sweep", "--data", dir.file("spike.csv"), "--scores", dir.file("spike_scores.csv"), "--in-sample",
                "--fpr-grid", "0.2:0.1:log3", "--out", dir.file("bad.csv")})
            .code == 2);
}

TEST_CASE("synth output is byte-identical across runs and worker counts") {
  TempDir dir("cli_synth");
  const std::vector<std::string> base{"synth", "--n", "50", "--delay", "5", "--shift", "6", "--seed", "1"};
  auto a = base;
  a.insert(a.end(), {"--out-dir", dir.file("a")});
  REQUIRE(invoke(a).code == 0);
  std::vector<std::string> b8{"--workers", "8"};
  b8.insert(b8.end(), base.begin(), base.end());
  b8.insert(b8.end(), {"--out-dir", dir.file("b")});
  REQUIRE(invoke(b8).code == 0);
  for (const char* f : {"dataset.csv", "ground_truth.csv", "manifest.json"}) {
    CHECK(read_text(dir.file(std::string("a/") + f)) == read_text(dir.file(std::string("b/") + f)));
  }
  CHECK(line_count(read_text(dir.file("a/ground_truth.csv"))) == 51);
  CHECK(invoke({"synth", "--visibility", "0", "--out-dir", dir.file("c")}).code == 2);
}
