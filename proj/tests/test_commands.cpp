// Copyright 2026 The gmprop Authors
// SPDX-License-Identifier: Apache-2.0

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "gmprop/commands.hpp"
#include "gmprop/io.hpp"
#include "json.hpp"

using namespace gmprop;
using namespace gmprop::cli;
namespace fs = std::filesystem;

namespace {

struct Workspace {
  fs::path dir;
  std::ostringstream out;
  std::ostringstream err;

  Workspace() {
    static int counter = 0;
    dir = fs::temp_directory_path() /
          ("gmprop-cmd-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::create_directories(dir);
  }
  ~Workspace() {
    std::error_code ignored;
    fs::remove_all(dir, ignored);
  }
  fs::path operator/(const std::string& name) const { return dir / name; }
  void write(const std::string& name, const std::string& text) const {
    std::ofstream(dir / name, std::ios::binary) << text;
  }
};

// One query, one proposal, one mask centered at 0.5 with width 0.4.
constexpr const char* kSingleMask =
    R"({"query_id":"q1","video_id":"v1","duration_sec":10.0,"num_segments":11,)"
    R"("proposals":[{"centers":[0.5],"widths":[0.4],"attention":[1.0],"recon_loss":0.5}]})"
    "\n";

std::string prediction_line(const std::string& id, double s, double e) {
  return io::format_prediction_line({id, TemporalSpan::Seconds(s, e), BoundaryStrategy::kAverage,
                                     SelectionStrategy::kIou, 1, 0.0}) +
         "\n";
}

std::string gt_line(const std::string& id, double s, double e) {
  return io::format_ground_truth_line(
             {id, "v", 100.0, TemporalSpan::Seconds(s, e), "sentence"}) +
         "\n";
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(GMPROP_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("infer writes predictions and a manifest") {
  Workspace ws;
  ws.write("p.jsonl", kSingleMask);
  InferOptions opts;
  opts.proposals = ws / "p.jsonl";
  opts.out = ws / "pred.jsonl";
  REQUIRE(run_infer(opts, ws.out, ws.err) == kExitOk);
  const auto preds = io::read_predictions(opts.out);
  REQUIRE(preds.size() == 1);
  CHECK(std::abs(preds[0].span_sec.start() - 3.0) <= 1e-12);
  CHECK(std::abs(preds[0].span_sec.end() - 7.0) <= 1e-12);
  CHECK(preds[0].boundary == BoundaryStrategy::kShortestTail);
  CHECK(preds[0].selector == SelectionStrategy::kIouLossMax);

  const auto manifest = nlohmann::json::parse(io::read_file(manifest_path(opts.out)));
  CHECK(manifest["tool"] == "gmprop");
  CHECK(manifest["command"] == "infer");
  CHECK(manifest["config"]["boundary"] == "shortest-tail");
  CHECK(manifest["inputs"][0]["sha256"] == sha256_hex(io::read_file(opts.proposals)));
  CHECK(manifest["outputs"][0]["sha256"] == sha256_hex(io::read_file(opts.out)));
  CHECK(manifest.contains("created_at"));
}

TEST_CASE("gamma scales a single-mask span around its center") {
  Workspace ws;
  ws.write("p.jsonl", kSingleMask);
  InferOptions opts;
  opts.proposals = ws / "p.jsonl";
  opts.out = ws / "pred.jsonl";
  opts.gamma = 0.5;
  REQUIRE(run_infer(opts, ws.out, ws.err) == kExitOk);
  const auto preds = io::read_predictions(opts.out);
  CHECK(std::abs(preds[0].span_sec.start() - 4.0) <= 1e-12);
  CHECK(std::abs(preds[0].span_sec.end() - 6.0) <= 1e-12);

  // 0.85 against the endpoint computation done by hand: c -/+ gamma * w / 2.
  opts.gamma = 0.85;
  REQUIRE(run_infer(opts, ws.out, ws.err) == kExitOk);
  const auto p85 = io::read_predictions(opts.out);
  const double half = 0.85 * 0.4 / 2.0;
  CHECK(std::abs(p85[0].span_sec.start() - (0.5 - half) * 10.0) <= 1e-12);
  CHECK(std::abs(p85[0].span_sec.end() - (0.5 + half) * 10.0) <= 1e-12);

  opts.gamma = 1.5;
  CHECK(run_infer(opts, ws.out, ws.err) == kExitValidation);
}

TEST_CASE("synth writes one line per query") {
  Workspace ws;
  const std::string p = (ws / "p.jsonl").string();
  const std::string g = (ws / "g.jsonl").string();
  REQUIRE(run_cli("synth --queries 50 --seed 42 --out-proposals " + p + " --out-gt " + g) == 0);
  const auto lines = [](const std::string& path) {
    const auto text = io::read_file(path);
    return std::count(text.begin(), text.end(), '\n');
  };
  CHECK(lines(p) == 50);
  CHECK(lines(g) == 50);
  CHECK(fs::exists(manifest_path(p)));
}

TEST_CASE("unknown strategy tokens fail with the list of valid ones") {
  Workspace ws;
  ws.write("p.jsonl", kSingleMask);
  InferOptions opts;
  opts.proposals = ws / "p.jsonl";
  opts.out = ws / "pred.jsonl";
  opts.boundary = "longest-tail";
  CHECK(run_infer(opts, ws.out, ws.err) == kExitValidation);
  CHECK(ws.err.str().find("shortest-tail") != std::string::npos);
  CHECK_FALSE(fs::exists(opts.out));
}

TEST_CASE("missing input is an I/O failure and leaves no output") {
  Workspace ws;
  InferOptions opts;
  opts.proposals = ws / "absent.jsonl";
  opts.out = ws / "pred.jsonl";
  CHECK(run_infer(opts, ws.out, ws.err) == kExitIo);
  CHECK_FALSE(fs::exists(opts.out));
  CHECK_FALSE(fs::exists(manifest_path(opts.out)));
}

TEST_CASE("malformed input is a validation failure") {
  Workspace ws;
  ws.write("p.jsonl", std::string(kSingleMask) + "{\"query_id\": 3}\n");
  InferOptions opts;
  opts.proposals = ws / "p.jsonl";
  opts.out = ws / "pred.jsonl";
  CHECK(run_infer(opts, ws.out, ws.err) == kExitValidation);
  CHECK(ws.err.str().find("line 2") != std::string::npos);
  CHECK_FALSE(fs::exists(opts.out));
}

TEST_CASE("evaluate reports recall and mIoU") {
  Workspace ws;
  ws.write("pred.jsonl", prediction_line("a", 0, 7.5) + prediction_line("b", 0, 4) +
                             prediction_line("c", 0, 5.5));
  ws.write("gt.jsonl", gt_line("a", 0, 10) + gt_line("b", 0, 10) + gt_line("c", 0, 10));
  EvaluateOptions opts;
  opts.predictions = ws / "pred.jsonl";
  opts.ground_truth.path = ws / "gt.jsonl";
  opts.out = ws / "report.csv";
  REQUIRE(run_evaluate(opts, ws.out, ws.err) == kExitOk);
  CHECK(io::read_file(opts.out) ==
        "num_queries,IoU@0.3,IoU@0.5,IoU@0.7,mIoU\n3,1.0000,0.6667,0.3333,0.5667\n");
  CHECK(ws.out.str().find("| 3 | 1.0000 | 0.6667 | 0.3333 | 0.5667 |") != std::string::npos);
}

TEST_CASE("evaluate rejects empty predictions and unmatched ids") {
  Workspace ws;
  ws.write("empty.jsonl", "");
  ws.write("pred.jsonl", prediction_line("a", 0, 5) + prediction_line("zz", 0, 5));
  ws.write("gt.jsonl", gt_line("a", 0, 10) + gt_line("b", 0, 10));
  EvaluateOptions opts;
  opts.predictions = ws / "empty.jsonl";
  opts.ground_truth.path = ws / "gt.jsonl";
  opts.out = ws / "report.csv";
  CHECK(run_evaluate(opts, ws.out, ws.err) == kExitValidation);
  CHECK(ws.err.str().find("empty") != std::string::npos);

  opts.predictions = ws / "pred.jsonl";
  CHECK(run_evaluate(opts, ws.out, ws.err) == kExitValidation);
  CHECK(ws.err.str().find("b zz") != std::string::npos);
  CHECK_FALSE(fs::exists(opts.out));

  opts.predictions = ws / "pred.jsonl";
  opts.thresholds = {0.7, 0.3};
  CHECK(run_evaluate(opts, ws.out, ws.err) == kExitValidation);
}

TEST_CASE("evaluate accepts charades ground truth with a durations table") {
  Workspace ws;
  ws.write("durations.txt", "AO8RW 33.67\n");
  ws.write("gt.txt", "AO8RW 0.0 6.9##a person is putting a book on a shelf.\n");
  ws.write("pred.jsonl", prediction_line("AO8RW#0", 0.0, 6.9));
  EvaluateOptions opts;
  opts.predictions = ws / "pred.jsonl";
  opts.ground_truth = {ws / "gt.txt", "charades", ws / "durations.txt"};
  opts.out = ws / "report.csv";
  REQUIRE(run_evaluate(opts, ws.out, ws.err) == kExitOk);
  CHECK(io::read_file(opts.out).find("1,1.0000,1.0000,1.0000,1.0000") != std::string::npos);

  opts.ground_truth.durations.reset();
  CHECK(run_evaluate(opts, ws.out, ws.err) == kExitValidation);
}

TEST_CASE("synth is reproducible and validates its config") {
  Workspace ws;
  SynthOptions opts;
  opts.config.num_queries = 20;
  opts.config.center_noise_sd = 0.02;
  opts.out_proposals = ws / "p1.jsonl";
  opts.out_ground_truth = ws / "g1.jsonl";
  REQUIRE(run_synth(opts, ws.out, ws.err) == kExitOk);
  opts.out_proposals = ws / "p2.jsonl";
  opts.out_ground_truth = ws / "g2.jsonl";
  REQUIRE(run_synth(opts, ws.out, ws.err) == kExitOk);
  CHECK(io::read_file(ws / "p1.jsonl") == io::read_file(ws / "p2.jsonl"));
  CHECK(io::read_file(ws / "g1.jsonl") == io::read_file(ws / "g2.jsonl"));

  const auto m = nlohmann::json::parse(io::read_file(manifest_path(ws / "p1.jsonl")));
  CHECK(m["config"]["seed"] == 42);
  CHECK(m["outputs"][0]["sha256"] == sha256_hex(io::read_file(ws / "p1.jsonl")));
  CHECK(m["outputs"][1]["sha256"] == sha256_hex(io::read_file(ws / "g1.jsonl")));

  opts.config.center_noise_sd = -1.0;
  opts.out_proposals = ws / "p3.jsonl";
  opts.out_ground_truth = ws / "g3.jsonl";
  CHECK(run_synth(opts, ws.out, ws.err) == kExitValidation);
  CHECK_FALSE(fs::exists(ws / "p3.jsonl"));
}

TEST_CASE("render produces a curve peaking at the mask center") {
  Workspace ws;
  ws.write("p.jsonl", kSingleMask);
  RenderOptions opts;
  opts.proposals = ws / "p.jsonl";
  opts.query_id = "q1";
  opts.out = ws / "curve.csv";
  REQUIRE(run_render(opts, ws.out, ws.err) == kExitOk);
  std::istringstream lines(io::read_file(opts.out));
  std::string line;
  std::getline(lines, line);
  CHECK(line == "segment,position,value");
  std::vector<double> gauss;
  while (std::getline(lines, line)) gauss.push_back(std::stod(line.substr(line.rfind(',') + 1)));
  REQUIRE(gauss.size() == 11);
  CHECK(std::max_element(gauss.begin(), gauss.end()) - gauss.begin() == 5);
  CHECK(gauss[5] == 1.0);

  opts.shape = "inverse-gaussian";
  opts.out = ws / "inv.csv";
  REQUIRE(run_render(opts, ws.out, ws.err) == kExitOk);
  std::istringstream inv_lines(io::read_file(opts.out));
  std::getline(inv_lines, line);
  for (std::size_t t = 0; std::getline(inv_lines, line); ++t) {
    const double v = std::stod(line.substr(line.rfind(',') + 1));
    CHECK(std::abs(v + gauss[t] - 1.0) <= 1e-12);
  }

  opts.query_id = "nope";
  opts.out = ws / "none.csv";
  CHECK(run_render(opts, ws.out, ws.err) == kExitValidation);
  opts.query_id = "q1";
  opts.proposal = 2;
  CHECK(run_render(opts, ws.out, ws.err) == kExitValidation);
  opts.proposal = 1;
  opts.shape = "triangle";
  CHECK(run_render(opts, ws.out, ws.err) == kExitValidation);
  CHECK_FALSE(fs::exists(ws / "none.csv"));
}

TEST_CASE("single-cell ablation equals infer followed by evaluate") {
  Workspace ws;
  SynthOptions s;
  s.config.num_queries = 30;
  s.config.center_noise_sd = 0.03;
  s.loss_model = "uniform-random";
  s.out_proposals = ws / "p.jsonl";
  s.out_ground_truth = ws / "g.jsonl";
  REQUIRE(run_synth(s, ws.out, ws.err) == kExitOk);

  InferOptions inf;
  inf.proposals = s.out_proposals;
  inf.boundary = "average";
  inf.selector = "iou-loss-sum";
  inf.out = ws / "pred.jsonl";
  REQUIRE(run_infer(inf, ws.out, ws.err) == kExitOk);

  EvaluateOptions ev;
  ev.predictions = inf.out;
  ev.ground_truth.path = s.out_ground_truth;
  ev.out = ws / "eval.csv";
  REQUIRE(run_evaluate(ev, ws.out, ws.err) == kExitOk);

  AblateOptions ab;
  ab.proposals = s.out_proposals;
  ab.ground_truth.path = s.out_ground_truth;
  ab.boundaries = {"average"};
  ab.selectors = {"iou-loss-sum"};
  ab.format = "csv";
  ab.out = ws / "ablate.csv";
  REQUIRE(run_ablate(ab, ws.out, ws.err) == kExitOk);

  const auto eval_csv = io::read_file(ev.out);
  const auto ablate_csv = io::read_file(ab.out);
  const auto eval_values = eval_csv.substr(eval_csv.find('\n') + 1);
  const auto ablate_values = ablate_csv.substr(ablate_csv.find('\n') + 1);
  CHECK(ablate_values == "average,iou-loss-sum" + eval_values.substr(eval_values.find(',')));
}

TEST_CASE("ablation output is byte-identical across runs and thread counts") {
  Workspace ws;
  SynthOptions s;
  s.config.num_queries = 40;
  s.config.center_noise_sd = 0.05;
  s.out_proposals = ws / "p.jsonl";
  s.out_ground_truth = ws / "g.jsonl";
  REQUIRE(run_synth(s, ws.out, ws.err) == kExitOk);
  AblateOptions ab;
  ab.proposals = s.out_proposals;
  ab.ground_truth.path = s.out_ground_truth;
  ab.out = ws / "a1.md";
  ab.threads = 1;
  REQUIRE(run_ablate(ab, ws.out, ws.err) == kExitOk);
  ab.out = ws / "a2.md";
  ab.threads = 5;
  REQUIRE(run_ablate(ab, ws.out, ws.err) == kExitOk);
  const auto a = io::read_file(ws / "a1.md");
  CHECK(a == io::read_file(ws / "a2.md"));
  CHECK(std::count(a.begin(), a.end(), '\n') == 22);
}

TEST_CASE("executable exit codes") {
  Workspace ws;
  ws.write("p.jsonl", kSingleMask);
  const std::string p = (ws / "p.jsonl").string();
  const std::string out = (ws / "o.jsonl").string();
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("--version") == 0);
  CHECK(run_cli("") == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("infer --proposals " + p) == 2);
  CHECK(run_cli("infer --proposals " + p + " --out " + out) == 0);
  CHECK(fs::exists(out));
  CHECK(run_cli("infer --proposals " + p + " --out " + out + " --boundary longest-tail") == 2);
  CHECK(run_cli("infer --proposals " + p + " --out " + out + " --gamma abc") == 2);
  CHECK(run_cli("infer --proposals " + (ws / "missing").string() + " --out " + out) == 1);
  CHECK(run_cli("synth --queries 3 --center-noise -1 --out-proposals " +
                (ws / "sp.jsonl").string() + " --out-gt " + (ws / "sg.jsonl").string()) == 2);
  CHECK(run_cli("render --proposals " + p + " --query-id q1 --out " +
                (ws / "c.csv").string()) == 0);
}
