// Copyright 2026 The gmprop Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include <unistd.h>

#include "doctest.h"
#include "gmprop/error.hpp"
#include "gmprop/io.hpp"
#include "gmprop/synth.hpp"
#include "support/random_instances.hpp"

using namespace gmprop;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("gmprop-io-" + std::to_string(reinterpret_cast<std::uintptr_t>(this)) + "-" +
            std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ignored;
    fs::remove_all(path, ignored);
  }
};

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::size_t count_lines(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

}  // namespace

TEST_CASE("minimal proposal record") {
  const auto q = io::parse_proposal_line(
      R"({"query_id":"q1","video_id":"v1","duration_sec":30.0,"num_segments":32,)"
      R"("proposals":[{"centers":[0.5],"widths":[0.4],"attention":[1.0],"recon_loss":2.0}]})",
      1);
  CHECK(q.query_id() == "q1");
  CHECK(q.video_id() == "v1");
  CHECK(q.num_segments() == 32);
  REQUIRE(q.proposals().size() == 1);
  CHECK(q.proposals()[0].size() == 1);
  CHECK(q.proposals()[0].recon_loss() == 2.0);
}

TEST_CASE("attention close to the simplex is renormalized, far off is rejected") {
  const auto q = io::parse_proposal_line(
      R"({"query_id":"q1","video_id":"v1","duration_sec":30.0,"num_segments":8,)"
      R"("proposals":[{"centers":[0.4,0.6],"widths":[0.1,0.1],"attention":[0.5,0.5000003],"recon_loss":1}]})",
      1);
  const auto& a = q.proposals()[0].attention();
  CHECK(std::abs(a[0] + a[1] - 1.0) <= 1e-15);
  CHECK(std::abs(a[0] - 0.5 / 1.0000003) <= 1e-15);

  CHECK_THROWS_AS(io::parse_proposal_line(
                      R"({"query_id":"q1","video_id":"v1","duration_sec":30.0,"num_segments":8,)"
                      R"("proposals":[{"centers":[0.4,0.6],"widths":[0.1,0.1],"attention":[0.5,0.6],"recon_loss":1}]})",
                      1),
                  ValidationError);
}

TEST_CASE("proposal errors name the line and the query") {
  try {
    io::parse_proposal_line(
        R"({"query_id":"bad-q","video_id":"v","duration_sec":30.0,"num_segments":8,)"
        R"("proposals":[{"centers":[0.5,0.4],"widths":[0.2,0.0],"attention":[0.5,0.5],"recon_loss":1}]})",
        7);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    CHECK(what.find("line 7") != std::string::npos);
    CHECK(what.find("bad-q") != std::string::npos);
    CHECK(what.find("width") != std::string::npos);
  }
  CHECK_THROWS_WITH_AS(io::parse_proposal_line("{not json", 3), doctest::Contains("line 3"),
                       ValidationError);
  CHECK_THROWS_WITH_AS(io::parse_proposal_line(R"({"query_id":"x"})", 4),
                       doctest::Contains("video_id"), ValidationError);
}

TEST_CASE("charades line parsing") {
  const std::map<std::string, double> durations = {{"AO8RW", 33.67}};
  const auto out = io::parse_charades("AO8RW 0.0 6.9##a person is putting a book on a shelf.\n",
                                      durations);
  REQUIRE(out.items.size() == 1);
  const auto& gt = out.items[0];
  CHECK(gt.video_id == "AO8RW");
  CHECK(gt.query_id == "AO8RW#0");
  CHECK(gt.span_sec.start() == 0.0);
  CHECK(gt.span_sec.end() == 6.9);
  CHECK(gt.sentence == "a person is putting a book on a shelf.");
  CHECK(gt.duration_sec == 33.67);
  CHECK(out.warnings.empty());
}

TEST_CASE("charades repairs and errors") {
  const std::map<std::string, double> durations = {{"A", 20.0}, {"B", 10.0}};
  const auto out = io::parse_charades(
      "A 5.0 2.0##reversed\n\nB 1.0 12.5##too long\r\nA 1 2##second for A\n", durations);
  REQUIRE(out.items.size() == 3);
  CHECK(out.items[0].span_sec.start() == 2.0);
  CHECK(out.items[0].span_sec.end() == 5.0);
  CHECK(out.items[1].span_sec.end() == 10.0);
  CHECK(out.items[1].sentence == "too long");
  CHECK(out.items[2].query_id == "A#1");
  CHECK(out.warnings.size() == 3);  // swap, empty line, clamp

  CHECK_THROWS_WITH_AS(io::parse_charades("A 1.0 2.0 a person\n", durations),
                       doctest::Contains("line 1"), ValidationError);
  CHECK_THROWS_WITH_AS(io::parse_charades("A 1.0 2.0##ok\nA one 2.0##bad\n", durations),
                       doctest::Contains("line 2"), ValidationError);
  CHECK_THROWS_WITH_AS(io::parse_charades("Z 1.0 2.0##unknown video\n", durations),
                       doctest::Contains("Z"), ValidationError);
}

TEST_CASE("activitynet document parsing") {
  const auto out = io::parse_activitynet(R"({
    "v_b": {"duration": 50.0, "timestamps": [[1.0, 4.5], [3.0, 55.0]],
            "sentences": ["first. ", "second."]},
    "v_a": {"duration": 12.0, "timestamps": [[0, 2]], "sentences": ["only"]}
  })");
  REQUIRE(out.items.size() == 3);
  CHECK(out.items[0].query_id == "v_b#0");
  CHECK(out.items[1].query_id == "v_b#1");
  CHECK(out.items[1].span_sec.end() == 50.0);
  CHECK(out.items[0].sentence == "first.");
  CHECK(out.items[2].query_id == "v_a#0");
  CHECK(out.warnings.size() == 1);

  CHECK_THROWS_WITH_AS(
      io::parse_activitynet(
          R"({"v_x": {"duration": 10, "timestamps": [[0,1],[1,2]], "sentences": ["a"]}})"),
      doctest::Contains("v_x"), ValidationError);
  CHECK_THROWS_WITH_AS(
      io::parse_activitynet(R"({"v_y": {"duration": 0, "timestamps": [], "sentences": []}})"),
      doctest::Contains("v_y"), ValidationError);
}

TEST_CASE("durations table") {
  TempDir dir;
  write_text(dir.path / "d.csv", "id,length\nAO8RW,33.67\nXYZ 12\n\n");
  const auto d = io::read_video_durations(dir.path / "d.csv");
  CHECK(d.size() == 2);
  CHECK(d.at("AO8RW") == 33.67);
  CHECK(d.at("XYZ") == 12.0);
  write_text(dir.path / "bad.csv", "A 3\nB x\n");
  CHECK_THROWS_AS(io::read_video_durations(dir.path / "bad.csv"), ValidationError);
}

TEST_CASE("native ground truth clamps with warnings") {
  std::vector<std::string> warnings;
  const auto g = io::parse_ground_truth_line(
      R"({"query_id":"q","video_id":"v","duration_sec":10,"start_sec":-0.5,"end_sec":10.2,"sentence":"s"})",
      1, warnings);
  CHECK(g.span_sec.start() == 0.0);
  CHECK(g.span_sec.end() == 10.0);
  CHECK(warnings.size() == 1);
}

TEST_CASE("prediction record validation") {
  CHECK_THROWS_WITH_AS(
      io::parse_prediction_line(
          R"({"query_id":"q","start_sec":1,"end_sec":2,"boundary":"longest-tail","selector":"iou","winner_index":1,"score":0})",
          5),
      doctest::Contains("line 5"), ValidationError);
  CHECK_THROWS_AS(
      io::parse_prediction_line(
          R"({"query_id":"q","start_sec":1,"end_sec":2,"boundary":"average","selector":"iou","winner_index":0,"score":0})",
          1),
      ValidationError);
}

TEST_CASE("empty prediction list writes an empty file") {
  TempDir dir;
  io::write_predictions({}, dir.path / "p.jsonl");
  CHECK(io::read_file(dir.path / "p.jsonl").empty());
  CHECK(io::read_predictions(dir.path / "p.jsonl").empty());
}

TEST_CASE("write/read round trips are lossless") {
  TempDir dir;
  synth::CounterRng rng(271828, 0);

  std::vector<io::PredictionRecord> records;
  for (int i = 0; i < 1000; ++i) {
    const double a = rng.uniform(0.0, 500.0);
    records.push_back({"q" + std::to_string(rng.next_u64() % 100000) + "-" + std::to_string(i),
                       TemporalSpan::Seconds(a, a + rng.uniform(0.0, 100.0)),
                       kAllBoundaryStrategies[rng.next_u64() % 5],
                       kAllSelectionStrategies[rng.next_u64() % 4],
                       static_cast<std::size_t>(1 + rng.next_u64() % 20), rng.normal()});
  }
  io::write_predictions(records, dir.path / "p.jsonl");
  auto back = io::read_predictions(dir.path / "p.jsonl");
  std::stable_sort(records.begin(), records.end(),
                   [](const auto& x, const auto& y) { return x.query_id < y.query_id; });
  CHECK(back == records);

  std::vector<QueryCase> cases;
  std::vector<GroundTruthAnnotation> truth;
  for (int i = 0; i < 1000; ++i) {
    const auto n = static_cast<std::size_t>(testing::uniform_int(rng, 1, 4));
    std::vector<MixtureProposal> proposals;
    for (std::size_t k = 0; k < n; ++k) {
      proposals.push_back(
          testing::random_proposal(rng, static_cast<std::size_t>(testing::uniform_int(rng, 1, 5))));
    }
    const double duration = rng.uniform(1.0, 300.0);
    cases.emplace_back("case-" + std::to_string(i), "vid \"" + std::to_string(i) + "\"", duration,
                       testing::uniform_int(rng, 1, 128), std::move(proposals));
    const double s = rng.uniform(0.0, duration);
    truth.push_back({"case-" + std::to_string(i), "vid", duration,
                     TemporalSpan::Seconds(s, rng.uniform(s, duration)),
                     "a sentence with \"quotes\", commas and ünïcode"});
  }
  io::write_proposals(cases, dir.path / "c.jsonl");
  CHECK(io::read_proposals(dir.path / "c.jsonl") == cases);
  io::write_ground_truth(truth, dir.path / "g.jsonl");
  const auto gt_back = io::read_ground_truth(dir.path / "g.jsonl");
  CHECK(gt_back.items == truth);
  CHECK(gt_back.warnings.empty());
}

TEST_CASE("report formats") {
  AblationReport report;
  report.thresholds = {0.3, 0.5, 0.7};
  for (auto b : kAllBoundaryStrategies) {
    for (auto s : kAllSelectionStrategies) {
      EvalReport r;
      r.thresholds = report.thresholds;
      r.recall_at = {0.69321, 0.5, 1.0 / 3.0};
      r.mean_iou = 0.45954;
      report.rows.push_back({b, s, r});
    }
  }
  const auto csv = io::format_report(report, io::ReportFormat::kCsv);
  CHECK(count_lines(csv) == 21);
  CHECK(csv.rfind("boundary,selector,IoU@0.3,IoU@0.5,IoU@0.7,mIoU\n", 0) == 0);
  CHECK(csv.find("long-tail,iou,0.6932,0.5000,0.3333,0.4595\n") != std::string::npos);

  const auto md = io::format_report(report, io::ReportFormat::kMarkdown);
  CHECK(count_lines(md) == 22);
  CHECK(md.find("| Long Tail | IoU |") != std::string::npos);
  CHECK(md.find("|  | IoU+LossMax |") != std::string::npos);
  CHECK(md.find("| Shortest Tail | IoU |") != std::string::npos);

  AblationReport empty;
  empty.thresholds = {0.5};
  CHECK(io::format_report(empty, io::ReportFormat::kCsv) == "boundary,selector,IoU@0.5,mIoU\n");
  CHECK_THROWS_AS(io::parse_report_format("xlsx"), ValidationError);
}

TEST_CASE("unwritable and unreadable paths raise IoError") {
  CHECK_THROWS_AS(io::read_file("/nonexistent/dir/file.jsonl"), IoError);
  CHECK_THROWS_AS(io::write_file_atomic("/nonexistent/dir/out.csv", "x"), IoError);
}
