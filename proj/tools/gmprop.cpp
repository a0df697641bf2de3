// Copyright 2026 The gmprop Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "gmprop/commands.hpp"

namespace {

using namespace gmprop::cli;

void add_ground_truth_flags(CLI::App* cmd, GroundTruthSource& gt) {
  cmd->add_option("--gt", gt.path, "Ground-truth annotations")->required();
  cmd->add_option("--gt-format", gt.format, "native | charades | activitynet");
  cmd->add_option("--durations", gt.durations,
                  "Video durations table (video_id seconds), needed for charades");
}

void add_eval_flags(CLI::App* cmd, std::vector<double>& thresholds, std::string& mode,
                    std::string& format) {
  cmd->add_option("--thresholds", thresholds, "Ascending IoU thresholds in (0, 1)")
      ->delimiter(',');
  cmd->add_option("--threshold-mode", mode, "strict (IoU > m) | inclusive (IoU >= m)");
  cmd->add_option("--format", format, "csv | markdown");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundary prediction, top-1 selection and evaluation for Gaussian mixture "
               "temporal proposals"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  InferOptions infer;
  auto* infer_cmd = app.add_subcommand("infer", "Predict one span per query");
  infer_cmd->add_option("--proposals", infer.proposals, "Proposals file (JSON lines)")->required();
  infer_cmd->add_option("--boundary", infer.boundary,
                        "long-tail | short-tail | shortest-tail | average | attention");
  infer_cmd->add_option("--selector", infer.selector,
                        "iou | loss | iou-loss-sum | iou-loss-max");
  infer_cmd->add_option("--gamma", infer.gamma, "Endpoint width factor in (0, 1]");
  infer_cmd->add_option("--out", infer.out, "Predictions output (JSON lines)")->required();
  infer_cmd->add_option("--threads", infer.threads, "Worker threads (default GMPROP_THREADS)");

  EvaluateOptions evaluate;
  auto* eval_cmd = app.add_subcommand("evaluate", "Score predictions against ground truth");
  eval_cmd->add_option("--predictions", evaluate.predictions, "Predictions file")->required();
  add_ground_truth_flags(eval_cmd, evaluate.ground_truth);
  add_eval_flags(eval_cmd, evaluate.thresholds, evaluate.mode, evaluate.format);
  eval_cmd->add_option("--out", evaluate.out, "Report output")->required();

  AblateOptions ablate;
  auto* ablate_cmd = app.add_subcommand("ablate", "Evaluate a boundary x selector grid");
  ablate_cmd->add_option("--proposals", ablate.proposals, "Proposals file")->required();
  add_ground_truth_flags(ablate_cmd, ablate.ground_truth);
  ablate_cmd->add_option("--boundaries", ablate.boundaries, "Boundary tokens (default: all)")
      ->delimiter(',');
  ablate_cmd->add_option("--selectors", ablate.selectors, "Selector tokens (default: all)")
      ->delimiter(',');
  ablate_cmd->add_option("--gamma", ablate.gamma, "Endpoint width factor in (0, 1]");
  add_eval_flags(ablate_cmd, ablate.thresholds, ablate.mode, ablate.format);
  ablate_cmd->add_option("--out", ablate.out, "Report output")->required();
  ablate_cmd->add_option("--threads", ablate.threads, "Worker threads (default GMPROP_THREADS)");

  SynthOptions synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate seeded synthetic proposals and GT");
  synth_cmd->add_option("--queries", synth.config.num_queries, "Number of queries");
  synth_cmd->add_option("--proposals", synth.config.n_proposals, "Proposals per query (N)");
  synth_cmd->add_option("--masks", synth.config.masks_per_proposal, "Masks per proposal (M)");
  synth_cmd->add_option("--center-noise", synth.config.center_noise_sd,
                        "Center noise sd, normalized units");
  synth_cmd->add_option("--width-noise", synth.config.width_noise_sd,
                        "Width noise sd, normalized units");
  synth_cmd->add_option("--loss-model", synth.loss_model,
                        "one-minus-iou | uniform-random | constant");
  synth_cmd->add_option("--seed", synth.config.seed, "Random seed");
  synth_cmd->add_option("--segments", synth.config.num_segments, "Segments per video (T)");
  synth_cmd->add_option("--spread", synth.config.proposal_spread,
                        "Shift step between non-anchor proposals");
  synth_cmd->add_option("--out-proposals", synth.out_proposals, "Proposals output")->required();
  synth_cmd->add_option("--out-gt", synth.out_ground_truth, "Ground-truth output")->required();

  RenderOptions render;
  auto* render_cmd = app.add_subcommand("render", "Sample one proposal's mixture curve to CSV");
  render_cmd->add_option("--proposals", render.proposals, "Proposals file")->required();
  render_cmd->add_option("--query-id", render.query_id, "Query to render")->required();
  render_cmd->add_option("--shape", render.shape, "gaussian | laplace | inverse-gaussian");
  render_cmd->add_option("--proposal", render.proposal, "1-based proposal index");
  render_cmd->add_option("--out", render.out, "CSV output")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  if (*infer_cmd) return run_infer(infer, std::cout, std::cerr);
  if (*eval_cmd) return run_evaluate(evaluate, std::cout, std::cerr);
  if (*ablate_cmd) return run_ablate(ablate, std::cout, std::cerr);
  if (*synth_cmd) return run_synth(synth, std::cout, std::cerr);
  if (*render_cmd) return run_render(render, std::cout, std::cerr);
  return kExitValidation;
}
