#include "pft/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>

#include "pft/config.hpp"
#include "pft/errors.hpp"
#include "pft/metrics.hpp"
#include "pft/sequence.hpp"
#include "pft/tracker.hpp"
#include "pft/viewpoint_model.hpp"

namespace pft {

namespace {

// Mesh argument: an OBJ path or builtin:{box,cylinder,sphere,widget}.
TriangleMesh resolve_mesh(const std::string& arg) {
  if (arg.rfind("builtin:", 0) == 0) {
    const std::string name = arg.substr(8);
    if (name == "box") return make_box(0.12, 0.08, 0.06);
    if (name == "cylinder") return make_cylinder(0.035, 0.12, 40);
    if (name == "sphere") return make_icosphere(0.05, 3);
    if (name == "widget") return make_widget(0.1);
    throw ParseError("unknown builtin mesh: " + name);
  }
  return load_obj(arg);
}

Pose load_single_pose(const std::string& path) {
  const auto poses = load_pose_file(path, false);
  if (poses.size() != 1)
    throw ParseError(path + ": expected exactly one pose line");
  return poses.front();
}

bool pose_success(const Pose& p, const Pose& gt) {
  const PoseError e = pose_errors(p, gt);
  return e.e_t < 0.05 && e.e_r < 5.0 * M_PI / 180.0;
}

struct TrackRun {
  std::vector<TrajectoryEntry> trajectory;
  bool lost_without_reset = false;
};

TrackRun run_tracking(const Sequence& seq,
                      std::shared_ptr<const TriangleMesh> mesh,
                      const ViewpointModel& model, const Pose& init_pose,
                      const TrackerConfig& config, ResetPolicy policy) {
  TrackRun run;
  TrackerState state = init_tracker(mesh, model, seq.intrinsics, seq.frame(0),
                                    init_pose, config);
  for (size_t i = 1; i < seq.size(); ++i) {
    const ImageRgb image = seq.frame(i);
    const auto t0 = std::chrono::steady_clock::now();
    const TrackResult res = track(state, image, model, config);
    const double ms =
        std::chrono::duration<double, std::milli>(
            std::chrono::steady_clock::now() - t0)
            .count();
    run.trajectory.push_back({long(i), res.pose, ms});

    const bool lost = res.status == TrackStatus::kLostTrack;
    if (policy == ResetPolicy::kReset5cm5deg && seq.has_ground_truth()) {
      if (lost || !pose_success(res.pose, seq.gt_poses[i]))
        reset_pose(state, image, seq.gt_poses[i], config);
    } else if (lost) {
      run.lost_without_reset = true;
      break;
    }
  }
  return run;
}

ResetPolicy parse_policy(const std::string& name) {
  if (name == "reset_5cm5deg" || name == "reset") return ResetPolicy::kReset5cm5deg;
  if (name == "no_reset" || name == "none") return ResetPolicy::kNone;
  throw ParseError("unknown policy: " + name);
}

TriangleMesh mesh_for_eval(const Sequence& seq, const std::string& mesh_arg) {
  if (!mesh_arg.empty()) return resolve_mesh(mesh_arg);
  if (!seq.mesh_path.empty()) return resolve_mesh(seq.mesh_path);
  throw ParseError("no mesh given and the sequence meta names none");
}

void check_template_digest(const ViewpointModel& model,
                           const TriangleMesh& mesh) {
  if (model.mesh_hash != mesh.digest())
    throw Error("viewpoint model was generated from a different mesh "
                "(digest mismatch); re-run gen-templates");
}

int cli_run(int argc, const char* const* argv) {
  CLI::App app{"Monocular 6DoF object pose tracker"};
  app.require_subcommand(1);

  // gen-templates
  auto* gen = app.add_subcommand("gen-templates",
                                 "Generate a sparse viewpoint template model");
  std::string gen_mesh, gen_out;
  ModelBuildParams gen_params;
  gen->add_option("mesh", gen_mesh, "OBJ path or builtin:<name>")->required();
  gen->add_option("out", gen_out, "output template file")->required();
  gen->add_option("--views", gen_params.subdivision_level,
                  "icosphere subdivision level");
  gen->add_option("--radius", gen_params.radius,
                  "camera distance in meters (0: 2.5 x bounding diameter)");
  gen->add_option("--seed", gen_params.seed, "sampling seed");
  gen->add_option("--ncnt", gen_params.n_cnt, "contour samples per view");
  gen->add_option("--nin", gen_params.n_in, "interior samples per view");

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic sequence");
  std::string synth_mesh, synth_out, synth_variant = "regular",
                          synth_traj = "orbit";
  SynthParams synth_params;
  TrajectorySpec traj_spec;
  double synth_dist = 0.55;
  synth->add_option("mesh", synth_mesh, "OBJ path or builtin:<name>")->required();
  synth->add_option("out", synth_out, "output sequence directory")->required();
  synth->add_option("--variant", synth_variant,
                    "regular | noise | light | occlusion");
  synth->add_option("--frames", traj_spec.frames, "frame count");
  synth->add_option("--seed", synth_params.seed, "render seed");
  synth->add_option("--noise-sigma", synth_params.noise_sigma,
                    "noise standard deviation (noise variant)");
  synth->add_option("--traj", synth_traj, "orbit | static");
  synth->add_option("--rot-step", traj_spec.rot_step_deg,
                    "per-frame rotation, degrees");
  synth->add_option("--trans-amp", traj_spec.trans_amp_m,
                    "translation amplitude, meters");
  synth->add_option("--distance", synth_dist, "object distance, meters");
  synth->add_option("--width", synth_params.width, "frame width");
  synth->add_option("--height", synth_params.height, "frame height");

  // track
  auto* trk = app.add_subcommand("track", "Track a sequence");
  std::string trk_seq, trk_mesh, trk_templates, trk_init = "gt", trk_out,
              trk_policy = "none", trk_config;
  bool trk_contour_only = false;
  trk->add_option("seq", trk_seq, "sequence directory")->required();
  trk->add_option("mesh", trk_mesh, "OBJ path or builtin:<name>")->required();
  trk->add_option("templates", trk_templates, "viewpoint model file")->required();
  trk->add_option("--init", trk_init, "gt | <pose file>");
  trk->add_option("--out", trk_out, "trajectory CSV path")->required();
  trk->add_option("--policy", trk_policy, "none | reset_5cm5deg");
  trk->add_option("--config", trk_config, "tracker config overrides");
  trk->add_flag("--contour-only", trk_contour_only,
                "disable the interior flow modality");

  // eval
  auto* ev = app.add_subcommand("eval", "Evaluate a tracked trajectory");
  std::string ev_seq, ev_traj, ev_policy = "none", ev_mesh, ev_json;
  ev->add_option("seq", ev_seq, "sequence directory")->required();
  ev->add_option("traj", ev_traj, "trajectory CSV")->required();
  ev->add_option("--policy", ev_policy, "none | reset_5cm5deg");
  ev->add_option("--mesh", ev_mesh, "mesh override");
  ev->add_option("--json", ev_json, "write the full report as JSON");

  // bench
  auto* bench = app.add_subcommand("bench", "Track and evaluate sequences");
  std::vector<std::string> bench_seqs;
  std::string bench_mesh, bench_templates, bench_policy = "reset_5cm5deg",
              bench_config;
  bool bench_contour_only = false;
  bench->add_option("seqs", bench_seqs, "sequence directories")->required();
  bench->add_option("--mesh", bench_mesh, "OBJ path or builtin:<name>");
  bench->add_option("--templates", bench_templates, "viewpoint model file")
      ->required();
  bench->add_option("--policy", bench_policy, "none | reset_5cm5deg");
  bench->add_option("--config", bench_config, "tracker config overrides");
  bench->add_flag("--contour-only", bench_contour_only,
                  "disable the interior flow modality");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Prints help or the usage error; usage problems exit with code 2.
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*gen) {
    const TriangleMesh mesh = resolve_mesh(gen_mesh);
    const ViewpointModel model = build_model(mesh, gen_params);
    save_model(model, gen_out);
    std::cout << "wrote " << model.views.size() << " views to " << gen_out
              << "\n";
    return 0;
  }

  if (*synth) {
    const TriangleMesh mesh = resolve_mesh(synth_mesh);
    traj_spec.motion = synth_traj == "static" ? TrajectorySpec::Motion::kStatic
                                              : TrajectorySpec::Motion::kOrbit;
    traj_spec.base.t = Vec3(0, 0, synth_dist);
    if (synth_variant == "regular") synth_params.variant = SynthVariant::kRegular;
    else if (synth_variant == "noise") synth_params.variant = SynthVariant::kNoise;
    else if (synth_variant == "light") synth_params.variant = SynthVariant::kLight;
    else if (synth_variant == "occlusion")
      synth_params.variant = SynthVariant::kOcclusion;
    else throw ParseError("unknown variant: " + synth_variant);

    CameraIntrinsics k{650, 650, synth_params.width / 2.0 - 0.5,
                       synth_params.height / 2.0 - 0.5};
    const auto poses = make_trajectory(traj_spec);
    generate_synthetic_sequence(mesh, k, poses, synth_params, synth_out,
                                synth_mesh);
    std::cout << "wrote " << poses.size() << " frames to " << synth_out << "\n";
    return 0;
  }

  if (*trk) {
    const Sequence seq = load_sequence(trk_seq);
    auto mesh = std::make_shared<TriangleMesh>(resolve_mesh(trk_mesh));
    const ViewpointModel model = load_model(trk_templates);
    check_template_digest(model, *mesh);
    TrackerConfig config;
    if (!trk_config.empty()) apply_config_file(config, trk_config);
    if (trk_contour_only) config.use_interior = false;
    const ResetPolicy policy = parse_policy(trk_policy);

    Pose init_pose;
    if (trk_init == "gt") {
      if (!seq.has_ground_truth()) throw MissingGroundTruth();
      init_pose = seq.gt_poses.front();
    } else {
      init_pose = load_single_pose(trk_init);
    }

    const TrackRun run =
        run_tracking(seq, mesh, model, init_pose, config, policy);
    save_trajectory(trk_out, run.trajectory);
    std::cout << "tracked " << run.trajectory.size() << " frames\n";
    if (run.lost_without_reset) {
      std::cerr << "tracking lost at frame "
                << run.trajectory.back().frame_index << "\n";
      return 1;
    }
    return 0;
  }

  if (*ev) {
    const Sequence seq = load_sequence(ev_seq);
    const auto trajectory = load_trajectory(ev_traj);
    const TriangleMesh mesh = mesh_for_eval(seq, ev_mesh);
    const MetricReport report =
        evaluate(seq, trajectory, parse_policy(ev_policy), mesh);
    std::cout << format_report(report);
    if (!ev_json.empty()) {
      std::ofstream out(ev_json);
      out << report_to_json(report) << "\n";
    }
    return 0;
  }

  if (*bench) {
    const ViewpointModel model = load_model(bench_templates);
    TrackerConfig config;
    if (!bench_config.empty()) apply_config_file(config, bench_config);
    if (bench_contour_only) config.use_interior = false;
    const ResetPolicy policy = parse_policy(bench_policy);

    std::printf("%-28s %10s %12s %8s %8s\n", "sequence", "frames", "mean_ms",
                "succ_%", "auc");
    double total_ms = 0;
    size_t total_frames = 0;
    for (const auto& seq_path : bench_seqs) {
      const Sequence seq = load_sequence(seq_path);
      if (!seq.has_ground_truth()) throw MissingGroundTruth();
      auto mesh = std::make_shared<TriangleMesh>(
          mesh_for_eval(seq, bench_mesh));
      check_template_digest(model, *mesh);
      const TrackRun run = run_tracking(seq, mesh, model,
                                        seq.gt_poses.front(), config, policy);
      const MetricReport report = evaluate(seq, run.trajectory, policy, *mesh);
      std::printf("%-28s %10zu %12.2f %8.1f %8.2f\n", seq_path.c_str(),
                  report.per_frame.size(), report.mean_runtime_ms,
                  report.success_rate, report.auc);
      total_ms += report.mean_runtime_ms * double(report.per_frame.size());
      total_frames += report.per_frame.size();
    }
    if (total_frames > 0)
      std::printf("mean per-frame runtime: %.2f ms\n",
                  total_ms / double(total_frames));
    return 0;
  }
  return 2;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  try {
    return cli_run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace pft
