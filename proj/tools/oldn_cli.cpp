// Command-line front end: training, encoder/decoder paths, simulation,
// evaluation and the numerical self-checks.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <json.hpp>

#include "oldn/codec_sim/color.hpp"
#include "oldn/codec_sim/degrade.hpp"
#include "oldn/codec_sim/image_io.hpp"
#include "oldn/codec_sim/synthetic.hpp"
#include "oldn/harness/config_file.hpp"
#include "oldn/harness/experiment.hpp"
#include "oldn/harness/roundtrip.hpp"
#include "oldn/harness/selfcheck.hpp"
#include "oldn/network/checkpoint.hpp"
#include "oldn/training/offline.hpp"

namespace fs = std::filesystem;
using oldn::KeyValueConfig;

namespace {

// Flags shared by most subcommands. A flag given on the command line wins
// over the same key in --config.
struct CommonFlags {
  std::string config;
  int qp = 0;
  int steps = 0;
  double lr = 0.0;
  int prec = 0;
  std::uint64_t seed = 0;
  CLI::Option* qp_opt = nullptr;
  CLI::Option* steps_opt = nullptr;
  CLI::Option* lr_opt = nullptr;
  CLI::Option* prec_opt = nullptr;
  CLI::Option* seed_opt = nullptr;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "key=value configuration file")->check(CLI::ExistingFile);
    qp_opt = app->add_option("--qp", qp, "quantization parameter")->check(CLI::Range(0, 51));
    steps_opt = app->add_option("--steps", steps, "online training steps")->check(CLI::NonNegativeNumber);
    lr_opt = app->add_option("--lr", lr, "learning rate")->check(CLI::PositiveNumber);
    prec_opt = app->add_option("--prec", prec, "residual precision exponent")->check(CLI::Range(0, 30));
    seed_opt = app->add_option("--seed", seed, "random seed");
  }

  KeyValueConfig merged(const std::string& lr_key = "lr") const {
    KeyValueConfig kv = config.empty() ? KeyValueConfig{} : KeyValueConfig::load(config);
    if (qp_opt->count()) kv.set("qp", std::to_string(qp));
    if (steps_opt->count()) kv.set("steps", std::to_string(steps));
    if (lr_opt->count()) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.17g", lr);
      kv.set(lr_key, buf);
    }
    if (prec_opt->count()) kv.set("prec", std::to_string(prec));
    if (seed_opt->count()) kv.set("seed", std::to_string(seed));
    return kv;
  }
};

oldn::OnlineConfig online_config(const KeyValueConfig& kv) {
  oldn::OnlineConfig c;
  c.steps = kv.get_int("steps", c.steps);
  c.lr = kv.get_double("lr", c.lr);
  c.tile = kv.get_int("tile", c.tile);
  return c;
}

std::vector<oldn::BlockKind> parse_blocks(const std::vector<std::string>& items) {
  std::vector<oldn::BlockKind> out;
  for (const auto& s : items) {
    if (s == "OL" || s == "OL-WB") {
      out.push_back(oldn::BlockKind::kOnlineWide);
    } else if (s == "WB") {
      out.push_back(oldn::BlockKind::kWide);
    } else {
      throw oldn::Error(oldn::ErrorCode::kConfig, "unknown block kind '" + s + "' (use OL or WB)");
    }
  }
  return out;
}

// Raw input: PPM/PGM, a synthetic spec, or raw YUV420 when a size is given.
oldn::Yuv420Frame load_frame(const std::string& path, int width, int height) {
  if (width > 0 || height > 0) return oldn::load_yuv420(path, width, height);
  return oldn::rgb_to_yuv420(oldn::load_experiment_image(path, 0));
}

void print_checks(const std::vector<oldn::CheckResult>& results, bool& all_ok) {
  for (const auto& r : results) {
    std::printf("%-4s %-48s %.3e (tol %.0e)\n", r.passed ? "ok" : "FAIL", r.name.c_str(), r.value, r.tolerance);
    all_ok = all_ok && r.passed;
  }
}

int cmd_train(const CommonFlags& flags, const std::string& manifest, int synthetic, const std::string& out) {
  KeyValueConfig kv = flags.merged();
  kv.require_known({"manifest", "synthetic", "synthetic_size", "qp", "n", "expand", "cab_reduction", "n_wb_branch",
                    "blocks", "batch", "lr", "lr_final", "zero_tail", "epochs", "seed", "patches_per_plane", "out"});
  oldn::OfflineConfig cfg;
  cfg.model.n = kv.get_int("n", cfg.model.n);
  cfg.model.expand = kv.get_int("expand", cfg.model.expand);
  cfg.model.cab_reduction = kv.get_int("cab_reduction", cfg.model.cab_reduction);
  cfg.model.n_wb_branch = kv.get_int("n_wb_branch", cfg.model.n_wb_branch);
  if (kv.has("blocks")) cfg.model.recon_blocks = parse_blocks(kv.get_list("blocks"));
  cfg.batch_size = kv.get_int("batch", cfg.batch_size);
  cfg.lr = kv.get_double("lr", cfg.lr);
  cfg.lr_final = kv.get_double("lr_final", cfg.lr_final);
  cfg.zero_tail = kv.get_bool("zero_tail", cfg.zero_tail);
  cfg.epochs = kv.get_int("epochs", cfg.epochs);
  cfg.seed = kv.get_u64("seed", cfg.seed);
  const int per_plane = kv.get_int("patches_per_plane", 16);
  const std::string out_path = out.empty() ? kv.get_string("out", "") : out;
  if (out_path.empty()) throw oldn::Error(oldn::ErrorCode::kConfig, "train needs --out");

  std::vector<oldn::ManifestEntry> entries;
  const std::string manifest_path = manifest.empty() ? kv.get_string("manifest", "") : manifest;
  if (!manifest_path.empty()) entries = oldn::load_manifest(manifest_path);
  if (kv.has("qp")) {
    for (auto& e : entries) e.qp = kv.get_int("qp", e.qp);
  }

  oldn::Dataset data;
  if (!entries.empty()) {
    data = oldn::build_dataset(entries, per_plane, cfg.seed);
  } else {
    const int count = synthetic > 0 ? synthetic : kv.get_int("synthetic", 0);
    if (count <= 0) throw oldn::Error(oldn::ErrorCode::kConfig, "train needs --manifest or --synthetic N");
    const int size = kv.get_int("synthetic_size", 128);
    const oldn::QpConfig qp(kv.get_int("qp", 27));
    for (int i = 0; i < count; ++i) {
      const auto raw = oldn::rgb_to_yuv420(oldn::synthetic_image(size, size, cfg.seed * 1000003 + i));
      oldn::append_frame_patches(data, raw, oldn::degrade_frame(raw, qp).frame, per_plane, cfg.seed + 2 * i);
    }
  }

  std::fprintf(stderr, "training %s on %zu patch pairs\n", cfg.model.describe().c_str(), data.size());
  const auto result = oldn::train_offline(data, cfg, [](int epoch, double loss) {
    std::fprintf(stderr, "epoch %3d  loss %.6e\n", epoch + 1, loss);
  });
  oldn::save_checkpoint(out_path, result.params);
  std::printf("wrote %s (%zu parameters)\n", out_path.c_str(), result.params.scalar_count());
  return 0;
}

int cmd_encode(const CommonFlags& flags, const std::string& checkpoint, const std::string& raw_path,
               const std::string& degraded_path, int width, int height, const std::string& out_prefix) {
  const KeyValueConfig kv = flags.merged();
  const auto model = oldn::load_checkpoint(checkpoint);
  const oldn::Yuv420Frame raw = load_frame(raw_path, width, height);
  oldn::Yuv420Frame degraded;
  if (degraded_path.empty()) {
    degraded = oldn::degrade_frame(raw, oldn::QpConfig(kv.get_int("qp", 27))).frame;
    oldn::save_yuv420(out_prefix + ".degraded.yuv", degraded);
  } else {
    degraded = oldn::load_yuv420(degraded_path, raw.width(), raw.height());
  }
  oldn::RoundtripOptions opts{true, online_config(kv), kv.get_int("prec", oldn::kDefaultPrec)};

  nlohmann::ordered_json stats;
  stats["width"] = raw.width();
  stats["height"] = raw.height();
  const std::pair<const char*, std::pair<const oldn::Plane*, const oldn::Plane*>> planes[] = {
      {"u", {&raw.u, &degraded.u}}, {"v", {&raw.v, &degraded.v}}};
  for (const auto& [name, p] : planes) {
    const auto enc = oldn::encode_plane(model, degraded.y, *p.second, *p.first, opts);
    const std::string path = out_prefix + "." + name + ".alrs";
    oldn::write_file(path, enc.stream.bytes);
    stats[name] = {{"stream", path},
                   {"side_bits", oldn::stream_size_bits(enc.stream)},
                   {"initial_loss", enc.training.initial_loss},
                   {"final_loss", enc.training.final_loss},
                   {"safeguard_used", enc.training.safeguard_used}};
  }
  std::printf("%s\n", stats.dump(2).c_str());
  return 0;
}

int cmd_enhance(const std::string& checkpoint, const std::string& input, int width, int height,
                const std::string& residual_u, const std::string& residual_v, const std::string& output) {
  const auto model = oldn::load_checkpoint(checkpoint);
  oldn::Yuv420Frame frame = oldn::load_yuv420(input, width, height);
  const std::pair<oldn::Plane*, const std::string*> planes[] = {{&frame.u, &residual_u}, {&frame.v, &residual_v}};
  for (const auto& [plane, stream_path] : planes) {
    if (stream_path->empty()) {
      *plane = oldn::enhance_chroma(model, frame.y, *plane);
    } else {
      const oldn::AlResidualStream stream{oldn::read_file(*stream_path)};
      *plane = oldn::decode_plane(model, frame.y, *plane, stream).enhanced;
    }
  }
  oldn::save_yuv420(output, frame);
  std::printf("wrote %s\n", output.c_str());
  return 0;
}

int cmd_simulate(const CommonFlags& flags, const std::string& checkpoint, const std::string& image, int width,
                 int height, bool no_online, const std::string& out_dir) {
  const KeyValueConfig kv = flags.merged();
  const auto model = oldn::load_checkpoint(checkpoint);
  const oldn::Yuv420Frame raw = load_frame(image, width, height);
  oldn::RoundtripOptions opts{!no_online, online_config(kv), kv.get_int("prec", oldn::kDefaultPrec)};
  const int qp = kv.get_int("qp", 32);
  const auto r = oldn::simulate_roundtrip(raw, qp, model, opts);

  nlohmann::ordered_json j;
  j["qp"] = qp;
  j["degraded_psnr"] = r.degraded_psnr;
  j["baseline_psnr"] = r.baseline_psnr;
  j["enhanced_psnr"] = r.enhanced_psnr;
  j["side_bits"] = r.side_bits;
  j["image_bits"] = r.image_bits;
  j["parity_ok"] = r.parity_ok;
  const char* names[] = {"u", "v"};
  for (int k = 0; k < 2; ++k) {
    const auto& p = r.planes[k];
    j[names[k]] = {{"degraded_psnr", p.degraded_psnr}, {"baseline_psnr", p.baseline_psnr},
                   {"enhanced_psnr", p.enhanced_psnr}, {"side_bits", p.side_bits},
                   {"parity_ok", p.parity_ok},         {"safeguard_used", p.safeguard_used}};
  }
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    oldn::save_yuv420(fs::path(out_dir) / "raw.yuv", raw);
    oldn::save_yuv420(fs::path(out_dir) / "degraded.yuv", r.degraded);
    oldn::save_yuv420(fs::path(out_dir) / "enhanced.yuv", r.enhanced);
  }
  std::printf("%s\n", j.dump(2).c_str());
  return r.parity_ok ? 0 : 1;
}

int cmd_evaluate(const CommonFlags& flags, const std::string& checkpoint, const std::vector<std::string>& images,
                 const std::vector<int>& qps, const std::string& report) {
  KeyValueConfig kv = flags.merged();
  // a single --qp is shorthand for a one-point QP list
  if (kv.has("qp")) kv.set("qps", kv.take("qp"));
  oldn::ExperimentConfig cfg = oldn::experiment_config_from(kv);
  if (!checkpoint.empty()) cfg.checkpoint = checkpoint;
  if (!images.empty()) cfg.images = images;
  if (!qps.empty()) cfg.qps = qps;
  if (!report.empty()) cfg.report = report;
  const auto rep = oldn::run_experiment(cfg);
  if (cfg.report.empty()) {
    std::printf("%s", rep.to_text().c_str());
  } else {
    std::printf("wrote %s\n", cfg.report.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"OL-DN chroma enhancement: training, coding and evaluation"};
  app.require_subcommand(1);

  CommonFlags train_flags, encode_flags, sim_flags, eval_flags;

  std::string manifest, out;
  int synthetic = 0;
  auto* train = app.add_subcommand("train", "offline training from a manifest (or synthetic images) to a checkpoint");
  train_flags.attach(train);
  train->add_option("--manifest", manifest, "lines of '<image path> <qp>'");
  train->add_option("--synthetic", synthetic, "train on N generated images instead of a manifest");
  train->add_option("--out", out, "checkpoint to write");

  std::string checkpoint, raw_path, degraded_path, input, output, residual_u, residual_v, image, out_dir, report;
  int width = 0, height = 0;
  bool no_online = false;
  std::vector<std::string> images;
  std::vector<int> qps;

  auto* encode = app.add_subcommand("encode", "online-train on raw vs degraded, write residual streams");
  encode_flags.attach(encode);
  encode->add_option("--checkpoint", checkpoint)->required();
  encode->add_option("--raw", raw_path, "raw image (PPM/PGM, synthetic:WxH:seed, or YUV with --width/--height)")
      ->required();
  encode->add_option("--degraded", degraded_path, "degraded YUV420; generated at --qp when omitted");
  encode->add_option("--width", width);
  encode->add_option("--height", height);
  encode->add_option("--out", out, "output prefix for <prefix>.u.alrs / <prefix>.v.alrs")->required();

  auto* enhance = app.add_subcommand("enhance", "decoder: apply residual streams and enhance a degraded YUV420");
  enhance->add_option("--checkpoint", checkpoint)->required();
  enhance->add_option("--input", input, "degraded YUV420")->required();
  enhance->add_option("--width", width)->required();
  enhance->add_option("--height", height)->required();
  enhance->add_option("--residual-u", residual_u, "U stream; baseline model when omitted");
  enhance->add_option("--residual-v", residual_v, "V stream; baseline model when omitted");
  enhance->add_option("--output", output)->required();

  auto* simulate = app.add_subcommand("simulate", "full encoder/decoder round trip on one image");
  sim_flags.attach(simulate);
  simulate->add_option("--checkpoint", checkpoint)->required();
  simulate->add_option("--image", image, "PPM/PGM, synthetic:WxH:seed, or YUV with --width/--height")->required();
  simulate->add_option("--width", width);
  simulate->add_option("--height", height);
  simulate->add_flag("--no-online", no_online, "skip online training (zero residual)");
  simulate->add_option("--out-dir", out_dir, "write raw/degraded/enhanced YUV here");

  auto* evaluate = app.add_subcommand("evaluate", "per-image, per-QP report with BD-rate summary");
  eval_flags.attach(evaluate);
  evaluate->add_option("--checkpoint", checkpoint);
  evaluate->add_option("--images", images, "overrides 'images' in the config")->delimiter(',');
  evaluate->add_option("--qps", qps, "overrides 'qps' in the config")->delimiter(',');
  evaluate->add_option("--report", report);

  std::uint64_t check_seed = 1;
  int planes = 100;
  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient suite");
  gradcheck->add_option("--seed", check_seed);
  auto* dctcheck = app.add_subcommand("dctcheck", "block-DCT transform property suite");
  dctcheck->add_option("--seed", check_seed);
  dctcheck->add_option("--planes", planes)->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) return cmd_train(train_flags, manifest, synthetic, out);
    if (*encode) return cmd_encode(encode_flags, checkpoint, raw_path, degraded_path, width, height, out);
    if (*enhance) return cmd_enhance(checkpoint, input, width, height, residual_u, residual_v, output);
    if (*simulate) return cmd_simulate(sim_flags, checkpoint, image, width, height, no_online, out_dir);
    if (*evaluate) return cmd_evaluate(eval_flags, checkpoint, images, qps, report);
    bool ok = true;
    if (*gradcheck) print_checks(oldn::run_gradient_suite(check_seed), ok);
    if (*dctcheck) print_checks(oldn::run_transform_suite(check_seed, planes), ok);
    return ok ? 0 : 1;
  } catch (const oldn::Error& e) {
    std::fprintf(stderr, "error [%s]: %s\n", oldn::to_string(e.code()), e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
