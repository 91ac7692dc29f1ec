#include "oldn/harness/experiment.hpp"

#include <cstdio>
#include <json.hpp>
#include <regex>
#include <sstream>

#include "oldn/codec_sim/image_io.hpp"
#include "oldn/codec_sim/synthetic.hpp"
#include "oldn/harness/bd_rate.hpp"
#include "oldn/harness/roundtrip.hpp"
#include "oldn/network/checkpoint.hpp"
#include "oldn/param_codec/residual.hpp"

namespace oldn {
namespace {

std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

}  // namespace

void ExperimentConfig::validate() const {
  if (images.empty()) throw Error(ErrorCode::kConfig, "experiment needs at least one image");
  if (qps.empty()) throw Error(ErrorCode::kConfig, "experiment needs at least one QP");
  for (int qp : qps) {
    if (qp < 0 || qp > 51) throw Error(ErrorCode::kConfig, "QP " + std::to_string(qp) + " outside [0, 51]");
  }
  if (prec < 0 || prec > kMaxPrec) throw Error(ErrorCode::kConfig, "prec outside [0, 30]");
  online_config.validate();
}

ExperimentConfig experiment_config_from(const KeyValueConfig& kv) {
  kv.require_known({"images", "qps", "checkpoint", "online", "steps", "lr", "tile", "prec", "seed", "report"});
  ExperimentConfig c;
  c.images = kv.get_list("images");
  c.qps = kv.get_int_list("qps", c.qps);
  c.checkpoint = kv.get_string("checkpoint", "");
  c.online = kv.get_bool("online", c.online);
  c.online_config.steps = kv.get_int("steps", c.online_config.steps);
  c.online_config.lr = kv.get_double("lr", c.online_config.lr);
  c.online_config.tile = kv.get_int("tile", c.online_config.tile);
  c.prec = kv.get_int("prec", c.prec);
  c.seed = kv.get_u64("seed", c.seed);
  c.report = kv.get_string("report", "");
  c.validate();
  return c;
}

RgbImage load_experiment_image(const std::string& spec, std::uint64_t seed_offset) {
  static const std::regex synthetic(R"(synthetic:(\d+)x(\d+):(\d+))");
  std::smatch m;
  if (std::regex_match(spec, m, synthetic)) {
    return synthetic_image(std::stoi(m[1]), std::stoi(m[2]), std::stoull(m[3]) + seed_offset);
  }
  return load_rgb_image(spec);
}

ExperimentReport run_experiment(const ExperimentConfig& config, const ModelParams& model) {
  config.validate();
  ExperimentReport report;
  RoundtripOptions opts{config.online, config.online_config, config.prec};

  std::vector<double> bd_online, bd_baseline;
  for (const std::string& image_spec : config.images) {
    std::optional<RgbImage> image;
    std::string load_error;
    try {
      image = load_experiment_image(image_spec, config.seed);
    } catch (const std::exception& e) {
      load_error = e.what();
    }

    RdCurve anchor, online, baseline;
    for (int qp : config.qps) {
      ExperimentRow row;
      row.image = image_spec;
      row.qp = qp;
      if (!image) {
        row.error = load_error;
      } else {
        try {
          const RoundtripReport r = simulate_roundtrip(*image, qp, model, opts);
          row.degraded_psnr = r.degraded_psnr;
          row.baseline_psnr = r.baseline_psnr;
          row.online_psnr = r.enhanced_psnr;
          row.side_bits = r.side_bits;
          row.image_bits = r.image_bits;
          row.parity_ok = r.parity_ok;
          anchor.push_back({r.image_bits, r.degraded_psnr});
          online.push_back({r.image_bits + static_cast<double>(r.side_bits), r.enhanced_psnr});
          baseline.push_back({r.image_bits, r.baseline_psnr});
        } catch (const std::exception& e) {
          row.error = e.what();
        }
      }
      report.rows.push_back(std::move(row));
    }

    if (anchor.size() == config.qps.size()) {
      auto add = [&](std::vector<double>& out, const RdCurve& test, const char* label) {
        try {
          out.push_back(bd_rate(anchor, test));
        } catch (const Error& e) {
          report.notes.push_back(image_spec + ": no " + label + " BD-rate (" + e.what() + ")");
        }
      };
      add(bd_online, online, "online");
      add(bd_baseline, baseline, "baseline");
    } else {
      report.notes.push_back(image_spec + ": no BD-rate (incomplete RD curve)");
    }
  }

  auto mean = [](const std::vector<double>& v) -> std::optional<double> {
    if (v.empty()) return std::nullopt;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  report.bd_rate_online = mean(bd_online);
  report.bd_rate_baseline = mean(bd_baseline);
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  if (config.checkpoint.empty()) throw Error(ErrorCode::kConfig, "experiment needs a checkpoint");
  ExperimentReport report = run_experiment(config, load_checkpoint(config.checkpoint));
  if (!config.report.empty()) {
    const std::string text = report.to_text();
    write_file(config.report, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  }
  return report;
}

std::string ExperimentReport::to_text() const {
  std::ostringstream out;
  out << "image,qp,status,degraded_psnr,baseline_psnr,online_psnr,side_bits,image_bits,parity\n";
  std::size_t errors = 0;
  bool parity_all = true;
  double gain_sum = 0.0, online_gain_sum = 0.0;
  std::size_t ok = 0;
  for (const auto& r : rows) {
    out << csv_field(r.image) << ',' << r.qp << ',';
    if (!r.error.empty()) {
      ++errors;
      out << csv_field("error: " + r.error) << ",,,,,,\n";
      continue;
    }
    ++ok;
    parity_all = parity_all && r.parity_ok;
    gain_sum += r.baseline_psnr - r.degraded_psnr;
    online_gain_sum += r.online_psnr - r.baseline_psnr;
    out << "ok," << fixed(r.degraded_psnr) << ',' << fixed(r.baseline_psnr) << ',' << fixed(r.online_psnr) << ','
        << r.side_bits << ',' << fixed(r.image_bits) << ',' << (r.parity_ok ? "true" : "false") << '\n';
  }

  nlohmann::ordered_json summary;
  summary["rows"] = rows.size();
  summary["errors"] = errors;
  summary["parity_ok_all"] = parity_all;
  summary["mean_baseline_gain_db"] = ok ? nlohmann::ordered_json(gain_sum / ok) : nlohmann::ordered_json(nullptr);
  summary["mean_online_gain_db"] = ok ? nlohmann::ordered_json(online_gain_sum / ok) : nlohmann::ordered_json(nullptr);
  summary["bd_rate_online_pct"] = bd_rate_online ? nlohmann::ordered_json(*bd_rate_online) : nlohmann::ordered_json(nullptr);
  summary["bd_rate_baseline_pct"] =
      bd_rate_baseline ? nlohmann::ordered_json(*bd_rate_baseline) : nlohmann::ordered_json(nullptr);
  summary["notes"] = notes;
  out << '\n' << summary.dump(2) << '\n';
  return out.str();
}

}  // namespace oldn
