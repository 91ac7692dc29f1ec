#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "oldn/codec_sim/plane.hpp"
#include "oldn/harness/config_file.hpp"
#include "oldn/network/params.hpp"
#include "oldn/training/online.hpp"

namespace oldn {

struct ExperimentConfig {
  // Image files (PPM/PGM), or "synthetic:<W>x<H>:<seed>" for generated content.
  std::vector<std::string> images;
  std::vector<int> qps{22, 27, 32, 37};
  std::string checkpoint;
  bool online = true;
  OnlineConfig online_config;
  int prec = 8;
  std::uint64_t seed = 0;  // added to synthetic image seeds
  std::string report;      // output path; empty keeps the report in memory

  // Throws kConfig for empty image or QP lists and out-of-range values.
  void validate() const;
};

// Keys: images, qps, checkpoint, online, steps, lr, tile, prec, seed, report.
ExperimentConfig experiment_config_from(const KeyValueConfig& kv);

struct ExperimentRow {
  std::string image;
  int qp = 0;
  std::string error;  // empty on success
  double degraded_psnr = 0.0;
  double baseline_psnr = 0.0;
  double online_psnr = 0.0;
  std::size_t side_bits = 0;
  double image_bits = 0.0;
  bool parity_ok = false;
};

struct ExperimentReport {
  std::vector<ExperimentRow> rows;  // image-major, config order
  // Mean over images with a complete RD curve; anchor is the degraded image.
  std::optional<double> bd_rate_online;
  std::optional<double> bd_rate_baseline;
  std::vector<std::string> notes;

  // CSV table, a blank line, then a JSON summary object.
  std::string to_text() const;
};

RgbImage load_experiment_image(const std::string& spec, std::uint64_t seed_offset);

ExperimentReport run_experiment(const ExperimentConfig& config, const ModelParams& model);

// Loads the checkpoint, runs, and writes the report when a path is set.
ExperimentReport run_experiment(const ExperimentConfig& config);

}  // namespace oldn
