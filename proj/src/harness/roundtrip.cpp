#include "oldn/harness/roundtrip.hpp"

#include <cstring>

#include "oldn/codec_sim/color.hpp"
#include "oldn/codec_sim/degrade.hpp"
#include "oldn/harness/metrics.hpp"
#include "oldn/harness/rate.hpp"
#include "oldn/network/model.hpp"

namespace oldn {
namespace {

struct Inference {
  Tensor<float> output;
  Plane plane;
};

Inference infer(const ModelParams& params, const Plane& luma, const Plane& chroma) {
  const NetworkInput in = make_network_input(luma, chroma);
  Inference r{oldn_forward(params, in.luma, in.chroma), {}};
  r.plane = crop_plane(tensor_to_plane(r.output), in.width, in.height);
  return r;
}

bool bit_equal(const Tensor<float>& a, const Tensor<float>& b) {
  return a.shape() == b.shape() && std::memcmp(a.data().data(), b.data().data(), a.size() * sizeof(float)) == 0;
}

}  // namespace

EncodedPlane encode_plane(const ModelParams& baseline, const Plane& degraded_luma, const Plane& degraded_chroma,
                          const Plane& raw_chroma, const RoundtripOptions& options) {
  EncodedPlane out;
  OnlineConfig cfg = options.online_config;
  if (!options.online) cfg.steps = 0;
  out.training = train_online(baseline, degraded_luma, degraded_chroma, raw_chroma, cfg);
  out.residual = quantize_residual(out.training.snapshot, baseline.al_snapshot(), options.prec);
  out.stream = huffman_encode(out.residual);
  // Quality is always reported for the weights the decoder will see.
  Inference r = infer(apply_residual(baseline, out.residual), degraded_luma, degraded_chroma);
  out.output = std::move(r.output);
  out.enhanced = std::move(r.plane);
  return out;
}

DecodedPlane decode_plane(const ModelParams& baseline, const Plane& degraded_luma, const Plane& degraded_chroma,
                          const AlResidualStream& stream) {
  DecodedPlane out;
  out.residual = huffman_decode(stream);
  Inference r = infer(apply_residual(baseline, out.residual), degraded_luma, degraded_chroma);
  out.output = std::move(r.output);
  out.enhanced = std::move(r.plane);
  return out;
}

RoundtripReport simulate_roundtrip(const Yuv420Frame& raw, int qp, const ModelParams& model,
                                   const RoundtripOptions& options) {
  raw.validate();
  RoundtripReport rep;
  rep.qp = qp;
  DegradedFrame deg = degrade_frame(raw, QpConfig(qp));
  rep.image_bits = rate_proxy_bits(deg.levels);
  rep.degraded = deg.frame;
  rep.enhanced = deg.frame;
  rep.baseline = deg.frame;

  const Plane* raw_planes[] = {&raw.u, &raw.v};
  Plane* deg_planes[] = {&rep.degraded.u, &rep.degraded.v};
  Plane* enh_planes[] = {&rep.enhanced.u, &rep.enhanced.v};
  Plane* base_planes[] = {&rep.baseline.u, &rep.baseline.v};

  rep.parity_ok = true;
  for (int k = 0; k < 2; ++k) {
    const Plane& y = rep.degraded.y;
    const Plane& c = *deg_planes[k];
    PlaneReport& pr = rep.planes[k];

    const EncodedPlane enc = encode_plane(model, y, c, *raw_planes[k], options);
    const DecodedPlane dec = decode_plane(model, y, c, enc.stream);
    *base_planes[k] = infer(model, y, c).plane;
    *enh_planes[k] = dec.enhanced;

    pr.degraded_psnr = psnr(*raw_planes[k], c);
    pr.baseline_psnr = psnr(*raw_planes[k], *base_planes[k]);
    pr.enhanced_psnr = psnr(*raw_planes[k], dec.enhanced);
    pr.side_bits = stream_size_bits(enc.stream);
    pr.parity_ok = dec.residual == enc.residual && bit_equal(dec.output, enc.output) && dec.enhanced == enc.enhanced;
    pr.residual_zero = dec.residual.all_zero();
    pr.safeguard_used = enc.training.safeguard_used;

    rep.side_bits += pr.side_bits;
    rep.parity_ok = rep.parity_ok && pr.parity_ok;
  }
  rep.degraded_psnr = 0.5 * (rep.planes[0].degraded_psnr + rep.planes[1].degraded_psnr);
  rep.baseline_psnr = 0.5 * (rep.planes[0].baseline_psnr + rep.planes[1].baseline_psnr);
  rep.enhanced_psnr = 0.5 * (rep.planes[0].enhanced_psnr + rep.planes[1].enhanced_psnr);
  return rep;
}

RoundtripReport simulate_roundtrip(const RgbImage& raw, int qp, const ModelParams& model,
                                   const RoundtripOptions& options) {
  return simulate_roundtrip(rgb_to_yuv420(raw), qp, model, options);
}

}  // namespace oldn
