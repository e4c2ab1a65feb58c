#include "gasrom/model_io.hpp"

#include "gasrom/error.hpp"
#include "gasrom/snapshot_io.hpp"

namespace gasrom {

std::vector<std::uint8_t> encode_model(const FittedModel& model) {
  io::ByteWriter w;
  w.magic(kModelMagic);
  w.str16(model.method);
  w.u8(model.input_mode == InputMode::Inlet ? 1 : 0);
  w.u8(model.input_period ? 1 : 0);
  if (model.input_period) w.f64(*model.input_period);
  w.f64(model.dt);
  w.u8(model.lambda ? 1 : 0);
  if (model.lambda) w.f64(*model.lambda);
  write_layout(w, model.layout);
  w.u8(model.input_layout.empty() ? 0 : 1);
  if (!model.input_layout.empty()) write_layout(w, model.input_layout);
  w.u8(model.basis ? 1 : 0);
  if (model.basis) write_pod(w, *model.basis);
  w.u8(model.opinf ? 1 : 0);
  if (model.opinf) write_operators(w, *model.opinf);
  w.u8(model.ar ? 1 : 0);
  if (model.ar) write_ar_model(w, *model.ar);
  w.u8(model.mean_state ? 1 : 0);
  if (model.mean_state) {
    w.u32(static_cast<std::uint32_t>(model.mean_state->size()));
    w.f64s(std::span(model.mean_state->data(), static_cast<std::size_t>(model.mean_state->size())));
  }
  return w.release();
}

FittedModel decode_model(std::span<const std::uint8_t> bytes) {
  io::ByteReader r(bytes, "MDL1 file");
  r.expect_magic(kModelMagic);
  FittedModel model;
  model.method = r.str16();
  const auto mode = r.u8();
  if (mode > 1) throw FormatError("MDL1 file: unknown input mode " + std::to_string(mode));
  model.input_mode = mode == 1 ? InputMode::Inlet : InputMode::Folded;
  if (r.u8()) model.input_period = r.f64();
  model.dt = r.f64();
  if (r.u8()) model.lambda = r.f64();
  model.layout = read_layout(r);
  if (r.u8()) model.input_layout = read_layout(r);
  if (r.u8()) model.basis = read_pod(r);
  if (r.u8()) model.opinf = read_operators(r);
  if (r.u8()) model.ar = read_ar_model(r);
  if (r.u8()) {
    const auto n = r.u32();
    Eigen::VectorXd mean(n);
    r.f64s(std::span(mean.data(), n));
    model.mean_state = std::move(mean);
  }
  if (r.remaining() != 0) {
    throw FormatError("MDL1 file: " + std::to_string(r.remaining()) + " unexpected trailing bytes");
  }
  const bool reduced = method_needs_basis(model.method);
  if (reduced && !model.basis) throw FormatError("MDL1 file: method '" + model.method + "' has no basis");
  if (model.method == "opinf" && !model.opinf) throw FormatError("MDL1 file: opinf bundle without operators");
  if (model.method == "linear_ar" && !model.ar) throw FormatError("MDL1 file: linear_ar bundle without model");
  if (model.method == "mean" && !model.mean_state) throw FormatError("MDL1 file: mean bundle without mean state");
  return model;
}

void save_model(const std::filesystem::path& path, const FittedModel& model) {
  io::write_file_atomic(path, encode_model(model));
}

FittedModel load_model(const std::filesystem::path& path) { return decode_model(io::read_file(path)); }

}  // namespace gasrom
