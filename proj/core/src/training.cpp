#include "ssinr/training.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numeric>

#include "ssinr/metrics.hpp"

namespace ssinr {

namespace fs = std::filesystem;
using nlohmann::json;

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0)) throw ConfigError("adam beta1 must lie in [0, 1)");
  if (!(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) throw ConfigError("adam beta2 must lie in [0, 1)");
  if (!(adam_eps > 0.0)) throw ConfigError("adam eps must be positive");
}

bool RunReport::same_results(const RunReport& o) const {
  return epochs == o.epochs && final_mse == o.final_mse && final_psnr == o.final_psnr &&
         final_ssim == o.final_ssim && best_psnr == o.best_psnr && best_epoch == o.best_epoch &&
         beta == o.beta && backbone == o.backbone && transform == o.transform && train == o.train;
}

template <typename T>
LossResult<T> mse_loss(const Matrix<T>& pred, const Matrix<T>& target) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols()) {
    throw ContractViolation("mse_loss: prediction " + pred.shape_string() + " vs target " +
                            target.shape_string());
  }
  if (pred.empty()) throw ContractViolation("mse_loss: empty input");
  LossResult<T> out{0.0, Matrix<T>(pred.rows(), pred.cols())};
  const auto p = pred.data();
  const auto t = target.data();
  auto g = out.grad.data();
  const T two_over_n = static_cast<T>(2.0 / static_cast<double>(p.size()));
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const T d = p[i] - t[i];
    acc += static_cast<double>(d) * static_cast<double>(d);
    g[i] = two_over_n * d;
  }
  out.loss = acc / static_cast<double>(p.size());
  return out;
}

namespace {

template <typename T>
void adam_update(std::span<T> params, std::span<const T> grads, std::span<T> m, std::span<T> v,
                 std::uint64_t t, const TrainConfig& config) {
  const T b1 = static_cast<T>(config.adam_beta1);
  const T b2 = static_cast<T>(config.adam_beta2);
  const T lr = static_cast<T>(config.learning_rate);
  const T eps = static_cast<T>(config.adam_eps);
  const T c1 = static_cast<T>(1.0 - std::pow(config.adam_beta1, static_cast<double>(t)));
  const T c2 = static_cast<T>(1.0 - std::pow(config.adam_beta2, static_cast<double>(t)));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const T g = grads[i];
    m[i] = b1 * m[i] + (T{1} - b1) * g;
    v[i] = b2 * v[i] + (T{1} - b2) * g * g;
    const T m_hat = m[i] / c1;
    const T v_hat = v[i] / c2;
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
  }
}

template <typename T>
void require_finite(std::span<const T> grads) {
  for (T g : grads) {
    if (!std::isfinite(g)) throw NumericError("adam_step: non-finite gradient");
  }
}

}  // namespace

template <typename T>
void adam_step(std::span<T> params, std::span<const T> grads, AdamState<T>& state,
               const TrainConfig& config) {
  if (params.size() != grads.size() || state.m.size() != params.size() ||
      state.v.size() != params.size()) {
    throw ContractViolation("adam_step: parameter, gradient and state sizes differ");
  }
  require_finite(grads);
  state.t += 1;
  adam_update<T>(params, grads, state.m, state.v, state.t, config);
}

template <typename T>
void adam_step(Mlp<T>& model, const MlpGradients<T>& grads, AdamState<T>& state,
               const TrainConfig& config) {
  if (grads.weights.size() != model.layer_count() || grads.biases.size() != model.layer_count()) {
    throw ContractViolation("adam_step: gradient layer count does not match model");
  }
  if (state.m.size() != model.param_count() || state.v.size() != model.param_count()) {
    throw ContractViolation("adam_step: optimizer state sized for " +
                            std::to_string(state.m.size()) + " parameters, model has " +
                            std::to_string(model.param_count()));
  }
  for (std::size_t n = 0; n < model.layer_count(); ++n) {
    if (grads.weights[n].size() != model.weights[n].size() ||
        grads.biases[n].size() != model.biases[n].size()) {
      throw ContractViolation("adam_step: gradient shape mismatch in layer " + std::to_string(n));
    }
    require_finite(grads.weights[n].data());
    require_finite(grads.biases[n].data());
  }
  state.t += 1;
  std::size_t offset = 0;
  auto step = [&](Matrix<T>& p, const Matrix<T>& g) {
    adam_update<T>(p.data(), g.data(), std::span<T>(state.m).subspan(offset, p.size()),
                   std::span<T>(state.v).subspan(offset, p.size()), state.t, config);
    offset += p.size();
  };
  for (std::size_t n = 0; n < model.layer_count(); ++n) {
    step(model.weights[n], grads.weights[n]);
    step(model.biases[n], grads.biases[n]);
  }
}

namespace {

bool is_shift(const OutputTransform& t) {
  return std::holds_alternative<transform::Shift>(t) ||
         std::holds_alternative<transform::AdaptiveShift>(t);
}

template <typename T>
bool grads_finite(const MlpGradients<T>& g) {
  for (const auto& w : g.weights) if (!all_finite(w)) return false;
  for (const auto& b : g.biases) if (!all_finite(b)) return false;
  return true;
}

template <typename T>
Matrix<T> gather_rows(const Matrix<T>& m, std::span<const std::size_t> rows) {
  Matrix<T> out(rows.size(), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto src = m.row(rows[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

// Residual target for shift transforms: f(x) is compared against Y − β.
Matrix2D residual_target(const Matrix2D& targets, const ShiftValues& beta) {
  Matrix2D out = targets;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      row[c] = row[c] + -1.0 * (beta.size() == 1 ? beta[0] : beta[c]);
    }
  }
  return out;
}

struct Scorer {
  const SignalDataset& dataset;
  double span;

  double psnr(double loss) const { return psnr_from_mse(loss / (span * span)); }

  std::optional<double> ssim(const Matrix2D& pred) const {
    if (dataset.kind != SignalKind::Image) return std::nullopt;
    const ValueRange r = dataset.normalization.output;
    return ssinr::ssim(rescale_to_unit(pred, r.lo, r.hi), rescale_to_unit(dataset.targets, r.lo, r.hi),
                       dataset.image.height, dataset.image.width);
  }
};

template <typename T>
FitResult run_fit(const SignalDataset& dataset, Mlp<T> model, const TransformSpec& spec,
                  const TrainConfig& train, const std::optional<TrainingState>& resume) {
  const auto started = std::chrono::steady_clock::now();
  const BackboneConfig& cfg = model.config;

  const ShiftValues beta = resolve_output_shift(spec, dataset.targets);
  const std::optional<ShiftValues> beta_opt =
      beta.empty() ? std::nullopt : std::optional<ShiftValues>(beta);
  const bool shift_mode = is_shift(spec.output);

  const Matrix<T> features =
      backbone_features(cfg, apply_input_transform(dataset.coords.template cast<T>(), spec));
  const Matrix<T> targets = dataset.targets.template cast<T>();
  const Matrix<T> loss_targets =
      shift_mode ? residual_target(dataset.targets, beta).template cast<T>() : targets;

  AdamState<T> adam = AdamState<T>::zeros(model.param_count());
  std::size_t epoch0 = 0;
  if (resume) {
    if (resume->adam.m.size() != model.param_count()) {
      throw ConfigError("resume state does not match model parameter count");
    }
    adam = resume->adam.template cast<T>();
    epoch0 = resume->epochs_completed;
  }

  const Scorer scorer{dataset, dataset.normalization.output.span()};
  const std::size_t n = features.rows();
  const bool full_batch = train.batch_size == 0 || train.batch_size >= n;
  const Rng shuffle_root = Rng(train.seed).derive(1);

  // loss and ∂L/∂f(x) for one batch
  auto loss_and_grad = [&](const Matrix<T>& raw, const Matrix<T>& lt, const Matrix<T>& tt) {
    if (shift_mode) return mse_loss(raw, lt);
    const Matrix<T> pred = forward_output_transform(raw, spec, beta_opt);
    LossResult<T> r = mse_loss(pred, tt);
    r.grad = backward_output_transform(raw, r.grad, spec);
    return r;
  };

  RunReport report;
  report.backbone = cfg;
  report.transform = spec;
  report.train = train;
  report.beta = beta;
  report.epochs.reserve(train.epochs);

  ForwardCache<T> cache;
  for (std::size_t e = 0; e < train.epochs; ++e) {
    const std::size_t epoch = epoch0 + e;
    EpochRecord rec;
    rec.epoch = epoch;
    if (full_batch) {
      const Matrix<T> raw = forward(model, features, &cache);
      LossResult<T> lr = loss_and_grad(raw, loss_targets, targets);
      if (!std::isfinite(lr.loss)) {
        throw TrainingAborted(epoch, "non-finite loss at epoch " + std::to_string(epoch));
      }
      rec.mse = lr.loss;
      if (train.ssim_every > 0 && epoch % train.ssim_every == 0) {
        rec.ssim = scorer.ssim(forward_output_transform(raw, spec, beta_opt).template cast<double>());
      }
      const MlpGradients<T> grads = backward(model, cache, lr.grad);
      if (!grads_finite(grads)) {
        throw TrainingAborted(epoch, "non-finite gradient at epoch " + std::to_string(epoch));
      }
      adam_step(model, grads, adam, train);
    } else {
      std::vector<std::size_t> order(n);
      std::iota(order.begin(), order.end(), std::size_t{0});
      Rng rng = shuffle_root.derive(epoch);
      for (std::size_t i = n; i > 1; --i) {
        std::swap(order[i - 1], order[rng.next_u64() % i]);
      }
      double weighted = 0.0;
      for (std::size_t start = 0; start < n; start += train.batch_size) {
        const std::size_t count = std::min(train.batch_size, n - start);
        const std::span<const std::size_t> rows(order.data() + start, count);
        const Matrix<T> raw = forward(model, gather_rows(features, rows), &cache);
        LossResult<T> lr = loss_and_grad(raw, gather_rows(loss_targets, rows), gather_rows(targets, rows));
        if (!std::isfinite(lr.loss)) {
          throw TrainingAborted(epoch, "non-finite loss at epoch " + std::to_string(epoch));
        }
        weighted += lr.loss * static_cast<double>(count);
        const MlpGradients<T> grads = backward(model, cache, lr.grad);
        if (!grads_finite(grads)) {
          throw TrainingAborted(epoch, "non-finite gradient at epoch " + std::to_string(epoch));
        }
        adam_step(model, grads, adam, train);
      }
      rec.mse = weighted / static_cast<double>(n);
      if (train.ssim_every > 0 && epoch % train.ssim_every == 0 && dataset.kind == SignalKind::Image) {
        const Matrix<T> raw = forward(model, features);
        rec.ssim = scorer.ssim(forward_output_transform(raw, spec, beta_opt).template cast<double>());
      }
    }
    rec.psnr = scorer.psnr(rec.mse);
    if (report.epochs.empty() || rec.psnr > report.best_psnr) {
      report.best_psnr = rec.psnr;
      report.best_epoch = epoch;
    }
    report.epochs.push_back(rec);
  }

  const Matrix<T> raw = forward(model, features);
  const Matrix2D prediction = forward_output_transform(raw, spec, beta_opt).template cast<double>();
  report.final_mse = mean_squared_error(prediction, dataset.targets);
  if (!std::isfinite(report.final_mse)) {
    throw TrainingAborted(epoch0 + train.epochs, "non-finite final prediction");
  }
  report.final_psnr = scorer.psnr(report.final_mse);
  report.final_ssim = scorer.ssim(prediction);
  if (report.final_psnr > report.best_psnr) {
    report.best_psnr = report.final_psnr;
    report.best_epoch = epoch0 + train.epochs;
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  FitResult result;
  result.model = model.template cast<double>();
  result.report = std::move(report);
  result.state.adam = adam.template cast<double>();
  result.state.epochs_completed = epoch0 + train.epochs;
  result.prediction = prediction;
  return result;
}

void check_compatible(const SignalDataset& dataset, const BackboneConfig& cfg) {
  if (dataset.coords.rows() != dataset.targets.rows() || dataset.coords.empty()) {
    throw ConfigError("dataset coordinates and targets disagree in length");
  }
  if (cfg.in_dim != dataset.in_dim() || cfg.out_dim != dataset.out_dim()) {
    throw ConfigError("backbone dims " + std::to_string(cfg.in_dim) + "->" +
                      std::to_string(cfg.out_dim) + " do not match dataset " +
                      std::to_string(dataset.in_dim()) + "->" + std::to_string(dataset.out_dim()));
  }
}

}  // namespace

FitResult fit(const SignalDataset& dataset, const BackboneConfig& backbone,
              const TransformSpec& transform, const TrainConfig& train) {
  backbone.validate();
  Rng rng(train.seed);
  const MlpModel initial = init_model<double>(backbone, rng);
  return fit_from(dataset, initial, transform, train);
}

FitResult fit_from(const SignalDataset& dataset, const MlpModel& initial,
                   const TransformSpec& transform, const TrainConfig& train,
                   const std::optional<TrainingState>& resume) {
  train.validate();
  transform.validate();
  initial.config.validate();
  check_compatible(dataset, initial.config);
  if (train.precision == Precision::Single) {
    return run_fit<float>(dataset, initial.cast<float>(), transform, train, resume);
  }
  return run_fit<double>(dataset, initial, transform, train, resume);
}

Matrix2D predict(const MlpModel& model, const Matrix2D& coords, const TransformSpec& transform,
                 const ShiftValues& beta) {
  const Matrix2D features = backbone_features(model.config, apply_input_transform(coords, transform));
  const std::optional<ShiftValues> b = beta.empty() ? std::nullopt : std::optional<ShiftValues>(beta);
  return forward_output_transform(forward(model, features), transform, b);
}

// ---- checkpoints ---------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'S', 'S', 'I', 'R'};
constexpr std::uint32_t kFlagTrainingState = 1u;

json backbone_to_json(const BackboneConfig& c) {
  return {{"kind", to_string(c.kind)},     {"hidden_layers", c.hidden_layers},
          {"width", c.width},              {"in_dim", c.in_dim},
          {"out_dim", c.out_dim},          {"omega0", c.omega0},
          {"pe_bands", c.pe_bands}};
}

BackboneConfig backbone_from_json(const json& j) {
  BackboneConfig c;
  c.kind = parse_backbone_kind(j.at("kind").get<std::string>());
  c.hidden_layers = j.at("hidden_layers").get<std::size_t>();
  c.width = j.at("width").get<std::size_t>();
  c.in_dim = j.at("in_dim").get<std::size_t>();
  c.out_dim = j.at("out_dim").get<std::size_t>();
  c.omega0 = j.at("omega0").get<double>();
  c.pe_bands = j.at("pe_bands").get<std::size_t>();
  return c;
}

class Writer {
 public:
  void raw(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    bytes_.insert(bytes_.end(), b, b + n);
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    u64(bits);
  }
  const std::vector<std::uint8_t>& bytes() const { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  explicit Reader(std::vector<std::uint8_t> bytes) : bytes_(std::move(bytes)) {}

  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) {
      throw CheckpointError(CheckpointError::Kind::UnexpectedEnd,
                            "checkpoint: unexpected end of data at byte " + std::to_string(pos_));
    }
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_++]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * i);
    return v;
  }
  double f64() {
    const std::uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
  }
  std::string text(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  std::vector<std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_checkpoint(const MlpModel& model, const fs::path& path,
                     const std::optional<TrainingState>& training, const std::string& extra_config) {
  json doc = json::object();
  if (!extra_config.empty()) {
    doc = json::parse(extra_config);
    if (!doc.is_object()) throw ContractViolation("save_checkpoint: extra config must be a JSON object");
  }
  doc["backbone"] = backbone_to_json(model.config);
  const std::string config = doc.dump();

  Writer w;
  w.raw(kMagic, sizeof kMagic);
  w.u32(kCheckpointVersion);
  w.u32(training ? kFlagTrainingState : 0u);
  w.u32(static_cast<std::uint32_t>(config.size()));
  w.raw(config.data(), config.size());
  for (std::size_t n = 0; n < model.layer_count(); ++n) {
    for (double v : model.weights[n].data()) w.f64(v);
    for (double v : model.biases[n].data()) w.f64(v);
  }
  if (training) {
    if (training->adam.m.size() != model.param_count() || training->adam.v.size() != model.param_count()) {
      throw ContractViolation("save_checkpoint: optimizer state does not match model");
    }
    w.u64(training->adam.t);
    w.u64(training->epochs_completed);
    for (double v : training->adam.m) w.f64(v);
    for (double v : training->adam.v) w.f64(v);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError(CheckpointError::Kind::Io, "cannot write checkpoint '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(w.bytes().data()), static_cast<std::streamsize>(w.bytes().size()));
  if (!out) throw CheckpointError(CheckpointError::Kind::Io, "write failed for '" + path.string() + "'");
}

Checkpoint load_checkpoint(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError(CheckpointError::Kind::Io, "cannot open checkpoint '" + path.string() + "'");
  std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw CheckpointError(CheckpointError::Kind::NotACheckpoint,
                          "'" + path.string() + "' is not a checkpoint (bad magic)");
  }
  Reader r(std::move(bytes));
  r.text(4);
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw CheckpointError(CheckpointError::Kind::VersionMismatch,
                          "checkpoint version " + std::to_string(version) + " is not supported (expected " +
                              std::to_string(kCheckpointVersion) + ")");
  }
  const std::uint32_t flags = r.u32();
  Checkpoint ck;
  ck.config_document = r.text(r.u32());
  BackboneConfig cfg;
  try {
    cfg = backbone_from_json(json::parse(ck.config_document).at("backbone"));
    cfg.validate();
  } catch (const CheckpointError&) {
    throw;
  } catch (const std::exception& e) {
    throw CheckpointError(CheckpointError::Kind::Malformed,
                          std::string("checkpoint: malformed config document: ") + e.what());
  }
  ck.model.config = cfg;
  std::size_t fan_in = cfg.effective_in_dim();
  for (std::size_t n = 0; n < cfg.weight_layer_count(); ++n) {
    const std::size_t fan_out = n + 1 == cfg.weight_layer_count() ? cfg.out_dim : cfg.width;
    Matrix2D wm(fan_in, fan_out);
    for (double& v : wm.data()) v = r.f64();
    Matrix2D bm(1, fan_out);
    for (double& v : bm.data()) v = r.f64();
    ck.model.weights.push_back(std::move(wm));
    ck.model.biases.push_back(std::move(bm));
    fan_in = fan_out;
  }
  if (flags & kFlagTrainingState) {
    TrainingState st;
    st.adam.t = r.u64();
    st.epochs_completed = r.u64();
    const std::size_t p = ck.model.param_count();
    st.adam.m.resize(p);
    st.adam.v.resize(p);
    for (double& v : st.adam.m) v = r.f64();
    for (double& v : st.adam.v) v = r.f64();
    ck.training = std::move(st);
  }
  if (!r.at_end()) {
    throw CheckpointError(CheckpointError::Kind::Malformed, "checkpoint: trailing bytes after payload");
  }
  return ck;
}

#define SSINR_INSTANTIATE(T)                                                                    \
  template LossResult<T> mse_loss(const Matrix<T>&, const Matrix<T>&);                          \
  template void adam_step(std::span<T>, std::span<const T>, AdamState<T>&, const TrainConfig&); \
  template void adam_step(Mlp<T>&, const MlpGradients<T>&, AdamState<T>&, const TrainConfig&);

SSINR_INSTANTIATE(float)
SSINR_INSTANTIATE(double)

#undef SSINR_INSTANTIATE

}  // namespace ssinr
