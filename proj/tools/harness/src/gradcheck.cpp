#include "ssinr/harness/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "ssinr/training.hpp"
#include "ssinr/transforms.hpp"

namespace ssinr::harness {

namespace {

constexpr std::size_t kSamples = 32;
// Below this, |a − b| is compared against the floor instead of the gradient size.
constexpr double kRelativeFloor = 1e-6;
// Smallest allowed |z| for relu pre-activations.
constexpr double kKinkMargin = 1e-3;

BackboneConfig small_backbone(BackboneKind kind) {
  BackboneConfig c;
  c.kind = kind;
  c.hidden_layers = 2;
  c.width = 8;
  c.in_dim = 2;
  c.out_dim = 1;
  c.pe_bands = 3;
  return c;
}

double kink_margin(const ForwardCache<double>& cache) {
  double margin = INFINITY;
  for (const auto& z : cache.pre_activations)
    for (double v : z.data()) margin = std::min(margin, std::abs(v));
  return margin;
}

// Analytic ∂L/∂θ for L = mean((T(f(x)) − y)²).
std::vector<double> analytic_gradient(const MlpModel& m, const Matrix2D& features,
                                      const Matrix2D& targets, const TransformSpec& spec,
                                      const ShiftValues& beta, const BackwardOptions& options) {
  ForwardCache<double> cache;
  const Matrix2D raw = forward(m, features, &cache);
  const Matrix2D pred = forward_output_transform(raw, spec, std::optional<ShiftValues>(beta));
  const Matrix2D pred_grad = mse_loss(pred, targets).grad;
  return backward(m, cache, backward_output_transform(raw, pred_grad, spec), options).flatten();
}

double max_relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double denom = std::max({std::abs(a[i]), std::abs(b[i]), kRelativeFloor});
    worst = std::max(worst, std::abs(a[i] - b[i]) / denom);
  }
  return worst;
}

}  // namespace

std::string GradcheckRow::label() const {
  return to_string(backbone) + " in=" + input_transform + " out=" + output_transform;
}

std::vector<GradcheckRow> run_gradcheck(const BackwardOptions& options, double tolerance,
                                        double step) {
  std::vector<GradcheckRow> rows;
  Rng data_rng(0x6772616463686b);
  const Matrix2D coords = uniform_fill<double>(data_rng, kSamples, 2, -1.0, 1.0);
  const Matrix2D targets = uniform_fill<double>(data_rng, kSamples, 1, -1.0, 1.0);

  for (BackboneKind kind : {BackboneKind::ReluPe, BackboneKind::Siren, BackboneKind::Finer}) {
    for (const char* in : {"identity", "scale:5", "kernel:gaussian"}) {
      for (const char* out : {"identity", "shift:0.3", "adaptive-shift"}) {
        TransformSpec spec;
        spec.input = parse_input_transform(in);
        spec.output = parse_output_transform(out);
        const BackboneConfig config = small_backbone(kind);
        const Matrix2D features = backbone_features(config, apply_input_transform(coords, spec));
        const ShiftValues beta = resolve_output_shift(spec, targets);

        std::uint64_t seed = 1;
        MlpModel model;
        for (;; ++seed) {
          Rng rng(seed);
          model = init_model<double>(config, rng);
          if (kind != BackboneKind::ReluPe) break;
          ForwardCache<double> cache;
          forward(model, features, &cache);
          if (kink_margin(cache) >= kKinkMargin) break;
        }

        const auto analytic = analytic_gradient(model, features, targets, spec, beta, options);
        const auto numeric = finite_diff_gradient(
            [&](std::span<const double> theta) {
              MlpModel m = model;
              m.unflatten(theta);
              const Matrix2D pred = predict(m, coords, spec, beta);
              double acc = 0.0;
              for (std::size_t i = 0; i < pred.size(); ++i) {
                const double d = pred.data()[i] - targets.data()[i];
                acc += d * d;
              }
              return acc / static_cast<double>(pred.size());
            },
            model.flatten(), step);
        GradcheckRow row{kind, in, out, max_relative_error(analytic, numeric), false};
        row.pass = row.max_relative_error < tolerance;
        rows.push_back(row);
      }
    }
  }
  return rows;
}

}  // namespace ssinr::harness
