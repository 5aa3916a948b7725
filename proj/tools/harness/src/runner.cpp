#include "ssinr/harness/runner.hpp"

namespace ssinr::harness {

namespace fs = std::filesystem;
using nlohmann::json;

CsvTable metrics_table(const RunReport& report) {
  CsvTable t{{"epoch", "mse", "psnr", "ssim"}, {}};
  for (const auto& e : report.epochs) {
    t.add_row({std::to_string(e.epoch), format_number(e.mse), format_number(e.psnr),
               format_optional(e.ssim)});
  }
  t.add_row({"-1", format_number(report.final_mse), format_number(report.final_psnr),
             format_optional(report.final_ssim)});
  return t;
}

json summary_json(const FitOutcome& o) {
  const RunReport& r = o.result.report;
  json result = {{"final_mse", r.final_mse},
                 {"final_psnr", r.final_psnr},
                 {"final_ssim", r.final_ssim ? json(*r.final_ssim) : json(nullptr)},
                 {"best_psnr", r.best_psnr},
                 {"best_epoch", r.best_epoch},
                 {"beta", r.beta},
                 {"parameters", o.result.model.param_count()},
                 {"epochs_completed", o.result.state.epochs_completed}};
  json config = to_json(o.config);
  config["backbone"] = to_json(o.result.model.config);
  return {{"config", config}, {"result", result}};
}

FitOutcome run_fit(const RunConfig& input_config, const std::optional<fs::path>& resume) {
  FitOutcome out;
  out.config = resolved(input_config);
  out.transform = resolve_transform(out.config);
  out.dataset = load_dataset(out.config);
  if (resume) {
    const Checkpoint ck = load_checkpoint(*resume);
    out.config.backbone = ck.model.config;
    out.result = fit_from(out.dataset, ck.model, out.transform, out.config.train, ck.training);
  } else {
    out.result = fit(out.dataset, dataset_backbone(out.config, out.dataset), out.transform,
                     out.config.train);
  }
  if (out.config.output_dir.empty()) return out;

  const fs::path dir = out.config.output_dir;
  fs::create_directories(dir);
  FitArtifacts files;
  files.metrics_csv = dir / "metrics.csv";
  files.reconstruction =
      dir / (out.dataset.kind == SignalKind::Audio ? "reconstruction.wav" : "reconstruction.png");
  files.checkpoint = dir / "model.ssir";
  files.summary = dir / "run.json";
  files.config = dir / "config.json";

  metrics_table(out.result.report).write(files.metrics_csv);
  if (out.dataset.kind == SignalKind::Audio) {
    export_audio(out.result.prediction, out.dataset, files.reconstruction);
  } else {
    export_image(out.result.prediction, out.dataset, files.reconstruction);
  }
  const json summary = summary_json(out);
  json model_config = summary["config"];
  model_config.erase("output_dir");
  save_checkpoint(out.result.model, files.checkpoint, out.result.state, model_config.dump());
  write_text(files.summary, summary.dump(2) + "\n");
  write_text(files.config, to_json(out.config).dump(2) + "\n");
  out.files = files;
  return out;
}

}  // namespace ssinr::harness
