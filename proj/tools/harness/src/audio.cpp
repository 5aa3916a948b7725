#include "ssinr/harness/audio.hpp"

#include "ssinr/harness/config.hpp"
#include "ssinr/harness/parallel.hpp"
#include "ssinr/harness/runner.hpp"

namespace ssinr::harness {

std::vector<AudioRow> run_audio(const AudioOptions& o) {
  if (o.trials == 0) throw ConfigError("trials must be >= 1");
  RunConfig base;
  base.input = o.input.string();
  base.signal = SignalKind::Audio;
  base.max_seconds = o.max_seconds;
  base.backbone.kind = o.backbone;
  base.backbone.width = o.width;
  base.backbone.hidden_layers = o.hidden_layers;
  base.train.epochs = o.epochs;
  base.train.precision = o.precision;
  base.train.ssim_every = 0;
  // Fail on unreadable or unsupported input before starting any trials.
  load_dataset(base);

  std::vector<AudioRow> rows(2);
  rows[0].method = to_string(o.backbone);
  rows[1].method = "ss-" + to_string(o.backbone);
  for (auto& r : rows) r.trials.resize(o.trials);

  std::vector<std::exception_ptr> errors(2 * o.trials);
  parallel_for(2 * o.trials, o.jobs, [&](std::size_t job) {
    const std::size_t method = job / o.trials;
    const std::size_t trial = job % o.trials;
    RunConfig c = base;
    c.train.seed = derive_seed(o.seed, 0, trial);
    if (method == 1) {
      c.input_transform = "ss-default";
      c.output_transform = "adaptive-shift";
    }
    try {
      rows[method].trials[trial] = {c.train.seed, run_fit(c).result.report.final_mse};
    } catch (...) {
      errors[job] = std::current_exception();
    }
  });
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (auto& r : rows) {
    std::vector<double> mse;
    for (const auto& t : r.trials) mse.push_back(t.mse);
    r.mse = aggregate_trials(mse);
  }
  return rows;
}

CsvTable audio_table(const std::vector<AudioRow>& rows) {
  CsvTable t{{"method", "trials", "mse_mean", "mse_std"}, {}};
  for (const auto& r : rows) {
    t.add_row({r.method, std::to_string(r.mse.count), format_number(r.mse.mean), format_number(r.mse.stddev)});
  }
  return t;
}

CsvTable audio_trials_table(const std::vector<AudioRow>& rows) {
  CsvTable t{{"method", "trial", "seed", "mse"}, {}};
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.trials.size(); ++i) {
      t.add_row({r.method, std::to_string(i), std::to_string(r.trials[i].seed), format_number(r.trials[i].mse)});
    }
  }
  return t;
}

}  // namespace ssinr::harness
