#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ssinr/harness/audio.hpp"
#include "ssinr/harness/config.hpp"
#include "ssinr/harness/exit_codes.hpp"
#include "ssinr/harness/gradcheck.hpp"
#include "ssinr/harness/parallel.hpp"
#include "ssinr/harness/report.hpp"
#include "ssinr/harness/runner.hpp"
#include "ssinr/harness/sweep.hpp"
#include "ssinr/harness/tables.hpp"

namespace fs = std::filesystem;
using namespace ssinr;
using namespace ssinr::harness;
using nlohmann::json;

namespace {

// Flags for `fit`. Only flags given on the command line are applied on top
// of the config file.
struct FitFlags {
  std::string config, input, signal, channels, output_range, coord_range;
  std::size_t crop = 0;
  double max_seconds = 0;
  std::string backbone;
  std::size_t hidden_layers = 0, width = 0, pe_bands = 0;
  double omega0 = 0;
  std::string input_transform, output_transform;
  bool per_channel_shift = false;
  double kernel_a = 0, kernel_c = 0, kernel_sigma = 0, kernel_gamma = 0;
  int kernel_degree = 0;
  std::size_t epochs = 0, batch_size = 0, ssim_every = 0;
  double lr = 0;
  std::uint64_t seed = 0;
  std::string precision, out, resume;
  bool quiet = false;
};

json parse_range(const std::string& text, const std::string& flag) {
  const auto comma = text.find(',');
  try {
    if (comma == std::string::npos) throw std::invalid_argument(text);
    return json::array({std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))});
  } catch (const std::exception&) {
    throw ConfigError(flag + " expects lo,hi (got '" + text + "')");
  }
}

RunConfig fit_config(const CLI::App& cmd, const FitFlags& f) {
  RunConfig base;
  if (!f.config.empty()) base = load_run_config(f.config);
  json o = json::object();
  auto given = [&](const char* name) { return cmd.count(name) > 0; };
  if (given("--input")) o["input"] = f.input;
  if (given("--signal")) o["signal"] = f.signal;
  if (given("--channels")) o["channels"] = f.channels;
  if (given("--crop")) o["crop"] = f.crop;
  if (given("--output-range")) o["output_range"] = parse_range(f.output_range, "--output-range");
  if (given("--coord-range")) o["coord_range"] = parse_range(f.coord_range, "--coord-range");
  if (given("--max-seconds")) o["max_seconds"] = f.max_seconds;
  if (given("--out")) o["output_dir"] = f.out;
  json b = json::object();
  if (given("--backbone")) b["kind"] = f.backbone;
  if (given("--hidden-layers")) b["hidden_layers"] = f.hidden_layers;
  if (given("--width")) b["width"] = f.width;
  if (given("--omega0")) b["omega0"] = f.omega0;
  if (given("--pe-bands")) b["pe_bands"] = f.pe_bands;
  if (!b.empty()) o["backbone"] = b;
  json t = json::object();
  if (given("--input-transform")) t["input"] = f.input_transform;
  if (given("--output-transform")) t["output"] = f.output_transform;
  if (given("--per-channel-shift")) t["per_channel_shift"] = f.per_channel_shift;
  json k = json::object();
  if (given("--kernel-a")) k["a"] = f.kernel_a;
  if (given("--kernel-c")) k["c"] = f.kernel_c;
  if (given("--kernel-degree")) k["degree"] = f.kernel_degree;
  if (given("--kernel-sigma")) k["sigma"] = f.kernel_sigma;
  if (given("--kernel-gamma")) k["gamma"] = f.kernel_gamma;
  if (!k.empty()) t["kernel"] = k;
  if (!t.empty()) o["transform"] = t;
  json tr = json::object();
  if (given("--epochs")) tr["epochs"] = f.epochs;
  if (given("--lr")) tr["learning_rate"] = f.lr;
  if (given("--batch-size")) tr["batch_size"] = f.batch_size;
  if (given("--seed")) tr["seed"] = f.seed;
  if (given("--precision")) tr["precision"] = f.precision;
  if (given("--ssim-every")) tr["ssim_every"] = f.ssim_every;
  if (!tr.empty()) o["train"] = tr;

  RunConfig c = run_config_from_json(o, base);
  if (c.input.empty()) c.input = SSINR_DEFAULT_IMAGE;
  if (c.output_dir.empty()) c.output_dir = (output_root() / "fit").string();
  return c;
}

int cmd_fit(const CLI::App& cmd, const FitFlags& f) {
  const RunConfig config = fit_config(cmd, f);
  std::optional<fs::path> resume;
  if (!f.resume.empty()) resume = f.resume;
  const FitOutcome o = run_fit(config, resume);
  const RunReport& r = o.result.report;
  if (!f.quiet) {
    std::printf("%s  %s  in=%s out=%s  epochs=%zu\n", o.config.input.c_str(),
                to_string(o.result.model.config.kind).c_str(), to_string(o.transform.input).c_str(),
                to_string(o.transform.output).c_str(), r.epochs.size());
    std::printf("final  mse %.6g  psnr %.4f dB  ssim %s  (%.1f s)\n", r.final_mse, r.final_psnr,
                r.final_ssim ? std::to_string(*r.final_ssim).c_str() : "-", r.wall_seconds);
    std::printf("wrote  %s\n", o.config.output_dir.c_str());
  }
  return kExitOk;
}

int cmd_sweep(const std::string& spec_path, std::string out, std::size_t jobs) {
  const SweepSpec spec = load_sweep_spec(spec_path);
  if (out.empty()) out = (output_root() / "sweep").string();
  const auto cells = run_sweep(spec, out, jobs);
  std::cout << sweep_table(spec, cells).to_string();
  std::size_t failed = 0;
  for (const auto& c : cells)
    for (const auto& t : c.trials) failed += t.ok ? 0 : 1;
  if (failed) std::fprintf(stderr, "%zu trial(s) failed; see %s/trials.csv\n", failed, out.c_str());
  return kExitOk;
}

int cmd_gradcheck(const std::string& fault) {
  BackwardOptions options;
  if (fault == "sine-derivative") {
    options.sine_derivative_scale = 1.1;
  } else if (!fault.empty()) {
    throw ConfigError("unknown fault '" + fault + "'");
  }
  const auto rows = run_gradcheck(options);
  bool ok = true;
  for (const auto& r : rows) {
    std::printf("%-4s %-40s max rel err %.3e\n", r.pass ? "ok" : "FAIL", r.label().c_str(), r.max_relative_error);
    ok = ok && r.pass;
  }
  std::printf("%zu combinations, tolerance %.0e: %s\n", rows.size(), kGradcheckTolerance, ok ? "pass" : "FAIL");
  if (!ok) {
    for (const auto& r : rows) {
      if (!r.pass) std::fprintf(stderr, "gradient mismatch: %s\n", r.label().c_str());
    }
  }
  return ok ? kExitOk : kExitValidationFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coordinate-MLP fitting with input/output kernel transformations"};
  app.require_subcommand(1);

  FitFlags ff;
  auto* fit = app.add_subcommand("fit", "Fit one signal and write metrics, reconstruction and checkpoint");
  fit->add_option("--config", ff.config, "JSON run config; flags override its values")->check(CLI::ExistingFile);
  fit->add_option("--input", ff.input, "Image (PNG/PPM/PGM) or WAV file (default: bundled 64x64 image)");
  fit->add_option("--signal", ff.signal, "image or audio (default: from extension)");
  fit->add_option("--channels", ff.channels, "rgb or gray");
  fit->add_option("--crop", ff.crop, "Center-crop images to this side");
  fit->add_option("--output-range", ff.output_range, "Target range lo,hi (default -1,1)");
  fit->add_option("--coord-range", ff.coord_range, "Coordinate range lo,hi (default -1,1)");
  fit->add_option("--max-seconds", ff.max_seconds, "Truncate audio");
  fit->add_option("--backbone", ff.backbone, "siren, finer or relu_pe");
  fit->add_option("--hidden-layers", ff.hidden_layers);
  fit->add_option("--width", ff.width);
  fit->add_option("--omega0", ff.omega0);
  fit->add_option("--pe-bands", ff.pe_bands);
  fit->add_option("--input-transform", ff.input_transform,
                  "identity, scale:<s>, shift:<t>, kernel:<kind> or ss-default");
  fit->add_option("--output-transform", ff.output_transform,
                  "identity, scale:<s>, shift:<t>, adaptive-shift or kernel:<kind>");
  fit->add_flag("--per-channel-shift", ff.per_channel_shift, "Adaptive shift per output channel");
  fit->add_option("--kernel-a", ff.kernel_a);
  fit->add_option("--kernel-c", ff.kernel_c);
  fit->add_option("--kernel-degree", ff.kernel_degree);
  fit->add_option("--kernel-sigma", ff.kernel_sigma);
  fit->add_option("--kernel-gamma", ff.kernel_gamma);
  fit->add_option("--epochs", ff.epochs);
  fit->add_option("--lr", ff.lr);
  fit->add_option("--batch-size", ff.batch_size, "0 = full batch");
  fit->add_option("--seed", ff.seed);
  fit->add_option("--precision", ff.precision, "single or double");
  fit->add_option("--ssim-every", ff.ssim_every, "Per-epoch SSIM cadence, 0 = final only");
  fit->add_option("--out", ff.out, "Output directory (default $SSINR_OUTPUT_ROOT/fit)");
  fit->add_option("--resume", ff.resume, "Continue from a checkpoint")->check(CLI::ExistingFile);
  fit->add_flag("-q,--quiet", ff.quiet);

  std::string sweep_spec, sweep_out;
  std::size_t sweep_jobs = default_jobs();
  auto* sweep = app.add_subcommand("sweep", "Run a one- or two-axis parameter sweep");
  sweep->add_option("spec", sweep_spec, "Sweep spec JSON")->required()->check(CLI::ExistingFile);
  sweep->add_option("--out", sweep_out, "Output directory (default $SSINR_OUTPUT_ROOT/sweep)");
  sweep->add_option("--jobs", sweep_jobs, "Parallel workers (default $SSINR_JOBS or core count)");

  std::string table_id, table_dataset = SSINR_DEFAULT_IMAGE, table_out, table_backbone = "siren",
                        table_precision = "single";
  TableOptions topt;
  topt.jobs = default_jobs();
  std::size_t table_epochs = 0, table_width = 0;
  auto* table = app.add_subcommand("table", "Run one ablation table at desk scale");
  table->add_option("id", table_id, "t1_kernels, t2_out_scale, t3_in_shift, t4_out_shift, t5_adaptive, t6_ss, t10_depth, t11_norm")
      ->required();
  table->add_option("--dataset", table_dataset, "Image file or directory of images");
  table->add_flag("--paper-scale", topt.full_scale, "Full scale: 256x256 crops, width 256, 500 epochs");
  table->add_option("--seeds", topt.seeds, "Seeds per image");
  table->add_option("--epochs", table_epochs);
  table->add_option("--width", table_width);
  table->add_option("--backbone", table_backbone);
  table->add_option("--precision", table_precision);
  table->add_option("--seed", topt.seed);
  table->add_option("--jobs", topt.jobs);
  table->add_option("--out", table_out, "CSV path (default $SSINR_OUTPUT_ROOT/tables/<id>.csv)");

  std::string fault;
  auto* gradcheck = app.add_subcommand("gradcheck", "Check analytic gradients against finite differences");
  gradcheck->add_option("--inject-fault", fault)->group("");

  AudioOptions aopt;
  aopt.input = SSINR_DEFAULT_AUDIO;
  aopt.jobs = default_jobs();
  std::string audio_input = aopt.input.string(), audio_out, audio_backbone = "siren", audio_precision = "single";
  auto* audio = app.add_subcommand("audio", "Repeated audio fits, vanilla versus SS");
  audio->add_option("--input", audio_input, "Mono PCM16 WAV");
  audio->add_option("--trials", aopt.trials);
  audio->add_option("--epochs", aopt.epochs);
  audio->add_option("--width", aopt.width);
  audio->add_option("--hidden-layers", aopt.hidden_layers);
  audio->add_option("--backbone", audio_backbone);
  audio->add_option("--precision", audio_precision);
  audio->add_option("--max-seconds", aopt.max_seconds);
  audio->add_option("--seed", aopt.seed);
  audio->add_option("--jobs", aopt.jobs);
  audio->add_option("--out", audio_out, "Output directory (default $SSINR_OUTPUT_ROOT/audio)");

  std::vector<std::string> report_inputs;
  std::string report_out;
  auto* report = app.add_subcommand("report", "Merge CSV outputs into one markdown summary");
  report->add_option("csv", report_inputs, "CSV files")->required()->check(CLI::ExistingFile);
  report->add_option("--out", report_out, "Markdown path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (*fit) return cmd_fit(*fit, ff);
    if (*sweep) return cmd_sweep(sweep_spec, sweep_out, sweep_jobs);
    if (*table) {
      topt.images = collect_images(table_dataset);
      topt.backbone = parse_backbone_kind(table_backbone);
      topt.precision = parse_precision(table_precision);
      if (table_epochs) topt.epochs = table_epochs;
      if (table_width) topt.width = table_width;
      const CsvTable t = run_table(table_id, topt);
      if (table_out.empty()) table_out = (output_root() / "tables" / (table_id + ".csv")).string();
      t.write(table_out);
      std::cout << t.to_string();
      return kExitOk;
    }
    if (*gradcheck) return cmd_gradcheck(fault);
    if (*audio) {
      aopt.input = audio_input;
      aopt.backbone = parse_backbone_kind(audio_backbone);
      aopt.precision = parse_precision(audio_precision);
      const auto rows = run_audio(aopt);
      if (audio_out.empty()) audio_out = (output_root() / "audio").string();
      const CsvTable t = audio_table(rows);
      t.write(fs::path(audio_out) / "audio.csv");
      audio_trials_table(rows).write(fs::path(audio_out) / "audio_trials.csv");
      std::cout << t.to_string();
      return kExitOk;
    }
    if (*report) {
      std::vector<fs::path> files(report_inputs.begin(), report_inputs.end());
      const std::string md = render_report(files);
      if (report_out.empty()) {
        std::cout << md;
      } else {
        write_text(report_out, md);
      }
      return kExitOk;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e);
  }
  return kExitConfigError;
}
