#include "ssinr/harness/sweep.hpp"

#include <cstdio>
#include <fstream>

#include "ssinr/harness/parallel.hpp"
#include "ssinr/harness/runner.hpp"
#include "ssinr/metrics.hpp"

namespace ssinr::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json::json_pointer pointer_for(const std::string& param) {
  std::string p = "/";
  for (char c : param) p += c == '.' ? '/' : c;
  return json::json_pointer(p);
}

std::string cell_dir_name(std::size_t cell) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "cell_%03zu", cell);
  return buf;
}

std::vector<std::size_t> cell_indices(const SweepSpec& spec, std::size_t cell) {
  std::vector<std::size_t> idx(spec.axes.size());
  for (std::size_t a = spec.axes.size(); a-- > 0;) {
    idx[a] = cell % spec.axes[a].values.size();
    cell /= spec.axes[a].values.size();
  }
  return idx;
}

}  // namespace

std::size_t SweepSpec::cell_count() const {
  std::size_t n = 1;
  for (const auto& a : axes) n *= a.values.size();
  return n;
}

std::string axis_value_text(const json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number()) return format_number(value.get<double>());
  return value.dump();
}

SweepSpec parse_sweep_spec(const json& doc) {
  if (!doc.is_object()) throw ConfigError("sweep spec must be an object");
  for (const auto& [key, v] : doc.items()) {
    if (key != "base" && key != "axes" && key != "seeds_per_cell" && key != "max_cells") {
      throw ConfigError("unknown key '" + key + "' in sweep spec");
    }
  }
  SweepSpec spec;
  // normalized through RunConfig: rejects unknown keys, fills defaults
  spec.base = to_json(run_config_from_json(doc.value("base", json::object())));
  try {
    spec.seeds_per_cell = doc.value("seeds_per_cell", std::size_t{1});
    spec.max_cells = doc.value("max_cells", kDefaultMaxCells);
  } catch (const json::exception&) {
    throw ConfigError("seeds_per_cell and max_cells must be non-negative integers");
  }
  if (spec.seeds_per_cell == 0) throw ConfigError("seeds_per_cell must be >= 1");
  if (!doc.contains("axes") || !doc["axes"].is_array()) throw ConfigError("sweep spec needs an 'axes' array");
  for (const auto& a : doc["axes"]) {
    if (!a.is_object()) throw ConfigError("each axis must be an object");
    for (const auto& [key, v] : a.items()) {
      if (key != "param" && key != "values") throw ConfigError("unknown key '" + key + "' in sweep axis");
    }
    if (!a.contains("param") || !a["param"].is_string()) throw ConfigError("axis needs a 'param' string");
    SweepAxis axis{a["param"].get<std::string>(), {}};
    if (!a.contains("values") || !a["values"].is_array() || a["values"].empty()) {
      throw ConfigError("axis '" + axis.param + "' has no values");
    }
    if (!spec.base.contains(pointer_for(axis.param))) {
      throw ConfigError("axis '" + axis.param + "' does not name a config key");
    }
    for (const auto& v : a["values"]) axis.values.push_back(v);
    spec.axes.push_back(std::move(axis));
  }
  if (spec.axes.empty() || spec.axes.size() > 2) throw ConfigError("sweep needs one or two axes");
  if (spec.cell_count() > spec.max_cells) {
    throw ConfigError("sweep has " + std::to_string(spec.cell_count()) + " cells, cap is " +
                      std::to_string(spec.max_cells));
  }
  // Every cell must resolve to a valid config before anything runs.
  for (std::size_t c = 0; c < spec.cell_count(); ++c) {
    const RunConfig cfg = cell_config(spec, c, 0);
    resolve_transform(cfg);
    cfg.backbone.validate();
    cfg.train.validate();
  }
  return spec;
}

SweepSpec load_sweep_spec(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open sweep spec '" + path.string() + "'");
  try {
    return parse_sweep_spec(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ConfigError("sweep spec '" + path.string() + "': " + e.what());
  }
}

RunConfig cell_config(const SweepSpec& spec, std::size_t cell, std::size_t trial) {
  json doc = spec.base;
  const auto idx = cell_indices(spec, cell);
  for (std::size_t a = 0; a < spec.axes.size(); ++a) {
    doc[pointer_for(spec.axes[a].param)] = spec.axes[a].values[idx[a]];
  }
  RunConfig cfg = run_config_from_json(doc);
  cfg.train.seed = derive_seed(cfg.train.seed, cell, trial);
  return cfg;
}

std::vector<CellOutcome> run_sweep(const SweepSpec& spec, const fs::path& out_dir, std::size_t jobs) {
  const std::size_t cells = spec.cell_count();
  std::vector<CellOutcome> out(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    out[c].index = c;
    const auto idx = cell_indices(spec, c);
    for (std::size_t a = 0; a < spec.axes.size(); ++a) out[c].values.push_back(spec.axes[a].values[idx[a]]);
    out[c].trials.resize(spec.seeds_per_cell);
  }
  parallel_for(cells * spec.seeds_per_cell, jobs, [&](std::size_t job) {
    const std::size_t c = job / spec.seeds_per_cell;
    const std::size_t t = job % spec.seeds_per_cell;
    RunConfig cfg = cell_config(spec, c, t);
    cfg.output_dir = (out_dir / cell_dir_name(c) / ("trial_" + std::to_string(t))).string();
    TrialOutcome& trial = out[c].trials[t];
    trial.seed = cfg.train.seed;
    try {
      const auto r = run_fit(cfg).result.report;
      trial.ok = true;
      trial.final_mse = r.final_mse;
      trial.final_psnr = r.final_psnr;
      trial.final_ssim = r.final_ssim;
    } catch (const std::exception& e) {
      trial.message = e.what();
    }
  });
  trials_table(spec, out).write(out_dir / "trials.csv");
  sweep_table(spec, out).write(out_dir / "sweep.csv");
  return out;
}

CsvTable trials_table(const SweepSpec& spec, const std::vector<CellOutcome>& cells) {
  CsvTable t;
  t.header = {"cell"};
  for (const auto& a : spec.axes) t.header.push_back(a.param);
  for (const char* h : {"trial", "seed", "status", "final_mse", "final_psnr", "final_ssim"}) t.header.push_back(h);
  for (const auto& c : cells) {
    for (std::size_t i = 0; i < c.trials.size(); ++i) {
      const auto& tr = c.trials[i];
      std::vector<std::string> row{std::to_string(c.index)};
      for (const auto& v : c.values) row.push_back(axis_value_text(v));
      row.push_back(std::to_string(i));
      row.push_back(std::to_string(tr.seed));
      row.push_back(tr.ok ? "ok" : "error: " + tr.message);
      row.push_back(tr.ok ? format_number(tr.final_mse) : "");
      row.push_back(tr.ok ? format_number(tr.final_psnr) : "");
      row.push_back(tr.ok ? format_optional(tr.final_ssim) : "");
      t.add_row(std::move(row));
    }
  }
  return t;
}

CsvTable sweep_table(const SweepSpec& spec, const std::vector<CellOutcome>& cells) {
  CsvTable t;
  t.header = {"cell"};
  for (const auto& a : spec.axes) t.header.push_back(a.param);
  for (const char* h : {"seeds", "ok", "status", "mse_mean", "mse_std", "psnr_mean", "psnr_std",
                        "ssim_mean", "ssim_std"}) {
    t.header.push_back(h);
  }
  for (const auto& c : cells) {
    std::vector<double> mse, psnr, ssim;
    std::string first_error;
    for (const auto& tr : c.trials) {
      if (!tr.ok) {
        if (first_error.empty()) first_error = tr.message;
        continue;
      }
      mse.push_back(tr.final_mse);
      psnr.push_back(tr.final_psnr);
      if (tr.final_ssim) ssim.push_back(*tr.final_ssim);
    }
    std::vector<std::string> row{std::to_string(c.index)};
    for (const auto& v : c.values) row.push_back(axis_value_text(v));
    row.push_back(std::to_string(c.trials.size()));
    row.push_back(std::to_string(mse.size()));
    row.push_back(first_error.empty() ? "ok" : "error: " + first_error);
    for (const auto* series : {&mse, &psnr, &ssim}) {
      if (series->empty()) {
        row.insert(row.end(), {"", ""});
      } else {
        const TrialStats s = aggregate_trials(*series);
        row.push_back(format_number(s.mean));
        row.push_back(format_number(s.stddev));
      }
    }
    t.add_row(std::move(row));
  }
  return t;
}

}  // namespace ssinr::harness
