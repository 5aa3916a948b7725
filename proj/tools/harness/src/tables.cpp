#include "ssinr/harness/tables.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "ssinr/harness/config.hpp"
#include "ssinr/harness/parallel.hpp"
#include "ssinr/harness/runner.hpp"
#include "ssinr/metrics.hpp"

namespace ssinr::harness {

namespace fs = std::filesystem;

namespace {

struct Variant {
  std::string key;
  std::function<void(RunConfig&)> apply;
};

struct Score {
  std::optional<double> psnr;
  std::optional<double> ssim;
  std::size_t trained_parameters = 0;
};

Variant input(const std::string& key, const std::string& transform) {
  return {key, [transform](RunConfig& c) { c.input_transform = transform; }};
}
Variant output(const std::string& key, const std::string& transform) {
  return {key, [transform](RunConfig& c) { c.output_transform = transform; }};
}
Variant baseline() {
  return {"baseline", [](RunConfig&) {}};
}

const std::vector<std::string> kKernels{"polynomial", "laplacian", "gaussian", "exponential", "radial"};

std::vector<Variant> variants_for(const std::string& id) {
  std::vector<Variant> v{baseline()};
  if (id == "t1_kernels") {
    for (const auto& k : kKernels) {
      v.push_back(input("in_" + k, "kernel:" + k));
      v.push_back(output("out_" + k, "kernel:" + k));
    }
  } else if (id == "t2_out_scale") {
    for (const char* s : {"0.25", "0.5", "2", "4"}) v.push_back(output(s, std::string("scale:") + s));
  } else if (id == "t3_in_shift") {
    for (const char* s : {"-100", "-10", "10", "100"}) v.push_back(input(s, std::string("shift:") + s));
  } else if (id == "t4_out_shift") {
    for (const char* s : {"-0.5", "-0.2", "0.2", "0.5"}) v.push_back(output(s, std::string("shift:") + s));
  } else if (id == "t5_adaptive") {
    v.push_back(output("fixed", "shift:-0.2"));
    v.push_back(output("adaptive", "adaptive-shift"));
  } else if (id == "t6_ss") {
    v.push_back(input("scale", "ss-default"));
    v.push_back(output("shift", "adaptive-shift"));
    v.push_back({"ss", [](RunConfig& c) {
                   c.input_transform = "ss-default";
                   c.output_transform = "adaptive-shift";
                 }});
  } else if (id == "t10_depth") {
    for (std::size_t layers : {4u, 6u, 7u}) {
      v.push_back({std::to_string(layers), [layers](RunConfig& c) { c.backbone.hidden_layers = layers - 2; }});
    }
    v.push_back({"lt", [](RunConfig& c) {
                   c.input_transform = "ss-default";
                   c.output_transform = "adaptive-shift";
                 }});
  } else if (id == "t11_norm") {
    v.push_back({"in_0_255", [](RunConfig& c) { c.coord_range = {0.0, 255.0}; }});
    v.push_back({"in_-5_5", [](RunConfig& c) { c.coord_range = {-5.0, 5.0}; }});
    v.push_back({"out_0_255", [](RunConfig& c) { c.output_range = {0.0, 255.0}; }});
    v.push_back(output("out_adaptive", "adaptive-shift"));
  } else {
    throw ConfigError("unknown table '" + id + "'");
  }
  return v;
}

RunConfig base_config(const TableOptions& o, const fs::path& image) {
  RunConfig c;
  c.input = image.string();
  c.signal = SignalKind::Image;
  const std::size_t side = o.full_scale ? 256 : 64;
  const ImageU8 probe = read_image(image);
  c.crop = std::min({side, probe.width, probe.height});
  if (probe.channels == 1) c.channels = ChannelMode::Gray;
  c.backbone.kind = o.backbone;
  c.backbone.hidden_layers = 3;
  c.backbone.width = o.width.value_or(o.full_scale ? 256 : 128);
  c.train.epochs = o.epochs.value_or(o.full_scale ? 500 : 300);
  c.train.precision = o.precision;
  c.train.ssim_every = 0;
  return c;
}

std::map<std::string, Score> score_variants(const std::vector<Variant>& variants, const TableOptions& o) {
  if (o.images.empty()) throw ConfigError("table needs at least one image");
  if (o.seeds == 0) throw ConfigError("seeds must be >= 1");
  std::vector<RunConfig> bases;
  for (const auto& img : o.images) bases.push_back(base_config(o, img));

  struct Job {
    std::size_t variant, image, trial;
  };
  std::vector<Job> jobs;
  for (std::size_t v = 0; v < variants.size(); ++v)
    for (std::size_t i = 0; i < bases.size(); ++i)
      for (std::size_t t = 0; t < o.seeds; ++t) jobs.push_back({v, i, t});

  struct Result {
    bool ok = false;
    double psnr = 0, ssim = 0;
    std::size_t params = 0;
  };
  std::vector<Result> results(jobs.size());
  parallel_for(jobs.size(), o.jobs, [&](std::size_t j) {
    RunConfig c = bases[jobs[j].image];
    // same seed for every variant
    c.train.seed = derive_seed(o.seed, jobs[j].image, jobs[j].trial);
    variants[jobs[j].variant].apply(c);
    try {
      const auto out = run_fit(c);
      results[j] = {true, out.result.report.final_psnr, out.result.report.final_ssim.value_or(0.0),
                    out.result.model.param_count()};
    } catch (const NumericError&) {
      results[j].ok = false;
    }
  });

  std::map<std::string, Score> scores;
  for (std::size_t v = 0; v < variants.size(); ++v) {
    std::vector<double> psnr, ssim;
    Score s;
    for (std::size_t j = 0; j < jobs.size(); ++j) {
      if (jobs[j].variant != v || !results[j].ok) continue;
      psnr.push_back(results[j].psnr);
      ssim.push_back(results[j].ssim);
      s.trained_parameters = results[j].params;
    }
    if (!psnr.empty()) {
      s.psnr = aggregate_trials(psnr).mean;
      s.ssim = aggregate_trials(ssim).mean;
    }
    scores[variants[v].key] = s;
  }
  return scores;
}

std::vector<std::string> metric_row(const Score& s) {
  return {format_optional(s.psnr), format_optional(s.ssim)};
}

CsvTable factor_table(const std::map<std::string, Score>& s, const std::vector<std::string>& factors) {
  CsvTable t;
  t.header = {"metric"};
  t.header.insert(t.header.end(), factors.begin(), factors.end());
  std::vector<std::string> psnr{"psnr"}, ssim{"ssim"};
  for (const auto& f : factors) {
    const Score& sc = s.at(f == "0" || f == "1" ? "baseline" : f);
    psnr.push_back(format_optional(sc.psnr));
    ssim.push_back(format_optional(sc.ssim));
  }
  t.add_row(psnr);
  t.add_row(ssim);
  return t;
}

CsvTable method_table(const std::map<std::string, Score>& s,
                      const std::vector<std::pair<std::string, std::string>>& rows) {
  CsvTable t{{"method", "psnr", "ssim"}, {}};
  for (const auto& [label, key] : rows) {
    auto r = metric_row(s.at(key));
    t.add_row({label, r[0], r[1]});
  }
  return t;
}

}  // namespace

const std::vector<std::string>& table_ids() {
  static const std::vector<std::string> ids{"t1_kernels", "t2_out_scale", "t3_in_shift", "t4_out_shift",
                                            "t5_adaptive", "t6_ss", "t10_depth", "t11_norm"};
  return ids;
}

std::size_t reference_param_count(std::size_t layers) {
  BackboneConfig c;
  c.kind = BackboneKind::Siren;
  c.in_dim = 2;
  c.out_dim = 3;
  c.width = 256;
  c.hidden_layers = layers - 2;
  return param_count(c);
}

std::vector<fs::path> collect_images(const fs::path& path) {
  if (!fs::exists(path)) throw ConfigError("dataset '" + path.string() + "' does not exist");
  if (!fs::is_directory(path)) return {path};
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(path)) {
    auto ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (entry.is_regular_file() && (ext == ".png" || ext == ".ppm" || ext == ".pgm")) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) throw ConfigError("no PNG/PPM/PGM images in '" + path.string() + "'");
  return out;
}

CsvTable run_table(const std::string& id, const TableOptions& options) {
  const auto variants = variants_for(id);
  const auto s = score_variants(variants, options);

  if (id == "t1_kernels") {
    CsvTable t{{"method", "input_psnr", "input_ssim", "output_psnr", "output_ssim"}, {}};
    const auto base = metric_row(s.at("baseline"));
    t.add_row({"vanilla", base[0], base[1], base[0], base[1]});
    for (const auto& k : kKernels) {
      const auto in = metric_row(s.at("in_" + k));
      const auto out = metric_row(s.at("out_" + k));
      t.add_row({k, in[0], in[1], out[0], out[1]});
    }
    return t;
  }
  if (id == "t2_out_scale") return factor_table(s, {"0.25", "0.5", "1", "2", "4"});
  if (id == "t3_in_shift") return factor_table(s, {"-100", "-10", "0", "10", "100"});
  if (id == "t4_out_shift") return factor_table(s, {"-0.5", "-0.2", "0", "0.2", "0.5"});
  if (id == "t5_adaptive") {
    return method_table(s, {{"baseline", "baseline"},
                            {"shift factor (w/o adaptive)", "fixed"},
                            {"shift factor (w/ adaptive)", "adaptive"}});
  }
  if (id == "t6_ss") {
    return method_table(s, {{"baseline", "baseline"},
                            {"scale transformation (input)", "scale"},
                            {"shift transformation (output)", "shift"},
                            {"scale-and-shift (input/output)", "ss"}});
  }
  if (id == "t10_depth") {
    CsvTable t{{"action", "layers", "psnr", "parameters", "trained_parameters"}, {}};
    const std::vector<std::tuple<std::string, std::size_t, std::string>> rows{
        {"removing one FC layer", 4, "4"},
        {"baseline", 5, "baseline"},
        {"adding one FC layer", 6, "6"},
        {"adding two FC layers", 7, "7"},
        {"adding two LT layers", 7, "lt"}};
    for (const auto& [label, layers, key] : rows) {
      const Score& sc = s.at(key);
      // LT layers are the scale/shift transforms and add no parameters
      const std::size_t reference_layers = key == "lt" ? 5 : layers;
      t.add_row({label, std::to_string(layers), format_optional(sc.psnr),
                 std::to_string(reference_param_count(reference_layers)), std::to_string(sc.trained_parameters)});
    }
    return t;
  }
  // t11_norm
  return method_table(s, {{"input [0, 255]", "in_0_255"},
                          {"input normalization [-1, 1]", "baseline"},
                          {"input normalization [-5, 5]", "in_-5_5"},
                          {"output [0, 255]", "out_0_255"},
                          {"output normalization [-1, 1]", "baseline"},
                          {"output normalization (adaptive)", "out_adaptive"}});
}

}  // namespace ssinr::harness
