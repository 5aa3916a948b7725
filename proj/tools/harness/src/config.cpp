#include "ssinr/harness/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <set>

namespace ssinr::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + where + key + "'");
  }
}

template <typename T>
T get(const json& obj, const std::string& key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("invalid value for '" + where + key + "'");
  }
}

template <typename T>
void read(const json& obj, const std::string& key, const std::string& where, T& out) {
  if (obj.contains(key)) out = get<T>(obj, key, where);
}

ValueRange read_range(const json& obj, const std::string& key, const std::string& where,
                      ValueRange fallback) {
  if (!obj.contains(key)) return fallback;
  const auto v = get<std::vector<double>>(obj, key, where);
  if (v.size() != 2 || !(v[0] < v[1])) {
    throw ConfigError("'" + where + key + "' must be [lo, hi] with lo < hi");
  }
  return {v[0], v[1]};
}

}  // namespace

double ss_default_scale(BackboneKind kind) {
  switch (kind) {
    case BackboneKind::ReluPe: return 0.3;
    case BackboneKind::Siren: return 5.0;
    case BackboneKind::Finer: return 2.0;
  }
  return 1.0;
}

SignalKind resolve_signal_kind(const RunConfig& config) {
  if (config.signal) return *config.signal;
  auto ext = fs::path(config.input).extension().string();
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext == ".wav" ? SignalKind::Audio : SignalKind::Image;
}

RunConfig resolved(const RunConfig& config) {
  RunConfig out = config;
  if (out.input_transform == "ss-default") {
    std::ostringstream os;
    os << "scale:" << ss_default_scale(out.backbone.kind);
    out.input_transform = os.str();
  }
  out.signal = resolve_signal_kind(config);
  return out;
}

TransformSpec resolve_transform(const RunConfig& config) {
  const RunConfig r = resolved(config);
  TransformSpec spec;
  spec.input = parse_input_transform(r.input_transform, r.kernel);
  spec.output = parse_output_transform(r.output_transform, r.kernel);
  spec.per_channel_shift = r.per_channel_shift;
  spec.validate();
  return spec;
}

SignalDataset load_dataset(const RunConfig& config) {
  if (config.input.empty()) throw ConfigError("no input file given");
  if (resolve_signal_kind(config) == SignalKind::Audio) {
    return load_audio(config.input, config.max_seconds, config.coord_range);
  }
  return load_image(config.input, config.channels, config.output_range, config.coord_range,
                    config.crop);
}

BackboneConfig dataset_backbone(const RunConfig& config, const SignalDataset& dataset) {
  BackboneConfig b = config.backbone;
  b.in_dim = dataset.in_dim();
  b.out_dim = dataset.out_dim();
  return b;
}

json to_json(const BackboneConfig& b) {
  return {{"kind", to_string(b.kind)},   {"hidden_layers", b.hidden_layers},
          {"width", b.width},            {"omega0", b.omega0},
          {"pe_bands", b.pe_bands}};
}

json to_json(const TrainConfig& t) {
  return {{"epochs", t.epochs},
          {"learning_rate", t.learning_rate},
          {"adam_beta1", t.adam_beta1},
          {"adam_beta2", t.adam_beta2},
          {"adam_eps", t.adam_eps},
          {"batch_size", t.batch_size},
          {"seed", t.seed},
          {"precision", to_string(t.precision)},
          {"ssim_every", t.ssim_every}};
}

json to_json(const RunConfig& c) {
  json j;
  j["input"] = c.input;
  j["signal"] = c.signal ? json(to_string(*c.signal)) : json(nullptr);
  j["channels"] = to_string(c.channels);
  j["crop"] = c.crop ? json(*c.crop) : json(nullptr);
  j["output_range"] = {c.output_range.lo, c.output_range.hi};
  j["coord_range"] = {c.coord_range.lo, c.coord_range.hi};
  j["max_seconds"] = c.max_seconds;
  j["backbone"] = to_json(c.backbone);
  j["transform"] = {{"input", c.input_transform},
                    {"output", c.output_transform},
                    {"per_channel_shift", c.per_channel_shift},
                    {"kernel",
                     {{"a", c.kernel.a},
                      {"c", c.kernel.c},
                      {"degree", c.kernel.degree},
                      {"sigma", c.kernel.sigma},
                      {"gamma", c.kernel.gamma}}}};
  j["train"] = to_json(c.train);
  j["output_dir"] = c.output_dir;
  return j;
}

RunConfig run_config_from_json(const json& doc, RunConfig c) {
  reject_unknown(doc,
                 {"input", "signal", "channels", "crop", "output_range", "coord_range",
                  "max_seconds", "backbone", "transform", "train", "output_dir"},
                 "");
  read(doc, "input", "", c.input);
  if (doc.contains("signal")) {
    if (doc["signal"].is_null()) {
      c.signal.reset();
    } else {
      const auto s = get<std::string>(doc, "signal", "");
      if (s == "image") c.signal = SignalKind::Image;
      else if (s == "audio") c.signal = SignalKind::Audio;
      else throw ConfigError("'signal' must be image or audio, got '" + s + "'");
    }
  }
  if (doc.contains("channels")) c.channels = parse_channel_mode(get<std::string>(doc, "channels", ""));
  if (doc.contains("crop")) {
    if (doc["crop"].is_null()) c.crop.reset();
    else c.crop = get<std::size_t>(doc, "crop", "");
  }
  c.output_range = read_range(doc, "output_range", "", c.output_range);
  c.coord_range = read_range(doc, "coord_range", "", c.coord_range);
  read(doc, "max_seconds", "", c.max_seconds);
  read(doc, "output_dir", "", c.output_dir);

  if (doc.contains("backbone")) {
    const json& b = doc["backbone"];
    reject_unknown(b, {"kind", "hidden_layers", "width", "omega0", "pe_bands"}, "backbone.");
    if (b.contains("kind")) c.backbone.kind = parse_backbone_kind(get<std::string>(b, "kind", "backbone."));
    read(b, "hidden_layers", "backbone.", c.backbone.hidden_layers);
    read(b, "width", "backbone.", c.backbone.width);
    read(b, "omega0", "backbone.", c.backbone.omega0);
    read(b, "pe_bands", "backbone.", c.backbone.pe_bands);
  }
  if (doc.contains("transform")) {
    const json& t = doc["transform"];
    reject_unknown(t, {"input", "output", "per_channel_shift", "kernel"}, "transform.");
    read(t, "input", "transform.", c.input_transform);
    read(t, "output", "transform.", c.output_transform);
    read(t, "per_channel_shift", "transform.", c.per_channel_shift);
    if (t.contains("kernel")) {
      const json& k = t["kernel"];
      reject_unknown(k, {"a", "c", "degree", "sigma", "gamma"}, "transform.kernel.");
      read(k, "a", "transform.kernel.", c.kernel.a);
      read(k, "c", "transform.kernel.", c.kernel.c);
      read(k, "degree", "transform.kernel.", c.kernel.degree);
      read(k, "sigma", "transform.kernel.", c.kernel.sigma);
      read(k, "gamma", "transform.kernel.", c.kernel.gamma);
    }
  }
  if (doc.contains("train")) {
    const json& t = doc["train"];
    reject_unknown(t,
                   {"epochs", "learning_rate", "adam_beta1", "adam_beta2", "adam_eps",
                    "batch_size", "seed", "precision", "ssim_every"},
                   "train.");
    read(t, "epochs", "train.", c.train.epochs);
    read(t, "learning_rate", "train.", c.train.learning_rate);
    read(t, "adam_beta1", "train.", c.train.adam_beta1);
    read(t, "adam_beta2", "train.", c.train.adam_beta2);
    read(t, "adam_eps", "train.", c.train.adam_eps);
    read(t, "batch_size", "train.", c.train.batch_size);
    read(t, "seed", "train.", c.train.seed);
    if (t.contains("precision")) c.train.precision = parse_precision(get<std::string>(t, "precision", "train."));
    read(t, "ssim_every", "train.", c.train.ssim_every);
  }
  return c;
}

RunConfig load_run_config(const fs::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path.string() + "': " + e.what());
  }
  return run_config_from_json(doc, std::move(base));
}

}  // namespace ssinr::harness
