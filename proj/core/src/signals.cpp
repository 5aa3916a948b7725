#include "ssinr/signals.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

namespace ssinr {

namespace fs = std::filesystem;

namespace {

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::string lower_extension(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

ImageU8 decode_png(const fs::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.string().c_str())) {
    throw IngestError("PNG: " + std::string(image.message));
  }
  // 16-bit samples show up as a linear format.
  if (image.format & PNG_FORMAT_FLAG_LINEAR) {
    png_image_free(&image);
    throw IngestError("PNG: only 8-bit images are supported");
  }
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  ImageU8 out;
  out.width = image.width;
  out.height = image.height;
  out.channels = color ? 3 : 1;
  out.pixels.resize(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, out.pixels.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw IngestError("PNG: " + msg);
  }
  return out;
}

void encode_png(const ImageU8& img, const fs::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width);
  image.height = static_cast<png_uint_32>(img.height);
  image.format = img.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.string().c_str(), 0, img.pixels.data(), 0, nullptr)) {
    throw std::runtime_error("cannot write '" + path.string() + "': " + image.message);
  }
}

// Binary netpbm: P5 (gray) or P6 (RGB), maxval 255.
ImageU8 decode_netpbm(const std::vector<std::uint8_t>& bytes) {
  std::size_t pos = 2;
  auto next_token = [&]() -> std::string {
    while (pos < bytes.size()) {
      if (std::isspace(bytes[pos])) {
        ++pos;
      } else if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else {
        break;
      }
    }
    std::string tok;
    while (pos < bytes.size() && !std::isspace(bytes[pos])) tok.push_back(static_cast<char>(bytes[pos++]));
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos) {
      throw IngestError("netpbm: malformed header");
    }
    return tok;
  };
  ImageU8 out;
  out.channels = bytes[1] == '6' ? 3 : 1;
  out.width = std::stoul(next_token());
  out.height = std::stoul(next_token());
  const unsigned long maxval = std::stoul(next_token());
  if (maxval != 255) {
    throw IngestError("netpbm: unsupported bit depth (maxval " + std::to_string(maxval) +
                      ", expected 255)");
  }
  ++pos;  // single whitespace before the raster
  const std::size_t need = out.width * out.height * out.channels;
  if (out.width == 0 || out.height == 0 || pos + need > bytes.size()) {
    throw IngestError("netpbm: truncated raster");
  }
  out.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                    bytes.begin() + static_cast<std::ptrdiff_t>(pos + need));
  return out;
}

void encode_netpbm(const ImageU8& img, const fs::path& path) {
  const std::string header = std::string(img.channels == 3 ? "P6" : "P5") + "\n" +
                             std::to_string(img.width) + " " + std::to_string(img.height) +
                             "\n255\n";
  std::vector<std::uint8_t> bytes(header.begin(), header.end());
  bytes.insert(bytes.end(), img.pixels.begin(), img.pixels.end());
  write_bytes(path, bytes);
}

std::uint32_t read_u32(const std::vector<std::uint8_t>& b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) | static_cast<std::uint32_t>(b[at + 1]) << 8 |
         static_cast<std::uint32_t>(b[at + 2]) << 16 | static_cast<std::uint32_t>(b[at + 3]) << 24;
}

std::uint16_t read_u16(const std::vector<std::uint8_t>& b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | b[at + 1] << 8);
}

void put_u32(std::vector<std::uint8_t>& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u16(std::vector<std::uint8_t>& b, std::uint16_t v) {
  b.push_back(static_cast<std::uint8_t>(v));
  b.push_back(static_cast<std::uint8_t>(v >> 8));
}

double to_normalized(double raw, ValueRange from, ValueRange to) {
  return to.lo + (raw - from.lo) / from.span() * to.span();
}

double from_normalized(double v, ValueRange from, ValueRange to) {
  return from.lo + (v - to.lo) / to.span() * from.span();
}

void require_range(ValueRange r, const char* what) {
  if (!(r.hi > r.lo) || !std::isfinite(r.lo) || !std::isfinite(r.hi)) {
    throw ConfigError(std::string(what) + " range must satisfy lo < hi");
  }
}

double mean_of(const Matrix2D& m) {
  double sum = 0.0;
  for (double v : m.data()) sum += v;
  return m.empty() ? 0.0 : sum / static_cast<double>(m.size());
}

}  // namespace

std::string to_string(SignalKind kind) { return kind == SignalKind::Image ? "image" : "audio"; }
std::string to_string(ChannelMode mode) { return mode == ChannelMode::Rgb ? "rgb" : "gray"; }

ChannelMode parse_channel_mode(const std::string& text) {
  if (text == "rgb") return ChannelMode::Rgb;
  if (text == "gray" || text == "grey") return ChannelMode::Gray;
  throw ConfigError("unknown channel mode '" + text + "' (expected rgb or gray)");
}

Matrix2D make_line(std::size_t count, ValueRange range) {
  if (count == 0) throw ContractViolation("make_line: count must be >= 1");
  Matrix2D out(count, 1);
  for (std::size_t i = 0; i < count; ++i) {
    out(i, 0) = count == 1 ? 0.5 * (range.lo + range.hi)
                           : range.lo + range.span() * static_cast<double>(i) /
                                            static_cast<double>(count - 1);
  }
  return out;
}

Matrix2D make_grid(std::size_t height, std::size_t width, ValueRange range) {
  if (height == 0 || width == 0) {
    throw ContractViolation("make_grid: zero dimension " + std::to_string(height) + "x" +
                            std::to_string(width));
  }
  const Matrix2D ys = make_line(height, range);
  const Matrix2D xs = make_line(width, range);
  Matrix2D out(height * width, 2);
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      out(y * width + x, 0) = ys(y, 0);
      out(y * width + x, 1) = xs(x, 0);
    }
  }
  return out;
}

ImageU8 read_image(const fs::path& path) {
  const auto bytes = read_bytes(path);
  static constexpr std::uint8_t kPngSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (bytes.size() >= 8 && std::equal(std::begin(kPngSig), std::end(kPngSig), bytes.begin())) {
    return decode_png(path);
  }
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '6')) {
    return decode_netpbm(bytes);
  }
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] >= '1' && bytes[1] <= '4') {
    throw IngestError("netpbm: ASCII/bitmap variant P" + std::string(1, bytes[1]) +
                      " is not supported");
  }
  throw IngestError("unsupported image format in '" + path.string() + "' (expected PNG, PPM or PGM)");
}

void write_image(const ImageU8& image, const fs::path& path) {
  if (image.pixels.size() != image.width * image.height * image.channels ||
      (image.channels != 1 && image.channels != 3)) {
    throw ContractViolation("write_image: inconsistent image buffer");
  }
  const std::string ext = lower_extension(path);
  if (ext == ".png") {
    encode_png(image, path);
  } else if (ext == ".ppm" || ext == ".pgm" || ext == ".pnm") {
    encode_netpbm(image, path);
  } else {
    throw ConfigError("unsupported image extension '" + ext + "'");
  }
}

ImageU8 center_crop(const ImageU8& image, std::size_t side) {
  if (side == 0 || side > image.width || side > image.height) {
    throw ConfigError("crop " + std::to_string(side) + " does not fit a " +
                      std::to_string(image.height) + "x" + std::to_string(image.width) + " image");
  }
  ImageU8 out;
  out.width = out.height = side;
  out.channels = image.channels;
  const std::size_t y0 = (image.height - side) / 2;
  const std::size_t x0 = (image.width - side) / 2;
  for (std::size_t y = 0; y < side; ++y) {
    const auto* src = image.pixels.data() + ((y0 + y) * image.width + x0) * image.channels;
    out.pixels.insert(out.pixels.end(), src, src + side * image.channels);
  }
  return out;
}

ImageU8 to_gray(const ImageU8& image) {
  if (image.channels == 1) return image;
  ImageU8 out;
  out.width = image.width;
  out.height = image.height;
  out.channels = 1;
  out.pixels.resize(image.width * image.height);
  for (std::size_t i = 0; i < out.pixels.size(); ++i) {
    const auto* p = image.pixels.data() + 3 * i;
    const double luma = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
    out.pixels[i] = static_cast<std::uint8_t>(std::clamp(std::lround(luma), 0L, 255L));
  }
  return out;
}

PcmAudio read_wav(const fs::path& path) {
  const auto b = read_bytes(path);
  if (b.size() < 12 || std::memcmp(b.data(), "RIFF", 4) != 0 || std::memcmp(b.data() + 8, "WAVE", 4) != 0) {
    throw IngestError("WAV: '" + path.string() + "' is not a RIFF/WAVE file");
  }
  bool have_fmt = false;
  std::uint16_t channels = 0;
  std::uint16_t bits = 0;
  PcmAudio out;
  std::size_t pos = 12;
  while (pos + 8 <= b.size()) {
    const std::string id(reinterpret_cast<const char*>(b.data() + pos), 4);
    const std::size_t size = read_u32(b, pos + 4);
    const std::size_t body = pos + 8;
    if (body + size > b.size()) throw IngestError("WAV: chunk '" + id + "' runs past end of file");
    if (id == "fmt ") {
      if (size < 16) throw IngestError("WAV: short fmt chunk");
      std::uint16_t format = read_u16(b, body);
      channels = read_u16(b, body + 2);
      out.sample_rate = read_u32(b, body + 4);
      bits = read_u16(b, body + 14);
      if (format == 0xFFFE && size >= 26) format = read_u16(b, body + 24);
      if (format != 1) throw IngestError("WAV: non-PCM encoding (format tag " + std::to_string(format) + ")");
      if (channels != 1) {
        throw IngestError("WAV: expected mono, got " + std::to_string(channels) + " channels" +
                          (channels == 2 ? " (stereo)" : ""));
      }
      if (bits != 16) throw IngestError("WAV: expected 16-bit PCM, got " + std::to_string(bits) + "-bit");
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw IngestError("WAV: data chunk before fmt chunk");
      out.samples.resize(size / 2);
      for (std::size_t i = 0; i < out.samples.size(); ++i) {
        out.samples[i] = static_cast<std::int16_t>(read_u16(b, body + 2 * i));
      }
      return out;
    }
    pos = body + size + (size & 1);
  }
  throw IngestError("WAV: no data chunk");
}

void write_wav(const PcmAudio& audio, const fs::path& path) {
  const auto data_bytes = static_cast<std::uint32_t>(audio.samples.size() * 2);
  std::vector<std::uint8_t> b;
  b.reserve(44 + data_bytes);
  b.insert(b.end(), {'R', 'I', 'F', 'F'});
  put_u32(b, 36 + data_bytes);
  b.insert(b.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  put_u32(b, 16);
  put_u16(b, 1);
  put_u16(b, 1);
  put_u32(b, audio.sample_rate);
  put_u32(b, audio.sample_rate * 2);
  put_u16(b, 2);
  put_u16(b, 16);
  b.insert(b.end(), {'d', 'a', 't', 'a'});
  put_u32(b, data_bytes);
  for (std::int16_t s : audio.samples) put_u16(b, static_cast<std::uint16_t>(s));
  write_bytes(path, b);
}

SignalDataset image_dataset(const ImageU8& source, ChannelMode channels, ValueRange output_range,
                            ValueRange coord_range) {
  require_range(output_range, "output");
  require_range(coord_range, "coordinate");
  const ImageU8 image = channels == ChannelMode::Gray ? to_gray(source) : source;
  if (channels == ChannelMode::Rgb && image.channels != 3) {
    throw IngestError("image has " + std::to_string(image.channels) +
                      " channel(s); use gray mode for single-channel sources");
  }
  SignalDataset ds;
  ds.kind = SignalKind::Image;
  ds.image = {image.height, image.width, image.channels};
  ds.coords = make_grid(image.height, image.width, coord_range);
  ds.normalization.input = coord_range;
  ds.normalization.output = output_range;
  ds.normalization.raw = {0.0, 255.0};
  ds.targets = Matrix2D(image.height * image.width, image.channels);
  auto t = ds.targets.data();
  for (std::size_t i = 0; i < t.size(); ++i) {
    t[i] = to_normalized(image.pixels[i], ds.normalization.raw, output_range);
  }
  ds.normalization.target_mean = mean_of(ds.targets);
  return ds;
}

SignalDataset load_image(const fs::path& path, ChannelMode channels, ValueRange output_range,
                         ValueRange coord_range, std::optional<std::size_t> crop) {
  ImageU8 image = read_image(path);
  if (crop) image = center_crop(image, *crop);
  return image_dataset(image, channels, output_range, coord_range);
}

SignalDataset audio_dataset(const PcmAudio& audio, double max_seconds, ValueRange coord_range) {
  require_range(coord_range, "coordinate");
  std::size_t count = audio.samples.size();
  if (max_seconds > 0.0) {
    count = std::min(count, static_cast<std::size_t>(max_seconds * audio.sample_rate));
  }
  if (count == 0) throw IngestError("WAV: no samples");
  SignalDataset ds;
  ds.kind = SignalKind::Audio;
  ds.audio = {count, audio.sample_rate};
  ds.coords = make_line(count, coord_range);
  ds.normalization.input = coord_range;
  ds.normalization.output = {-1.0, 1.0};
  ds.normalization.raw = {-32768.0, 32767.0};
  ds.targets = Matrix2D(count, 1);
  for (std::size_t i = 0; i < count; ++i) {
    ds.targets(i, 0) = to_normalized(audio.samples[i], ds.normalization.raw, ds.normalization.output);
  }
  ds.normalization.target_mean = mean_of(ds.targets);
  return ds;
}

SignalDataset load_audio(const fs::path& path, double max_seconds, ValueRange coord_range) {
  return audio_dataset(read_wav(path), max_seconds, coord_range);
}

ImageU8 to_image(const Matrix2D& pred, const SignalDataset& meta) {
  if (meta.kind != SignalKind::Image || pred.rows() != meta.image.height * meta.image.width ||
      pred.cols() != meta.image.channels) {
    throw ContractViolation("export_image: prediction " + pred.shape_string() +
                            " does not match image metadata");
  }
  ImageU8 out;
  out.width = meta.image.width;
  out.height = meta.image.height;
  out.channels = meta.image.channels;
  out.pixels.resize(pred.size());
  auto p = pred.data();
  for (std::size_t i = 0; i < p.size(); ++i) {
    double v = from_normalized(p[i], meta.normalization.raw, meta.normalization.output);
    if (std::isnan(v)) v = 0.0;
    out.pixels[i] = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
  }
  return out;
}

PcmAudio to_audio(const Matrix2D& pred, const SignalDataset& meta) {
  if (meta.kind != SignalKind::Audio || pred.rows() != meta.audio.sample_count || pred.cols() != 1) {
    throw ContractViolation("export_audio: prediction " + pred.shape_string() +
                            " does not match audio metadata");
  }
  PcmAudio out;
  out.sample_rate = meta.audio.sample_rate;
  out.samples.resize(pred.rows());
  for (std::size_t i = 0; i < pred.rows(); ++i) {
    double v = from_normalized(pred(i, 0), meta.normalization.raw, meta.normalization.output);
    if (std::isnan(v)) v = 0.0;
    out.samples[i] = static_cast<std::int16_t>(std::lround(std::clamp(v, -32768.0, 32767.0)));
  }
  return out;
}

void export_image(const Matrix2D& pred, const SignalDataset& meta, const fs::path& path) {
  write_image(to_image(pred, meta), path);
}

void export_audio(const Matrix2D& pred, const SignalDataset& meta, const fs::path& path) {
  write_wav(to_audio(pred, meta), path);
}

}  // namespace ssinr
