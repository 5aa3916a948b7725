#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ssinr/numerics.hpp"

namespace ssinr {

enum class SignalKind { Image, Audio };
enum class ChannelMode { Rgb, Gray };

std::string to_string(SignalKind kind);
std::string to_string(ChannelMode mode);
ChannelMode parse_channel_mode(const std::string& text);

struct ValueRange {
  double lo = -1.0;
  double hi = 1.0;

  double span() const { return hi - lo; }
  bool operator==(const ValueRange&) const = default;
};

struct ImageShape {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;
};

struct AudioShape {
  std::size_t sample_count = 0;
  std::uint32_t sample_rate = 0;
};

// Everything needed to map normalized values back to file units.
struct Normalization {
  ValueRange input;     // coordinate range
  ValueRange output;    // target range
  ValueRange raw;       // file units mapped onto `output`
  double target_mean = 0.0;
};

struct SignalDataset {
  SignalKind kind = SignalKind::Image;
  Matrix2D coords;   // N × in_dim
  Matrix2D targets;  // N × out_dim
  ImageShape image;
  AudioShape audio;
  Normalization normalization;

  std::size_t in_dim() const { return coords.cols(); }
  std::size_t out_dim() const { return targets.cols(); }
  std::size_t sample_count() const { return coords.rows(); }
};

// 8-bit interleaved pixels, row-major.
struct ImageU8 {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t channels = 0;  // 1 or 3
  std::vector<std::uint8_t> pixels;

  bool operator==(const ImageU8&) const = default;
};

struct PcmAudio {
  std::uint32_t sample_rate = 0;
  std::vector<std::int16_t> samples;
};

/// Row-major grid of (y, x) pairs, each axis linearly spaced over `range`
/// inclusive. A singleton axis sits at the middle of the range.
Matrix2D make_grid(std::size_t height, std::size_t width, ValueRange range = {});
Matrix2D make_line(std::size_t count, ValueRange range = {});

// PNG (8-bit), binary PPM (P6) or PGM (P5), chosen by file content.
ImageU8 read_image(const std::filesystem::path& path);
// PNG or PPM/PGM, chosen by extension.
void write_image(const ImageU8& image, const std::filesystem::path& path);

ImageU8 center_crop(const ImageU8& image, std::size_t side);
ImageU8 to_gray(const ImageU8& image);

PcmAudio read_wav(const std::filesystem::path& path);
void write_wav(const PcmAudio& audio, const std::filesystem::path& path);

SignalDataset image_dataset(const ImageU8& image, ChannelMode channels,
                            ValueRange output_range = {}, ValueRange coord_range = {});
SignalDataset load_image(const std::filesystem::path& path, ChannelMode channels,
                         ValueRange output_range = {}, ValueRange coord_range = {},
                         std::optional<std::size_t> crop = std::nullopt);

SignalDataset audio_dataset(const PcmAudio& audio, double max_seconds = 0.0,
                            ValueRange coord_range = {});
// max_seconds <= 0 keeps the whole clip.
SignalDataset load_audio(const std::filesystem::path& path, double max_seconds = 0.0,
                         ValueRange coord_range = {});

// Inverse normalization with clamping to the 8-bit range. Never used during training.
ImageU8 to_image(const Matrix2D& pred, const SignalDataset& meta);
PcmAudio to_audio(const Matrix2D& pred, const SignalDataset& meta);
void export_image(const Matrix2D& pred, const SignalDataset& meta,
                  const std::filesystem::path& path);
void export_audio(const Matrix2D& pred, const SignalDataset& meta,
                  const std::filesystem::path& path);

}  // namespace ssinr
