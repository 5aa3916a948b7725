#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "ssinr/metrics.hpp"
#include "ssinr/signals.hpp"

namespace ssinr {
namespace {

namespace fs = std::filesystem;

const fs::path kFixtures = SSINR_FIXTURE_DIR;

fs::path temp_path(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "ssinr_signals_test";
  fs::create_directories(dir);
  return dir / name;
}

ImageU8 uniform_image(std::size_t side, std::size_t channels, std::uint8_t value) {
  return {side, side, channels, std::vector<std::uint8_t>(side * side * channels, value)};
}

ImageU8 random_image(std::uint64_t seed, std::size_t w, std::size_t h, std::size_t channels) {
  ImageU8 img{w, h, channels, {}};
  Rng rng(seed);
  for (std::size_t i = 0; i < w * h * channels; ++i) {
    img.pixels.push_back(static_cast<std::uint8_t>(rng.next_u64() % 256));
  }
  return img;
}

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const IngestError& e) {
    return e.what();
  }
  return "";
}

TEST(Grid, TwoByTwoCorners) {
  EXPECT_EQ(make_grid(2, 2), Matrix2D::from_rows({{-1, -1}, {-1, 1}, {1, -1}, {1, 1}}));
}

TEST(Grid, SingletonAxisSitsAtMidpoint) {
  EXPECT_EQ(make_grid(3, 1), Matrix2D::from_rows({{-1, 0}, {0, 0}, {1, 0}}));
}

TEST(Grid, Arity) {
  EXPECT_EQ(make_grid(256, 256).rows(), 65536u);
  EXPECT_EQ(make_line(16000).rows(), 16000u);
}

TEST(Grid, ZeroDimensionRejected) {
  EXPECT_THROW(make_grid(0, 3), ContractViolation);
  EXPECT_THROW(make_line(0), ContractViolation);
}

TEST(GridProperty, TransposeSwapsPairs) {
  for (std::size_t h = 1; h < 7; ++h) {
    for (std::size_t w = 1; w < 7; ++w) {
      const auto a = make_grid(h, w);
      const auto b = make_grid(w, h);
      for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
          EXPECT_EQ(a(y * w + x, 0), b(x * h + y, 1));
          EXPECT_EQ(a(y * w + x, 1), b(x * h + y, 0));
        }
      }
    }
  }
}

TEST(GridProperty, WithinDeclaredRange) {
  const ValueRange r{-3.0, 0.5};
  for (double v : make_grid(13, 5, r).data()) {
    EXPECT_GE(v, r.lo);
    EXPECT_LE(v, r.hi);
  }
}

TEST(ImageDataset, EndpointMapping) {
  const auto black = image_dataset(uniform_image(4, 3, 0), ChannelMode::Rgb);
  for (double v : black.targets.data()) EXPECT_EQ(v, -1.0);
  const auto white = image_dataset(uniform_image(4, 3, 255), ChannelMode::Rgb);
  for (double v : white.targets.data()) EXPECT_EQ(v, 1.0);
}

TEST(ImageDataset, MidGray) {
  const auto ds = image_dataset(uniform_image(4, 1, 128), ChannelMode::Gray);
  EXPECT_NEAR(ds.targets(0, 0), 0.00392, 1e-5);
  EXPECT_NEAR(ds.normalization.target_mean, 2.0 * 128 / 255 - 1, 1e-15);
}

TEST(ImageDataset, ShapeAndMetadata) {
  const auto ds = image_dataset(random_image(1, 5, 3, 3), ChannelMode::Rgb);
  EXPECT_EQ(ds.sample_count(), 15u);
  EXPECT_EQ(ds.out_dim(), 3u);
  EXPECT_EQ(ds.in_dim(), 2u);
  EXPECT_EQ(ds.image.height, 3u);
  EXPECT_EQ(ds.image.width, 5u);
}

TEST(ImageDataset, CustomRange) {
  const auto ds = image_dataset(uniform_image(2, 1, 255), ChannelMode::Gray, {0.0, 255.0});
  EXPECT_EQ(ds.targets(0, 0), 255.0);
}

TEST(ImageDataset, RgbModeNeedsThreeChannels) {
  EXPECT_THROW(image_dataset(uniform_image(2, 1, 3), ChannelMode::Rgb), IngestError);
}

TEST(Gray, LumaOfRgb) {
  const ImageU8 px{1, 1, 3, {255, 0, 0}};
  EXPECT_EQ(to_gray(px).pixels[0], 76);
  EXPECT_EQ(to_gray(ImageU8{1, 1, 3, {10, 10, 10}}).pixels[0], 10);
}

TEST(Crop, Center) {
  ImageU8 img{4, 4, 1, {}};
  for (int i = 0; i < 16; ++i) img.pixels.push_back(static_cast<std::uint8_t>(i));
  EXPECT_EQ(center_crop(img, 2).pixels, (std::vector<std::uint8_t>{5, 6, 9, 10}));
  EXPECT_THROW(center_crop(img, 5), ConfigError);
}

TEST(Export, ClampsOutOfRange) {
  const auto ds = image_dataset(uniform_image(1, 1, 0), ChannelMode::Gray);
  EXPECT_EQ(to_image(Matrix2D(1, 1, 1.5), ds).pixels[0], 255);
  EXPECT_EQ(to_image(Matrix2D(1, 1, -1.5), ds).pixels[0], 0);
}

TEST(Export, ShapeMismatch) {
  const auto ds = image_dataset(uniform_image(2, 1, 0), ChannelMode::Gray);
  EXPECT_THROW(to_image(Matrix2D(3, 1), ds), ContractViolation);
}

TEST(ExportProperty, NormalizationInverts) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    for (ValueRange r : {ValueRange{}, ValueRange{0.0, 1.0}, ValueRange{0.0, 255.0}, ValueRange{-7.5, 3.0}}) {
      const auto img = random_image(seed, 7, 5, 3);
      EXPECT_EQ(to_image(image_dataset(img, ChannelMode::Rgb, r).targets,
                         image_dataset(img, ChannelMode::Rgb, r)),
                img);
    }
  }
}

TEST(ImageIo, RoundTripEveryFormat) {
  const auto rgb = random_image(3, 9, 6, 3);
  const auto gray = random_image(4, 6, 9, 1);
  for (const char* name : {"rt.png", "rt.ppm"}) {
    write_image(rgb, temp_path(name));
    EXPECT_EQ(read_image(temp_path(name)), rgb) << name;
  }
  for (const char* name : {"rt_gray.png", "rt_gray.pgm"}) {
    write_image(gray, temp_path(name));
    EXPECT_EQ(read_image(temp_path(name)), gray) << name;
  }
}

TEST(ImageIo, FormatIsSniffedFromContent) {
  const auto img = random_image(5, 4, 4, 3);
  write_image(img, temp_path("sniff.png"));
  fs::copy_file(temp_path("sniff.png"), temp_path("sniff.dat"), fs::copy_options::overwrite_existing);
  EXPECT_EQ(read_image(temp_path("sniff.dat")), img);
}

TEST(ImageIo, FixtureLoadExportIsLossless) {
  for (const char* name : {"natural64.png", "gradient64.png", "small16.png"}) {
    const auto ds = load_image(kFixtures / name, ChannelMode::Rgb);
    const auto out = temp_path(std::string("export_") + name);
    export_image(ds.targets, ds, out);
    EXPECT_EQ(read_image(out), read_image(kFixtures / name)) << name;
  }
}

TEST(ImageIo, ReloadedMetricsWithinQuantization) {
  const auto ds = load_image(kFixtures / "natural64.png", ChannelMode::Rgb);
  Matrix2D pred = ds.targets;
  Rng rng(6);
  for (double& v : pred.data()) v = std::clamp(v + (rng.next_unit() - 0.5) * 0.05, -1.0, 1.0);
  const auto out = temp_path("quant.png");
  export_image(pred, ds, out);
  const auto reloaded = load_image(out, ChannelMode::Rgb).targets;
  const auto unit = [](const Matrix2D& m) { return rescale_to_unit(m, -1.0, 1.0); };
  const double step = 0.5 / 255.0;
  double max_dev = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    max_dev = std::max(max_dev, std::abs(unit(pred).data()[i] - unit(reloaded).data()[i]));
  }
  EXPECT_LE(max_dev, step + 1e-12);
  const double rmse_mem = std::sqrt(mean_squared_error(unit(pred), unit(ds.targets)));
  const double rmse_disk = std::sqrt(mean_squared_error(unit(reloaded), unit(ds.targets)));
  EXPECT_LE(std::abs(rmse_mem - rmse_disk), step);
}

TEST(ImageIo, Errors) {
  const auto bogus = temp_path("bogus.png");
  std::ofstream(bogus, std::ios::binary) << "hello world, not an image";
  EXPECT_NE(error_of([&] { read_image(bogus); }).find("unsupported image format"), std::string::npos);

  const auto wide = temp_path("wide.pgm");
  std::ofstream(wide, std::ios::binary) << "P5\n1 1\n65535\n\x01\x02";
  EXPECT_NE(error_of([&] { read_image(wide); }).find("bit depth"), std::string::npos);

  const auto ascii = temp_path("ascii.ppm");
  std::ofstream(ascii, std::ios::binary) << "P3\n1 1\n255\n1 2 3\n";
  EXPECT_NE(error_of([&] { read_image(ascii); }).find("P3"), std::string::npos);

  const auto short_raster = temp_path("short.ppm");
  std::ofstream(short_raster, std::ios::binary) << "P6\n2 2\n255\n\x01\x02";
  EXPECT_NE(error_of([&] { read_image(short_raster); }).find("truncated"), std::string::npos);

  EXPECT_THROW(read_image(temp_path("missing.png")), IngestError);
}

TEST(Audio, FixtureArityAndRange) {
  const auto ds = load_audio(kFixtures / "chord.wav");
  EXPECT_EQ(ds.audio.sample_rate, 8000u);
  EXPECT_EQ(ds.sample_count(), 4000u);
  EXPECT_EQ(ds.coords(0, 0), -1.0);
  EXPECT_EQ(ds.coords(3999, 0), 1.0);
  for (double v : ds.targets.data()) {
    EXPECT_GE(v, -1.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Audio, OneSecondArityAndTruncation) {
  PcmAudio a{16000, std::vector<std::int16_t>(20000)};
  EXPECT_EQ(audio_dataset(a, 1.0).sample_count(), 16000u);
  EXPECT_EQ(audio_dataset(a).sample_count(), 20000u);
}

TEST(Audio, Endpoints) {
  const auto ds = audio_dataset(PcmAudio{8000, {-32768, 0, 32767}});
  EXPECT_EQ(ds.targets(0, 0), -1.0);
  EXPECT_EQ(ds.targets(2, 0), 1.0);
  EXPECT_LE(std::abs(ds.targets(1, 0)), 2.0 / 65535.0);
}

TEST(Audio, SilenceWithinOneStep) {
  const auto ds = audio_dataset(PcmAudio{8000, std::vector<std::int16_t>(100)});
  for (double v : ds.targets.data()) EXPECT_LE(std::abs(v), 2.0 / 65535.0);
}

TEST(Audio, WavRoundTrip) {
  PcmAudio a{11025, {}};
  Rng rng(2);
  for (int i = 0; i < 500; ++i) a.samples.push_back(static_cast<std::int16_t>(rng.next_u64()));
  write_wav(a, temp_path("rt.wav"));
  const auto back = read_wav(temp_path("rt.wav"));
  EXPECT_EQ(back.sample_rate, a.sample_rate);
  EXPECT_EQ(back.samples, a.samples);
  const auto ds = audio_dataset(a);
  EXPECT_EQ(to_audio(ds.targets, ds).samples, a.samples);
}

void put16(std::string& s, std::uint16_t v) { s.append({char(v & 0xff), char(v >> 8)}); }
void put32(std::string& s, std::uint32_t v) {
  put16(s, v & 0xffff);
  put16(s, v >> 16);
}

std::string wav_bytes(std::uint16_t format, std::uint16_t channels, std::uint16_t bits) {
  std::string fmt, out;
  put16(fmt, format);
  put16(fmt, channels);
  put32(fmt, 8000);
  put32(fmt, 8000 * channels * bits / 8);
  put16(fmt, channels * bits / 8);
  put16(fmt, bits);
  const std::string data(8, '\0');
  out = "RIFF";
  put32(out, static_cast<std::uint32_t>(4 + 8 + fmt.size() + 8 + data.size()));
  out += "WAVEfmt ";
  put32(out, static_cast<std::uint32_t>(fmt.size()));
  out += fmt + "data";
  put32(out, static_cast<std::uint32_t>(data.size()));
  return out + data;
}

TEST(Audio, RejectsStereoAndNonPcm) {
  const auto stereo = temp_path("stereo.wav");
  std::ofstream(stereo, std::ios::binary) << wav_bytes(1, 2, 16);
  EXPECT_NE(error_of([&] { read_wav(stereo); }).find("stereo"), std::string::npos);

  const auto fl = temp_path("float.wav");
  std::ofstream(fl, std::ios::binary) << wav_bytes(3, 1, 32);
  EXPECT_NE(error_of([&] { read_wav(fl); }).find("non-PCM"), std::string::npos);

  const auto eight = temp_path("eight.wav");
  std::ofstream(eight, std::ios::binary) << wav_bytes(1, 1, 8);
  EXPECT_NE(error_of([&] { read_wav(eight); }).find("16-bit"), std::string::npos);

  const auto mono = temp_path("mono.wav");
  std::ofstream(mono, std::ios::binary) << wav_bytes(1, 1, 16);
  EXPECT_EQ(read_wav(mono).samples.size(), 4u);

  const auto junk = temp_path("junk.wav");
  std::ofstream(junk, std::ios::binary) << "definitely not riff";
  EXPECT_THROW(read_wav(junk), IngestError);
}

}  // namespace
}  // namespace ssinr
