#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ctrec/image.hpp"
#include "ctrec/phog.hpp"

namespace ctrec {

// 5x7 monospaced bitmap glyphs for A-Z and 0-9; each row is 5 bits,
// MSB = leftmost column.
bool font_glyph(char ch, const std::uint8_t** rows);

// Text/background coloring for one corpus regime. Background pixels
// alternate bg1/bg2 in 2x2 checker blocks; text pixels use text1/text2 at
// the same parity. The pairs are chosen so both are equal in the target
// channel (solid text on a flat background there) while the checker keeps
// every other usable channel heavily textured.
struct ContrastRegime {
  Channel target = Channel::G;
  std::array<std::uint8_t, 3> bg1{}, bg2{};
  std::array<std::uint8_t, 3> text1{}, text2{};
};

// The four frozen desk regimes (targets G, B, Cr, V).
const std::vector<ContrastRegime>& desk_regimes();

struct NoiseSpec {
  enum class Kind { None, Gaussian, SaltPepper, Speckle };
  Kind kind = Kind::None;
  double level = 0.0;  // percent, in [0, 30]
};

struct CorpusSpec {
  std::uint64_t seed = 1;
  std::string charset;
  std::vector<std::string> lexicon;
  int count = 1;
  std::vector<ContrastRegime> regimes;
  NoiseSpec noise;
  double resolution_scale = 1.0;
  double baseline_amplitude = 0.0;  // sinusoidal vertical offset, px
};

// Deterministic spec for the acceptance-scale corpus: charset A-J,
// 50-word lexicon, four channel-targeted regimes, 4 words per lexicon
// entry (one per regime) -> 200 images.
CorpusSpec desk_corpus_spec(std::uint64_t seed);

struct RenderResult {
  ImageRGB image;
  std::vector<std::uint8_t> mask;       // 1 = text pixel
  std::array<double, 9> contrast{};     // per-channel |mean text - mean bg|
};

// Deterministic integer rendering of one word under a regime.
RenderResult render_word(const std::string& text, const ContrastRegime& regime,
                         std::uint64_t seed, double baseline_amplitude = 0.0);

ImageRGB apply_noise(const ImageRGB& img, const NoiseSpec& spec, std::uint64_t seed);

// Bilinear downsample to scale * height, then back to the pipeline height.
ImageRGB degrade_resolution(const ImageRGB& img, double scale);

struct ManifestRecord {
  int id = 0;
  std::string path;
  std::string text;
  Channel target = Channel::G;
  NoiseSpec noise;
  double scale = 1.0;
  std::uint64_t seed = 0;
  std::array<double, 9> contrast{};
};

struct Manifest {
  std::string spec_hash;
  std::vector<ManifestRecord> records;
};

// Writes PNGs plus a line-delimited manifest; regenerating from the same
// spec is byte-identical.
Manifest gen_corpus(const CorpusSpec& spec, const std::string& out_dir);

Manifest load_manifest(const std::string& path);
void save_manifest(const Manifest& m, const std::string& path);

std::string corpus_spec_hash(const CorpusSpec& spec);

}  // namespace ctrec
