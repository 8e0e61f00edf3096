#include "ctrec/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ctrec/rng.hpp"

namespace ctrec {

namespace {

constexpr int kGlyphW = 5, kGlyphH = 7;
constexpr int kScale = 4;
constexpr int kCharSpacing = 4;
constexpr int kSideMargin = 8;
constexpr int kTopMargin = 6;

}  // namespace

const std::vector<ContrastRegime>& desk_regimes() {
  static const std::vector<ContrastRegime> regimes = {
      {Channel::G, {240, 70, 240}, {10, 70, 10}, {240, 155, 240}, {10, 155, 10}},
      {Channel::B, {240, 240, 70}, {10, 10, 70}, {240, 240, 190}, {10, 10, 190}},
      {Channel::Cr, {20, 70, 107}, {120, 180, 155}, {118, 20, 107}, {218, 130, 155}},
      {Channel::V, {200, 30, 30}, {30, 200, 120}, {80, 12, 12}, {12, 80, 48}},
  };
  return regimes;
}

CorpusSpec desk_corpus_spec(std::uint64_t seed) {
  CorpusSpec spec;
  spec.seed = seed;
  spec.charset = "ABCDEFGHIJ";
  spec.lexicon = {
      "HGJD",   "AGJEEB", "BIF",    "FIHGBB", "ECGB",   "CFCG",   "FFFAA",  "IHJ",    "JFJD",
      "GCG",    "HDJBH",  "EFHJE",  "AFFJF",  "ICB",    "EFAHEJ", "BDEJJ",  "EHHAD",  "FHCFJI",
      "CIDAFE", "DAJGJ",  "EDEAF",  "EAJJ",   "FCDH",   "CJF",    "DBAGB",  "BIBCBG", "GIHGG",
      "BGA",    "DFGICJ", "GAJFDD", "HIDDE",  "CBIG",   "GJDFB",  "DJAEIE", "CHIC",   "AJJDGH",
      "EBABA",  "GBDHGC", "EIB",    "HIE",    "CEEF",   "HHC",    "AFFD",   "AHH",    "CFD",
      "EJFJC",  "CGIBB",  "EIFAG",  "ABJ",    "GBBIAD"};
  spec.count = 200;
  spec.regimes = desk_regimes();
  return spec;
}

RenderResult render_word(const std::string& text, const ContrastRegime& regime,
                         std::uint64_t seed, double baseline_amplitude) {
  (void)seed;  // layout and colors are fully determined; seed is recorded only
  if (text.empty()) fail(Err::UnknownGlyph, "cannot render empty text");
  std::vector<const std::uint8_t*> glyphs;
  for (char ch : text) {
    const std::uint8_t* rows;
    if (!font_glyph(ch, &rows)) fail(Err::UnknownGlyph, std::string("no glyph for '") + ch + "'");
    glyphs.push_back(rows);
  }

  const int n = static_cast<int>(text.size());
  const int width = 2 * kSideMargin + n * kGlyphW * kScale + (n - 1) * kCharSpacing;
  const int extra = baseline_amplitude > 0 ? static_cast<int>(std::ceil(baseline_amplitude)) : 0;
  const int height = kGlyphH * kScale + 2 * (kTopMargin + extra);

  RenderResult res;
  res.image.width = width;
  res.image.height = height;
  res.image.data.resize(static_cast<size_t>(width) * height * 3);
  res.mask.assign(static_cast<size_t>(width) * height, 0);

  // Background checker, 2x2 blocks.
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const auto& c = (((x >> 1) + (y >> 1)) & 1) ? regime.bg2 : regime.bg1;
      for (int k = 0; k < 3; ++k) res.image.at(x, y, k) = c[k];
    }
  }
  // Glyphs, same checker parity with the text pair.
  for (int ci = 0; ci < n; ++ci) {
    int gx0 = kSideMargin + ci * (kGlyphW * kScale + kCharSpacing);
    int dy = 0;
    if (baseline_amplitude > 0) {
      double cx = gx0 + kGlyphW * kScale / 2.0;
      dy = static_cast<int>(std::lround(baseline_amplitude * std::sin(2.0 * M_PI * cx / width)));
    }
    int gy0 = kTopMargin + extra + dy;
    for (int ry = 0; ry < kGlyphH; ++ry) {
      for (int rx = 0; rx < kGlyphW; ++rx) {
        if (!((glyphs[ci][ry] >> (kGlyphW - 1 - rx)) & 1)) continue;
        for (int sy = 0; sy < kScale; ++sy) {
          for (int sx = 0; sx < kScale; ++sx) {
            int x = gx0 + rx * kScale + sx;
            int y = gy0 + ry * kScale + sy;
            if (x < 0 || y < 0 || x >= width || y >= height) continue;
            const auto& c = (((x >> 1) + (y >> 1)) & 1) ? regime.text2 : regime.text1;
            for (int k = 0; k < 3; ++k) res.image.at(x, y, k) = c[k];
            res.mask[static_cast<size_t>(y) * width + x] = 1;
          }
        }
      }
    }
  }

  // Per-channel contrast between region means.
  ChannelSet planes = to_channel_set(res.image);
  for (int c = 0; c < kNumChannels; ++c) {
    double st = 0.0, sb = 0.0;
    long nt = 0, nb = 0;
    for (size_t i = 0; i < res.mask.size(); ++i) {
      if (res.mask[i]) {
        st += planes.planes[c].v[i];
        ++nt;
      } else {
        sb += planes.planes[c].v[i];
        ++nb;
      }
    }
    res.contrast[c] = std::fabs(st / std::max(1L, nt) - sb / std::max(1L, nb));
  }
  return res;
}

ImageRGB apply_noise(const ImageRGB& img, const NoiseSpec& spec, std::uint64_t seed) {
  if (spec.level < 0.0 || spec.level > 30.0)
    fail(Err::LevelOutOfRange, "noise level must be in [0,30] percent");
  if (spec.kind == NoiseSpec::Kind::None || spec.level == 0.0) return img;
  ImageRGB out = img;
  SplitMix64 rng(seed);
  const size_t n = static_cast<size_t>(img.width) * img.height;
  switch (spec.kind) {
    case NoiseSpec::Kind::Gaussian: {
      double sigma = spec.level / 100.0 * 255.0;
      for (size_t i = 0; i < n * 3; ++i) {
        double v = out.data[i] + sigma * rng.gaussian();
        out.data[i] = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
      }
      break;
    }
    case NoiseSpec::Kind::SaltPepper: {
      double p = spec.level / 100.0;
      for (size_t i = 0; i < n; ++i) {
        if (rng.uniform() < p) {
          std::uint8_t v = (rng.next() & 1) ? 255 : 0;
          out.data[i * 3] = out.data[i * 3 + 1] = out.data[i * 3 + 2] = v;
        }
      }
      break;
    }
    case NoiseSpec::Kind::Speckle: {
      // Uniform in +-level% * sqrt(3): relative std equals level%.
      double a = spec.level / 100.0 * std::sqrt(3.0);
      for (size_t i = 0; i < n * 3; ++i) {
        double u = rng.uniform(-a, a);
        double v = out.data[i] * (1.0 + u);
        out.data[i] = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
      }
      break;
    }
    default:
      break;
  }
  return out;
}

ImageRGB degrade_resolution(const ImageRGB& img, double scale) {
  if (scale <= 0.0 || scale > 1.0) fail(Err::LevelOutOfRange, "scale must be in (0,1]");
  int inter_h = static_cast<int>(std::lround(img.height * scale));
  if (inter_h < 4) fail(Err::DegenerateImage, "degraded height below 4");
  ImageRGB small = resize_to_height(img, inter_h);
  return resize_to_height(small, kNormalizedHeight);
}

// --------------------------------------------------------------- corpus

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

const char* noise_kind_name(NoiseSpec::Kind k) {
  switch (k) {
    case NoiseSpec::Kind::None: return "none";
    case NoiseSpec::Kind::Gaussian: return "gaussian";
    case NoiseSpec::Kind::SaltPepper: return "saltpepper";
    case NoiseSpec::Kind::Speckle: return "speckle";
  }
  return "?";
}

bool noise_kind_from_name(const std::string& s, NoiseSpec::Kind* out) {
  for (auto k : {NoiseSpec::Kind::None, NoiseSpec::Kind::Gaussian, NoiseSpec::Kind::SaltPepper,
                 NoiseSpec::Kind::Speckle}) {
    if (s == noise_kind_name(k)) {
      *out = k;
      return true;
    }
  }
  return false;
}

void validate_spec(const CorpusSpec& spec) {
  if (spec.count < 1) fail(Err::BadConfig, "corpus count must be >= 1");
  if (spec.resolution_scale <= 0.0 || spec.resolution_scale > 1.0)
    fail(Err::BadConfig, "resolution_scale must be in (0,1]");
  if (spec.regimes.empty()) fail(Err::BadConfig, "corpus spec needs at least one regime");
  if (spec.lexicon.empty()) fail(Err::BadConfig, "corpus spec needs a lexicon");
  if (spec.noise.level < 0.0 || spec.noise.level > 30.0)
    fail(Err::LevelOutOfRange, "noise level must be in [0,30] percent");
  for (const auto& w : spec.lexicon) {
    const std::uint8_t* rows;
    for (char ch : w) {
      if (spec.charset.find(ch) == std::string::npos)
        fail(Err::BadConfig, std::string("lexicon word ") + w + " uses '" + ch +
                                 "' outside the charset");
      if (!font_glyph(ch, &rows))
        fail(Err::UnknownGlyph, std::string("no glyph for '") + ch + "'");
    }
  }
}

}  // namespace

std::string corpus_spec_hash(const CorpusSpec& spec) {
  std::ostringstream ss;
  ss << spec.seed << '|' << spec.charset << '|' << spec.count << '|' << spec.resolution_scale
     << '|' << noise_kind_name(spec.noise.kind) << '|' << spec.noise.level << '|'
     << spec.baseline_amplitude;
  for (const auto& w : spec.lexicon) ss << '|' << w;
  for (const auto& r : spec.regimes) {
    ss << '|' << channel_name(r.target);
    for (int k = 0; k < 3; ++k) ss << ',' << int(r.bg1[k]);
    for (int k = 0; k < 3; ++k) ss << ',' << int(r.bg2[k]);
    for (int k = 0; k < 3; ++k) ss << ',' << int(r.text1[k]);
    for (int k = 0; k < 3; ++k) ss << ',' << int(r.text2[k]);
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(ss.str())));
  return buf;
}

Manifest gen_corpus(const CorpusSpec& spec, const std::string& out_dir) {
  validate_spec(spec);
  std::filesystem::create_directories(out_dir);

  Manifest manifest;
  manifest.spec_hash = corpus_spec_hash(spec);
  manifest.records.resize(spec.count);

  const int nlex = static_cast<int>(spec.lexicon.size());
  const int nreg = static_cast<int>(spec.regimes.size());
#pragma omp parallel for schedule(dynamic)
  for (int id = 0; id < spec.count; ++id) {
    const std::string& word = spec.lexicon[id % nlex];
    const ContrastRegime& regime = spec.regimes[(id / nlex) % nreg];
    std::uint64_t img_seed = SplitMix64::substream(spec.seed, static_cast<std::uint64_t>(id));

    RenderResult rr = render_word(word, regime, img_seed, spec.baseline_amplitude);
    ImageRGB img = apply_noise(rr.image, spec.noise, img_seed);
    if (spec.resolution_scale < 1.0) img = degrade_resolution(img, spec.resolution_scale);

    char name[32];
    std::snprintf(name, sizeof(name), "img_%05d.png", id);
    save_png(img, (std::filesystem::path(out_dir) / name).string());

    ManifestRecord rec;
    rec.id = id;
    rec.path = name;
    rec.text = word;
    rec.target = regime.target;
    rec.noise = spec.noise;
    rec.scale = spec.resolution_scale;
    rec.seed = img_seed;
    rec.contrast = rr.contrast;
    manifest.records[id] = std::move(rec);
  }

  save_manifest(manifest, (std::filesystem::path(out_dir) / "manifest.tsv").string());
  return manifest;
}

void save_manifest(const Manifest& m, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(Err::Io, "cannot create " + path);
  out << "ctrec-corpus v1 hash=" << m.spec_hash << " prng=splitmix64\n";
  char buf[64];
  for (const auto& r : m.records) {
    out << r.id << '\t' << r.path << '\t' << r.text << '\t' << channel_name(r.target) << '\t'
        << noise_kind_name(r.noise.kind) << '\t';
    std::snprintf(buf, sizeof(buf), "%.17g", r.noise.level);
    out << buf << '\t';
    std::snprintf(buf, sizeof(buf), "%.17g", r.scale);
    out << buf << '\t' << r.seed;
    for (double c : r.contrast) {
      std::snprintf(buf, sizeof(buf), "%.17g", c);
      out << '\t' << buf;
    }
    out << '\n';
  }
  if (!out) fail(Err::Io, "write error on " + path);
}

Manifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Err::Io, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("ctrec-corpus v1", 0) != 0)
    fail(Err::Format, "bad manifest header");
  Manifest m;
  size_t hp = line.find("hash=");
  if (hp != std::string::npos) m.spec_hash = line.substr(hp + 5, 16);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    ManifestRecord r;
    std::string target, noise_kind;
    ss >> r.id >> r.path >> r.text >> target >> noise_kind >> r.noise.level >> r.scale >> r.seed;
    for (double& c : r.contrast) ss >> c;
    if (!ss) fail(Err::Format, "bad manifest record: " + line);
    if (!channel_from_name(target, &r.target)) fail(Err::Format, "bad channel in manifest");
    if (!noise_kind_from_name(noise_kind, &r.noise.kind))
      fail(Err::Format, "bad noise kind in manifest");
    m.records.push_back(std::move(r));
  }
  return m;
}

}  // namespace ctrec
