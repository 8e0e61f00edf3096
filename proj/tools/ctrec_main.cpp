#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "ctrec/eval.hpp"
#include "ctrec/parallel.hpp"

namespace {

using namespace ctrec;

// Config files use the same "key value" line dialect as the model files.
std::map<std::string, std::string> load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Err::Io, "cannot open config " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string key, value;
    ss >> key;
    std::getline(ss, value);
    size_t p = value.find_first_not_of(' ');
    kv[key] = p == std::string::npos ? "" : value.substr(p);
  }
  return kv;
}

// Output-directory override, limited to relative paths.
std::string out_path(const std::string& p) {
  const char* base = std::getenv("CTREC_OUT_DIR");
  if (!base || !*base || std::filesystem::path(p).is_absolute()) return p;
  return (std::filesystem::path(base) / p).string();
}

struct CommonOpts {
  std::uint64_t seed = 1;
  int jobs = 0;
  bool dry_run = false;
  std::string config;
};

void add_common(CLI::App* cmd, CommonOpts* c) {
  cmd->add_option("--seed", c->seed, "random seed for all derived randomness");
  cmd->add_option("--jobs", c->jobs, "worker threads (0 = all)");
  cmd->add_flag("--dry-run", c->dry_run, "validate configuration, write nothing");
  cmd->add_option("--config", c->config, "key/value config file; flags override");
}

struct HmmOpts {
  int states = 6;
  int gaussians = 32;
  int iters = 8;
};

void add_hmm(CLI::App* cmd, HmmOpts* h) {
  cmd->add_option("--states", h->states, "HMM states per character");
  cmd->add_option("--gaussians", h->gaussians, "Gaussians per state");
  cmd->add_option("--iters", h->iters, "EM iterations per mixture stage");
}

// Desk preset: small models so the full harness runs in minutes.
void apply_preset(const std::string& preset, HmmOpts* h) {
  if (preset.empty()) return;
  if (preset == "desk") {
    h->states = 3;
    h->gaussians = 2;
    h->iters = 5;
  } else {
    fail(Err::BadConfig, "unknown preset '" + preset + "' (available: desk)");
  }
}

bool parse_mode(const std::string& s, SelectionMode* mode, Channel* fixed) {
  if (s == "perwindow") {
    *mode = SelectionMode::PerWindow;
    return true;
  }
  if (s == "perimage") {
    *mode = SelectionMode::PerImage;
    return true;
  }
  if (s.rfind("fixed:", 0) == 0) {
    if (!channel_from_name(s.substr(6), fixed)) return false;
    *mode = SelectionMode::Fixed;
    return true;
  }
  return false;
}

const char* kModeHelp =
    "selection mode: perwindow, perimage, or fixed:<R|G|B|Y|Cb|Cr|H|S|V>";

std::vector<WordSample> corpus_samples(const std::string& dir, CorpusData* data) {
  *data = load_corpus(dir);
  return make_samples(*data);
}

std::vector<ChannelLabelVector> load_labels(const std::string& path, size_t expect) {
  std::ifstream in(path);
  if (!in) fail(Err::Io, "cannot open labels " + path);
  std::string line;
  if (!std::getline(in, line) || line != "# ctrec-labels v1")
    fail(Err::Format, "bad labels header");
  std::vector<ChannelLabelVector> labels;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string id, bits;
    ss >> id >> bits;
    labels.push_back(ChannelLabelVector::from_string(bits));
  }
  if (labels.size() != expect) fail(Err::LengthMismatch, "label count does not match corpus");
  return labels;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"color-channel-selective scene text recognition"};
  app.require_subcommand(1);

  // gen-corpus -----------------------------------------------------------
  auto* gen = app.add_subcommand("gen-corpus", "render a synthetic word-image corpus");
  CommonOpts gen_common;
  std::string gen_out, gen_preset = "desk", gen_noise = "none:0";
  int gen_count = -1;
  double gen_scale = 1.0, gen_baseline = 0.0;
  gen->add_option("--out", gen_out, "output directory")->required();
  gen->add_option("--preset", gen_preset, "corpus preset (desk)");
  gen->add_option("--count", gen_count, "number of images (preset default: 200)");
  gen->add_option("--noise", gen_noise, "noise, kind:level e.g. gaussian:10");
  gen->add_option("--scale", gen_scale, "resolution scale in (0,1]");
  gen->add_option("--baseline-amplitude", gen_baseline, "sinusoidal vertical offset, px");
  add_common(gen, &gen_common);

  // label-channels -------------------------------------------------------
  auto* label = app.add_subcommand("label-channels", "channel labels by cross-validated recognition");
  CommonOpts label_common;
  std::string label_corpus, label_out, label_source = "recognition", label_preset;
  int label_folds = 4;
  HmmOpts label_hmm;
  label->add_option("--corpus", label_corpus, "corpus directory")->required();
  label->add_option("--out", label_out, "labels output file")->required();
  label->add_option("--source", label_source, "recognition (default) or metadata");
  label->add_option("--folds", label_folds, "cross-validation folds");
  label->add_option("--preset", label_preset, "parameter preset (desk)");
  add_hmm(label, &label_hmm);
  add_common(label, &label_common);

  // train-selector -------------------------------------------------------
  auto* tsel = app.add_subcommand("train-selector", "train the multi-label channel selector");
  CommonOpts tsel_common;
  std::string tsel_corpus, tsel_labels, tsel_out, tsel_features = "wavelet", tsel_rows = "both";
  double tsel_c = 1.0;
  tsel->add_option("--corpus", tsel_corpus, "corpus directory")->required();
  tsel->add_option("--labels", tsel_labels, "labels file from label-channels")->required();
  tsel->add_option("--out", tsel_out, "model output file")->required();
  tsel->add_option("--features", tsel_features, "wavelet|gabor|lbp|lpq|statshist");
  tsel->add_option("--C", tsel_c, "SVM cost parameter");
  tsel->add_option("--rows", tsel_rows, "training rows: image, window, or both");
  add_common(tsel, &tsel_common);

  // train-hmm ------------------------------------------------------------
  auto* thmm = app.add_subcommand("train-hmm", "train character models on a corpus");
  CommonOpts thmm_common;
  std::string thmm_corpus, thmm_out, thmm_mode = "fixed:Y", thmm_selector, thmm_preset;
  HmmOpts thmm_hmm;
  thmm->add_option("--corpus", thmm_corpus, "corpus directory")->required();
  thmm->add_option("--out", thmm_out, "model output file")->required();
  thmm->add_option("--mode", thmm_mode, kModeHelp);
  thmm->add_option("--selector", thmm_selector, "selector model (for perwindow/perimage)");
  thmm->add_option("--preset", thmm_preset, "parameter preset (desk)");
  add_hmm(thmm, &thmm_hmm);
  add_common(thmm, &thmm_common);

  // recognize ------------------------------------------------------------
  auto* rec = app.add_subcommand("recognize", "recognize one word image");
  CommonOpts rec_common;
  std::string rec_image, rec_hmm, rec_lexicon, rec_mode = "fixed:Y", rec_selector;
  rec->add_option("--image", rec_image, "word image (PNG or PPM)")->required();
  rec->add_option("--hmm", rec_hmm, "character model file")->required();
  rec->add_option("--lexicon", rec_lexicon, "lexicon file, one word per line")->required();
  rec->add_option("--mode", rec_mode, kModeHelp);
  rec->add_option("--selector", rec_selector, "selector model (for perwindow/perimage)");
  add_common(rec, &rec_common);

  // study ------------------------------------------------------------------
  auto* study = app.add_subcommand("study", "evaluation studies and report files");
  CommonOpts study_common;
  std::string study_name, study_corpus, study_out, study_preset = "desk",
              study_features = "wavelet", study_labels = "recognition";
  int study_folds = 4;
  double study_c = 1.0;
  HmmOpts study_hmm;
  study->add_option("--study", study_name,
                    "channel-table|feature-table|noise-curve|resolution-curve|runtime-ratio")
      ->required();
  study->add_option("--corpus", study_corpus, "corpus directory")->required();
  study->add_option("--out", study_out, "report output directory")->required();
  study->add_option("--preset", study_preset, "parameter preset (desk)");
  study->add_option("--features", study_features, "selection feature kind");
  study->add_option("--labels", study_labels, "recognition or metadata");
  study->add_option("--folds", study_folds, "cross-validation folds");
  study->add_option("--C", study_c, "SVM cost parameter");
  add_hmm(study, &study_hmm);
  add_common(study, &study_common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    CommonOpts* common = nullptr;
    if (gen->parsed()) common = &gen_common;
    if (label->parsed()) common = &label_common;
    if (tsel->parsed()) common = &tsel_common;
    if (thmm->parsed()) common = &thmm_common;
    if (rec->parsed()) common = &rec_common;
    if (study->parsed()) common = &study_common;

    std::map<std::string, std::string> config;
    if (common && !common->config.empty()) config = load_config(common->config);
    auto cfg_or = [&](const std::string& key, const std::string& cur) {
      auto it = config.find(key);
      return it == config.end() ? cur : it->second;
    };
    (void)cfg_or;
    if (common) set_jobs(common->jobs);

    if (gen->parsed()) {
      if (gen_preset != "desk") fail(Err::BadConfig, "unknown corpus preset '" + gen_preset + "'");
      CorpusSpec spec = desk_corpus_spec(gen_common.seed);
      if (gen_count > 0) spec.count = gen_count;
      spec.resolution_scale = gen_scale;
      spec.baseline_amplitude = gen_baseline;
      size_t colon = gen_noise.find(':');
      std::string nk = colon == std::string::npos ? gen_noise : gen_noise.substr(0, colon);
      double nl = colon == std::string::npos ? 0.0 : std::stod(gen_noise.substr(colon + 1));
      if (nk == "none") spec.noise = {NoiseSpec::Kind::None, 0.0};
      else if (nk == "gaussian") spec.noise = {NoiseSpec::Kind::Gaussian, nl};
      else if (nk == "saltpepper") spec.noise = {NoiseSpec::Kind::SaltPepper, nl};
      else if (nk == "speckle") spec.noise = {NoiseSpec::Kind::Speckle, nl};
      else fail(Err::BadConfig, "unknown noise kind '" + nk + "'");
      std::string dir = out_path(gen_out);
      if (gen_common.dry_run) {
        std::cout << "ok (dry-run): corpus spec hash " << corpus_spec_hash(spec) << "\n";
        return 0;
      }
      Manifest m = gen_corpus(spec, dir);
      Lexicon lex;
      lex.entries = spec.lexicon;
      std::sort(lex.entries.begin(), lex.entries.end());
      save_lexicon(lex, (std::filesystem::path(dir) / "lexicon.txt").string());
      std::cout << "wrote " << m.records.size() << " images to " << dir << " (hash "
                << m.spec_hash << ")\n";
      return 0;
    }

    if (label->parsed()) {
      apply_preset(label_preset, &label_hmm);
      CorpusData data;
      std::vector<WordSample> samples = corpus_samples(label_corpus, &data);
      if (label_common.dry_run) {
        std::cout << "ok (dry-run): " << samples.size() << " samples\n";
        return 0;
      }
      std::vector<ChannelLabelVector> labels;
      if (label_source == "metadata") {
        labels = metadata_labels(samples);
      } else if (label_source == "recognition") {
        TrainOptions opts{label_hmm.states, label_hmm.gaussians, label_hmm.iters};
        labels = auto_label(samples, data.lexicon, data.charset, opts, label_folds);
      } else {
        fail(Err::BadConfig, "unknown label source '" + label_source + "'");
      }
      std::string path = out_path(label_out);
      std::ofstream out(path, std::ios::trunc);
      if (!out) fail(Err::Io, "cannot create " + path);
      out << "# ctrec-labels v1\n";
      for (size_t i = 0; i < samples.size(); ++i)
        out << samples[i].id << '\t' << labels[i].to_string() << "\n";
      std::cout << "wrote labels for " << samples.size() << " images to " << path << "\n";
      return 0;
    }

    if (tsel->parsed()) {
      FeatureKind kind;
      if (!feature_kind_from_name(tsel_features, &kind))
        fail(Err::BadConfig, "unknown feature kind '" + tsel_features + "'");
      RowMode rows;
      if (tsel_rows == "image") rows = RowMode::Image;
      else if (tsel_rows == "window") rows = RowMode::Window;
      else if (tsel_rows == "both") rows = RowMode::Both;
      else fail(Err::BadConfig, "unknown row mode '" + tsel_rows + "'");
      CorpusData data;
      std::vector<WordSample> samples = corpus_samples(tsel_corpus, &data);
      std::vector<ChannelLabelVector> labels = load_labels(tsel_labels, samples.size());
      if (tsel_common.dry_run) {
        std::cout << "ok (dry-run)\n";
        return 0;
      }
      std::vector<LabeledCorpusEntry> entries = selector_rows(samples, labels, kind, rows);
      SelectorModel model = train_ova_svm(entries, tsel_c);
      save_selector(model, out_path(tsel_out));
      std::cout << "trained on " << entries.size() << " rows; wrote " << out_path(tsel_out)
                << "\n";
      return 0;
    }

    if (thmm->parsed()) {
      apply_preset(thmm_preset, &thmm_hmm);
      SelectionMode mode;
      Channel fixed = Channel::Y;
      if (!parse_mode(thmm_mode, &mode, &fixed))
        fail(Err::BadConfig, "invalid --mode '" + thmm_mode +
                                 "'; valid channels: R G B Y Cb Cr H S V");
      CorpusData data;
      std::vector<WordSample> samples = corpus_samples(thmm_corpus, &data);
      SelectorModel sel;
      bool have_sel = false;
      if (mode != SelectionMode::Fixed) {
        if (thmm_selector.empty()) fail(Err::BadConfig, "--selector required for this mode");
        sel = load_selector(thmm_selector);
        have_sel = true;
      }
      if (thmm_common.dry_run) {
        std::cout << "ok (dry-run)\n";
        return 0;
      }
      std::vector<std::pair<ObservationSequence, std::string>> train;
      for (const auto& s : samples)
        train.emplace_back(
            extract_sequence(s.channels, mode, fixed, have_sel ? &sel : nullptr), s.truth);
      TrainOptions opts{thmm_hmm.states, thmm_hmm.gaussians, thmm_hmm.iters};
      TrainStats stats;
      HmmSet set = train_embedded(train, data.charset, opts, &stats);
      save_hmm(set, out_path(thmm_out));
      std::cout << "trained " << set.models.size() << " character models; wrote "
                << out_path(thmm_out) << "\n";
      return 0;
    }

    if (rec->parsed()) {
      SelectionMode mode;
      Channel fixed = Channel::Y;
      if (!parse_mode(rec_mode, &mode, &fixed))
        fail(Err::BadConfig,
             "invalid --mode '" + rec_mode + "'; valid channels: R G B Y Cb Cr H S V");
      SelectorModel sel;
      bool have_sel = false;
      if (mode != SelectionMode::Fixed) {
        if (rec_selector.empty()) fail(Err::BadConfig, "--selector required for this mode");
        sel = load_selector(rec_selector);
        have_sel = true;
      }
      if (rec_common.dry_run) {
        std::cout << "ok (dry-run)\n";
        return 0;
      }
      HmmSet set = load_hmm(rec_hmm);
      Lexicon lex = load_lexicon(rec_lexicon);
      ImageRGB img = load_image(rec_image);
      ChannelSet cs = to_channel_set(normalize_height(img));
      ObservationSequence seq = extract_sequence(cs, mode, fixed, have_sel ? &sel : nullptr);
      RecognitionResult r = recognize_word(set, lex, seq);
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.6f", r.hypotheses[0].second);
      std::cout << r.hypotheses[0].first << " " << buf << "\n";
      return 0;
    }

    if (study->parsed()) {
      apply_preset(study_preset, &study_hmm);
      StudyKind kind;
      if (!study_kind_from_name(study_name, &kind))
        fail(Err::BadConfig, "unknown study '" + study_name + "'");
      StudyConfig sc;
      sc.corpus_dir = study_corpus;
      sc.out_dir = out_path(study_out);
      sc.seed = study_common.seed;
      if (!feature_kind_from_name(study_features, &sc.pipeline.kind))
        fail(Err::BadConfig, "unknown feature kind '" + study_features + "'");
      sc.pipeline.hmm = TrainOptions{study_hmm.states, study_hmm.gaussians, study_hmm.iters};
      sc.pipeline.svm_c = study_c;
      sc.pipeline.folds = study_folds;
      sc.pipeline.labels_from_metadata = study_labels == "metadata";
      if (study_common.dry_run) {
        std::cout << "ok (dry-run)\n";
        return 0;
      }
      std::vector<std::string> written = run_study(kind, sc);
      for (const auto& p : written) std::cout << "wrote " << p << "\n";
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    // Configuration and input validation problems exit 1, runtime failures 2.
    switch (e.code()) {
      case Err::BadConfig:
      case Err::Format:
      case Err::LengthMismatch:
      case Err::LevelOutOfRange:
        return 1;
      default:
        return 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
