#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ctrec/autolabel.hpp"
#include "ctrec/hmm.hpp"
#include "ctrec/selector.hpp"
#include "ctrec/synth.hpp"

namespace ctrec {

struct MultiLabelReport {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  int n = 0;
};

// Per-sample set metrics over positive labels, averaged; 0/0 counts as 1,
// x/0 with a nonempty other side as 0.
MultiLabelReport multilabel_metrics(const std::vector<ChannelLabelVector>& truth,
                                    const std::vector<ChannelLabelVector>& pred);

int levenshtein(const std::string& a, const std::string& b);

// word accuracy = exact-match fraction; char accuracy =
// 1 - sum(edit distances) / sum(truth lengths), floored at 0.
std::pair<double, double> word_char_accuracy(const std::vector<std::string>& truth,
                                             const std::vector<std::string>& hyp);

// Word counted correct iff any channel's hypothesis matches exactly.
// Expects all 9 channels.
double oracle_eval(const std::map<Channel, std::vector<std::string>>& per_channel_hyps,
                   const std::vector<std::string>& truth);

// ------------------------------------------------------------- pipeline

struct CorpusData {
  std::vector<ManifestRecord> records;
  std::vector<ImageRGB> images;  // as stored in the corpus
  Lexicon lexicon;               // distinct truths, sorted
  std::string charset;           // distinct characters, sorted
};

CorpusData load_corpus(const std::string& dir);

// Normalized channel sets, optionally re-noised / re-scaled first.
std::vector<WordSample> make_samples(const CorpusData& corpus,
                                     const NoiseSpec& extra_noise = {},
                                     double resolution_scale = 1.0);

enum class RowMode { Image, Window, Both };

// Selector training rows: whole-image descriptors and/or per-window
// context descriptors, every row inheriting the image's label vector.
std::vector<LabeledCorpusEntry> selector_rows(const std::vector<WordSample>& samples,
                                              const std::vector<ChannelLabelVector>& labels,
                                              FeatureKind kind, RowMode mode);

struct PipelineConfig {
  FeatureKind kind = FeatureKind::Wavelet;
  TrainOptions hmm;
  double svm_c = 1.0;
  int folds = 4;
  bool labels_from_metadata = false;
  RowMode rows = RowMode::Both;
};

struct EndToEndResult {
  std::map<Channel, double> fixed_word_acc, fixed_char_acc;
  std::map<Channel, std::vector<std::string>> fixed_hyps;
  double oracle_word_acc = 0.0;
  double window_word_acc = 0.0, window_char_acc = 0.0;
  double image_word_acc = 0.0, image_char_acc = 0.0;
  double window_target_match = 0.0;  // fraction of windows picking the regime target
  std::vector<std::string> window_hyps, image_hyps;
  std::vector<ChannelLabelVector> labels;
  MultiLabelReport selector_metrics;  // selector predictions vs labels, CV folds
  // Per-fold models, kept for the degradation studies.
  std::vector<SelectorModel> fold_selectors;
  std::vector<HmmSet> fold_hmm_window, fold_hmm_image;
};

// The full protocol: fixed-channel CV over all 9 channels, labeling,
// per-fold selector training, per-fold HMMs for the selection modes,
// cross-validated decoding.
EndToEndResult run_end_to_end(const std::vector<WordSample>& samples, const Lexicon& lexicon,
                              const std::string& charset, const PipelineConfig& cfg);

// Decode perturbed samples with already-trained fold models.
std::vector<std::string> decode_with_models(const std::vector<WordSample>& samples,
                                            const Lexicon& lexicon,
                                            const std::vector<SelectorModel>& fold_selectors,
                                            const std::vector<HmmSet>& fold_hmms,
                                            SelectionMode mode, int folds);

// -------------------------------------------------------------- studies

enum class StudyKind { ChannelTable, FeatureTable, NoiseCurve, ResolutionCurve, RuntimeRatio };

bool study_kind_from_name(const std::string& name, StudyKind* out);

struct StudyConfig {
  std::string corpus_dir;
  std::string out_dir;
  PipelineConfig pipeline;
  std::uint64_t seed = 1;
};

// Emits CSV (and SVG for the curve studies) into out_dir; returns the
// paths written. Curve CSVs mirror the corresponding table/figure layout.
// A precomputed end-to-end result may be shared across studies; when null
// the study runs the protocol itself.
std::vector<std::string> run_study(StudyKind kind, const StudyConfig& cfg,
                                   const EndToEndResult* base = nullptr);

// CSV cell formatting: fixed 4 decimal places.
std::string format_fraction(double v);

void write_svg_curve(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::vector<double>& xs,
                     const std::vector<std::pair<std::string, std::vector<double>>>& series);

}  // namespace ctrec
