// Timing comparison between the OpenMP-parallel pipeline paths and their
// single-thread runs, with output equality checked on each kernel.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "ctrec/eval.hpp"
#include "ctrec/parallel.hpp"
#include "ctrec/phog.hpp"
#include "ctrec/synth.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace ctrec;

namespace {

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

void set_threads(int n) {
  set_jobs(n);
#ifdef _OPENMP
  omp_set_num_threads(n > 0 ? n : omp_get_num_procs());
#endif
}

double checksum(const std::vector<ObservationSequence>& seqs) {
  double s = 0.0;
  for (const auto& q : seqs)
    for (const auto& v : q.vectors)
      for (double x : v) s += x;
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  int count = argc > 1 ? std::atoi(argv[1]) : 60;
#ifdef _OPENMP
  int hw = omp_get_num_procs();
#else
  int hw = 1;
#endif
  std::printf("bench: %d synthetic words, %d hardware threads\n", count, hw);

  CorpusSpec spec = desk_corpus_spec(42);
  spec.count = count;
  std::vector<WordSample> samples;
  std::vector<ChannelLabelVector> labels;
  for (int id = 0; id < spec.count; ++id) {
    const std::string& word = spec.lexicon[id % spec.lexicon.size()];
    const ContrastRegime& regime = spec.regimes[(id / spec.lexicon.size()) % spec.regimes.size()];
    RenderResult rr = render_word(word, regime, id);
    WordSample s;
    s.id = std::to_string(id);
    s.channels = to_channel_set(normalize_height(rr.image));
    s.truth = word;
    s.target = regime.target;
    samples.push_back(std::move(s));
  }
  labels = metadata_labels(samples);

  // Selector + models once (parallel), reused by both timing runs.
  set_threads(0);
  std::vector<LabeledCorpusEntry> rows = selector_rows(samples, labels, FeatureKind::Wavelet,
                                                       RowMode::Both);
  SelectorModel selector = train_ova_svm(rows, 1.0);
  std::vector<std::pair<ObservationSequence, std::string>> train;
  for (const auto& s : samples)
    train.emplace_back(extract_sequence(s.channels, SelectionMode::PerWindow, Channel::Y, &selector),
                       s.truth);
  HmmSet models = train_embedded(train, spec.charset, TrainOptions{3, 2, 4});
  Lexicon lex;
  lex.entries = spec.lexicon;

  struct Result {
    const char* name;
    double serial_ms;
    double parallel_ms;
    bool equal;
  };
  std::vector<Result> results;

  // Kernel 1: per-window feature extraction.
  {
    std::vector<ObservationSequence> a(samples.size()), b(samples.size());
    set_threads(1);
    double t0 = now_ms();
    for (size_t i = 0; i < samples.size(); ++i)
      a[i] = extract_sequence(samples[i].channels, SelectionMode::PerWindow, Channel::Y, &selector);
    double serial = now_ms() - t0;
    set_threads(0);
    t0 = now_ms();
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < static_cast<int>(samples.size()); ++i)
      b[i] = extract_sequence(samples[i].channels, SelectionMode::PerWindow, Channel::Y, &selector);
    double parallel = now_ms() - t0;
    results.push_back({"per-window extraction", serial, parallel, checksum(a) == checksum(b)});
  }

  // Kernel 2: lexicon-constrained decoding.
  {
    std::vector<std::string> a(samples.size()), b(samples.size());
    set_threads(1);
    double t0 = now_ms();
    for (size_t i = 0; i < samples.size(); ++i)
      a[i] = recognize_word(models, lex, train[i].first).top();
    double serial = now_ms() - t0;
    set_threads(0);
    t0 = now_ms();
    for (size_t i = 0; i < samples.size(); ++i)
      b[i] = recognize_word(models, lex, train[i].first).top();
    double parallel = now_ms() - t0;
    results.push_back({"lexicon decoding", serial, parallel, a == b});
  }

  // Kernel 3: embedded re-estimation.
  {
    set_threads(1);
    TrainStats sa, sb;
    double t0 = now_ms();
    HmmSet ma = train_embedded(train, spec.charset, TrainOptions{3, 2, 3}, &sa);
    double serial = now_ms() - t0;
    set_threads(0);
    t0 = now_ms();
    HmmSet mb = train_embedded(train, spec.charset, TrainOptions{3, 2, 3}, &sb);
    double parallel = now_ms() - t0;
    bool equal = sa.log_likelihood == sb.log_likelihood;
    results.push_back({"embedded training", serial, parallel, equal});
  }

  std::printf("%-24s %10s %10s %8s %s\n", "kernel", "serial ms", "parallel", "speedup", "equal");
  for (const auto& r : results)
    std::printf("%-24s %10.1f %10.1f %7.2fx %s\n", r.name, r.serial_ms, r.parallel_ms,
                r.serial_ms / (r.parallel_ms > 0 ? r.parallel_ms : 1.0),
                r.equal ? "yes" : "NO");
  for (const auto& r : results)
    if (!r.equal) return 1;
  return 0;
}
