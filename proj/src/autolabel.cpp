#include "ctrec/autolabel.hpp"

#include <algorithm>

#include "ctrec/phog.hpp"

namespace ctrec {

FixedChannelCv fixed_channel_cv(const std::vector<WordSample>& corpus, const Lexicon& lexicon,
                                const std::string& charset, const TrainOptions& opts, int folds,
                                const std::vector<Channel>& channels) {
  if (folds < 2) fail(Err::BadConfig, "cross-validation needs at least 2 folds");
  if (corpus.size() < static_cast<size_t>(folds))
    fail(Err::InsufficientData, "fewer samples than folds");
  const int n = static_cast<int>(corpus.size());

  FixedChannelCv out;
  out.channels = channels;

  for (Channel ch : channels) {
    // Fixed-channel sequences for every sample.
    std::vector<ObservationSequence> seqs(n);
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i)
      seqs[i] = extract_sequence(corpus[i].channels, SelectionMode::Fixed, ch);

    std::vector<std::string> hyp(n);
    for (int fold = 0; fold < folds; ++fold) {
      std::vector<std::pair<ObservationSequence, std::string>> train;
      std::vector<int> test_idx;
      for (int i = 0; i < n; ++i) {
        if (i % folds == fold)
          test_idx.push_back(i);
        else
          train.emplace_back(seqs[i], corpus[i].truth);
      }
      HmmSet models = train_embedded(train, charset, opts);
      const int m = static_cast<int>(test_idx.size());
#pragma omp parallel for schedule(dynamic)
      for (int t = 0; t < m; ++t) {
        RecognitionResult r = recognize_word(models, lexicon, seqs[test_idx[t]]);
        hyp[test_idx[t]] = r.top();
      }
    }
    out.hyps.emplace(ch, std::move(hyp));
  }
  return out;
}

std::vector<ChannelLabelVector> auto_label(const std::vector<WordSample>& corpus,
                                           const Lexicon& lexicon, const std::string& charset,
                                           const TrainOptions& opts, int folds,
                                           FixedChannelCv* cv_out) {
  std::vector<Channel> chans(kSelectableChannels.begin(), kSelectableChannels.end());
  FixedChannelCv cv = fixed_channel_cv(corpus, lexicon, charset, opts, folds, chans);
  std::vector<ChannelLabelVector> labels(corpus.size());
  for (int k = 0; k < 8; ++k) {
    const auto& hyp = cv.hyps.at(kSelectableChannels[k]);
    for (size_t i = 0; i < corpus.size(); ++i)
      labels[i].bits[k] = hyp[i] == corpus[i].truth ? 1 : -1;
  }
  if (cv_out) *cv_out = std::move(cv);
  return labels;
}

std::vector<ChannelLabelVector> metadata_labels(const std::vector<WordSample>& corpus) {
  std::vector<ChannelLabelVector> labels(corpus.size());
  for (size_t i = 0; i < corpus.size(); ++i) {
    for (int k = 0; k < 8; ++k)
      labels[i].bits[k] = kSelectableChannels[k] == corpus[i].target ? 1 : -1;
  }
  return labels;
}

}  // namespace ctrec
