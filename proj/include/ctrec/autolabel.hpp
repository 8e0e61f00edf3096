#pragma once

#include <map>
#include <string>
#include <vector>

#include "ctrec/hmm.hpp"
#include "ctrec/image.hpp"
#include "ctrec/selector.hpp"

namespace ctrec {

struct WordSample {
  std::string id;
  ChannelSet channels;  // height-normalized planes
  std::string truth;
  Channel target = Channel::G;  // generation-time regime target, when known
};

// Fixed-channel recognition under k-fold cross-validation: per channel,
// each sample is decoded by models trained on the other folds.
// Fold assignment is sample_index % folds.
struct FixedChannelCv {
  std::vector<Channel> channels;
  std::map<Channel, std::vector<std::string>> hyps;  // top-1 per sample
};

FixedChannelCv fixed_channel_cv(const std::vector<WordSample>& corpus, const Lexicon& lexicon,
                                const std::string& charset, const TrainOptions& opts, int folds,
                                const std::vector<Channel>& channels);

// Channel label vectors from cross-validated fixed-channel recognition:
// +1 iff the channel's hypothesis matches the ground truth exactly.
// Runs the 8 selectable channels.
std::vector<ChannelLabelVector> auto_label(const std::vector<WordSample>& corpus,
                                           const Lexicon& lexicon, const std::string& charset,
                                           const TrainOptions& opts, int folds = 4,
                                           FixedChannelCv* cv_out = nullptr);

// Labels straight from generation metadata: +1 only for the regime target.
std::vector<ChannelLabelVector> metadata_labels(const std::vector<WordSample>& corpus);

}  // namespace ctrec
