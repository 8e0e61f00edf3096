#pragma once

#include <map>
#include <string>
#include <vector>

#include "ctrec/common.hpp"
#include "ctrec/phog.hpp"

namespace ctrec {

inline constexpr double kVarianceFloor = 1e-4;

struct GaussianComponent {
  double weight = 1.0;
  std::vector<double> mean;
  std::vector<double> var;  // diagonal, floored at kVarianceFloor
};

struct GmmState {
  std::vector<GaussianComponent> comps;
};

// log sum_k c_k N(x; mu_k, diag var_k), log-sum-exp stabilized.
double gmm_log_density(const GmmState& state, const std::vector<double>& x);

// Strict left-right chain: each state allows self and next only; the last
// state's "next" leaves the model.
struct CharacterModel {
  char symbol = '?';
  std::vector<GmmState> states;
  std::vector<std::array<double, 2>> trans;  // per state {self, advance}
};

struct HmmSet {
  std::string charset;
  int num_states = 6;
  int num_gaussians = 32;
  int dim = kPhogDim;
  std::map<char, CharacterModel> models;
};

struct Lexicon {
  std::vector<std::string> entries;
};

Lexicon load_lexicon(const std::string& path);
void save_lexicon(const Lexicon& lex, const std::string& path);

// Word model assembled by chaining character models.
struct WordModel {
  std::vector<const GmmState*> states;
  std::vector<std::array<double, 2>> trans;
};

WordModel concat_word_model(const HmmSet& set, const std::string& word);

// log P(O | model) over all paths that start in the first state and leave
// the last state after the final frame; -inf when T is shorter than the
// chain. Log-domain forward recursion.
double forward_log_likelihood(const WordModel& model, const ObservationSequence& seq);

struct ViterbiResult {
  double log_score = 0.0;
  std::vector<int> path;
};

ViterbiResult viterbi(const WordModel& model, const ObservationSequence& seq);

struct RecognitionResult {
  std::vector<std::pair<std::string, double>> hypotheses;  // ranked, best first
  std::vector<int> best_path;

  const std::string& top() const { return hypotheses.front().first; }
};

// Viterbi score of every lexicon entry; ties keep lexicon order.
// Emission densities are shared across entries through a per-frame cache.
RecognitionResult recognize_word(const HmmSet& set, const Lexicon& lexicon,
                                 const ObservationSequence& seq);

struct TrainOptions {
  int states = 6;
  int gaussians = 32;
  int iters = 8;  // EM iterations per mixture stage
};

struct TrainStats {
  std::vector<double> log_likelihood;  // total corpus LL after each EM iteration
  std::vector<int> stage_starts;       // index into log_likelihood per mixture stage
  int variance_floor_hits = 0;
};

// Flat start (uniform segmentation + global statistics) followed by
// embedded Baum-Welch; Gaussians grown 1 -> target by splitting the
// heaviest component with re-estimation between stages.
// iters == 0 returns the flat-start set unchanged.
HmmSet train_embedded(const std::vector<std::pair<ObservationSequence, std::string>>& corpus,
                      const std::string& charset, const TrainOptions& opts,
                      TrainStats* stats = nullptr);

void save_hmm(const HmmSet& set, const std::string& path);
HmmSet load_hmm(const std::string& path);

}  // namespace ctrec
