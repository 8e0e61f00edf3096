#include "ctrec/hmm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "ctrec/parallel.hpp"

namespace ctrec {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLog2Pi = 1.8378770664093454836;

double log_sum_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// Per-component log density with cached normalizer.
struct PreparedState {
  // per component: log(weight) - 0.5*(D*log2pi + sum log var)
  std::vector<double> log_const;
  std::vector<const GaussianComponent*> comps;
};

PreparedState prepare(const GmmState& s) {
  PreparedState p;
  for (const auto& c : s.comps) {
    double lc = std::log(c.weight) - 0.5 * (c.mean.size() * kLog2Pi);
    for (double v : c.var) lc -= 0.5 * std::log(v);
    p.log_const.push_back(lc);
    p.comps.push_back(&c);
  }
  return p;
}

double prepared_log_density(const PreparedState& p, const std::vector<double>& x,
                            std::vector<double>* comp_log = nullptr) {
  double best = kNegInf;
  size_t m = p.comps.size();
  std::vector<double> terms(m);
  for (size_t k = 0; k < m; ++k) {
    const auto& c = *p.comps[k];
    double q = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
      double d = x[i] - c.mean[i];
      q += d * d / c.var[i];
    }
    terms[k] = p.log_const[k] - 0.5 * q;
    best = std::max(best, terms[k]);
  }
  if (comp_log) *comp_log = terms;
  if (best == kNegInf) return kNegInf;
  double s = 0.0;
  for (double t : terms) s += std::exp(t - best);
  return best + std::log(s);
}

}  // namespace

double gmm_log_density(const GmmState& state, const std::vector<double>& x) {
  for (const auto& c : state.comps)
    if (c.mean.size() != x.size()) fail(Err::DimensionMismatch, "gmm dimension mismatch");
  PreparedState p = prepare(state);
  return prepared_log_density(p, x);
}

Lexicon load_lexicon(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Err::Io, "cannot open " + path);
  Lexicon lex;
  std::string word;
  while (std::getline(in, word)) {
    while (!word.empty() && (word.back() == '\r' || word.back() == ' ')) word.pop_back();
    if (!word.empty()) lex.entries.push_back(word);
  }
  if (lex.entries.empty()) fail(Err::EmptyLexicon, "lexicon file has no entries");
  return lex;
}

void save_lexicon(const Lexicon& lex, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(Err::Io, "cannot create " + path);
  for (const auto& w : lex.entries) out << w << "\n";
}

WordModel concat_word_model(const HmmSet& set, const std::string& word) {
  WordModel wm;
  for (char ch : word) {
    auto it = set.models.find(ch);
    if (it == set.models.end())
      fail(Err::UnknownCharacter, std::string("no model for character '") + ch + "'");
    for (size_t s = 0; s < it->second.states.size(); ++s) {
      wm.states.push_back(&it->second.states[s]);
      wm.trans.push_back(it->second.trans[s]);
    }
  }
  return wm;
}

namespace {

// Emission matrix: log b_s(o_t), s-major? t-major layout [t][s].
std::vector<std::vector<double>> emissions(const WordModel& model, const ObservationSequence& seq) {
  const int t_len = seq.length();
  const int n = static_cast<int>(model.states.size());
  std::vector<PreparedState> prep;
  prep.reserve(n);
  for (const GmmState* s : model.states) prep.push_back(prepare(*s));
  std::vector<std::vector<double>> b(t_len, std::vector<double>(n));
  for (int t = 0; t < t_len; ++t)
    for (int s = 0; s < n; ++s) b[t][s] = prepared_log_density(prep[s], seq.vectors[t]);
  return b;
}

double log_trans(const WordModel& m, int from, int to) {
  if (to == from) return m.trans[from][0] > 0 ? std::log(m.trans[from][0]) : kNegInf;
  if (to == from + 1) return m.trans[from][1] > 0 ? std::log(m.trans[from][1]) : kNegInf;
  return kNegInf;
}

}  // namespace

double forward_log_likelihood(const WordModel& model, const ObservationSequence& seq) {
  const int t_len = seq.length();
  if (t_len == 0) fail(Err::EmptySequence, "empty observation sequence");
  const int n = static_cast<int>(model.states.size());
  if (t_len < n) return kNegInf;  // no skip transitions: unreachable
  auto b = emissions(model, seq);
  std::vector<double> alpha(n, kNegInf), next(n);
  alpha[0] = b[0][0];
  for (int t = 1; t < t_len; ++t) {
    for (int s = 0; s < n; ++s) {
      double v = alpha[s] == kNegInf ? kNegInf : alpha[s] + log_trans(model, s, s);
      if (s > 0 && alpha[s - 1] != kNegInf)
        v = log_sum_exp(v, alpha[s - 1] + log_trans(model, s - 1, s));
      next[s] = v == kNegInf ? kNegInf : v + b[t][s];
    }
    alpha.swap(next);
  }
  // Paths must end in the last state; no exit factor is applied, so a
  // single state with self-loop 1 scores the plain sum of frame densities.
  return alpha[n - 1];
}

ViterbiResult viterbi(const WordModel& model, const ObservationSequence& seq) {
  const int t_len = seq.length();
  if (t_len == 0) fail(Err::EmptySequence, "empty observation sequence");
  const int n = static_cast<int>(model.states.size());
  ViterbiResult res;
  if (t_len < n) {
    res.log_score = kNegInf;
    return res;
  }
  auto b = emissions(model, seq);
  std::vector<std::vector<int>> back(t_len, std::vector<int>(n, -1));
  std::vector<double> delta(n, kNegInf), next(n);
  delta[0] = b[0][0];
  for (int t = 1; t < t_len; ++t) {
    for (int s = 0; s < n; ++s) {
      double stay = delta[s] == kNegInf ? kNegInf : delta[s] + log_trans(model, s, s);
      double adv = (s > 0 && delta[s - 1] != kNegInf)
                       ? delta[s - 1] + log_trans(model, s - 1, s)
                       : kNegInf;
      if (stay >= adv) {
        next[s] = stay == kNegInf ? kNegInf : stay + b[t][s];
        back[t][s] = s;
      } else {
        next[s] = adv + b[t][s];
        back[t][s] = s - 1;
      }
    }
    delta.swap(next);
  }
  res.log_score = delta[n - 1];
  res.path.resize(t_len);
  int s = n - 1;
  for (int t = t_len - 1; t >= 0; --t) {
    res.path[t] = s;
    if (t > 0) s = back[t][s];
  }
  return res;
}

RecognitionResult recognize_word(const HmmSet& set, const Lexicon& lexicon,
                                 const ObservationSequence& seq) {
  if (lexicon.entries.empty()) fail(Err::EmptyLexicon, "empty lexicon");
  if (seq.length() == 0) fail(Err::EmptySequence, "empty observation sequence");
  const int t_len = seq.length();

  // Shared per-frame emission cache over (character, state).
  struct StateRef {
    const GmmState* gmm;
    std::array<double, 2> trans;
  };
  std::map<char, std::vector<StateRef>> char_states;
  std::map<char, std::vector<std::vector<double>>> char_emis;  // [state][t]
  for (const auto& entry : lexicon.entries) {
    for (char ch : entry) {
      if (char_states.count(ch)) continue;
      auto it = set.models.find(ch);
      if (it == set.models.end())
        fail(Err::UnknownCharacter, std::string("no model for character '") + ch + "'");
      std::vector<StateRef> refs;
      std::vector<std::vector<double>> emis;
      for (size_t s = 0; s < it->second.states.size(); ++s) {
        refs.push_back({&it->second.states[s], it->second.trans[s]});
        PreparedState prep = prepare(it->second.states[s]);
        std::vector<double> row(t_len);
        for (int t = 0; t < t_len; ++t) row[t] = prepared_log_density(prep, seq.vectors[t]);
        emis.push_back(std::move(row));
      }
      char_states.emplace(ch, std::move(refs));
      char_emis.emplace(ch, std::move(emis));
    }
  }

  const int m = static_cast<int>(lexicon.entries.size());
  std::vector<double> scores(m);
  std::vector<std::vector<int>> paths(m);
#pragma omp parallel for schedule(dynamic) if (m > 1)
  for (int e = 0; e < m; ++e) {
    const std::string& word = lexicon.entries[e];
    // Assemble the flat chain for this entry.
    std::vector<const std::vector<double>*> emis;
    std::vector<std::array<double, 2>> trans;
    for (char ch : word) {
      const auto& refs = char_states.at(ch);
      const auto& ce = char_emis.at(ch);
      for (size_t s = 0; s < refs.size(); ++s) {
        emis.push_back(&ce[s]);
        trans.push_back(refs[s].trans);
      }
    }
    const int n = static_cast<int>(emis.size());
    if (t_len < n) {
      scores[e] = kNegInf;
      continue;
    }
    std::vector<std::vector<int>> back(t_len, std::vector<int>(n, -1));
    std::vector<double> delta(n, kNegInf), next(n);
    delta[0] = (*emis[0])[0];
    for (int t = 1; t < t_len; ++t) {
      for (int s = 0; s < n; ++s) {
        double lself = trans[s][0] > 0 ? std::log(trans[s][0]) : kNegInf;
        double stay = delta[s] == kNegInf ? kNegInf : delta[s] + lself;
        double adv = kNegInf;
        if (s > 0 && delta[s - 1] != kNegInf) {
          double ladv = trans[s - 1][1] > 0 ? std::log(trans[s - 1][1]) : kNegInf;
          adv = delta[s - 1] + ladv;
        }
        if (stay >= adv) {
          next[s] = stay == kNegInf ? kNegInf : stay + (*emis[s])[t];
          back[t][s] = s;
        } else {
          next[s] = adv + (*emis[s])[t];
          back[t][s] = s - 1;
        }
      }
      delta.swap(next);
    }
    scores[e] = delta[n - 1];
    std::vector<int> path(t_len);
    int s = n - 1;
    for (int t = t_len - 1; t >= 0; --t) {
      path[t] = s;
      if (t > 0) s = back[t][s];
    }
    paths[e] = std::move(path);
  }

  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return scores[a] > scores[b]; });

  RecognitionResult res;
  res.hypotheses.reserve(m);
  for (int idx : order) res.hypotheses.emplace_back(lexicon.entries[idx], scores[idx]);
  res.best_path = paths[order[0]];
  return res;
}

// ------------------------------------------------------------- training

namespace {

struct Accumulator {
  // Indexed by [char_index][state][comp].
  std::vector<std::vector<std::vector<double>>> occ;
  std::vector<std::vector<std::vector<std::vector<double>>>> sum_x;
  std::vector<std::vector<std::vector<std::vector<double>>>> sum_x2;
  std::vector<std::vector<double>> self_count;
  std::vector<std::vector<double>> adv_count;
  double ll = 0.0;

  void init(int chars, int states, int comps, int dim) {
    occ.assign(chars, std::vector<std::vector<double>>(states, std::vector<double>(comps, 0.0)));
    sum_x.assign(chars, std::vector<std::vector<std::vector<double>>>(
                            states, std::vector<std::vector<double>>(
                                        comps, std::vector<double>(dim, 0.0))));
    sum_x2 = sum_x;
    self_count.assign(chars, std::vector<double>(states, 0.0));
    adv_count.assign(chars, std::vector<double>(states, 0.0));
    ll = 0.0;
  }

  void add(const Accumulator& o) {
    for (size_t c = 0; c < occ.size(); ++c)
      for (size_t s = 0; s < occ[c].size(); ++s) {
        self_count[c][s] += o.self_count[c][s];
        adv_count[c][s] += o.adv_count[c][s];
        for (size_t k = 0; k < occ[c][s].size(); ++k) {
          occ[c][s][k] += o.occ[c][s][k];
          for (size_t i = 0; i < sum_x[c][s][k].size(); ++i) {
            sum_x[c][s][k][i] += o.sum_x[c][s][k][i];
            sum_x2[c][s][k][i] += o.sum_x2[c][s][k][i];
          }
        }
      }
    ll += o.ll;
  }
};

// Embedded forward-backward for one utterance; fills acc, returns log-lik.
// Returns -inf (and accumulates nothing) for impossible alignments.
double accumulate_utterance(const HmmSet& set, const std::vector<int>& char_idx,
                            const std::string& transcript, const ObservationSequence& seq,
                            Accumulator* acc) {
  const int t_len = seq.length();
  const int sps = set.num_states;
  const int n = static_cast<int>(transcript.size()) * sps;
  if (t_len < n) return kNegInf;

  struct Slot {
    int ci;  // index into charset
    int s;   // state within character
    const GmmState* gmm;
    double lself, ladv;
  };
  std::vector<Slot> slots;
  slots.reserve(n);
  for (size_t p = 0; p < transcript.size(); ++p) {
    const CharacterModel& cm = set.models.at(transcript[p]);
    for (int s = 0; s < sps; ++s) {
      Slot sl;
      sl.ci = char_idx[p];
      sl.s = s;
      sl.gmm = &cm.states[s];
      sl.lself = cm.trans[s][0] > 0 ? std::log(cm.trans[s][0]) : kNegInf;
      sl.ladv = cm.trans[s][1] > 0 ? std::log(cm.trans[s][1]) : kNegInf;
      slots.push_back(sl);
    }
  }

  std::vector<PreparedState> prep;
  prep.reserve(n);
  for (const Slot& sl : slots) prep.push_back(prepare(*sl.gmm));

  // b[t][s] and per-component logs for the mixture posteriors.
  std::vector<std::vector<double>> b(t_len, std::vector<double>(n));
  std::vector<std::vector<std::vector<double>>> bc(t_len);
  for (int t = 0; t < t_len; ++t) {
    bc[t].resize(n);
    for (int s = 0; s < n; ++s) b[t][s] = prepared_log_density(prep[s], seq.vectors[t], &bc[t][s]);
  }

  std::vector<std::vector<double>> alpha(t_len, std::vector<double>(n, kNegInf));
  std::vector<std::vector<double>> beta(t_len, std::vector<double>(n, kNegInf));
  alpha[0][0] = b[0][0];
  for (int t = 1; t < t_len; ++t)
    for (int s = 0; s < n; ++s) {
      double v = alpha[t - 1][s] == kNegInf ? kNegInf : alpha[t - 1][s] + slots[s].lself;
      if (s > 0 && alpha[t - 1][s - 1] != kNegInf)
        v = log_sum_exp(v, alpha[t - 1][s - 1] + slots[s - 1].ladv);
      alpha[t][s] = v == kNegInf ? kNegInf : v + b[t][s];
    }
  double ll = alpha[t_len - 1][n - 1];
  if (ll == kNegInf) return kNegInf;

  beta[t_len - 1][n - 1] = 0.0;
  for (int t = t_len - 2; t >= 0; --t)
    for (int s = 0; s < n; ++s) {
      double v = beta[t + 1][s] == kNegInf ? kNegInf : slots[s].lself + b[t + 1][s] + beta[t + 1][s];
      if (s + 1 < n && beta[t + 1][s + 1] != kNegInf)
        v = log_sum_exp(v, slots[s].ladv + b[t + 1][s + 1] + beta[t + 1][s + 1]);
      beta[t][s] = v;
    }

  const int dim = set.dim;
  for (int t = 0; t < t_len; ++t) {
    for (int s = 0; s < n; ++s) {
      if (alpha[t][s] == kNegInf || beta[t][s] == kNegInf) continue;
      double lgamma = alpha[t][s] + beta[t][s] - ll;
      if (lgamma < -40.0) continue;
      double gamma = std::exp(lgamma);
      const Slot& sl = slots[s];
      // Mixture responsibilities within the state.
      const std::vector<double>& clog = bc[t][s];
      for (size_t k = 0; k < clog.size(); ++k) {
        double g = gamma * std::exp(clog[k] - b[t][s]);
        if (g <= 0.0) continue;
        acc->occ[sl.ci][sl.s][k] += g;
        auto& sx = acc->sum_x[sl.ci][sl.s][k];
        auto& sx2 = acc->sum_x2[sl.ci][sl.s][k];
        const auto& x = seq.vectors[t];
        for (int i = 0; i < dim; ++i) {
          sx[i] += g * x[i];
          sx2[i] += g * x[i] * x[i];
        }
      }
      // Transition posteriors.
      if (t + 1 < t_len) {
        double xi_self = alpha[t][s] + slots[s].lself + b[t + 1][s] + beta[t + 1][s] - ll;
        if (xi_self > -40.0) acc->self_count[sl.ci][sl.s] += std::exp(xi_self);
        if (s + 1 < n) {
          double xi_adv = alpha[t][s] + slots[s].ladv + b[t + 1][s + 1] + beta[t + 1][s + 1] - ll;
          if (xi_adv > -40.0) acc->adv_count[sl.ci][sl.s] += std::exp(xi_adv);
        }
      }
    }
  }
  acc->ll = ll;
  return ll;
}

}  // namespace

HmmSet train_embedded(const std::vector<std::pair<ObservationSequence, std::string>>& corpus,
                      const std::string& charset, const TrainOptions& opts, TrainStats* stats) {
  if (corpus.empty()) fail(Err::InsufficientData, "empty training corpus");
  const int dim = corpus[0].first.vectors.empty() ? kPhogDim
                                                  : static_cast<int>(corpus[0].first.vectors[0].size());

  std::map<char, int> char_index;
  for (size_t i = 0; i < charset.size(); ++i) char_index[charset[i]] = static_cast<int>(i);
  std::vector<int> seen(charset.size(), 0);
  for (const auto& [seq, text] : corpus) {
    if (seq.length() == 0) fail(Err::EmptySequence, "empty training sequence");
    for (char ch : text) {
      auto it = char_index.find(ch);
      if (it == char_index.end())
        fail(Err::UnknownCharacter, std::string("transcript character '") + ch + "' not in charset");
      seen[it->second] = 1;
    }
  }
  for (size_t i = 0; i < charset.size(); ++i)
    if (!seen[i])
      fail(Err::InsufficientData,
           std::string("charset character '") + charset[i] + "' has no training sample");

  // Global statistics.
  std::vector<double> gsum(dim, 0.0), gsum2(dim, 0.0);
  long frames = 0;
  for (const auto& [seq, text] : corpus) {
    for (const auto& x : seq.vectors) {
      for (int i = 0; i < dim; ++i) {
        gsum[i] += x[i];
        gsum2[i] += x[i] * x[i];
      }
      ++frames;
    }
  }
  std::vector<double> gmean(dim), gvar(dim);
  for (int i = 0; i < dim; ++i) {
    gmean[i] = gsum[i] / frames;
    gvar[i] = std::max(kVarianceFloor, gsum2[i] / frames - gmean[i] * gmean[i]);
  }

  // Flat start: uniform time segmentation pooled per (character, state);
  // states with too few frames fall back to the global statistics.
  const int sps = opts.states;
  const int nchars = static_cast<int>(charset.size());
  std::vector<std::vector<double>> fs_cnt(nchars, std::vector<double>(sps, 0.0));
  std::vector<std::vector<std::vector<double>>> fs_sum(
      nchars, std::vector<std::vector<double>>(sps, std::vector<double>(dim, 0.0)));
  auto fs_sum2 = fs_sum;
  for (const auto& [seq, text] : corpus) {
    int total_states = static_cast<int>(text.size()) * sps;
    int t_len = seq.length();
    for (int t = 0; t < t_len; ++t) {
      int slot = static_cast<int>(static_cast<long>(t) * total_states / t_len);
      int ci = char_index[text[slot / sps]];
      int s = slot % sps;
      fs_cnt[ci][s] += 1.0;
      for (int i = 0; i < dim; ++i) {
        fs_sum[ci][s][i] += seq.vectors[t][i];
        fs_sum2[ci][s][i] += seq.vectors[t][i] * seq.vectors[t][i];
      }
    }
  }

  HmmSet set;
  set.charset = charset;
  set.num_states = sps;
  set.num_gaussians = 1;
  set.dim = dim;
  for (int c = 0; c < nchars; ++c) {
    CharacterModel cm;
    cm.symbol = charset[c];
    cm.states.resize(sps);
    cm.trans.assign(sps, {0.5, 0.5});
    for (int s = 0; s < sps; ++s) {
      GaussianComponent comp;
      comp.weight = 1.0;
      if (fs_cnt[c][s] >= 2.0) {
        comp.mean.resize(dim);
        comp.var.resize(dim);
        for (int i = 0; i < dim; ++i) {
          double m = fs_sum[c][s][i] / fs_cnt[c][s];
          comp.mean[i] = m;
          comp.var[i] = std::max(kVarianceFloor, fs_sum2[c][s][i] / fs_cnt[c][s] - m * m);
        }
      } else {
        comp.mean = gmean;
        comp.var = gvar;
      }
      cm.states[s].comps.push_back(std::move(comp));
    }
    set.models.emplace(charset[c], std::move(cm));
  }

  if (opts.iters == 0) {
    set.num_gaussians = 1;
    return set;
  }

  std::vector<std::vector<int>> idx_cache;
  idx_cache.reserve(corpus.size());
  for (const auto& [seq, text] : corpus) {
    std::vector<int> idx;
    idx.reserve(text.size());
    for (char ch : text) idx.push_back(char_index[ch]);
    idx_cache.push_back(std::move(idx));
  }

  int floor_hits = 0;

  auto run_em = [&](int iters) {
    int comps = static_cast<int>(set.models.begin()->second.states[0].comps.size());
    for (int it = 0; it < iters; ++it) {
      Accumulator total;
      total.init(nchars, sps, comps, dim);
      const int batch = 32;
      const int ncorpus = static_cast<int>(corpus.size());
      std::vector<Accumulator> accs(std::min(batch, ncorpus));
      for (int base = 0; base < ncorpus; base += batch) {
        int bn = std::min(batch, ncorpus - base);
#pragma omp parallel for schedule(dynamic) if (bn > 1)
        for (int u = 0; u < bn; ++u) {
          accs[u].init(nchars, sps, comps, dim);
          accumulate_utterance(set, idx_cache[base + u], corpus[base + u].second,
                               corpus[base + u].first, &accs[u]);
        }
        for (int u = 0; u < bn; ++u) total.add(accs[u]);  // fixed order
      }

      // M-step.
      for (int c = 0; c < nchars; ++c) {
        CharacterModel& cm = set.models[charset[c]];
        for (int s = 0; s < sps; ++s) {
          double occ_state = 0.0;
          for (int k = 0; k < comps; ++k) occ_state += total.occ[c][s][k];
          if (occ_state > 1e-8) {
            for (int k = 0; k < comps; ++k) {
              double o = total.occ[c][s][k];
              GaussianComponent& comp = cm.states[s].comps[k];
              if (o > 1e-8) {
                for (int i = 0; i < dim; ++i) {
                  double m = total.sum_x[c][s][k][i] / o;
                  double v = total.sum_x2[c][s][k][i] / o - m * m;
                  comp.mean[i] = m;
                  if (v < kVarianceFloor) {
                    v = kVarianceFloor;
                    ++floor_hits;
                  }
                  comp.var[i] = v;
                }
              }
              comp.weight = std::max(1e-10, o / occ_state);
            }
            // renormalize weights
            double wsum = 0.0;
            for (auto& comp : cm.states[s].comps) wsum += comp.weight;
            for (auto& comp : cm.states[s].comps) comp.weight /= wsum;
          }
          double denom = total.self_count[c][s] + total.adv_count[c][s];
          if (denom > 1e-8) {
            double self = total.self_count[c][s] / denom;
            self = std::min(std::max(self, 1e-6), 1.0 - 1e-6);
            cm.trans[s] = {self, 1.0 - self};
          }
        }
      }
      if (stats) stats->log_likelihood.push_back(total.ll);
    }
  };

  // Grow mixtures 1 -> target by doubling stages.
  if (stats) stats->stage_starts.push_back(0);
  run_em(opts.iters);
  int target = std::max(1, opts.gaussians);
  int cur = 1;
  while (cur < target) {
    int next = std::min(2 * cur, target);
    for (auto& [sym, cm] : set.models) {
      for (auto& st : cm.states) {
        while (static_cast<int>(st.comps.size()) < next) {
          // Split the heaviest component.
          size_t heavy = 0;
          for (size_t k = 1; k < st.comps.size(); ++k)
            if (st.comps[k].weight > st.comps[heavy].weight) heavy = k;
          GaussianComponent a = st.comps[heavy];
          GaussianComponent b = a;
          a.weight *= 0.5;
          b.weight *= 0.5;
          for (int i = 0; i < dim; ++i) {
            double sd = std::sqrt(a.var[i]);
            a.mean[i] += 0.2 * sd;
            b.mean[i] -= 0.2 * sd;
          }
          st.comps[heavy] = std::move(a);
          st.comps.push_back(std::move(b));
        }
      }
    }
    cur = next;
    set.num_gaussians = cur;
    if (stats) stats->stage_starts.push_back(static_cast<int>(stats->log_likelihood.size()));
    run_em(opts.iters);
  }
  set.num_gaussians = target;
  if (stats) stats->variance_floor_hits = floor_hits;
  return set;
}

// --------------------------------------------------------- serialization

namespace {

void write_vec(std::ofstream& out, const std::vector<double>& v) {
  char buf[64];
  for (double x : v) {
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    out << ' ' << buf;
  }
}

}  // namespace

void save_hmm(const HmmSet& set, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(Err::Io, "cannot create " + path);
  out << "ctrec-hmm v1\n";
  out << "charset " << set.charset << "\n";
  out << "states " << set.num_states << "\n";
  out << "gaussians " << set.num_gaussians << "\n";
  out << "dim " << set.dim << "\n";
  char buf[64];
  for (const auto& [sym, cm] : set.models) {
    out << "char " << sym << "\n";
    for (size_t s = 0; s < cm.states.size(); ++s) {
      std::snprintf(buf, sizeof(buf), "%.17g", cm.trans[s][0]);
      out << "trans " << buf;
      std::snprintf(buf, sizeof(buf), "%.17g", cm.trans[s][1]);
      out << ' ' << buf << "\n";
      out << "state " << s << " comps " << cm.states[s].comps.size() << "\n";
      for (const auto& comp : cm.states[s].comps) {
        std::snprintf(buf, sizeof(buf), "%.17g", comp.weight);
        out << "comp " << buf << "\n";
        out << "mean";
        write_vec(out, comp.mean);
        out << "\nvar";
        write_vec(out, comp.var);
        out << "\n";
      }
    }
  }
  if (!out) fail(Err::Io, "write error on " + path);
}

HmmSet load_hmm(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Err::Io, "cannot open " + path);
  std::string line;
  auto next_line = [&]() -> std::string& {
    if (!std::getline(in, line)) fail(Err::Format, "truncated model file");
    return line;
  };
  if (next_line() != "ctrec-hmm v1") fail(Err::Format, "bad model header");
  HmmSet set;
  {
    std::istringstream ss(next_line());
    std::string key;
    ss >> key >> set.charset;
    if (key != "charset") fail(Err::Format, "bad charset line");
  }
  auto read_int = [&](const char* want) {
    std::istringstream ss(next_line());
    std::string key;
    int v;
    ss >> key >> v;
    if (key != want) fail(Err::Format, std::string("expected ") + want);
    return v;
  };
  set.num_states = read_int("states");
  set.num_gaussians = read_int("gaussians");
  set.dim = read_int("dim");
  for (size_t c = 0; c < set.charset.size(); ++c) {
    std::istringstream ss(next_line());
    std::string key;
    char sym;
    ss >> key >> sym;
    if (key != "char") fail(Err::Format, "expected char record");
    CharacterModel cm;
    cm.symbol = sym;
    cm.states.resize(set.num_states);
    cm.trans.resize(set.num_states);
    for (int s = 0; s < set.num_states; ++s) {
      {
        std::istringstream ts(next_line());
        std::string k;
        ts >> k >> cm.trans[s][0] >> cm.trans[s][1];
        if (k != "trans") fail(Err::Format, "expected trans record");
      }
      int ncomp = 0;
      {
        std::istringstream hs(next_line());
        std::string k1, k2;
        int sidx;
        hs >> k1 >> sidx >> k2 >> ncomp;
        if (k1 != "state" || k2 != "comps") fail(Err::Format, "expected state record");
      }
      for (int k = 0; k < ncomp; ++k) {
        GaussianComponent comp;
        {
          std::istringstream cs(next_line());
          std::string kk;
          cs >> kk >> comp.weight;
          if (kk != "comp") fail(Err::Format, "expected comp record");
        }
        auto read_vec = [&](const char* want, std::vector<double>* v) {
          std::istringstream vs(next_line());
          std::string kk;
          vs >> kk;
          if (kk != want) fail(Err::Format, std::string("expected ") + want);
          v->clear();
          v->reserve(set.dim);
          double x;
          while (vs >> x) v->push_back(x);
          if (static_cast<int>(v->size()) != set.dim) fail(Err::Format, "vector length mismatch");
        };
        read_vec("mean", &comp.mean);
        read_vec("var", &comp.var);
        cm.states[s].comps.push_back(std::move(comp));
      }
    }
    set.models.emplace(sym, std::move(cm));
  }
  return set;
}

}  // namespace ctrec
