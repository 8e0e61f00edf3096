#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ctrec/features.hpp"
#include "ctrec/image.hpp"

namespace ctrec {

// 8 entries in {+1,-1}, index order (R,G,B,Y,Cr,Cb,S,V).
struct ChannelLabelVector {
  std::array<std::int8_t, 8> bits{{-1, -1, -1, -1, -1, -1, -1, -1}};

  std::string to_string() const;
  static ChannelLabelVector from_string(const std::string& s);
};

struct LabeledCorpusEntry {
  std::string id;
  SelectionDescriptor descriptor;
  ChannelLabelVector labels;
};

// One linear binary classifier per selectable channel.
struct SelectorModel {
  FeatureKind kind = FeatureKind::Wavelet;
  int dim = 0;
  double train_c = 1.0;
  struct Classifier {
    std::vector<double> w;
    double b = 0.0;
    bool constant = false;  // degenerate class: single label in training data
  };
  std::array<Classifier, 8> classifiers;

  double decision(int k, const std::vector<double>& x) const;
};

struct SvmTrainReport {
  std::array<double, 8> objective{};  // primal objective per class
  std::array<bool, 8> constant{};
};

// Soft-margin binary linear SVM: min 1/2|w|^2 + C sum xi,
// y_i (w.x_i + b) >= 1 - xi. SMO over the dual with exact bias handling.
// Exposed on its own for the small-scale oracle tests.
void train_binary_svm(const std::vector<std::vector<double>>& xs, const std::vector<int>& ys,
                      double c, std::vector<double>* w, double* b, double eps = 1e-6);

double svm_primal_objective(const std::vector<std::vector<double>>& xs, const std::vector<int>& ys,
                            double c, const std::vector<double>& w, double b);

SelectorModel train_ova_svm(const std::vector<LabeledCorpusEntry>& data, double c = 1.0,
                            SvmTrainReport* report = nullptr);

// bit_k = sign(f_k(x)) with sign(0) = -1; confidence_k = |f_k(x)|.
ChannelLabelVector predict(const SelectorModel& model, const SelectionDescriptor& x,
                           std::array<double, 8>* confidences = nullptr);

// Highest-confidence positive class; falls back to argmax f_k when no
// class is positive. Ties break toward the lowest channel index.
Channel select_channel(const SelectorModel& model, const SelectionDescriptor& x);

void save_selector(const SelectorModel& model, const std::string& path);
SelectorModel load_selector(const std::string& path);

}  // namespace ctrec
