#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "ctrec/rng.hpp"
#include "ctrec/selector.hpp"
#include "oracles.hpp"

using namespace ctrec;

namespace {

SelectionDescriptor desc_of(std::vector<double> v) {
  SelectionDescriptor d;
  d.kind = FeatureKind::Wavelet;
  d.per_channel_len = static_cast<int>(v.size());
  d.values = std::move(v);
  return d;
}

LabeledCorpusEntry entry(std::vector<double> x, const std::array<int, 8>& bits) {
  LabeledCorpusEntry e;
  e.descriptor = desc_of(std::move(x));
  for (int i = 0; i < 8; ++i) e.labels.bits[i] = static_cast<std::int8_t>(bits[i]);
  return e;
}

SelectorModel constant_model(int dim, const std::array<double, 8>& biases) {
  SelectorModel m;
  m.dim = dim;
  for (int k = 0; k < 8; ++k) {
    m.classifiers[k].w.assign(dim, 0.0);
    m.classifiers[k].b = biases[k];
  }
  return m;
}

}  // namespace

TEST_CASE("analytic max-margin solution") {
  // {(2,0) -> +1, (-2,0) -> -1} duplicated: w = (0.5, 0), b = 0.
  std::vector<std::vector<double>> xs = {{2, 0}, {2, 0}, {-2, 0}, {-2, 0}};
  std::vector<int> ys = {1, 1, -1, -1};
  std::vector<double> w;
  double b;
  train_binary_svm(xs, ys, 1.0, &w, &b, 1e-8);
  CHECK(w[0] == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(std::fabs(w[1]) < 1e-3);
  CHECK(std::fabs(b) < 1e-3);
  // geometric margin 1/|w| = 2
  double margin = 1.0 / std::hypot(w[0], w[1]);
  CHECK(margin == doctest::Approx(2.0).epsilon(1e-3));
  for (size_t i = 0; i < xs.size(); ++i)
    CHECK(ys[i] * (w[0] * xs[i][0] + w[1] * xs[i][1] + b) > 0);
}

TEST_CASE("degenerate single-label class becomes constant classifier") {
  std::vector<LabeledCorpusEntry> data;
  data.push_back(entry({1.0, 0.0}, {1, 1, -1, -1, -1, -1, -1, -1}));
  data.push_back(entry({0.0, 1.0}, {1, -1, -1, -1, -1, -1, -1, -1}));
  SvmTrainReport rep;
  SelectorModel m = train_ova_svm(data, 1.0, &rep);
  CHECK(rep.constant[0]);           // all +1
  CHECK(rep.constant[2]);           // all -1
  CHECK_FALSE(rep.constant[1]);     // mixed
  std::array<double, 8> conf;
  ChannelLabelVector p = predict(m, desc_of({0.3, 0.7}), &conf);
  CHECK(p.bits[0] == 1);   // constant +1
  CHECK(p.bits[2] == -1);  // constant -1
}

TEST_CASE("xor fixture objective matches enumeration oracle") {
  std::vector<std::vector<double>> xs = {{1, 1}, {-1, -1}, {1, -1}, {-1, 1}};
  std::vector<int> ys = {1, 1, -1, -1};
  std::vector<double> w;
  double b;
  train_binary_svm(xs, ys, 1.0, &w, &b, 1e-8);
  double primal = svm_primal_objective(xs, ys, 1.0, w, b);
  oracle::QpSolution sol = oracle::qp_enumerate(xs, ys, 1.0);
  REQUIRE(sol.found);
  CHECK(primal == doctest::Approx(sol.dual_objective).epsilon(1e-3));
}

TEST_CASE("random small fixtures match the QP oracle") {
  SplitMix64 rng(2024);
  for (int rep = 0; rep < 8; ++rep) {
    int n = 4 + static_cast<int>(rng.below(5));  // 4..8 points
    int d = 2 + static_cast<int>(rng.below(3));  // 2..4 dims
    std::vector<std::vector<double>> xs(n, std::vector<double>(d));
    std::vector<int> ys(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) xs[i][j] = rng.uniform(-2.0, 2.0);
      ys[i] = rng.next() & 1 ? 1 : -1;
    }
    bool pos = false, neg = false;
    for (int y : ys) (y > 0 ? pos : neg) = true;
    if (!pos || !neg) {
      ys[0] = 1;
      ys[1] = -1;
    }
    double c = rep % 2 ? 1.0 : 0.5;
    std::vector<double> w;
    double b;
    train_binary_svm(xs, ys, c, &w, &b, 1e-8);
    double primal = svm_primal_objective(xs, ys, c, w, b);
    oracle::QpSolution sol = oracle::qp_enumerate(xs, ys, c);
    REQUIRE(sol.found);
    CHECK(primal == doctest::Approx(sol.dual_objective).epsilon(1e-3));
  }
}

TEST_CASE("kkt residual reproduces reported objective") {
  SplitMix64 rng(5);
  std::vector<LabeledCorpusEntry> data;
  for (int i = 0; i < 20; ++i) {
    std::vector<double> x = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    std::array<int, 8> bits;
    for (int k = 0; k < 8; ++k) bits[k] = (x[k % 3] + 0.2 * rng.uniform(-1, 1)) > 0 ? 1 : -1;
    data.push_back(entry(std::move(x), bits));
  }
  SvmTrainReport rep;
  SelectorModel m = train_ova_svm(data, 1.0, &rep);
  for (int k = 0; k < 8; ++k) {
    if (rep.constant[k]) continue;
    double obj = 0.5 * 0.0;
    double wn = 0;
    for (double wv : m.classifiers[k].w) wn += wv * wv;
    obj = 0.5 * wn;
    for (const auto& e : data) {
      double f = m.decision(k, e.descriptor.values);
      obj += 1.0 * std::max(0.0, 1.0 - e.labels.bits[k] * f);
    }
    CHECK(obj == doctest::Approx(rep.objective[k]).epsilon(1e-6));
  }
}

TEST_CASE("increasing C never hurts separable training accuracy") {
  SplitMix64 rng(6);
  std::vector<std::vector<double>> xs;
  std::vector<int> ys;
  for (int i = 0; i < 30; ++i) {
    double label = i % 2 ? 1.0 : -1.0;
    xs.push_back({label * 2.0 + rng.uniform(-0.5, 0.5), rng.uniform(-1, 1)});
    ys.push_back(static_cast<int>(label));
  }
  double prev_acc = -1.0;
  for (double c : {0.1, 1.0, 10.0}) {
    std::vector<double> w;
    double b;
    train_binary_svm(xs, ys, c, &w, &b, 1e-8);
    int correct = 0;
    for (size_t i = 0; i < xs.size(); ++i)
      correct += ys[i] * (w[0] * xs[i][0] + w[1] * xs[i][1] + b) > 0;
    double acc = static_cast<double>(correct) / xs.size();
    CHECK(acc >= prev_acc);
    prev_acc = acc;
  }
}

TEST_CASE("predict signs and confidences") {
  SelectorModel m = constant_model(2, {0.4, -0.2, 0.0, 1.5, -3.0, 0.1, -0.1, 2.0});
  std::array<double, 8> conf;
  ChannelLabelVector p = predict(m, desc_of({0.0, 0.0}), &conf);
  CHECK(p.bits[0] == 1);
  CHECK(p.bits[1] == -1);
  CHECK(p.bits[2] == -1);  // sign(0) = -1
  CHECK(conf[0] == doctest::Approx(0.4));
  CHECK(conf[1] == doctest::Approx(0.2));
  CHECK(conf[4] == doctest::Approx(3.0));
}

TEST_CASE("zero input yields the bias") {
  SplitMix64 rng(9);
  SelectorModel m;
  m.dim = 5;
  for (int k = 0; k < 8; ++k) {
    m.classifiers[k].w.resize(5);
    for (double& v : m.classifiers[k].w) v = rng.uniform(-1, 1);
    m.classifiers[k].b = rng.uniform(-1, 1);
  }
  std::array<double, 8> conf;
  predict(m, desc_of({0, 0, 0, 0, 0}), &conf);
  for (int k = 0; k < 8; ++k) CHECK(conf[k] == doctest::Approx(std::fabs(m.classifiers[k].b)));
}

TEST_CASE("decision matches independent dot product") {
  SplitMix64 rng(10);
  SelectorModel m;
  m.dim = 7;
  for (int k = 0; k < 8; ++k) {
    m.classifiers[k].w.resize(7);
    for (double& v : m.classifiers[k].w) v = rng.uniform(-1, 1);
    m.classifiers[k].b = rng.uniform(-1, 1);
  }
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> x(7);
    for (double& v : x) v = rng.uniform(-1, 1);
    for (int k = 0; k < 8; ++k) {
      double f = m.classifiers[k].b;
      for (int i = 0; i < 7; ++i) f += m.classifiers[k].w[i] * x[i];
      CHECK(m.decision(k, x) == doctest::Approx(f).epsilon(1e-12));
    }
  }
}

TEST_CASE("select_channel tie break and fallback") {
  // Positive tie between R and G resolves to the lower index (R).
  SelectorModel tie = constant_model(1, {0.9, 0.9, 0.1, -1, -1, -1, -1, -1});
  CHECK(select_channel(tie, desc_of({0.0})) == Channel::R);
  // All negative: fall back to the overall argmax (Y at index 3).
  SelectorModel neg = constant_model(1, {-2, -1.5, -3, -0.5, -4, -2.2, -1.9, -2.7});
  CHECK(select_channel(neg, desc_of({0.0})) == Channel::Y);
}

TEST_CASE("select_channel equals rule oracle on random cases") {
  SplitMix64 rng(11);
  for (int rep = 0; rep < 100; ++rep) {
    std::array<double, 8> f;
    for (double& v : f) v = rng.uniform(-1.0, 1.0);
    SelectorModel m = constant_model(1, f);
    // brute-force rule re-implementation
    int best = -1;
    for (int k = 0; k < 8; ++k)
      if (f[k] > 0 && (best < 0 || f[k] > f[best])) best = k;
    if (best < 0) {
      best = 0;
      for (int k = 1; k < 8; ++k)
        if (f[k] > f[best]) best = k;
    }
    CHECK(select_channel(m, desc_of({0.0})) == kSelectableChannels[best]);
  }
}

TEST_CASE("selection is invariant to positive scaling of decisions") {
  SplitMix64 rng(12);
  for (int rep = 0; rep < 30; ++rep) {
    std::array<double, 8> f;
    for (double& v : f) v = rng.uniform(-1.0, 1.0);
    std::array<double, 8> scaled;
    double s = rng.uniform(0.1, 10.0);
    for (int k = 0; k < 8; ++k) scaled[k] = f[k] * s;
    CHECK(select_channel(constant_model(1, f), desc_of({0.0})) ==
          select_channel(constant_model(1, scaled), desc_of({0.0})));
  }
}

TEST_CASE("prediction is deterministic") {
  SplitMix64 rng(13);
  std::vector<LabeledCorpusEntry> data;
  for (int i = 0; i < 12; ++i) {
    std::vector<double> x = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    std::array<int, 8> bits;
    for (int k = 0; k < 8; ++k) bits[k] = rng.next() & 1 ? 1 : -1;
    data.push_back(entry(std::move(x), bits));
  }
  for (int k = 0; k < 8; ++k) {  // ensure both labels appear per class
    data[0].labels.bits[k] = 1;
    data[1].labels.bits[k] = -1;
  }
  SelectorModel m = train_ova_svm(data, 1.0);
  SelectionDescriptor x = desc_of({0.3, -0.8});
  ChannelLabelVector a = predict(m, x);
  ChannelLabelVector b = predict(m, x);
  CHECK(a.bits == b.bits);
}

TEST_CASE("dimension mismatch raises") {
  SelectorModel m = constant_model(3, {0, 0, 0, 0, 0, 0, 0, 0});
  for (auto& cl : m.classifiers) cl.constant = false;
  CHECK_THROWS_AS(predict(m, desc_of({1.0})), Error);
  CHECK_THROWS_AS(select_channel(m, desc_of({1.0})), Error);
}

TEST_CASE("selector file round trip is bit stable") {
  SplitMix64 rng(14);
  std::vector<LabeledCorpusEntry> data;
  for (int i = 0; i < 10; ++i) {
    std::vector<double> x = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    std::array<int, 8> bits;
    for (int k = 0; k < 8; ++k) bits[k] = (i + k) % 2 ? 1 : -1;
    data.push_back(entry(std::move(x), bits));
  }
  SelectorModel m = train_ova_svm(data, 1.0);
  namespace fs = std::filesystem;
  std::string p1 = (fs::temp_directory_path() / "ctrec_sel1.model").string();
  std::string p2 = (fs::temp_directory_path() / "ctrec_sel2.model").string();
  save_selector(m, p1);
  SelectorModel back = load_selector(p1);
  save_selector(back, p2);
  std::ifstream f1(p1), f2(p2);
  std::string s1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
  std::string s2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
  CHECK(s1 == s2);
  SelectionDescriptor x = desc_of({0.1, 0.2, 0.3});
  std::array<double, 8> ca, cb;
  predict(m, x, &ca);
  predict(back, x, &cb);
  for (int k = 0; k < 8; ++k) CHECK(ca[k] == cb[k]);
}

TEST_CASE("label vector string round trip") {
  ChannelLabelVector v;
  v.bits = {1, -1, 1, 1, -1, -1, 1, -1};
  CHECK(v.to_string() == "+-++--+-");
  ChannelLabelVector w = ChannelLabelVector::from_string("+-++--+-");
  CHECK(w.bits == v.bits);
  CHECK_THROWS_AS(ChannelLabelVector::from_string("++"), Error);
}
