#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "ctrec/eval.hpp"
#include "ctrec/rng.hpp"

using namespace ctrec;

namespace {

ChannelLabelVector label_of(std::initializer_list<int> positives) {
  ChannelLabelVector v;
  for (int p : positives) v.bits[p] = 1;
  return v;
}

}  // namespace

TEST_CASE("multilabel metrics worked example") {
  // truth positives {G, Y} (indices 1, 3); predicted {G, B} (indices 1, 2)
  std::vector<ChannelLabelVector> truth = {label_of({1, 3})};
  std::vector<ChannelLabelVector> pred = {label_of({1, 2})};
  MultiLabelReport r = multilabel_metrics(truth, pred);
  CHECK(r.accuracy == doctest::Approx(1.0 / 3.0));
  CHECK(r.precision == doctest::Approx(0.5));
  CHECK(r.recall == doctest::Approx(0.5));
  CHECK(r.n == 1);
}

TEST_CASE("multilabel identity scores one") {
  SplitMix64 rng(3);
  std::vector<ChannelLabelVector> truth;
  for (int i = 0; i < 10; ++i) {
    ChannelLabelVector v;
    for (int k = 0; k < 8; ++k) v.bits[k] = rng.next() & 1 ? 1 : -1;
    truth.push_back(v);
  }
  MultiLabelReport r = multilabel_metrics(truth, truth);
  CHECK(r.accuracy == doctest::Approx(1.0));
  CHECK(r.precision == doctest::Approx(1.0));
  CHECK(r.recall == doctest::Approx(1.0));
}

TEST_CASE("multilabel empty-set conventions") {
  // both positive sets empty: 0/0 counts as 1
  std::vector<ChannelLabelVector> empty = {ChannelLabelVector{}};
  MultiLabelReport both = multilabel_metrics(empty, empty);
  CHECK(both.accuracy == doctest::Approx(1.0));
  CHECK(both.precision == doctest::Approx(1.0));
  CHECK(both.recall == doctest::Approx(1.0));
  // empty prediction, nonempty truth: precision 0 (x/0), recall 0/2
  std::vector<ChannelLabelVector> truth = {label_of({0, 1})};
  MultiLabelReport p = multilabel_metrics(truth, empty);
  CHECK(p.precision == doctest::Approx(0.0));
  CHECK(p.recall == doctest::Approx(0.0));
  CHECK(p.accuracy == doctest::Approx(0.0));
}

TEST_CASE("multilabel precision and recall swap under list exchange") {
  SplitMix64 rng(5);
  std::vector<ChannelLabelVector> a, b;
  for (int i = 0; i < 25; ++i) {
    ChannelLabelVector va, vb;
    for (int k = 0; k < 8; ++k) {
      va.bits[k] = rng.next() & 1 ? 1 : -1;
      vb.bits[k] = rng.next() & 1 ? 1 : -1;
    }
    a.push_back(va);
    b.push_back(vb);
  }
  MultiLabelReport ab = multilabel_metrics(a, b);
  MultiLabelReport ba = multilabel_metrics(b, a);
  CHECK(ab.precision == doctest::Approx(ba.recall).epsilon(1e-12));
  CHECK(ab.recall == doctest::Approx(ba.precision).epsilon(1e-12));
  CHECK(ab.accuracy == doctest::Approx(ba.accuracy).epsilon(1e-12));
}

TEST_CASE("multilabel matches a set-arithmetic oracle") {
  SplitMix64 rng(7);
  std::vector<ChannelLabelVector> truth, pred;
  for (int i = 0; i < 50; ++i) {
    ChannelLabelVector t, p;
    for (int k = 0; k < 8; ++k) {
      t.bits[k] = rng.next() & 1 ? 1 : -1;
      p.bits[k] = rng.next() & 1 ? 1 : -1;
    }
    truth.push_back(t);
    pred.push_back(p);
  }
  double acc = 0, prec = 0, rec = 0;
  for (int i = 0; i < 50; ++i) {
    int inter = 0, uni = 0, ny = 0, nz = 0;
    for (int k = 0; k < 8; ++k) {
      bool y = truth[i].bits[k] > 0, z = pred[i].bits[k] > 0;
      inter += y && z;
      uni += y || z;
      ny += y;
      nz += z;
    }
    acc += uni ? double(inter) / uni : 1.0;
    prec += nz ? double(inter) / nz : (ny ? 0.0 : 1.0);
    rec += ny ? double(inter) / ny : (nz ? 0.0 : 1.0);
  }
  MultiLabelReport r = multilabel_metrics(truth, pred);
  CHECK(r.accuracy == doctest::Approx(acc / 50).epsilon(1e-15));
  CHECK(r.precision == doctest::Approx(prec / 50).epsilon(1e-15));
  CHECK(r.recall == doctest::Approx(rec / 50).epsilon(1e-15));
}

TEST_CASE("levenshtein worked example") {
  CHECK(levenshtein("LION", "LIE") == 2);
  CHECK(levenshtein("", "abc") == 3);
  CHECK(levenshtein("abc", "abc") == 0);
  CHECK(levenshtein("kitten", "sitting") == 3);
}

TEST_CASE("word and character accuracy") {
  auto [w1, c1] = word_char_accuracy({"LION"}, {"LION"});
  CHECK(w1 == doctest::Approx(1.0));
  CHECK(c1 == doctest::Approx(1.0));

  auto [w2, c2] = word_char_accuracy({"LION"}, {"LIE"});
  CHECK(w2 == doctest::Approx(0.0));
  CHECK(c2 == doctest::Approx(1.0 - 2.0 / 4.0));

  // hypothesis much longer than truth: floored at zero
  auto [w3, c3] = word_char_accuracy({"AB"}, {"XYZQRS"});
  CHECK(w3 == doctest::Approx(0.0));
  CHECK(c3 == doctest::Approx(0.0));

  CHECK_THROWS_AS(word_char_accuracy({"A"}, {"A", "B"}), Error);
}

TEST_CASE("oracle counts any-channel hits") {
  std::vector<std::string> truth = {"CAT", "DOG"};
  std::map<Channel, std::vector<std::string>> hyps;
  for (int c = 0; c < kNumChannels; ++c)
    hyps[static_cast<Channel>(c)] = {"XXX", "YYY"};
  hyps[Channel::Cb][0] = "CAT";  // only Cb gets the first word
  CHECK(oracle_eval(hyps, truth) == doctest::Approx(0.5));
  hyps[Channel::H][1] = "DOG";
  CHECK(oracle_eval(hyps, truth) == doctest::Approx(1.0));

  std::map<Channel, std::vector<std::string>> incomplete(hyps);
  incomplete.erase(Channel::S);
  CHECK_THROWS_AS(oracle_eval(incomplete, truth), Error);
}

TEST_CASE("oracle dominates every fixed channel") {
  SplitMix64 rng(11);
  std::vector<std::string> truth;
  std::map<Channel, std::vector<std::string>> hyps;
  for (int i = 0; i < 40; ++i) truth.push_back("W" + std::to_string(i));
  for (int c = 0; c < kNumChannels; ++c) {
    std::vector<std::string> h;
    for (int i = 0; i < 40; ++i)
      h.push_back(rng.uniform() < 0.3 ? truth[i] : "nope");
    hyps[static_cast<Channel>(c)] = std::move(h);
  }
  double oracle = oracle_eval(hyps, truth);
  for (const auto& [ch, h] : hyps) {
    double acc = word_char_accuracy(truth, h).first;
    CHECK(oracle >= acc);
  }
}

TEST_CASE("fraction formatting uses four decimals") {
  CHECK(format_fraction(0.5) == "0.5000");
  CHECK(format_fraction(0.123456) == "0.1235");
  CHECK(format_fraction(1.0) == "1.0000");
}

TEST_CASE("svg curve embeds a machine-readable data table") {
  namespace fs = std::filesystem;
  std::string path = (fs::temp_directory_path() / "ctrec_curve.svg").string();
  write_svg_curve(path, "test", "level", {0, 5, 10}, {{"acc", {0.9, 0.8, 0.7}}});
  std::ifstream f(path);
  std::string body((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  CHECK(body.find("<svg") != std::string::npos);
  CHECK(body.find("<polyline") != std::string::npos);
  CHECK(body.find("<!-- data level acc") != std::string::npos);
  CHECK(body.find("0.8000") != std::string::npos);
  fs::remove(path);
}
