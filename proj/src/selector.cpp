#include "ctrec/selector.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace ctrec {

std::string ChannelLabelVector::to_string() const {
  std::string s(8, '-');
  for (int i = 0; i < 8; ++i) s[i] = bits[i] > 0 ? '+' : '-';
  return s;
}

ChannelLabelVector ChannelLabelVector::from_string(const std::string& s) {
  if (s.size() != 8) fail(Err::Format, "label vector must have 8 entries");
  ChannelLabelVector v;
  for (int i = 0; i < 8; ++i) {
    if (s[i] == '+')
      v.bits[i] = 1;
    else if (s[i] == '-')
      v.bits[i] = -1;
    else
      fail(Err::Format, "label vector entries must be + or -");
  }
  return v;
}

double SelectorModel::decision(int k, const std::vector<double>& x) const {
  const Classifier& cl = classifiers[k];
  if (x.size() != cl.w.size() && !cl.constant)
    fail(Err::DimensionMismatch, "descriptor length does not match model");
  double f = cl.b;
  for (size_t i = 0; i < cl.w.size(); ++i) f += cl.w[i] * x[i];
  return f;
}

// ------------------------------------------------------------------- SMO

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

void train_binary_svm(const std::vector<std::vector<double>>& xs, const std::vector<int>& ys,
                      double c, std::vector<double>* w_out, double* b_out, double eps) {
  const int n = static_cast<int>(xs.size());
  const int d = static_cast<int>(xs[0].size());
  std::vector<double> alpha(n, 0.0);
  std::vector<double> w(d, 0.0);
  std::vector<double> f(n, 0.0);  // w . x_i
  std::vector<double> kdiag(n);
  for (int i = 0; i < n; ++i) kdiag[i] = dot(xs[i], xs[i]);

  const double tau = 1e-12;
  const long max_iter = 200000 + 200L * n;
  for (long iter = 0; iter < max_iter; ++iter) {
    // Maximal violating pair. grad_i = y_i * f_i - 1.
    int i = -1, j = -1;
    double gmax = -std::numeric_limits<double>::infinity();
    double gmin = std::numeric_limits<double>::infinity();
    for (int t = 0; t < n; ++t) {
      double g = -(ys[t] * f[t] - 1.0) * ys[t];  // -y_t * grad_t
      bool in_up = (ys[t] > 0 && alpha[t] < c) || (ys[t] < 0 && alpha[t] > 0);
      bool in_low = (ys[t] < 0 && alpha[t] < c) || (ys[t] > 0 && alpha[t] > 0);
      if (in_up && g > gmax) {
        gmax = g;
        i = t;
      }
      if (in_low && g < gmin) {
        gmin = g;
        j = t;
      }
    }
    if (i < 0 || j < 0 || gmax - gmin < eps) break;

    double q = kdiag[i] + kdiag[j] - 2.0 * dot(xs[i], xs[j]);
    if (q < tau) q = tau;
    double t_step = (gmax - gmin) / q;

    // alpha_i moves by +y_i * t, alpha_j by -y_j * t; clip to the box.
    double tmax = t_step;
    if (ys[i] > 0)
      tmax = std::min(tmax, c - alpha[i]);
    else
      tmax = std::min(tmax, alpha[i]);
    if (ys[j] > 0)
      tmax = std::min(tmax, alpha[j]);
    else
      tmax = std::min(tmax, c - alpha[j]);
    if (tmax <= 0.0) break;

    // Feasible direction: alpha_i += y_i*s, alpha_j -= y_j*s.
    alpha[i] += ys[i] * tmax;
    alpha[j] -= ys[j] * tmax;
    // delta of (alpha_i y_i) is +s, of (alpha_j y_j) is -s.
    for (int k = 0; k < d; ++k) w[k] += tmax * (xs[i][k] - xs[j][k]);
    const std::vector<double>& xi = xs[i];
    const std::vector<double>& xj = xs[j];
#pragma omp parallel for schedule(static) if (n > 512)
    for (int t = 0; t < n; ++t) f[t] += tmax * (dot(xi, xs[t]) - dot(xj, xs[t]));
  }

  // Bias from the KKT interval.
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  double free_sum = 0.0;
  int free_cnt = 0;
  for (int t = 0; t < n; ++t) {
    double v = ys[t] - f[t];
    if (alpha[t] > tau && alpha[t] < c - tau) {
      free_sum += v;
      ++free_cnt;
    } else if (alpha[t] <= tau) {
      // y(f + b) >= 1
      if (ys[t] > 0)
        lo = std::max(lo, 1.0 - f[t]);
      else
        hi = std::min(hi, -1.0 - f[t]);
    } else {
      // y(f + b) <= 1
      if (ys[t] > 0)
        hi = std::min(hi, 1.0 - f[t]);
      else
        lo = std::max(lo, -1.0 - f[t]);
    }
  }
  double b;
  if (free_cnt > 0) {
    b = free_sum / free_cnt;
  } else if (std::isfinite(lo) && std::isfinite(hi)) {
    b = 0.5 * (lo + hi);
  } else if (std::isfinite(lo)) {
    b = lo;
  } else if (std::isfinite(hi)) {
    b = hi;
  } else {
    b = 0.0;
  }
  *w_out = std::move(w);
  *b_out = b;
}

double svm_primal_objective(const std::vector<std::vector<double>>& xs, const std::vector<int>& ys,
                            double c, const std::vector<double>& w, double b) {
  double obj = 0.5 * dot(w, w);
  for (size_t i = 0; i < xs.size(); ++i) {
    double margin = ys[i] * (dot(w, xs[i]) + b);
    obj += c * std::max(0.0, 1.0 - margin);
  }
  return obj;
}

SelectorModel train_ova_svm(const std::vector<LabeledCorpusEntry>& data, double c,
                            SvmTrainReport* report) {
  if (data.empty()) fail(Err::InsufficientData, "no training rows");
  const int d = static_cast<int>(data[0].descriptor.values.size());
  std::vector<std::vector<double>> xs;
  xs.reserve(data.size());
  for (const auto& e : data) {
    if (static_cast<int>(e.descriptor.values.size()) != d)
      fail(Err::DimensionMismatch, "inconsistent descriptor lengths");
    for (double v : e.descriptor.values)
      if (!std::isfinite(v)) fail(Err::NonFinite, "non-finite feature value");
    xs.push_back(e.descriptor.values);
  }

  SelectorModel model;
  model.kind = data[0].descriptor.kind;
  model.dim = d;
  model.train_c = c;
  for (int k = 0; k < 8; ++k) {
    std::vector<int> ys(data.size());
    int pos = 0, neg = 0;
    for (size_t i = 0; i < data.size(); ++i) {
      ys[i] = data[i].labels.bits[k];
      (ys[i] > 0 ? pos : neg)++;
    }
    auto& cl = model.classifiers[k];
    if (pos == 0 || neg == 0) {
      cl.w.assign(d, 0.0);
      cl.b = pos == 0 ? -1.0 : 1.0;
      cl.constant = true;
      if (report) {
        report->objective[k] = 0.0;
        report->constant[k] = true;
      }
      continue;
    }
    train_binary_svm(xs, ys, c, &cl.w, &cl.b);
    cl.constant = false;
    if (report) {
      report->objective[k] = svm_primal_objective(xs, ys, c, cl.w, cl.b);
      report->constant[k] = false;
    }
  }
  return model;
}

ChannelLabelVector predict(const SelectorModel& model, const SelectionDescriptor& x,
                           std::array<double, 8>* confidences) {
  if (static_cast<int>(x.values.size()) != model.dim)
    fail(Err::DimensionMismatch, "descriptor length does not match model");
  ChannelLabelVector out;
  for (int k = 0; k < 8; ++k) {
    double f = model.decision(k, x.values);
    out.bits[k] = f > 0.0 ? 1 : -1;
    if (confidences) (*confidences)[k] = std::fabs(f);
  }
  return out;
}

Channel select_channel(const SelectorModel& model, const SelectionDescriptor& x) {
  if (static_cast<int>(x.values.size()) != model.dim)
    fail(Err::DimensionMismatch, "descriptor length does not match model");
  double f[8];
  for (int k = 0; k < 8; ++k) f[k] = model.decision(k, x.values);
  int best = -1;
  for (int k = 0; k < 8; ++k) {
    if (f[k] > 0.0 && (best < 0 || f[k] > f[best])) best = k;
  }
  if (best < 0) {  // no positive class: fall back to the least negative
    best = 0;
    for (int k = 1; k < 8; ++k)
      if (f[k] > f[best]) best = k;
  }
  return kSelectableChannels[best];
}

// --------------------------------------------------------- serialization

void save_selector(const SelectorModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(Err::Io, "cannot create " + path);
  out << "ctrec-selector v1\n";
  out << "feature " << feature_kind_name(model.kind) << "\n";
  out << "dim " << model.dim << "\n";
  out << "channels";
  for (Channel c : kSelectableChannels) out << ' ' << channel_name(c);
  out << "\n";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", model.train_c);
  out << "C " << buf << "\n";
  for (int k = 0; k < 8; ++k) {
    const auto& cl = model.classifiers[k];
    out << "class " << channel_name(kSelectableChannels[k]) << " constant " << (cl.constant ? 1 : 0)
        << "\n";
    std::snprintf(buf, sizeof(buf), "%.17g", cl.b);
    out << "bias " << buf << "\n";
    out << "w";
    for (double v : cl.w) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << ' ' << buf;
    }
    out << "\n";
  }
  if (!out) fail(Err::Io, "write error on " + path);
}

SelectorModel load_selector(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Err::Io, "cannot open " + path);
  std::string line;
  auto next_line = [&]() -> std::string& {
    if (!std::getline(in, line)) fail(Err::Format, "truncated selector file");
    return line;
  };
  if (next_line() != "ctrec-selector v1") fail(Err::Format, "bad selector header");
  SelectorModel model;
  {
    std::istringstream ss(next_line());
    std::string key, val;
    ss >> key >> val;
    if (key != "feature" || !feature_kind_from_name(val, &model.kind))
      fail(Err::Format, "bad feature line");
  }
  {
    std::istringstream ss(next_line());
    std::string key;
    ss >> key >> model.dim;
    if (key != "dim" || model.dim <= 0) fail(Err::Format, "bad dim line");
  }
  next_line();  // channel order; fixed by construction
  {
    std::istringstream ss(next_line());
    std::string key;
    ss >> key >> model.train_c;
    if (key != "C") fail(Err::Format, "bad C line");
  }
  for (int k = 0; k < 8; ++k) {
    auto& cl = model.classifiers[k];
    {
      std::istringstream ss(next_line());
      std::string key, name, ckey;
      int flag;
      ss >> key >> name >> ckey >> flag;
      if (key != "class") fail(Err::Format, "bad class line");
      cl.constant = flag != 0;
    }
    {
      std::istringstream ss(next_line());
      std::string key;
      ss >> key >> cl.b;
      if (key != "bias") fail(Err::Format, "bad bias line");
    }
    {
      std::istringstream ss(next_line());
      std::string key;
      ss >> key;
      if (key != "w") fail(Err::Format, "bad weight line");
      cl.w.clear();
      cl.w.reserve(model.dim);
      double v;
      while (ss >> v) cl.w.push_back(v);
      if (static_cast<int>(cl.w.size()) != model.dim)
        fail(Err::Format, "weight vector length mismatch");
    }
  }
  return model;
}

}  // namespace ctrec
