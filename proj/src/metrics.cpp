#include "coke/metrics.hpp"

#include <cmath>

namespace coke {

namespace {

double kahan_mean(std::span<const double> xs) {
  KahanSum s;
  for (double x : xs) s.add(x);
  return s.value() / static_cast<double>(xs.size());
}

}  // namespace

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw MetricError("pearson: length mismatch");
  if (xs.size() < 2) throw MetricError("pearson: need at least 2 samples");
  const double mx = kahan_mean(xs);
  const double my = kahan_mean(ys);
  KahanSum sxy, sxx, syy;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy.add(dx * dy);
    sxx.add(dx * dx);
    syy.add(dy * dy);
  }
  const double vxx = sxx.value();
  const double vyy = syy.value();
  if (vxx == 0.0 || vyy == 0.0) {
    throw MetricError("pearson: undefined (zero variance input)");
  }
  return sxy.value() / std::sqrt(vxx * vyy);
}

double mse(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw MetricError("mse: length mismatch");
  if (xs.empty()) throw MetricError("mse: empty input");
  KahanSum s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double d = xs[i] - ys[i];
    s.add(d * d);
  }
  return s.value() / static_cast<double>(xs.size());
}

double f1_binarized(std::span<const double> preds, std::span<const double> refs,
                    double threshold) {
  if (preds.size() != refs.size()) throw MetricError("f1: length mismatch");
  if (preds.empty()) throw MetricError("f1: empty input");
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const bool p = preds[i] >= threshold;
    const bool r = refs[i] >= threshold;
    if (p && r) ++tp;
    if (p && !r) ++fp;
    if (!p && r) ++fn;
  }
  if (tp == 0 && fp == 0 && fn == 0) return 1.0;  // no positive class anywhere
  const double denom = static_cast<double>(2 * tp + fp + fn);
  return denom == 0.0 ? 0.0 : 2.0 * static_cast<double>(tp) / denom;
}

double population_sd(std::span<const double> xs) {
  if (xs.empty()) throw MetricError("population_sd: empty input");
  const double m = kahan_mean(xs);
  KahanSum s;
  for (double x : xs) {
    const double d = x - m;
    s.add(d * d);
  }
  return std::sqrt(s.value() / static_cast<double>(xs.size()));
}

double icc_oneway(const std::vector<std::vector<double>>& ratings, IccForm form) {
  const std::size_t m = ratings.size();
  if (m < 2) throw MetricError("icc: need at least 2 targets");
  std::size_t total = 0;
  for (const auto& row : ratings) {
    if (row.size() < 2) throw MetricError("icc: every target needs at least 2 ratings");
    total += row.size();
  }

  KahanSum grand;
  for (const auto& row : ratings)
    for (double v : row) grand.add(v);
  const double grand_mean = grand.value() / static_cast<double>(total);

  // One-way ANOVA decomposition: SSB over target means, SSW within targets.
  KahanSum ssb, ssw, sum_k, sum_k2;
  for (const auto& row : ratings) {
    KahanSum rs;
    for (double v : row) rs.add(v);
    const double k = static_cast<double>(row.size());
    const double row_mean = rs.value() / k;
    const double db = row_mean - grand_mean;
    ssb.add(k * db * db);
    for (double v : row) {
      const double dw = v - row_mean;
      ssw.add(dw * dw);
    }
    sum_k.add(k);
    sum_k2.add(k * k);
  }

  const double msb = ssb.value() / static_cast<double>(m - 1);
  const double msw = ssw.value() / static_cast<double>(total - m);
  // k0 correction keeps unbalanced designs comparable to the balanced form.
  const double n = sum_k.value();
  const double k0 = (n - sum_k2.value() / n) / static_cast<double>(m - 1);

  double icc;
  if (form == IccForm::single) {
    icc = (msb - msw) / (msb + (k0 - 1.0) * msw);
  } else {
    icc = (msb - msw) / msb;
  }
  if (!std::isfinite(icc)) throw MetricError("icc: undefined (no variance in ratings)");
  if (icc > 1.0) icc = 1.0;
  if (icc < -1.0) icc = -1.0;
  return icc;
}

}  // namespace coke
