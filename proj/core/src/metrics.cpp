#include "calocal/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "calocal/errors.hpp"

namespace calocal {

std::uint64_t Histogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), underflow + overflow);
}

namespace {

void check_pair(std::span<const double> pred, std::span<const double> truth, std::size_t min_n) {
  if (pred.size() != truth.size())
    throw ArgumentError("length mismatch: " + std::to_string(pred.size()) + " predictions vs " +
                        std::to_string(truth.size()) + " truth values");
  if (pred.size() < min_n)
    throw ArgumentError("need at least " + std::to_string(min_n) + " values");
}

}  // namespace

double mae(std::span<const double> pred, std::span<const double> truth) {
  check_pair(pred, truth, 1);
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += std::abs(pred[i] - truth[i]);
  return s / static_cast<double>(pred.size());
}

double r_squared(std::span<const double> pred, std::span<const double> truth) {
  check_pair(pred, truth, 2);
  const double mean =
      std::accumulate(truth.begin(), truth.end(), 0.0) / static_cast<double>(truth.size());
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    ss_res += (pred[i] - truth[i]) * (pred[i] - truth[i]);
    ss_tot += (truth[i] - mean) * (truth[i] - mean);
  }
  if (ss_tot <= 0.0) throw ArgumentError("r_squared: truth values are constant");
  return 1.0 - ss_res / ss_tot;
}

std::vector<double> energy_sum(const EventSet& e) {
  std::vector<double> out(e.n_events());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const auto ev = e.event(k);
    out[k] = std::accumulate(ev.begin(), ev.end(), 0.0);
  }
  return out;
}

double wasserstein1_empirical(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw ArgumentError("wasserstein1 of an empty sample");
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());

  if (sa.size() == sb.size()) {
    double s = 0.0;
    for (std::size_t i = 0; i < sa.size(); ++i) s += std::abs(sa[i] - sb[i]);
    return s / static_cast<double>(sa.size());
  }

  // Sweep the merged support. Between consecutive support points both CDFs
  // are constant; accumulate the gap in integer counts to keep it exact.
  const auto n = static_cast<std::int64_t>(sa.size());
  const auto m = static_cast<std::int64_t>(sb.size());
  std::size_t i = 0;
  std::size_t j = 0;
  std::int64_t ca = 0;
  std::int64_t cb = 0;
  double total = 0.0;
  double x = std::min(sa.front(), sb.front());
  while (i < sa.size() || j < sb.size()) {
    while (i < sa.size() && sa[i] == x) ++i, ++ca;
    while (j < sb.size() && sb[j] == x) ++j, ++cb;
    double next;
    if (i < sa.size() && j < sb.size())
      next = std::min(sa[i], sb[j]);
    else if (i < sa.size())
      next = sa[i];
    else if (j < sb.size())
      next = sb[j];
    else
      break;
    // |ca/n - cb/m| = |ca*m - cb*n| / (n*m)
    total += (next - x) * static_cast<double>(std::llabs(ca * m - cb * n));
    x = next;
  }
  return total / static_cast<double>(n * m);
}

Histogram histogram(std::span<const double> values, int n_bins, double lo, double hi) {
  if (n_bins < 1) throw ArgumentError("histogram needs at least one bin");
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw ArgumentError("histogram range must satisfy lo < hi");
  Histogram h;
  h.edges.resize(static_cast<std::size_t>(n_bins) + 1);
  const double width = (hi - lo) / n_bins;
  for (int k = 0; k <= n_bins; ++k) h.edges[static_cast<std::size_t>(k)] = lo + width * k;
  h.edges.back() = hi;
  h.counts.assign(static_cast<std::size_t>(n_bins), 0);
  for (double v : values) {
    if (v < lo) {
      ++h.underflow;
    } else if (v > hi || std::isnan(v)) {
      ++h.overflow;
    } else if (v == hi) {
      ++h.counts.back();
    } else {
      auto k = static_cast<std::size_t>((v - lo) / width);
      k = std::min(k, h.counts.size() - 1);
      // Floating division can land one bin off near an edge.
      while (k > 0 && v < h.edges[k]) --k;
      while (k + 1 < h.counts.size() && v >= h.edges[k + 1]) ++k;
      ++h.counts[k];
    }
  }
  return h;
}

}  // namespace calocal
