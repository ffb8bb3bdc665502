#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "calocal/events.hpp"

namespace calocal {

/// Uniform histogram. Bins are [lo, hi) except the last, which is closed.
struct Histogram {
  std::vector<double> edges;
  std::vector<std::uint64_t> counts;
  std::uint64_t underflow = 0;
  std::uint64_t overflow = 0;

  std::uint64_t total() const;
};

double mae(std::span<const double> pred, std::span<const double> truth);

/// 1 - SS_res / SS_tot, with SS_tot taken about the mean of `truth`.
double r_squared(std::span<const double> pred, std::span<const double> truth);

/// Total visible energy of each event, MeV.
std::vector<double> energy_sum(const EventSet& e);

/// Wasserstein-1 distance between two empirical distributions with uniform
/// weights: the integral of |F_a - F_b| over the real line.
double wasserstein1_empirical(std::span<const double> a, std::span<const double> b);

Histogram histogram(std::span<const double> values, int n_bins, double lo, double hi);

}  // namespace calocal
