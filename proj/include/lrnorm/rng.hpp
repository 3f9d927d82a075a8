#pragma once

#include <cstdint>
#include <limits>
#include <span>

namespace lrnorm {

/// Counter-based generator: the k-th output of stream (seed, stream) is a
/// pure function of (seed, stream, k), so streams never overlap and any
/// replication can be regenerated in isolation.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  void fill_normal(std::span<double> out);

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t mix64(std::uint64_t z);

/// Seed for replication `rep` of an experiment cell `cell` under `base`.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t cell, std::uint64_t rep);

}  // namespace lrnorm
