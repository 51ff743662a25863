#pragma once

// Seeded search for pointwise violations of
//   graph_volume(a) >= sum_k c_k (|sigma_2k| + |sigma_perp_2k(2n)|)      (abs form)
//   graph_volume(a) >= sqrt(S_1^2 + S_2^2)                               (common-angle form)
// over random shape arrays with zero last row.

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "puncvol/matrixkit.hpp"

namespace puncvol::matrixkit {

struct ProbeRecord {
  std::size_t trial = 0;  // counter of the generating draw
  SmallMatrix a = SmallMatrix(1, 1);
  double lhs = 0.0;
  double rhs = 0.0;

  nlohmann::json to_json() const;
  friend bool operator==(const ProbeRecord&, const ProbeRecord&) = default;
};

struct ProbeReport {
  int n = 1;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::size_t abs_violations = 0;
  std::size_t angle_violations = 0;
  std::vector<ProbeRecord> abs_examples;    // first few, in trial order
  std::vector<ProbeRecord> angle_examples;
  double min_angle_margin = 0.0;            // min over trials of lhs - rhs_angle

  nlohmann::json to_json() const;
};

/// Relative slack before a difference counts as a violation.
inline constexpr double kProbeTolerance = 1e-12;
inline constexpr std::size_t kProbeExamples = 5;

/// Trial t draws from CounterRng(seed, t): a scale s = exp(U(-2, 1.5)), then
/// the 2n x (2n+1) upper block uniform in [-s, s]; the last row is zero.
SmallMatrix probe_matrix(int n, std::uint64_t seed, std::size_t trial);

/// The documented n = 1 counterexample for the abs form.
SmallMatrix documented_counterexample();

ProbeReport probe_lemma(int n, std::size_t trials, std::uint64_t seed);

}  // namespace puncvol::matrixkit
