#include "puncvol/prober.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "puncvol/errors.hpp"
#include "puncvol/rng.hpp"

namespace puncvol::matrixkit {

namespace {

nlohmann::json matrix_json(const SmallMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    nlohmann::json r = nlohmann::json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(r);
  }
  return rows;
}

bool violates(double lhs, double rhs) { return rhs > lhs * (1.0 + kProbeTolerance); }

}  // namespace

nlohmann::json ProbeRecord::to_json() const {
  return {{"trial", trial}, {"matrix", matrix_json(a)}, {"lhs", lhs}, {"rhs", rhs}};
}

SmallMatrix probe_matrix(int n, std::uint64_t seed, std::size_t trial) {
  if (n < 1) throw DomainError("probe: n must be >= 1");
  const auto size = static_cast<std::size_t>(2 * n + 1);
  CounterRng rng(seed, trial);
  const double s = std::exp(rng.uniform(-2.0, 1.5));
  SmallMatrix a(size, size);
  for (std::size_t i = 0; i + 1 < size; ++i)
    for (std::size_t j = 0; j < size; ++j) a(i, j) = rng.uniform(-s, s);
  return a;
}

SmallMatrix documented_counterexample() { return SmallMatrix{{1, 0, 0}, {0, 1, 1}, {0, 0, 0}}; }

ProbeReport probe_lemma(int n, std::size_t trials, std::uint64_t seed) {
  if (n < 1) throw DomainError("probe: n must be >= 1");
  ProbeReport r;
  r.n = n;
  r.trials = trials;
  r.seed = seed;
  r.min_angle_margin = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < trials; ++t) {
    const ShapeArray a(n, probe_matrix(n, seed, t));
    const double lhs = graph_volume(a.matrix());
    const double rabs = pointwise_rhs_abs(a), rang = pointwise_rhs_angle(a);
    r.min_angle_margin = std::min(r.min_angle_margin, lhs - rang);
    if (violates(lhs, rabs)) {
      ++r.abs_violations;
      if (r.abs_examples.size() < kProbeExamples) r.abs_examples.push_back({t, a.matrix(), lhs, rabs});
    }
    if (violates(lhs, rang)) {
      ++r.angle_violations;
      if (r.angle_examples.size() < kProbeExamples) r.angle_examples.push_back({t, a.matrix(), lhs, rang});
    }
  }
  return r;
}

nlohmann::json ProbeReport::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  j["trials"] = trials;
  j["seed"] = seed;
  j["tolerance"] = kProbeTolerance;
  j["distribution"] = "s = exp(U(-2,1.5)); upper 2n x (2n+1) block U(-s,s); last row 0";
  const auto list = [](const std::vector<ProbeRecord>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& e : v) a.push_back(e.to_json());
    return a;
  };
  j["abs_form"] = {{"violations", abs_violations}, {"examples", list(abs_examples)}};
  j["angle_form"] = {{"violations", angle_violations},
                     {"examples", list(angle_examples)},
                     {"min_margin", trials ? nlohmann::json(min_angle_margin) : nlohmann::json(nullptr)}};
  if (n == 1) {
    const SmallMatrix m = documented_counterexample();
    const ShapeArray a(1, m);
    const double lhs = graph_volume(m), rabs = pointwise_rhs_abs(a), rang = pointwise_rhs_angle(a);
    j["regression_case"] = {{"matrix", matrix_json(m)},
                            {"lhs", lhs},
                            {"rhs_abs", rabs},
                            {"rhs_angle", rang},
                            {"abs_violation", violates(lhs, rabs)},
                            {"angle_violation", violates(lhs, rang)}};
  }
  return j;
}

}  // namespace puncvol::matrixkit
