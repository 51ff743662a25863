#include "puncvol/bounds.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>

#include "puncvol/errors.hpp"
#include "puncvol/spherekit.hpp"

namespace puncvol::bounds {

namespace {

void check_n(int n) {
  if (n < 1) throw DomainError("bounds: n must be >= 1");
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace

double thmA_bound(int n, int ip, int im) {
  check_n(n);
  return std::numbers::pi / 4 * sphere::sphere_volume(2 * n) * (std::abs(ip) + std::abs(im));
}

double corollary_bound(int n, int ip, int im) {
  check_n(n);
  const double vr = to_double(radial_normalized_exact(n)) * sphere::sphere_volume(2 * n + 1);
  return 0.5 * vr * (std::abs(ip) + std::abs(im));
}

double thmB_bound(int n, const std::vector<int>& indices) {
  check_n(n);
  long total = 0;
  for (int i : indices) total += std::abs(i);
  return 0.5 * sphere::sphere_volume(2 * n) * static_cast<double>(total);
}

double bcj_bound(int m, int in, int is) {
  const double s = std::abs(in) + std::abs(is);
  if (m == 2) return 0.5 * (std::numbers::pi + s - 2.0) * sphere::sphere_volume(2);
  if (m == 3) return s * sphere::sphere_volume(3);
  throw DomainError("bcj_bound: m must be 2 or 3");
}

Rational radial_normalized_exact(int n) {
  check_n(n);
  const auto un = static_cast<unsigned>(n);
  BigInt four = 1;
  for (unsigned i = 0; i < un; ++i) four *= 4;
  return Rational(four, binomial(2 * un, un));
}

Rational bcn_a_normalized_exact(int n) {
  check_n(n);
  const auto un = static_cast<unsigned>(n);
  Rational s = 0;
  for (unsigned k = 0; k <= un; ++k) s += Rational(binomial(un, k)) * sigma_weight(un, k);
  return s;
}

nlohmann::json ClosedVolumes::to_json() const {
  return {{"n", n}, {"volM", volM}, {"radial", radial}, {"pedersen", pedersen}, {"hopf", hopf}, {"bcn_a", bcn_a}};
}

ClosedVolumes closed_volumes(int n) {
  check_n(n);
  ClosedVolumes c;
  c.n = n;
  c.hopf = std::pow(2.0, n);
  c.radial = to_double(radial_normalized_exact(n));
  c.pedersen = std::sqrt(2.0 * std::numbers::pi * n);
  c.bcn_a = to_double(bcn_a_normalized_exact(n));
  return c;
}

const BoundEntry& BoundReport::entry(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return e;
  throw DomainError("bound report has no entry '" + name + "'");
}

nlohmann::json BoundReport::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  j["indices"] = indices;
  j["bounds"] = nlohmann::json::array();
  for (const auto& e : entries) {
    j["bounds"].push_back({{"name", e.name},
                           {"value", e.value},
                           {"normalized", e.normalized},
                           {"satisfied", e.satisfied ? nlohmann::json(*e.satisfied) : nlohmann::json(nullptr)}});
  }
  j["computed"] = computed ? computed->to_json() : nlohmann::json(nullptr);
  return j;
}

BoundReport bound_report(int n, const std::vector<int>& indices,
                         const std::optional<functionals::VolumeEstimate>& computed) {
  check_n(n);
  BoundReport r;
  r.n = n;
  r.indices = indices;
  r.computed = computed;
  const double vol = sphere::sphere_volume(2 * n + 1);
  const auto add = [&](const std::string& name, double value, bool comparable) {
    BoundEntry e{name, value, value / vol, std::nullopt};
    if (computed && comparable) e.satisfied = computed->value + computed->error >= value;
    r.entries.push_back(e);
  };
  add("volM", vol, true);
  if (indices.size() == 2) {
    add("thmA", thmA_bound(n, indices[0], indices[1]), true);
    add("corollary", corollary_bound(n, indices[0], indices[1]), true);
  }
  add("thmB", thmB_bound(n, indices), true);
  if (indices.size() == 2) {
    // the S^2 case is a different manifold: formula value only
    add("bcj2", bcj_bound(2, indices[0], indices[1]), false);
    if (n == 1) add("bcj3", bcj_bound(3, indices[0], indices[1]), true);
  }
  add("bcn_a", to_double(bcn_a_normalized_exact(n)) * vol, true);
  return r;
}

std::vector<ClosedVolumes> chain_table(const std::vector<int>& ns) {
  std::vector<ClosedVolumes> rows;
  for (int n : ns) rows.push_back(closed_volumes(n));
  return rows;
}

}  // namespace puncvol::bounds
