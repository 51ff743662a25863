#pragma once

// Closed-form volumes and index-dependent lower bounds.

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "puncvol/functionals.hpp"
#include "puncvol/rational.hpp"

namespace puncvol::bounds {

/// (pi/4) vol(S^2n) (|Ip| + |Im|).
double thmA_bound(int n, int ip, int im);
/// (vol_radial(n)/2) (|Ip| + |Im|).
double corollary_bound(int n, int ip, int im);
/// (vol(S^2n)/2) sum |I|.
double thmB_bound(int n, const std::vector<int>& indices);
/// m = 2: (pi + |IN| + |IS| - 2) vol(S^2) / 2; m = 3: (|IN| + |IS|) vol(S^3).
double bcj_bound(int m, int in, int is);

/// 4^n / C(2n, n), exactly.
Rational radial_normalized_exact(int n);
/// sum_k C(n,k)^2 / C(2n,2k), exactly.
Rational bcn_a_normalized_exact(int n);

/// Volumes normalized by vol(S^{2n+1}).
struct ClosedVolumes {
  int n = 0;
  double volM = 1.0;
  double hopf = 0.0;
  double radial = 0.0;
  double pedersen = 0.0;
  double bcn_a = 0.0;

  nlohmann::json to_json() const;
};

ClosedVolumes closed_volumes(int n);

struct BoundEntry {
  std::string name;
  double value = 0.0;
  double normalized = 0.0;
  std::optional<bool> satisfied;  // set when a computed volume is attached and the bound applies
};

struct BoundReport {
  int n = 0;
  std::vector<int> indices;
  std::vector<BoundEntry> entries;
  std::optional<functionals::VolumeEstimate> computed;

  const BoundEntry& entry(const std::string& name) const;
  nlohmann::json to_json() const;
};

/// thmA and corollary use the first two indices (north, south) and are
/// included only for index pairs; bcj3 only for n = 1. A bound counts as
/// satisfied when computed.value + computed.error >= bound.
BoundReport bound_report(int n, const std::vector<int>& indices,
                         const std::optional<functionals::VolumeEstimate>& computed = std::nullopt);

std::vector<ClosedVolumes> chain_table(const std::vector<int>& ns);

}  // namespace puncvol::bounds
