#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lrt/density.hpp"

// Finite groups of coordinate reflections x_i -> 1-x_i on the unit
// cube/square, their induced permutations of an alternative set, and
// invariance checks for rejection regions. Reflections have unit Jacobian,
// so every element is measure preserving by construction.

namespace lrt {

class GroupAction {
 public:
  // Each element is a bitmask over coordinates; bit i set means coordinate i
  // is reflected. The mask set must contain the identity and be closed under
  // composition (XOR).
  GroupAction(SampleSpace space, std::vector<std::uint32_t> masks)
      : space_(space), masks_(std::move(masks)) {
    if (space_.kind != SpaceKind::UnitCube && space_.kind != SpaceKind::UnitSquare)
      throw std::invalid_argument("GroupAction: reflections act on the unit cube");
    if (masks_.empty()) throw std::invalid_argument("GroupAction: no elements");
    if (space_.n < 32)
      for (std::uint32_t m : masks_)
        if (m >> space_.n)
          throw std::invalid_argument("GroupAction: mask exceeds dimension");

    std::vector<std::uint32_t> sorted = masks_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("GroupAction: duplicate elements");

    identity_ = -1;
    for (std::size_t i = 0; i < masks_.size(); ++i)
      if (masks_[i] == 0) identity_ = static_cast<int>(i);
    if (identity_ < 0) throw std::invalid_argument("GroupAction: identity missing");

    // closure table; xor of two masks must be a member
    const std::size_t k = masks_.size();
    table_.assign(k * k, -1);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) {
        const std::uint32_t m = masks_[i] ^ masks_[j];
        const auto it = std::find(masks_.begin(), masks_.end(), m);
        if (it == masks_.end())
          throw std::invalid_argument("GroupAction: not closed under composition");
        table_[i * k + j] = static_cast<int>(it - masks_.begin());
      }
  }

  int size() const { return static_cast<int>(masks_.size()); }
  int identity_index() const { return identity_; }
  const SampleSpace& space() const { return space_; }
  std::uint32_t mask(int e) const { return masks_[check(e)]; }

  int compose(int i, int j) const {
    return table_[static_cast<std::size_t>(check(i)) * masks_.size() + check(j)];
  }

  // Reflections are involutions, and so is every XOR combination of them.
  int inverse(int e) const { return check(e); }

  void apply_into(int e, std::span<const double> x, std::span<double> out) const {
    const std::uint32_t m = masks_[check(e)];
    for (std::size_t i = 0; i < x.size(); ++i)
      out[i] = (m >> i) & 1u ? 1.0 - x[i] : x[i];
  }

  std::vector<double> apply(int e, std::span<const double> x) const {
    if (static_cast<int>(x.size()) != space_.n)
      throw std::invalid_argument("GroupAction::apply: dimension mismatch");
    std::vector<double> out(x.size());
    apply_into(e, x, out);
    return out;
  }

 private:
  int check(int e) const {
    if (e < 0 || e >= size())
      throw std::out_of_range("GroupAction: element index out of range");
    return e;
  }

  SampleSpace space_;
  std::vector<std::uint32_t> masks_;
  std::vector<int> table_;
  int identity_ = 0;
};

// "reflect-1d": {identity, reflect every coordinate} — the two-element group
// of the symmetric-pair problem (any n). "reflect-2d-quad": all four
// coordinate reflections of the unit square.
inline GroupAction group_by_id(std::string_view id, int n = 1) {
  if (id == "reflect-1d") {
    const std::uint32_t all =
        n >= 32 ? ~0u : ((1u << n) - 1u);
    SampleSpace space =
        n == 2 ? SampleSpace::unit_square() : SampleSpace::unit_cube(n);
    return GroupAction(space, {0u, all});
  }
  if (id == "reflect-2d-quad")
    return GroupAction(SampleSpace::unit_square(), {0u, 1u, 2u, 3u});
  throw std::invalid_argument("unknown group id '" + std::string(id) +
                              "' (valid: reflect-1d, reflect-2d-quad)");
}

struct InducedPermutation {
  int element = 0;
  std::vector<int> permutation;  // permutation[i] = j : element maps p_i to p_j
};

// Deterministic in-cube probe points used to verify induced permutations.
inline std::vector<std::vector<double>> probe_points(const SampleSpace& space,
                                                     int count,
                                                     std::uint64_t seed) {
  rng::Stream stream(seed, "invariance-probes");
  std::vector<std::vector<double>> pts(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    rng::Sequence seq = stream.at(static_cast<std::uint64_t>(i));
    auto& p = pts[static_cast<std::size_t>(i)];
    p.resize(static_cast<std::size_t>(space.n));
    for (auto& v : p) v = seq.uniform();
  }
  return pts;
}

// One permutation per element with p_{perm[i]}(x) = p_i(g^{-1}(x)) on the
// probe set (tolerance in log domain). Throws naming the element if no
// consistent permutation exists.
inline std::vector<InducedPermutation> induced_permutations(
    const GroupAction& group, std::span<const Density> alts,
    double tol = 1e-12, int probes = 100, std::uint64_t probe_seed = 0x9E3779B9) {
  const std::size_t s = alts.size();
  if (s == 0) throw std::invalid_argument("induced_permutations: no alternatives");
  const auto pts = probe_points(group.space(), probes, probe_seed);

  // cache log p_i at every probe and at every g^{-1}(probe)
  std::vector<std::vector<double>> at_x(s);      // [i][probe]
  for (std::size_t i = 0; i < s; ++i) {
    at_x[i].resize(pts.size());
    for (std::size_t p = 0; p < pts.size(); ++p)
      at_x[i][p] = alts[i].log_pdf(pts[p]);
  }

  std::vector<InducedPermutation> out;
  std::vector<double> gx(static_cast<std::size_t>(group.space().n));
  for (int e = 0; e < group.size(); ++e) {
    const int ginv = group.inverse(e);
    std::vector<std::vector<double>> at_gx(s);  // log p_i(g^{-1} x)
    for (std::size_t i = 0; i < s; ++i) at_gx[i].resize(pts.size());
    for (std::size_t p = 0; p < pts.size(); ++p) {
      group.apply_into(ginv, pts[p], gx);
      for (std::size_t i = 0; i < s; ++i) at_gx[i][p] = alts[i].log_pdf(gx);
    }

    InducedPermutation perm;
    perm.element = e;
    perm.permutation.assign(s, -1);
    std::vector<bool> used(s, false);
    for (std::size_t i = 0; i < s; ++i) {
      for (std::size_t j = 0; j < s; ++j) {
        if (used[j]) continue;
        bool match = true;
        for (std::size_t p = 0; p < pts.size() && match; ++p) {
          const double a = at_x[j][p];
          const double b = at_gx[i][p];
          if (a == kNegInf && b == kNegInf) continue;
          if (std::abs(a - b) > tol) match = false;
        }
        if (match) {
          perm.permutation[i] = static_cast<int>(j);
          used[j] = true;
          break;
        }
      }
      if (perm.permutation[i] < 0)
        throw std::runtime_error(
            "induced_permutations: element " + std::to_string(e) +
            " does not permute the alternative set (p" + std::to_string(i + 1) +
            " has no image)");
    }
    out.push_back(std::move(perm));
  }
  return out;
}

// True iff for every (i,j) some stored permutation maps i to j. Verifies
// first that the stored permutations are closed under composition.
inline bool is_transitive(std::span<const InducedPermutation> perms, int s) {
  if (perms.empty()) throw std::invalid_argument("is_transitive: empty set");
  for (const auto& p : perms)
    if (static_cast<int>(p.permutation.size()) != s)
      throw std::invalid_argument("is_transitive: permutation size mismatch");

  auto contains = [&](const std::vector<int>& q) {
    for (const auto& p : perms)
      if (p.permutation == q) return true;
    return false;
  };
  for (const auto& a : perms)
    for (const auto& b : perms) {
      std::vector<int> c(static_cast<std::size_t>(s));
      for (int i = 0; i < s; ++i)
        c[static_cast<std::size_t>(i)] =
            b.permutation[static_cast<std::size_t>(a.permutation[static_cast<std::size_t>(i)])];
      if (!contains(c))
        throw std::invalid_argument(
            "is_transitive: permutations are not closed under composition");
    }

  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) {
      bool reachable = false;
      for (const auto& p : perms)
        if (p.permutation[static_cast<std::size_t>(i)] == j) {
          reachable = true;
          break;
        }
      if (!reachable) return false;
    }
  return true;
}

struct RegionViolation {
  std::size_t probe_index = 0;
  int element = 0;
};

// Reports every probe x with decision(x) != decision(g(x)) for some g; an
// empty list certifies invariance on the probe set.
inline std::vector<RegionViolation> symmetrize_region_check(
    const std::function<bool(std::span<const double>)>& decision,
    const GroupAction& group, std::span<const std::vector<double>> probes) {
  std::vector<RegionViolation> out;
  std::vector<double> gx(static_cast<std::size_t>(group.space().n));
  for (std::size_t p = 0; p < probes.size(); ++p) {
    const bool base = decision(probes[p]);
    for (int e = 0; e < group.size(); ++e) {
      group.apply_into(e, probes[p], gx);
      if (decision(gx) != base) out.push_back({p, e});
    }
  }
  return out;
}

}  // namespace lrt
