#pragma once

// Brute-force reference implementations used to cross-check the grid and
// embedder fast paths, shared between the unit tests and the acceptance
// runner.

#include <functional>
#include <vector>

#include "embedsim/grid.hpp"

namespace checks {

using embedsim::Rect;
using embedsim::Substrate;

// Counts mismatched adjacent pairs directly over the occupancy map.
inline int brute_edi(int F, int T, const std::function<bool(int, int)>& occ,
                     bool count_border) {
  int edges = 0;
  for (int t = 0; t < T; ++t)
    for (int f = 0; f < F; ++f) {
      if (f + 1 < F && occ(f, t) != occ(f + 1, t)) ++edges;
      if (t + 1 < T && occ(f, t) != occ(f, t + 1)) ++edges;
    }
  if (count_border) {
    for (int f = 0; f < F; ++f) {
      if (!occ(f, 0)) ++edges;
      if (!occ(f, T - 1)) ++edges;
    }
    for (int t = 0; t < T; ++t) {
      if (!occ(0, t)) ++edges;
      if (!occ(F - 1, t)) ++edges;
    }
  }
  return edges;
}

inline int brute_edi(const Substrate& s) {
  return brute_edi(
      s.freq_dim(), s.time_dim(),
      [&](int f, int t) { return s.occupied(f, t); },
      s.edi_options().count_border);
}

// Enumerates every free rectangle that cannot be extended in any
// direction.
inline std::vector<Rect> brute_maximal_free_rects(const Substrate& s) {
  std::vector<Rect> out;
  for (int t0 = 0; t0 < s.time_dim(); ++t0)
    for (int f0 = 0; f0 < s.freq_dim(); ++f0)
      for (int t = 1; t0 + t <= s.time_dim(); ++t)
        for (int f = 1; f0 + f <= s.freq_dim(); ++f) {
          Rect r{f0, t0, f, t};
          if (!s.region_free(r)) continue;
          if (s.region_free({f0 - 1, t0, f + 1, t})) continue;
          if (s.region_free({f0, t0 - 1, f, t + 1})) continue;
          if (s.region_free({f0, t0, f + 1, t})) continue;
          if (s.region_free({f0, t0, f, t + 1})) continue;
          out.push_back(r);
        }
  return out;
}

// Registry/occupancy consistency: placements in bounds, pairwise
// disjoint, and covering exactly the occupied cells.
inline bool cell_audit(const Substrate& s) {
  std::vector<int> owners(static_cast<std::size_t>(s.freq_dim()) *
                              s.time_dim(),
                          0);
  long long covered = 0;
  for (const auto& [id, r] : s.placements()) {
    if (!s.in_bounds(r)) return false;
    for (int t = r.t0; t < r.t0 + r.t; ++t)
      for (int f = r.f0; f < r.f0 + r.f; ++f) {
        int& o = owners[static_cast<std::size_t>(t) * s.freq_dim() + f];
        if (++o > 1) return false;
        ++covered;
      }
  }
  if (covered != s.occupied_cells()) return false;
  for (int t = 0; t < s.time_dim(); ++t)
    for (int f = 0; f < s.freq_dim(); ++f) {
      bool owned = owners[static_cast<std::size_t>(t) * s.freq_dim() + f] > 0;
      if (owned != s.occupied(f, t)) return false;
    }
  return true;
}

}  // namespace checks
