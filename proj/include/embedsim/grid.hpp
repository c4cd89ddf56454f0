#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "embedsim/requests.hpp"

namespace embedsim {

// Axis-aligned rectangle of PRBs: origin (f0, t0), f columns wide
// (frequency), t rows tall (time).
struct Rect {
  int f0 = 0;
  int t0 = 0;
  int f = 0;
  int t = 0;

  int area() const { return f * t; }
  bool operator==(const Rect&) const = default;
};

struct EdiOptions {
  // When set, the substrate border is treated as occupied, so free cells
  // on the boundary contribute edges. Default counts interior cell pairs
  // only.
  bool count_border = false;

  bool operator==(const EdiOptions&) const = default;
};

// The F x T resource substrate: per-cell occupancy plus a registry of the
// placements owning the occupied cells. Placements never overlap and stay
// fully inside the grid.
class Substrate {
 public:
  Substrate(int freq_dim, int time_dim, EdiOptions edi = {});

  int freq_dim() const { return freq_dim_; }
  int time_dim() const { return time_dim_; }
  int cell_count() const { return freq_dim_ * time_dim_; }
  const EdiOptions& edi_options() const { return edi_opts_; }

  bool occupied(int fcol, int trow) const {
    return cells_[static_cast<std::size_t>(trow) * freq_dim_ + fcol] != 0;
  }
  int occupied_cells() const { return occupied_; }
  bool in_bounds(const Rect& r) const;
  // True when the rectangle is in bounds and every cell of it is free.
  bool region_free(const Rect& r) const;

  // Marks the rectangle occupied and registers it under `id`.
  // Throws OutOfBoundsError, OverlapError or DuplicateIdError.
  void place(const Rect& rect, std::uint64_t id);
  // Frees a registered placement. Throws UnknownIdError.
  void remove(std::uint64_t id);
  void clear();

  const std::map<std::uint64_t, Rect>& placements() const {
    return placements_;
  }
  const Rect& placement(std::uint64_t id) const;

  // Embedding Density Index: number of adjacent cell pairs where exactly
  // one cell is occupied. Maintained incrementally.
  int edi() const { return edi_; }
  // EDI the substrate would have after place(rect), without mutating it.
  // Throws OutOfBoundsError or OverlapError.
  int edi_if_placed(const Rect& rect) const;

  // Every maximal all-free rectangle (not contained in a larger free
  // rectangle), ordered row-major by origin, then by width.
  std::vector<Rect> maximal_free_rectangles() const;

 private:
  int boundary_delta(const Rect& rect) const;

  int freq_dim_;
  int time_dim_;
  EdiOptions edi_opts_;
  std::vector<std::uint8_t> cells_;
  std::map<std::uint64_t, Rect> placements_;
  int occupied_ = 0;
  int edi_ = 0;
};

// Occupied cell counts broken down by (operator, service), plus the total.
struct OccupancySplit {
  std::array<std::array<int, 3>, 2> cells{};  // [operator][service]
  int total_cells = 0;
  int substrate_cells = 0;

  double fraction(Operator op, ServiceKind s) const {
    return static_cast<double>(cells[index_of(op)][index_of(s)]) /
           substrate_cells;
  }
  double total() const {
    return static_cast<double>(total_cells) / substrate_cells;
  }
};

// Splits current occupancy by owner. `owners` must cover every registered
// placement id; throws UnknownIdError otherwise.
OccupancySplit occupancy_split(
    const Substrate& substrate,
    const std::map<std::uint64_t, std::pair<Operator, ServiceKind>>& owners);

}  // namespace embedsim
