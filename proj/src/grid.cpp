#include "embedsim/grid.hpp"

#include <algorithm>
#include <string>

#include "embedsim/errors.hpp"

namespace embedsim {

namespace {

std::string rect_str(const Rect& r) {
  return "(" + std::to_string(r.f0) + "," + std::to_string(r.t0) + "," +
         std::to_string(r.f) + "," + std::to_string(r.t) + ")";
}

}  // namespace

Substrate::Substrate(int freq_dim, int time_dim, EdiOptions edi)
    : freq_dim_(freq_dim),
      time_dim_(time_dim),
      edi_opts_(edi),
      cells_(static_cast<std::size_t>(freq_dim) * time_dim, 0) {
  if (freq_dim < 1 || time_dim < 1)
    throw OutOfBoundsError("substrate dimensions must be at least 1x1");
  // With an occupied border, every border edge of the empty substrate
  // touches a free cell and counts.
  if (edi_opts_.count_border) edi_ = 2 * (freq_dim_ + time_dim_);
}

bool Substrate::in_bounds(const Rect& r) const {
  return r.f >= 1 && r.t >= 1 && r.f0 >= 0 && r.t0 >= 0 &&
         r.f0 + r.f <= freq_dim_ && r.t0 + r.t <= time_dim_;
}

bool Substrate::region_free(const Rect& r) const {
  if (!in_bounds(r)) return false;
  for (int t = r.t0; t < r.t0 + r.t; ++t)
    for (int f = r.f0; f < r.f0 + r.f; ++f)
      if (occupied(f, t)) return false;
  return true;
}

// EDI change caused by toggling the rectangle's cells, derived from the
// state of the cells just outside it. Pairs fully inside the rectangle
// never contribute (both cells toggle together).
int Substrate::boundary_delta(const Rect& rect) const {
  int delta = 0;
  auto outside = [&](int f, int t) {
    if (f < 0 || f >= freq_dim_ || t < 0 || t >= time_dim_) {
      // Border pseudo-cell: occupied cells next to an occupied border
      // contribute no edge, free cells next to it contribute one.
      if (edi_opts_.count_border) delta -= 1;
      return;
    }
    delta += occupied(f, t) ? -1 : 1;
  };
  for (int f = rect.f0; f < rect.f0 + rect.f; ++f) {
    outside(f, rect.t0 - 1);
    outside(f, rect.t0 + rect.t);
  }
  for (int t = rect.t0; t < rect.t0 + rect.t; ++t) {
    outside(rect.f0 - 1, t);
    outside(rect.f0 + rect.f, t);
  }
  return delta;
}

void Substrate::place(const Rect& rect, std::uint64_t id) {
  if (!in_bounds(rect))
    throw OutOfBoundsError("rect " + rect_str(rect) + " exceeds " +
                           std::to_string(freq_dim_) + "x" +
                           std::to_string(time_dim_) + " substrate");
  if (placements_.count(id))
    throw DuplicateIdError("placement id " + std::to_string(id) +
                           " already registered");
  if (!region_free(rect))
    throw OverlapError("rect " + rect_str(rect) +
                       " overlaps an existing placement");
  edi_ += boundary_delta(rect);
  for (int t = rect.t0; t < rect.t0 + rect.t; ++t)
    for (int f = rect.f0; f < rect.f0 + rect.f; ++f)
      cells_[static_cast<std::size_t>(t) * freq_dim_ + f] = 1;
  occupied_ += rect.area();
  placements_.emplace(id, rect);
}

void Substrate::remove(std::uint64_t id) {
  auto it = placements_.find(id);
  if (it == placements_.end())
    throw UnknownIdError("placement id " + std::to_string(id) +
                         " not registered");
  const Rect rect = it->second;
  for (int t = rect.t0; t < rect.t0 + rect.t; ++t)
    for (int f = rect.f0; f < rect.f0 + rect.f; ++f)
      cells_[static_cast<std::size_t>(t) * freq_dim_ + f] = 0;
  occupied_ -= rect.area();
  // Same boundary sum as at placement time: only cells outside the
  // rectangle enter it, and those are untouched by the removal.
  edi_ -= boundary_delta(rect);
  placements_.erase(it);
}

void Substrate::clear() {
  std::fill(cells_.begin(), cells_.end(), 0);
  placements_.clear();
  occupied_ = 0;
  edi_ = edi_opts_.count_border ? 2 * (freq_dim_ + time_dim_) : 0;
}

const Rect& Substrate::placement(std::uint64_t id) const {
  auto it = placements_.find(id);
  if (it == placements_.end())
    throw UnknownIdError("placement id " + std::to_string(id) +
                         " not registered");
  return it->second;
}

int Substrate::edi_if_placed(const Rect& rect) const {
  if (!in_bounds(rect))
    throw OutOfBoundsError("rect " + rect_str(rect) + " exceeds " +
                           std::to_string(freq_dim_) + "x" +
                           std::to_string(time_dim_) + " substrate");
  if (!region_free(rect))
    throw OverlapError("rect " + rect_str(rect) +
                       " overlaps an existing placement");
  return edi_ + boundary_delta(rect);
}

std::vector<Rect> Substrate::maximal_free_rectangles() const {
  std::vector<Rect> result;
  // free_cols[f]: column f is free in every row of the current strip
  // [t0, t1].
  std::vector<std::uint8_t> free_cols(freq_dim_);
  for (int t0 = 0; t0 < time_dim_; ++t0) {
    std::fill(free_cols.begin(), free_cols.end(), 1);
    for (int t1 = t0; t1 < time_dim_; ++t1) {
      for (int f = 0; f < freq_dim_; ++f)
        if (occupied(f, t1)) free_cols[f] = 0;
      // Maximal runs of free columns within the strip are maximal
      // horizontally by construction; keep those that cannot grow
      // vertically either.
      int f = 0;
      while (f < freq_dim_) {
        if (!free_cols[f]) {
          ++f;
          continue;
        }
        int f1 = f;
        while (f1 + 1 < freq_dim_ && free_cols[f1 + 1]) ++f1;
        bool grows_up = t0 > 0;
        bool grows_down = t1 + 1 < time_dim_;
        for (int c = f; c <= f1 && (grows_up || grows_down); ++c) {
          if (grows_up && occupied(c, t0 - 1)) grows_up = false;
          if (grows_down && occupied(c, t1 + 1)) grows_down = false;
        }
        if (!grows_up && !grows_down)
          result.push_back({f, t0, f1 - f + 1, t1 - t0 + 1});
        f = f1 + 1;
      }
    }
  }
  std::sort(result.begin(), result.end(), [](const Rect& a, const Rect& b) {
    if (a.t0 != b.t0) return a.t0 < b.t0;
    if (a.f0 != b.f0) return a.f0 < b.f0;
    if (a.f != b.f) return a.f < b.f;
    return a.t < b.t;
  });
  return result;
}

OccupancySplit occupancy_split(
    const Substrate& substrate,
    const std::map<std::uint64_t, std::pair<Operator, ServiceKind>>& owners) {
  OccupancySplit split;
  split.substrate_cells = substrate.cell_count();
  for (const auto& [id, rect] : substrate.placements()) {
    auto it = owners.find(id);
    if (it == owners.end())
      throw UnknownIdError("no owner recorded for placement id " +
                           std::to_string(id));
    split.cells[index_of(it->second.first)][index_of(it->second.second)] +=
        rect.area();
    split.total_cells += rect.area();
  }
  return split;
}

}  // namespace embedsim
