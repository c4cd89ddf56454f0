#include "embedsim/embedder.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <tuple>
#include <unordered_map>

#include "embedsim/errors.hpp"

namespace embedsim {

namespace {

int shaped_area(const QueueEntry& e) {
  return e.vrr.shapes.empty() ? 0 : e.vrr.shapes.front().area();
}

}  // namespace

void sort_queue(EmbedQueue& queue) {
  std::sort(queue.begin(), queue.end(),
            [](const QueueEntry& a, const QueueEntry& b) {
              return std::make_tuple(-a.priority, a.active ? 0 : 1,
                                     -shaped_area(a), a.vrr.arrival_round,
                                     a.vrr.id) <
                     std::make_tuple(-b.priority, b.active ? 0 : 1,
                                     -shaped_area(b), b.vrr.arrival_round,
                                     b.vrr.id);
            });
}

EmbedQueue order_queue(const std::vector<VRR>& vrrs, Mode mode,
                       const PriorityPolicy& policy) {
  EmbedQueue queue;
  queue.reserve(vrrs.size());
  for (const VRR& v : vrrs) {
    QueueEntry e;
    e.vrr = v;
    e.priority = priority_of(v.owner, v.service, mode, policy);
    e.active = false;
    e.remaining = v.duration;
    queue.push_back(std::move(e));
  }
  sort_queue(queue);
  return queue;
}

std::optional<Rect> try_embed_one(const Substrate& substrate, const VRR& vrr) {
  const std::vector<Rect> regions = substrate.maximal_free_rectangles();

  const Rect* best_region = nullptr;
  const Shape* best_shape = nullptr;
  for (const Rect& region : regions) {
    for (const Shape& shape : vrr.shapes) {
      if (shape.f <= region.f && shape.t <= region.t) {
        if (best_region == nullptr || region.area() < best_region->area()) {
          best_region = &region;
          best_shape = &shape;
        }
        break;
      }
    }
  }
  if (best_region == nullptr) return std::nullopt;

  const Rect& rg = *best_region;
  const Shape& sh = *best_shape;
  const Rect corners[4] = {
      {rg.f0, rg.t0, sh.f, sh.t},
      {rg.f0 + rg.f - sh.f, rg.t0, sh.f, sh.t},
      {rg.f0, rg.t0 + rg.t - sh.t, sh.f, sh.t},
      {rg.f0 + rg.f - sh.f, rg.t0 + rg.t - sh.t, sh.f, sh.t},
  };
  Rect best = corners[0];
  int best_edi = substrate.edi_if_placed(corners[0]);
  for (int i = 1; i < 4; ++i) {
    const int edi = substrate.edi_if_placed(corners[i]);
    if (edi < best_edi) {
      best_edi = edi;
      best = corners[i];
    }
  }
  return best;
}

std::vector<EmbedDecision> embed_static(Substrate& substrate,
                                        const EmbedQueue& queue) {
  std::vector<EmbedDecision> decisions;
  decisions.reserve(queue.size());
  for (const QueueEntry& e : queue) {
    EmbedDecision d;
    d.vrr_id = e.vrr.id;
    if (auto rect = try_embed_one(substrate, e.vrr)) {
      substrate.place(*rect, e.vrr.id);
      d.outcome = Outcome::embedded;
      d.rect = rect;
    } else {
      d.outcome = Outcome::deferred;
    }
    decisions.push_back(d);
  }
  return decisions;
}

DynamicResult embed_dynamic(const EmbedQueue& active, const EmbedQueue& queue,
                            int freq_dim, int time_dim, EdiOptions edi) {
  EmbedQueue merged;
  merged.reserve(active.size() + queue.size());
  merged.insert(merged.end(), active.begin(), active.end());
  merged.insert(merged.end(), queue.begin(), queue.end());
  sort_queue(merged);

  DynamicResult result{Substrate(freq_dim, time_dim, edi), {}};
  result.decisions.reserve(merged.size());
  for (const QueueEntry& e : merged) {
    EmbedDecision d;
    d.vrr_id = e.vrr.id;
    if (auto rect = try_embed_one(result.substrate, e.vrr)) {
      result.substrate.place(*rect, e.vrr.id);
      d.outcome = Outcome::embedded;
      d.rect = rect;
    } else {
      d.outcome = e.active ? Outcome::preempted : Outcome::deferred;
    }
    result.decisions.push_back(d);
  }
  return result;
}

namespace {

constexpr int kOracleMaxCells = 36;
constexpr std::size_t kOracleMaxRequests = 6;

struct OracleEntry {
  std::size_t input_index = 0;
  int level_index = 0;
  int area = 0;
  std::vector<std::pair<Rect, std::uint64_t>> placements;
};

using Profile = std::vector<long long>;

std::uint64_t rect_mask(const Rect& r, int freq_dim) {
  std::uint64_t m = 0;
  for (int t = r.t0; t < r.t0 + r.t; ++t)
    for (int f = r.f0; f < r.f0 + r.f; ++f)
      m |= std::uint64_t{1} << (t * freq_dim + f);
  return m;
}

struct OracleSearch {
  const std::vector<OracleEntry>& entries;
  int levels = 0;
  // memo[i][mask] = (best suffix profile, chosen placement index or -1).
  std::vector<std::unordered_map<std::uint64_t, std::pair<Profile, int>>> memo;

  const std::pair<Profile, int>& solve(std::size_t i, std::uint64_t mask) {
    auto it = memo[i].find(mask);
    if (it != memo[i].end()) return it->second;

    Profile best(levels, 0);
    int choice = -1;
    if (i < entries.size()) {
      best = solve(i + 1, mask).first;
      const OracleEntry& e = entries[i];
      for (std::size_t p = 0; p < e.placements.size(); ++p) {
        const std::uint64_t pm = e.placements[p].second;
        if ((mask & pm) != 0) continue;
        Profile cand = solve(i + 1, mask | pm).first;
        cand[e.level_index] += e.area;
        if (cand > best) {
          best = std::move(cand);
          choice = static_cast<int>(p);
        }
      }
    }
    return memo[i].emplace(mask, std::make_pair(std::move(best), choice))
        .first->second;
  }
};

std::vector<int> level_indices(const EmbedQueue& requests,
                               std::vector<int>* levels_out) {
  std::vector<int> levels;
  for (const QueueEntry& e : requests) levels.push_back(e.priority);
  std::sort(levels.begin(), levels.end(), std::greater<int>());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  std::vector<int> idx(requests.size(), 0);
  for (std::size_t i = 0; i < requests.size(); ++i) {
    idx[i] = static_cast<int>(
        std::lower_bound(levels.begin(), levels.end(), requests[i].priority,
                         std::greater<int>()) -
        levels.begin());
  }
  if (levels_out) *levels_out = levels;
  return idx;
}

}  // namespace

std::vector<EmbedDecision> embed_oracle(const EmbedQueue& requests,
                                        int freq_dim, int time_dim) {
  if (freq_dim < 1 || time_dim < 1 || freq_dim * time_dim > kOracleMaxCells)
    throw TooLargeError("oracle substrate limited to 36 cells");
  if (requests.size() > kOracleMaxRequests)
    throw TooLargeError("oracle limited to 6 requests");

  std::vector<int> levels;
  const std::vector<int> level_idx = level_indices(requests, &levels);

  std::vector<OracleEntry> entries;
  entries.reserve(requests.size());
  for (std::size_t i = 0; i < requests.size(); ++i) {
    OracleEntry e;
    e.input_index = i;
    e.level_index = level_idx[i];
    e.area = shaped_area(requests[i]);
    for (const Shape& sh : requests[i].vrr.shapes) {
      if (sh.f > freq_dim || sh.t > time_dim) continue;
      for (int t0 = 0; t0 + sh.t <= time_dim; ++t0)
        for (int f0 = 0; f0 + sh.f <= freq_dim; ++f0) {
          Rect r{f0, t0, sh.f, sh.t};
          e.placements.emplace_back(r, rect_mask(r, freq_dim));
        }
    }
    entries.push_back(std::move(e));
  }
  // Highest priority first so the memoized search touches strong
  // prefixes early.
  std::stable_sort(entries.begin(), entries.end(),
                   [](const OracleEntry& a, const OracleEntry& b) {
                     return a.level_index < b.level_index;
                   });

  OracleSearch search{entries, static_cast<int>(levels.size()), {}};
  search.memo.resize(entries.size() + 1);
  search.solve(0, 0);

  std::vector<EmbedDecision> decisions(requests.size());
  for (std::size_t i = 0; i < requests.size(); ++i) {
    decisions[i].vrr_id = requests[i].vrr.id;
    decisions[i].outcome = Outcome::rejected;
  }
  std::uint64_t mask = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const int choice = search.solve(i, mask).second;
    if (choice < 0) continue;
    const auto& [rect, pm] = entries[i].placements[choice];
    EmbedDecision& d = decisions[entries[i].input_index];
    d.outcome = Outcome::embedded;
    d.rect = rect;
    mask |= pm;
  }
  return decisions;
}

std::vector<long long> priority_area_profile(
    const EmbedQueue& requests, const std::vector<EmbedDecision>& decisions) {
  std::vector<int> levels;
  const std::vector<int> level_idx = level_indices(requests, &levels);
  Profile profile(levels.size(), 0);
  for (const EmbedDecision& d : decisions) {
    if (d.outcome != Outcome::embedded || !d.rect) continue;
    for (std::size_t i = 0; i < requests.size(); ++i) {
      if (requests[i].vrr.id == d.vrr_id) {
        profile[level_idx[i]] += d.rect->area();
        break;
      }
    }
  }
  return profile;
}

}  // namespace embedsim
