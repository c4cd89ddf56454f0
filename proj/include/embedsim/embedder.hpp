#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "embedsim/grid.hpp"
#include "embedsim/requests.hpp"

namespace embedsim {

// One slot of an embedding queue. New requests carry active=false and
// remaining == vrr.duration; running services being re-embedded carry
// active=true and the rounds they still have to serve.
struct QueueEntry {
  VRR vrr;
  int priority = 0;
  bool active = false;
  int remaining = 0;
};

using EmbedQueue = std::vector<QueueEntry>;

enum class Outcome { embedded, deferred, rejected, preempted };

struct EmbedDecision {
  std::uint64_t vrr_id = 0;
  Outcome outcome = Outcome::deferred;
  std::optional<Rect> rect;
};

// Sorts by priority descending, active services before new requests,
// shaped area descending, arrival round ascending, id ascending.
void sort_queue(EmbedQueue& queue);

// Queue of new requests under the given mode's priorities.
EmbedQueue order_queue(const std::vector<VRR>& vrrs, Mode mode,
                       const PriorityPolicy& policy);

// One Karnaugh-map embedding attempt: pick the smallest maximal free
// rectangle admitting any candidate shape, then the corner of that region
// minimizing the resulting EDI. Absent when nothing fits.
std::optional<Rect> try_embed_one(const Substrate& substrate, const VRR& vrr);

// Static engine: embeds queue entries onto the substrate as-is; existing
// placements are never moved. Failures are reported as deferred.
std::vector<EmbedDecision> embed_static(Substrate& substrate,
                                        const EmbedQueue& queue);

struct DynamicResult {
  Substrate substrate;
  std::vector<EmbedDecision> decisions;
};

// Dynamic engine: repacks active services and buffered requests onto a
// fresh substrate each round. Active services that no longer fit are
// preempted; new requests that do not fit are deferred.
DynamicResult embed_dynamic(const EmbedQueue& active, const EmbedQueue& queue,
                            int freq_dim, int time_dim, EdiOptions edi = {});

// Exhaustive optimal embedding for small instances (freq*time <= 36,
// at most 6 requests): maximizes embedded area level by level, highest
// priority first. Requests not embedded are reported rejected.
// Throws TooLargeError beyond the search bounds.
std::vector<EmbedDecision> embed_oracle(const EmbedQueue& requests,
                                        int freq_dim, int time_dim);

// Embedded area per priority level, highest level first, over the levels
// present in `requests`. Lexicographic comparison of these profiles is the
// objective embed_oracle maximizes.
std::vector<long long> priority_area_profile(
    const EmbedQueue& requests, const std::vector<EmbedDecision>& decisions);

}  // namespace embedsim
