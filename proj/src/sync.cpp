#include "hytrav/sync.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>
#include <tuple>

namespace hytrav {

void SyncPolicy::validate() const {
  if (!(tolerance > 0.0)) throw std::invalid_argument("sync tolerance must be > 0");
  if (queue_depth < 1) throw std::invalid_argument("sync queue depth must be >= 1");
}

std::vector<MatchedTuple> synchronize(const std::vector<std::vector<StampedMessage>>& streams,
                                      const SyncPolicy& policy) {
  policy.validate();
  const std::size_t n = streams.size();
  std::vector<MatchedTuple> out;
  if (n == 0) return out;

  // Global arrival order.
  std::vector<std::tuple<double, std::size_t, std::size_t>> arrivals;
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t i = 0; i < streams[s].size(); ++i) {
      if (i > 0 && !(streams[s][i].stamp > streams[s][i - 1].stamp)) {
        throw std::invalid_argument("synchronize: stream timestamps must be strictly increasing");
      }
      arrivals.emplace_back(streams[s][i].stamp, s, i);
    }
  }
  std::sort(arrivals.begin(), arrivals.end());

  std::vector<std::deque<StampedMessage>> queues(n);
  const auto depth = static_cast<std::size_t>(policy.queue_depth);

  auto try_match = [&]() -> bool {
    // Anchors oldest-first across all streams.
    std::vector<std::pair<double, std::size_t>> anchors;
    for (std::size_t s = 0; s < n; ++s) {
      for (const auto& m : queues[s]) anchors.emplace_back(m.stamp, s);
    }
    std::sort(anchors.begin(), anchors.end());
    for (const auto& [a, anchor_stream] : anchors) {
      std::vector<std::size_t> pick(n);
      bool complete = true;
      for (std::size_t s = 0; s < n && complete; ++s) {
        auto it = std::find_if(queues[s].begin(), queues[s].end(), [&](const StampedMessage& m) {
          return m.stamp >= a && m.stamp - a <= policy.tolerance;
        });
        if (it == queues[s].end()) {
          complete = false;
        } else {
          pick[s] = static_cast<std::size_t>(it - queues[s].begin());
        }
      }
      if (!complete) continue;
      MatchedTuple t(n);
      for (std::size_t s = 0; s < n; ++s) {
        t[s] = queues[s][pick[s]];
        queues[s].erase(queues[s].begin() + static_cast<std::ptrdiff_t>(pick[s]));
      }
      out.push_back(std::move(t));
      return true;
    }
    return false;
  };

  for (const auto& [stamp, s, i] : arrivals) {
    queues[s].push_back(streams[s][i]);
    if (queues[s].size() > depth) queues[s].pop_front();
    while (try_match()) {
    }
  }
  return out;
}

}  // namespace hytrav
