#pragma once

#include <cstddef>
#include <vector>

namespace hytrav {

struct SyncPolicy {
  double tolerance = 0.05;  ///< seconds, max pairwise stamp gap inside a tuple
  int queue_depth = 10;     ///< pending messages kept per stream

  void validate() const;
};

struct StampedMessage {
  double stamp = 0.0;
  std::size_t id = 0;  ///< caller-defined handle (e.g. manifest index)
};

/// One message per stream, indexed like the input streams.
using MatchedTuple = std::vector<StampedMessage>;

/// Approximate-time matching of individually time-ordered streams.
///
/// Messages are fed in global stamp order (ties by stream index) into
/// per-stream queues of bounded depth; the oldest message is dropped when a
/// queue overflows. After every arrival the pending messages are scanned
/// oldest-first as tuple anchors: an anchor at time a completes when every
/// other stream holds a message in [a, a + tolerance], and the oldest such
/// message per stream is taken. Completed tuples are removed from the
/// queues, so no message is used twice and every emitted tuple spans at most
/// `tolerance`.
std::vector<MatchedTuple> synchronize(const std::vector<std::vector<StampedMessage>>& streams,
                                      const SyncPolicy& policy = {});

}  // namespace hytrav
