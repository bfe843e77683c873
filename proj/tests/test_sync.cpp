#include "hytrav/sync.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

using namespace hytrav;

namespace {

std::vector<StampedMessage> stream(std::initializer_list<double> stamps, std::size_t base) {
  std::vector<StampedMessage> out;
  for (double s : stamps) out.push_back({s, base + out.size()});
  return out;
}

}  // namespace

TEST_CASE("identical stamps give one tuple per stamp") {
  std::vector<std::vector<StampedMessage>> s;
  for (std::size_t k = 0; k < 4; ++k) s.push_back(stream({0.0, 0.1, 0.2, 0.3, 0.4}, 100 * k));
  const auto t = synchronize(s);
  REQUIRE(t.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t k = 0; k < 4; ++k) CHECK(t[i][k].id == 100 * k + i);
  }
}

TEST_CASE("small offsets within tolerance") {
  const auto t = synchronize({stream({0.00}, 0), stream({0.03}, 10), stream({0.04}, 20), stream({0.01}, 30)},
                             {0.05, 10});
  REQUIRE(t.size() == 1);
  CHECK(t[0][0].stamp == 0.00);
  CHECK(t[0][1].stamp == 0.03);
}

TEST_CASE("offset beyond tolerance gives nothing") {
  std::vector<std::vector<StampedMessage>> s{stream({0, 1, 2, 3}, 0), stream({0.2, 1.2, 2.2, 3.2}, 10),
                                             stream({0, 1, 2, 3}, 20), stream({0, 1, 2, 3}, 30)};
  CHECK(synchronize(s, {0.05, 10}).empty());
  CHECK(synchronize(s, {0.25, 10}).size() == 4);
}

TEST_CASE("policy and input validation") {
  CHECK_THROWS(synchronize({stream({0}, 0)}, {0.0, 10}));
  CHECK_THROWS(synchronize({stream({0}, 0)}, {0.1, 0}));
  CHECK_THROWS(synchronize({stream({0, 0}, 0)}));
  CHECK(synchronize({}).empty());
}

TEST_CASE("random streams respect tolerance and never reuse messages") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> jitter(-0.04, 0.04), drop(0, 1), tol(0.01, 0.1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::vector<StampedMessage>> s(4);
    std::size_t id = 0;
    for (auto& st : s) {
      double last = -1.0;
      for (int k = 0; k < 30; ++k) {
        if (drop(rng) < 0.1) continue;
        const double stamp = std::max(last + 1e-3, 0.1 * k + jitter(rng));
        st.push_back({stamp, id++});
        last = stamp;
      }
    }
    const SyncPolicy pol{tol(rng), 1 + static_cast<int>(drop(rng) * 10)};
    const auto tuples = synchronize(s, pol);
    std::set<std::size_t> used;
    double prev_min = -1e9;
    for (const auto& t : tuples) {
      REQUIRE(t.size() == 4);
      double lo = 1e9, hi = -1e9;
      for (std::size_t k = 0; k < 4; ++k) {
        lo = std::min(lo, t[k].stamp);
        hi = std::max(hi, t[k].stamp);
        CHECK(used.insert(t[k].id).second);
        const bool from_stream = std::any_of(s[k].begin(), s[k].end(), [&](const StampedMessage& m) {
          return m.id == t[k].id && m.stamp == t[k].stamp;
        });
        CHECK(from_stream);
      }
      CHECK(hi - lo <= pol.tolerance + 1e-12);
      prev_min = std::max(prev_min, lo);
    }
    // deterministic
    const auto again = synchronize(s, pol);
    REQUIRE(again.size() == tuples.size());
    for (std::size_t i = 0; i < tuples.size(); ++i) {
      for (std::size_t k = 0; k < 4; ++k) CHECK(again[i][k].id == tuples[i][k].id);
    }
  }
}

TEST_CASE("queue depth ages out unmatched messages") {
  // the seg stream only starts late; old depth messages fall out of a depth-2 queue
  std::vector<std::vector<StampedMessage>> s{stream({0.0, 0.1, 0.2, 0.3, 0.4}, 0), stream({0.0, 0.1, 0.2, 0.3, 0.4}, 10),
                                             stream({0.0, 0.1, 0.2, 0.3, 0.4}, 20), stream({0.4}, 30)};
  const auto t = synchronize(s, {0.05, 2});
  REQUIRE(t.size() == 1);
  CHECK(t[0][0].stamp == 0.4);
}
