#include <doctest.h>

#include <random>

#include "support.hpp"

using namespace gridrestore;
using support::bus;
using support::line;

namespace {

Grid chain_abc() { return Grid({bus(1), bus(2), bus(3)}, {line(1, 2), line(2, 3)}, {}, {}); }

Grid random_graph(std::mt19937_64& rng, int n, double edge_p) {
  std::vector<Bus> buses;
  for (int i = 1; i <= n; ++i) buses.push_back(bus(i));
  std::vector<Line> lines;
  std::bernoulli_distribution coin(edge_p);
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j)
      if (coin(rng)) lines.push_back(line(i, j));
  return Grid(std::move(buses), std::move(lines), {}, {});
}

}  // namespace

TEST_CASE("hop distance on a chain") {
  const Grid g = chain_abc();
  CHECK(hop_distance(g, BusId{1}, BusId{3}) == 2);
  CHECK(hop_distance(g, BusId{1}, BusId{1}) == 0);
  CHECK_THROWS_AS(hop_distance(g, BusId{1}, BusId{9}), UnknownBus);
}

TEST_CASE("hop distance across components is absent") {
  const Grid g({bus(1), bus(2), bus(3), bus(4)}, {line(1, 2), line(3, 4)}, {}, {});
  CHECK_FALSE(hop_distance(g, BusId{1}, BusId{4}).has_value());
  CHECK_THROWS_AS(check_connected(g), InvalidModel);
  CHECK_NOTHROW(check_connected(chain_abc()));
}

TEST_CASE("out of service lines are ignored") {
  Line open = line(1, 3);
  open.in_service = false;
  const Grid g({bus(1), bus(2), bus(3)}, {line(1, 2), line(2, 3), open}, {}, {});
  CHECK(hop_distance(g, BusId{1}, BusId{3}) == 2);
}

TEST_CASE("load distance clamps and takes the nearest source") {
  const Grid g = chain_abc();
  CHECK(load_distance(g, BusId{2}, {BusId{1}}) == 1);
  CHECK(load_distance(g, BusId{1}, {BusId{1}}) == 1);
  CHECK(load_distance(g, BusId{3}, {BusId{1}}) == 2);
  CHECK(load_distance(g, BusId{3}, {BusId{1}, BusId{3}}) == 1);
  const Grid split({bus(1), bus(2)}, {}, {}, {});
  CHECK_THROWS_AS(load_distance(split, BusId{2}, {BusId{1}}), Unreachable);
}

TEST_CASE("energization path") {
  const Grid g = chain_abc();
  CHECK(energization_path(g, {BusId{1}}, BusId{1}).empty());
  CHECK(energization_path(g, {BusId{1}}, BusId{3}) == std::vector<BusId>{BusId{2}, BusId{3}});
  CHECK(energization_path(g, {BusId{1}}, BusId{2}) == std::vector<BusId>{BusId{2}});

  // Two equal routes 1-2-4 and 1-3-4: the lower next bus wins.
  const Grid diamond({bus(1), bus(2), bus(3), bus(4)}, {line(1, 3), line(1, 2), line(2, 4), line(3, 4)}, {}, {});
  CHECK(energization_path(diamond, {BusId{1}}, BusId{4}) == std::vector<BusId>{BusId{2}, BusId{4}});

  const Grid split({bus(1), bus(2)}, {}, {}, {});
  CHECK_THROWS_AS(energization_path(split, {BusId{1}}, BusId{2}), Unreachable);
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(Grid({bus(1)}, {line(1, 2)}, {}, {}), InvalidModel);
  CHECK_THROWS_AS(Grid({bus(1), bus(2)}, {line(1, 1)}, {}, {}), InvalidModel);
  CHECK_THROWS_AS(Grid({bus(1), bus(2)}, {line(1, 2, 0.01, 0.0)}, {}, {}), InvalidModel);
  CHECK_THROWS_AS(Grid({bus(1), bus(1)}, {}, {}, {}), InvalidModel);
  CHECK_THROWS_AS(Grid({bus(1, 1.2)}, {}, {}, {}), InvalidModel);
  CHECK_THROWS_AS(Grid({bus(1)}, {}, {support::thermal(1, 7, 10, 1)}, {}), InvalidModel);
  CHECK_THROWS_AS(Grid({bus(1)}, {}, {}, {support::load(1, 1, 5, 0, 1.5)}), InvalidModel);
}

TEST_CASE("hop distance properties on random graphs") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 3 + trial % 10;
    const Grid g = random_graph(rng, n, 0.3);
    for (const Bus& a : g.buses()) {
      const auto bfs = support::hops_from(g, a.id);
      for (const Bus& b : g.buses()) {
        const auto ab = hop_distance(g, a.id, b.id);
        CHECK(ab == hop_distance(g, b.id, a.id));
        CHECK(ab == support::enumerate_hops(g, a.id, b.id));
        CHECK(ab.has_value() == bfs.contains(b.id));
        if (ab) CHECK(*ab == bfs.at(b.id));
        for (const Bus& c : g.buses()) {
          const auto bc = hop_distance(g, b.id, c.id);
          const auto ac = hop_distance(g, a.id, c.id);
          if (ab && bc) {
            REQUIRE(ac.has_value());
            CHECK(*ac <= *ab + *bc);
          }
        }
      }
    }
  }
}

TEST_CASE("energization path keeps the energized set connected") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 4 + trial % 9;
    std::vector<Bus> buses;
    std::vector<Line> lines;
    for (int i = 1; i <= n; ++i) buses.push_back(bus(i));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 2; i <= n; ++i) lines.push_back(line(1 + static_cast<int>(u(rng) * (i - 1)), i));
    const Grid g(std::move(buses), std::move(lines), {}, {});
    const BusId start{1 + static_cast<int>(u(rng) * n)};
    const BusId target{1 + static_cast<int>(u(rng) * n)};
    std::set<BusId> energized{start};
    const auto path = energization_path(g, energized, target);
    if (target != start) {
      REQUIRE_FALSE(path.empty());
      CHECK(path.back() == target);
      CHECK(static_cast<int>(path.size()) == *hop_distance(g, start, target));
    }
    for (BusId b : path) {
      CHECK_FALSE(energized.contains(b));
      bool touches = false;
      for (BusId nb : g.neighbors(b)) touches = touches || energized.contains(nb);
      CHECK(touches);
      energized.insert(b);
    }
  }
}
