#include <doctest.h>

#include <set>

#include "oracles.hpp"
#include "wchaos/diagrams.hpp"

using namespace wchaos;

TEST_CASE("Pi(2[3]) has exactly 8 partitions, matching brute force") {
  const auto groups = GroupedIndexSet::uniform(2, 3);
  std::set<std::string> seen;
  enumerate_partitions(groups, [&](const PairPartition& p) {
    CHECK(is_valid_partition(p, groups));
    CHECK(seen.insert(p.to_string()).second);  // duplicate-free
    return true;
  });
  CHECK(seen.size() == 8);
  CHECK(testing::brute_force_partition_count(groups) == 8);
}

TEST_CASE("parity: Pi(3[3]) is empty") {
  const auto groups = GroupedIndexSet::uniform(3, 3);
  std::size_t count = 0;
  enumerate_partitions(groups, [&](const PairPartition&) {
    ++count;
    return true;
  });
  CHECK(count == 0);
  CHECK(count_partitions(3, 3) == 0);
}

TEST_CASE("Pi(1,1) is the single forced partition") {
  const GroupedIndexSet groups({1, 1});
  std::vector<std::string> seen;
  enumerate_partitions(groups,
                       [&](const PairPartition& p) {
                         seen.push_back(p.to_string());
                         return true;
                       });
  REQUIRE(seen.size() == 1);
  CHECK(seen[0] == "(1,2)");
  CHECK(count_partitions(groups) == 1);
}

TEST_CASE("enumeration is deterministic and supports early stop") {
  const auto groups = GroupedIndexSet::uniform(2, 4);
  std::vector<std::string> first, second;
  enumerate_partitions(groups, [&](const PairPartition& p) {
    first.push_back(p.to_string());
    return true;
  });
  enumerate_partitions(groups, [&](const PairPartition& p) {
    second.push_back(p.to_string());
    return second.size() < 5;
  });
  REQUIRE(first.size() == 48);
  REQUIRE(second.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK(first[i] == second[i]);
}

TEST_CASE("enumeration cap") {
  CHECK_THROWS_AS(enumerate_partitions(GroupedIndexSet::uniform(2, 11),
                                       [](const PairPartition&) { return true; }),
                  CapExceeded);
  EnumerationOptions wide;
  wide.max_total = 22;
  std::size_t count = 0;
  CHECK_NOTHROW(enumerate_partitions(GroupedIndexSet::uniform(2, 11),
                                     [&](const PairPartition&) {
                                       ++count;
                                       return count < 10;
                                     },
                                     wide));
}

TEST_CASE("count_partitions: closed recursion agrees with enumeration and formula") {
  // |Pi(2[m])| = 2^{m-1} (m-1)!
  std::uint64_t formula = 1;
  for (int m = 2; m <= 7; ++m) {
    formula = 1;
    for (int i = 1; i < m; ++i) formula *= 2 * i;
    CHECK(count_partitions(2, m) == BigInt(formula));
  }
  for (int m : {2, 3, 4, 5}) {
    CHECK(count_partitions(2, m) ==
          count_partitions_enumerated(GroupedIndexSet::uniform(2, m)));
  }
  CHECK(count_partitions(3, 4) ==
        count_partitions_enumerated(GroupedIndexSet::uniform(3, 4)));
  CHECK(count_partitions(3, 4) == 3240);
  CHECK(count_partitions(4, 3) ==
        count_partitions_enumerated(GroupedIndexSet::uniform(4, 3)));
  CHECK(count_partitions(4, 3) == 1728);
  // beyond enumeration reach
  CHECK(count_partitions(3, 6) == 11314080);
  CHECK(count_partitions(4, 6) == BigInt("61557719040"));
  // mixed group sizes against brute force
  const GroupedIndexSet mixed({3, 2, 2, 1});
  CHECK(count_partitions(mixed) == BigInt(testing::brute_force_partition_count(mixed)));
}

TEST_CASE("partition_to_multigraph basics") {
  const auto groups = GroupedIndexSet::uniform(2, 3);
  enumerate_partitions(groups, [&](const PairPartition& p) {
    const auto g = partition_to_multigraph(p, groups);
    CHECK(g.vertices == 3);
    CHECK(g.regular(2));
    CHECK(g.connected());
    CHECK(g.edge_count() == 3);
    // only connected 2-regular loop-free multigraph on 3 vertices: triangle
    CHECK(g.edge_multiplicity.size() == 3);
    return true;
  });

  const auto two = GroupedIndexSet::uniform(2, 2);
  enumerate_partitions(two, [&](const PairPartition& p) {
    const auto g = partition_to_multigraph(p, two);
    CHECK(g.vertices == 2);
    CHECK(g.edge_multiplicity.at({0, 1}) == 2);  // forced double edge
    return true;
  });

  const auto q3 = GroupedIndexSet::uniform(3, 4);
  std::size_t checked = 0;
  enumerate_partitions(q3, [&](const PairPartition& p) {
    const auto g = partition_to_multigraph(p, q3);
    for (int v = 0; v < 4; ++v) CHECK(g.degree(v) == 3);
    return ++checked < 50;
  });
}

TEST_CASE("matching_number spot values and oracle cross-check") {
  DiagramMultigraph triangle;
  triangle.vertices = 3;
  triangle.add_edge(0, 1);
  triangle.add_edge(1, 2);
  triangle.add_edge(0, 2);
  CHECK(matching_number(triangle) == 1);

  DiagramMultigraph path4;
  path4.vertices = 4;
  path4.add_edge(0, 1);
  path4.add_edge(1, 2);
  path4.add_edge(2, 3);
  CHECK(matching_number(path4) == 2);

  // all diagrams from Pi(3[4]) have matching number >= L(3,4) = 2
  const auto groups = GroupedIndexSet::uniform(3, 4);
  enumerate_partitions(groups, [&](const PairPartition& p) {
    const auto g = partition_to_multigraph(p, groups);
    const int m = matching_number(g);
    CHECK(m >= matching_lower_bound(3, 4));
    CHECK(m == testing::exhaustive_matching(g));
    return true;
  });
}

TEST_CASE("matching_lower_bound values") {
  CHECK(matching_lower_bound(2, 3) == 1);
  CHECK(matching_lower_bound(3, 4) == 2);  // ceil((5*4-2)/12)
  CHECK(matching_lower_bound(2, 4) == 2);
  CHECK_THROWS_AS(matching_lower_bound(1, 4), std::invalid_argument);
  CHECK_THROWS_AS(matching_lower_bound(2, 2), std::invalid_argument);
}

TEST_CASE("L(q,m) >= alpha(q)(m-2) for q in 2..6, m in 3..40") {
  for (int q = 2; q <= 6; ++q) {
    const BigRational a = alpha(q);
    for (int m = 3; m <= 40; ++m)
      CHECK(BigRational(matching_lower_bound(q, m)) >= a * (m - 2));
  }
}

TEST_CASE("alpha exact values") {
  CHECK(alpha(2) == BigRational(1, 2));
  CHECK(alpha(3) == BigRational(5, 12));
  CHECK(alpha(4) == BigRational(3, 7));  // 6/14 reduced
  CHECK_THROWS_AS(alpha(1), std::invalid_argument);
}

TEST_CASE("count_bounds values and exact sandwich") {
  const auto b23 = count_bounds(2, 3);
  CHECK(b23.upper == doctest::Approx(48.0).epsilon(1e-12));  // 6 * 2^3
  const auto b24 = count_bounds(2, 4);
  CHECK(b24.lower == doctest::Approx(12.0).epsilon(1e-12));  // 24*4/8

  for (int q = 2; q <= 4; ++q)
    for (int m = 3; m <= 6; ++m) {
      if ((q * m) % 2 != 0) continue;
      const BigInt count = count_partitions(q, m);
      const BigInt count_sq = count * count;
      CHECK(BigRational(count_sq) >= count_lower_bound_squared(q, m));
      CHECK(count_sq <= count_upper_bound_squared(q, m));
    }
}

TEST_CASE("partition text form round trips") {
  const auto p = PairPartition::parse("(1,4)(2,5)(3,6)");
  CHECK(p.to_string() == "(1,4)(2,5)(3,6)");
  CHECK_THROWS_AS(PairPartition::parse("(1,4"), ParseError);
  CHECK_THROWS_AS(PairPartition::parse("(1,1)"), ParseError);
  const auto groups = GroupedIndexSet::uniform(2, 3);
  CHECK(is_valid_partition(p, groups));
  // (1,2) pairs inside group 1
  CHECK(!is_valid_partition(PairPartition::parse("(1,2)(3,5)(4,6)"), groups));
  // disconnected over groups
  const GroupedIndexSet g22({2, 2, 2, 2});
  CHECK(!is_valid_partition(PairPartition::parse("(1,3)(2,4)(5,7)(6,8)"), g22));
}
