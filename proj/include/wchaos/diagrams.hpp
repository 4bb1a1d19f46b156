#pragma once

// Pair partitions of grouped index sets and their diagram multigraphs.
//
// Pi(n_1,...,n_l) is the set of perfect pairings of {1..N_l} such that no
// pair stays inside one group and the pairs connect all groups. For equal
// group sizes, Pi(q[m]) indexes the diagram formula for m-th cumulants of an
// order-q chaos element; the induced multigraph G_sigma is q-regular,
// connected and loop-free, and its matching number is bounded below by
// L(q, m).

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "wchaos/bigmath.hpp"
#include "wchaos/errors.hpp"

namespace wchaos {

class GroupedIndexSet {
 public:
  explicit GroupedIndexSet(std::vector<int> sizes);
  static GroupedIndexSet uniform(int group_size, int groups);

  int total() const { return total_; }
  int groups() const { return static_cast<int>(sizes_.size()); }
  int group_of(int element) const { return group_of_[element]; }  // 0-based
  const std::vector<int>& sizes() const { return sizes_; }

 private:
  std::vector<int> sizes_;
  std::vector<int> group_of_;
  int total_ = 0;
};

struct PairPartition {
  std::vector<std::pair<int, int>> pairs;  // 0-based, first < second, sorted

  std::string to_string() const;                     // "(1,4)(2,5)(3,6)" 1-based
  static PairPartition parse(const std::string& s);  // throws ParseError
};

// Checks the three defining constraints (pair sizes are structural here):
// no within-group pair, full cover, connectivity over groups.
bool is_valid_partition(const PairPartition& p, const GroupedIndexSet& groups);

struct EnumerationOptions {
  int max_total = 20;  // cap on sum n_i
};

// Streams every sigma in Pi(n_1..n_l) exactly once, in a deterministic
// order. The partition reference passed to the visitor is reused between
// calls; copy it if it must outlive the call. Returning false stops early.
// Throws CapExceeded when the total index count exceeds the cap.
void enumerate_partitions(const GroupedIndexSet& groups,
                          const std::function<bool(const PairPartition&)>& visit,
                          const EnumerationOptions& options = {});

// |Pi(...)| by direct enumeration (oracle path, cap-guarded).
BigInt count_partitions_enumerated(const GroupedIndexSet& groups,
                                   const EnumerationOptions& options = {});

// |Pi(...)| by exact closed recursion: cross-group perfect matchings counted
// over group-size multisets, connectivity restored by first-component
// decomposition. No cap; handles sizes far beyond enumeration reach.
BigInt count_partitions(const GroupedIndexSet& groups);
BigInt count_partitions(int q, int m);

struct DiagramMultigraph {
  int vertices = 0;
  std::map<std::pair<int, int>, int> edge_multiplicity;  // key u < v, loop-free

  void add_edge(int u, int v, int multiplicity = 1);
  int degree(int v) const;
  int edge_count() const;  // with multiplicity
  bool connected() const;
  bool regular(int q) const;
  // Compact upper-triangle encoding; equal strings iff equal labeled graphs.
  std::string key() const;
};

DiagramMultigraph partition_to_multigraph(const PairPartition& p,
                                          const GroupedIndexSet& groups);

// Maximum matching size, exact (subset dynamic program over vertices;
// parallel edges collapse). Guarded to <= 20 vertices.
int matching_number(const DiagramMultigraph& g);

// L(q,m): guaranteed lower bound on M(G_sigma) over sigma in Pi(q[m]).
// ceil(((q^2-q-1)m-(q-1))/(q(3q-5))) for odd q;
// min(floor(m/2), ceil((q+2)m/(3q+2))) for even q.
int matching_lower_bound(int q, int m);

// alpha(q) = (q+2)/(3q+2) for even q, (q^2-q-1)/(q(3q-5)) for odd q.
BigRational alpha(int q);
double alpha_value(int q);

// Count sandwich (1/8)(m!)^{q/2} sqrt(2)^m <= |Pi(q[m])| <= (m!)^{q/2} q^{qm/2}.
struct CountBounds {
  double lower = 0.0;
  double upper = 0.0;
  double log_lower = 0.0;  // natural log, always finite
  double log_upper = 0.0;
};
CountBounds count_bounds(int q, int m);

// Exact squared bounds for integer comparisons without irrational roots.
BigRational count_lower_bound_squared(int q, int m);  // (m!)^q 2^m / 64
BigInt count_upper_bound_squared(int q, int m);       // (m!)^q q^(qm)

}  // namespace wchaos
