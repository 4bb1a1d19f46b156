#include "wchaos/diagrams.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>

namespace wchaos {

GroupedIndexSet::GroupedIndexSet(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.empty()) throw std::invalid_argument("no groups");
  if (sizes_.size() > 16) throw std::invalid_argument("more than 16 groups");
  for (std::size_t g = 0; g < sizes_.size(); ++g) {
    if (sizes_[g] < 1) throw std::invalid_argument("group sizes must be positive");
    for (int i = 0; i < sizes_[g]; ++i) group_of_.push_back(static_cast<int>(g));
    total_ += sizes_[g];
  }
}

GroupedIndexSet GroupedIndexSet::uniform(int group_size, int groups) {
  if (groups < 1) throw std::invalid_argument("need at least one group");
  return GroupedIndexSet(std::vector<int>(groups, group_size));
}

std::string PairPartition::to_string() const {
  std::ostringstream out;
  for (const auto& [a, b] : pairs) out << '(' << a + 1 << ',' << b + 1 << ')';
  return out.str();
}

PairPartition PairPartition::parse(const std::string& s) {
  PairPartition p;
  std::size_t i = 0;
  const auto expect = [&](char c) {
    if (i >= s.size() || s[i] != c)
      throw ParseError("bad partition string near position " + std::to_string(i));
    ++i;
  };
  const auto number = [&]() {
    std::size_t start = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i == start) throw ParseError("expected number in partition string");
    return std::stoi(s.substr(start, i - start));
  };
  while (i < s.size()) {
    if (std::isspace(static_cast<unsigned char>(s[i]))) {
      ++i;
      continue;
    }
    expect('(');
    int a = number();
    expect(',');
    int b = number();
    expect(')');
    if (a < 1 || b < 1 || a == b) throw ParseError("pair entries must be distinct and >= 1");
    p.pairs.emplace_back(std::min(a, b) - 1, std::max(a, b) - 1);
  }
  std::sort(p.pairs.begin(), p.pairs.end());
  return p;
}

namespace {

bool groups_connected(const std::vector<std::pair<int, int>>& pairs,
                      const GroupedIndexSet& groups) {
  std::array<int, 16> parent;
  const int g = groups.groups();
  for (int i = 0; i < g; ++i) parent[i] = i;
  const auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  int components = g;
  for (const auto& [a, b] : pairs) {
    int ra = find(groups.group_of(a));
    int rb = find(groups.group_of(b));
    if (ra != rb) {
      parent[ra] = rb;
      --components;
    }
  }
  return components == 1;
}

}  // namespace

bool is_valid_partition(const PairPartition& p, const GroupedIndexSet& groups) {
  const int total = groups.total();
  if (static_cast<int>(p.pairs.size()) * 2 != total) return false;
  std::vector<char> seen(total, 0);
  for (const auto& [a, b] : p.pairs) {
    if (a < 0 || b < 0 || a >= total || b >= total || a == b) return false;
    if (seen[a] || seen[b]) return false;
    seen[a] = seen[b] = 1;
    if (groups.group_of(a) == groups.group_of(b)) return false;  // |B n J_i| <= 1
  }
  return groups_connected(p.pairs, groups);
}

void enumerate_partitions(const GroupedIndexSet& groups,
                          const std::function<bool(const PairPartition&)>& visit,
                          const EnumerationOptions& options) {
  const int total = groups.total();
  if (total > options.max_total)
    throw CapExceeded("enumeration cap exceeded: " + std::to_string(total) + " > " +
                      std::to_string(options.max_total) + " indices");
  if (total % 2 != 0) return;  // Pi empty when N_l is odd

  std::vector<int> partner(total, -1);
  PairPartition current;
  current.pairs.reserve(total / 2);

  // Backtracking over the smallest unpaired element; within-group pairs are
  // pruned immediately, connectivity is checked at completion.
  auto rec = [&](auto&& self, int from) -> bool {
    int a = from;
    while (a < total && partner[a] >= 0) ++a;
    if (a == total)
      return groups_connected(current.pairs, groups) ? visit(current) : true;
    for (int b = a + 1; b < total; ++b) {
      if (partner[b] >= 0 || groups.group_of(b) == groups.group_of(a)) continue;
      partner[a] = b;
      partner[b] = a;
      current.pairs.emplace_back(a, b);
      const bool go_on = self(self, a + 1);
      current.pairs.pop_back();
      partner[a] = partner[b] = -1;
      if (!go_on) return false;
    }
    return true;
  };
  rec(rec, 0);
}

BigInt count_partitions_enumerated(const GroupedIndexSet& groups,
                                   const EnumerationOptions& options) {
  BigInt count = 0;
  enumerate_partitions(
      groups,
      [&](const PairPartition&) {
        ++count;
        return true;
      },
      options);
  return count;
}

namespace {

// Cross-group perfect matchings, counted over the multiset of group sizes.
BigInt cross_matchings(std::vector<int> sizes,
                       std::map<std::vector<int>, BigInt>& memo) {
  std::sort(sizes.begin(), sizes.end(), std::greater<int>());
  while (!sizes.empty() && sizes.back() == 0) sizes.pop_back();
  if (sizes.empty()) return 1;
  if (sizes.size() == 1) return 0;
  if (auto it = memo.find(sizes); it != memo.end()) return it->second;
  BigInt total = 0;
  std::vector<int> next = sizes;
  --next[0];  // pair one element of the largest group
  for (std::size_t j = 1; j < sizes.size(); ++j) {
    --next[j];
    total += sizes[j] * cross_matchings(next, memo);
    ++next[j];
  }
  memo[sizes] = total;
  return total;
}

}  // namespace

BigInt count_partitions(const GroupedIndexSet& groups) {
  const int l = groups.groups();
  int sum = 0;
  for (int s : groups.sizes()) sum += s;
  if (sum % 2 != 0) return 0;

  std::map<std::vector<int>, BigInt> mmemo;
  const auto matchings_of = [&](unsigned mask) {
    std::vector<int> sizes;
    for (int g = 0; g < l; ++g)
      if (mask >> g & 1u) sizes.push_back(groups.sizes()[g]);
    return cross_matchings(std::move(sizes), mmemo);
  };

  // connected(S) = matchings(S) - sum over proper subsets T of S containing
  // the lowest group of connected(T) * matchings(S \ T)
  std::vector<BigInt> connected(std::size_t{1} << l, -1);
  auto conn = [&](auto&& self, unsigned mask) -> BigInt {
    BigInt& slot = connected[mask];
    if (slot >= 0) return slot;
    BigInt result = matchings_of(mask);
    const unsigned low = mask & (~mask + 1u);
    for (unsigned sub = (mask - 1u) & mask; sub; sub = (sub - 1u) & mask) {
      if (!(sub & low)) continue;
      result -= self(self, sub) * matchings_of(mask ^ sub);
    }
    slot = result;
    return slot;
  };
  return conn(conn, (1u << l) - 1u);
}

BigInt count_partitions(int q, int m) {
  if (q < 1 || m < 1) throw std::invalid_argument("q and m must be positive");
  return count_partitions(GroupedIndexSet::uniform(q, m));
}

void DiagramMultigraph::add_edge(int u, int v, int multiplicity) {
  if (u == v) throw std::invalid_argument("loops are not allowed");
  if (u < 0 || v < 0 || u >= vertices || v >= vertices)
    throw std::invalid_argument("vertex out of range");
  if (u > v) std::swap(u, v);
  edge_multiplicity[{u, v}] += multiplicity;
}

int DiagramMultigraph::degree(int v) const {
  int d = 0;
  for (const auto& [e, mult] : edge_multiplicity)
    if (e.first == v || e.second == v) d += mult;
  return d;
}

int DiagramMultigraph::edge_count() const {
  int total = 0;
  for (const auto& [e, mult] : edge_multiplicity) total += mult;
  return total;
}

bool DiagramMultigraph::connected() const {
  if (vertices <= 1) return true;
  std::vector<char> seen(vertices, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (const auto& [e, mult] : edge_multiplicity) {
      const int other = e.first == v ? e.second : (e.second == v ? e.first : -1);
      if (other >= 0 && !seen[other]) {
        seen[other] = 1;
        ++reached;
        stack.push_back(other);
      }
    }
  }
  return reached == vertices;
}

bool DiagramMultigraph::regular(int q) const {
  for (int v = 0; v < vertices; ++v)
    if (degree(v) != q) return false;
  return true;
}

std::string DiagramMultigraph::key() const {
  std::string out;
  out.reserve(static_cast<std::size_t>(vertices) * (vertices - 1) / 2 + 1);
  out.push_back(static_cast<char>(vertices));
  for (int u = 0; u < vertices; ++u)
    for (int v = u + 1; v < vertices; ++v) {
      auto it = edge_multiplicity.find({u, v});
      out.push_back(static_cast<char>(it == edge_multiplicity.end() ? 0 : it->second));
    }
  return out;
}

DiagramMultigraph partition_to_multigraph(const PairPartition& p,
                                          const GroupedIndexSet& groups) {
  DiagramMultigraph g;
  g.vertices = groups.groups();
  for (const auto& [a, b] : p.pairs)
    g.add_edge(groups.group_of(a), groups.group_of(b));
  return g;
}

int matching_number(const DiagramMultigraph& g) {
  const int m = g.vertices;
  if (m > 20) throw CapExceeded("matching_number limited to 20 vertices");
  if (m == 0) return 0;
  std::vector<std::uint32_t> adj(m, 0);  // parallel edges collapse
  for (const auto& [e, mult] : g.edge_multiplicity) {
    adj[e.first] |= 1u << e.second;
    adj[e.second] |= 1u << e.first;
  }
  std::vector<std::int8_t> memo(std::size_t{1} << m, -1);
  memo[0] = 0;
  auto best = [&](auto&& self, std::uint32_t mask) -> int {
    std::int8_t& slot = memo[mask];
    if (slot >= 0) return slot;
    const int v = std::countr_zero(mask);
    int result = self(self, mask & (mask - 1));  // leave v unmatched
    std::uint32_t cand = adj[v] & mask;
    while (cand) {
      const int u = std::countr_zero(cand);
      cand &= cand - 1;
      result = std::max(result, 1 + self(self, mask & ~(1u << v) & ~(1u << u)));
    }
    slot = static_cast<std::int8_t>(result);
    return result;
  };
  return best(best, (1u << m) - 1u);
}

int matching_lower_bound(int q, int m) {
  if (q < 2 || m < 3) throw std::invalid_argument("matching_lower_bound needs q >= 2, m >= 3");
  const auto ceil_div = [](long long a, long long b) { return (a + b - 1) / b; };
  if (q % 2 == 1) {
    const long long num = (static_cast<long long>(q) * q - q - 1) * m - (q - 1);
    return static_cast<int>(ceil_div(num, static_cast<long long>(q) * (3 * q - 5)));
  }
  const long long cap = m / 2;
  const long long frac = ceil_div(static_cast<long long>(q + 2) * m, 3LL * q + 2);
  return static_cast<int>(std::min(cap, frac));
}

BigRational alpha(int q) {
  if (q < 2) throw std::invalid_argument("alpha requires q >= 2");
  if (q % 2 == 0) return BigRational(q + 2, 3 * q + 2);
  return BigRational(static_cast<long long>(q) * q - q - 1,
                     static_cast<long long>(q) * (3 * q - 5));
}

double alpha_value(int q) { return static_cast<double>(alpha(q)); }

CountBounds count_bounds(int q, int m) {
  if (q < 2 || m < 3) throw std::invalid_argument("count_bounds needs q >= 2, m >= 3");
  CountBounds b;
  const double log_mfact = std::lgamma(m + 1.0);
  b.log_upper = q / 2.0 * log_mfact + q * m / 2.0 * std::log(static_cast<double>(q));
  b.log_lower = q / 2.0 * log_mfact + m / 2.0 * std::log(2.0) - std::log(8.0);
  // direct products keep small cases exact; they overflow to +inf where only
  // the log forms stay usable
  double mfact = 1.0;
  for (int i = 2; i <= m; ++i) mfact *= i;
  b.upper = std::pow(mfact, q / 2.0) * std::pow(static_cast<double>(q), q * m / 2.0);
  b.lower = std::pow(mfact, q / 2.0) * std::pow(2.0, m / 2.0) / 8.0;
  return b;
}

BigRational count_lower_bound_squared(int q, int m) {
  return BigRational(big_pow(big_factorial(m), q) * big_pow(2, m), 64);
}

BigInt count_upper_bound_squared(int q, int m) {
  return big_pow(big_factorial(m), q) * big_pow(q, q * m);
}

}  // namespace wchaos
