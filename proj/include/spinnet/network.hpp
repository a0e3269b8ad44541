#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "spinnet/half_int.hpp"

namespace spinnet {

struct Site {
  int id;
  HalfInt spin;
  friend bool operator==(const Site&, const Site&) = default;
};

// Unordered pair of site ids, normalized so a < b.
struct EdgeKey {
  int a;
  int b;
  EdgeKey(int x, int y) : a(x < y ? x : y), b(x < y ? y : x) {}
  friend auto operator<=>(const EdgeKey&, const EdgeKey&) = default;
};

struct Edge {
  int a;
  int b;
  double coupling;  // base strength J_ab > 0
  friend bool operator==(const Edge&, const Edge&) = default;
};

// Coupling assignment on the edge set; 0 means the edge is inactive.
using CouplingMap = std::map<EdgeKey, double>;

// Static graph of spinful sites with anti-ferromagnetic base couplings.
// Immutable after construction; construction validates ids, edges and signs.
class SpinNetwork {
 public:
  SpinNetwork(std::vector<Site> sites, std::vector<Edge> edges);

  const std::vector<Site>& sites() const { return sites_; }
  const std::vector<Edge>& edges() const { return edges_; }
  int site_count() const { return static_cast<int>(sites_.size()); }

  bool has_site(int id) const;
  int site_index(int id) const;  // throws InvalidInputError for unknown ids
  HalfInt spin_of(int id) const { return sites_[site_index(id)].spin; }

  bool has_edge(int a, int b) const;
  double base_coupling(int a, int b) const;  // throws UnknownEdgeError

  // Neighbor ids per site index, for traversals over the full edge set.
  const std::vector<std::vector<int>>& adjacency() const { return adjacency_; }

  HalfInt total_spin_max() const;  // sum of all site spins

  CouplingMap base_couplings() const;

  friend bool operator==(const SpinNetwork& x, const SpinNetwork& y) {
    return x.sites_ == y.sites_ && x.edges_ == y.edges_;
  }

 private:
  std::vector<Site> sites_;
  std::vector<Edge> edges_;
  std::map<int, int> index_of_id_;
  std::vector<std::vector<int>> adjacency_;
};

struct Bipartition {
  std::vector<int> part_one;  // sorted site ids
  std::vector<int> part_two;
  bool in_part_one(int id) const;
  // +1 for part_one, -1 for part_two
  int sign_of(int id) const { return in_part_one(id) ? 1 : -1; }
};

struct ComponentDecomposition {
  std::vector<std::vector<int>> components;  // sorted ids, ordered by smallest id
  std::vector<HalfInt> imbalances;           // per component, signed w.r.t. one global bipartition
  HalfInt total_imbalance() const;
};

// Canonical two-coloring: every connected component (under the full edge set)
// is colored independently with its lowest site id in part_one. Throws
// NotBipartiteError when an odd cycle exists.
Bipartition bipartition(const SpinNetwork& network);

// Maximal sets connected via strictly positive couplings. `active` must assign
// a value >= 0 to every edge of the network, and nothing else.
ComponentDecomposition connected_components(const SpinNetwork& network, const CouplingMap& active,
                                            const Bipartition& parts);
ComponentDecomposition connected_components(const SpinNetwork& network, const CouplingMap& active);

// Signed imbalance g of `subset`: sum of spins over part_one minus part_two.
HalfInt spin_imbalance(const SpinNetwork& network, const Bipartition& parts,
                       std::span<const int> subset);

// Multiplicity N^s of total spin s in the product of the given spins, by
// iterated two-spin coupling. 64-bit counts; throws OverflowError rather than
// wrapping. Returns 0 for out-of-range or parity-violating s.
std::uint64_t cg_multiplicity(std::span<const HalfInt> spins, HalfInt s);
std::uint64_t cg_multiplicity(std::initializer_list<HalfInt> spins, HalfInt s);

struct CompatibilityResult {
  bool compatible;             // N^s over component |g_i| equals 1
  std::uint64_t multiplicity;  // the N^s value itself
  ComponentDecomposition decomposition;
};

// The spin-s compatibility requirement on the active coupling pattern.
CompatibilityResult is_spin_s_compatible(const SpinNetwork& network, const CouplingMap& active,
                                         HalfInt s);

}  // namespace spinnet
