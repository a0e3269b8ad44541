#include "spinnet/network.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

#include "spinnet/errors.hpp"

namespace spinnet {

SpinNetwork::SpinNetwork(std::vector<Site> sites, std::vector<Edge> edges)
    : sites_(std::move(sites)), edges_(std::move(edges)) {
  if (sites_.empty()) throw InvalidInputError("network has no sites");
  for (int i = 0; i < static_cast<int>(sites_.size()); ++i) {
    const Site& s = sites_[i];
    if (s.spin.twice() < 0)
      throw InvalidInputError("site " + std::to_string(s.id) + " has negative spin");
    if (!index_of_id_.emplace(s.id, i).second)
      throw InvalidInputError("duplicate site id " + std::to_string(s.id));
  }
  adjacency_.resize(sites_.size());
  std::set<EdgeKey> seen;
  for (const Edge& e : edges_) {
    if (e.a == e.b) throw InvalidInputError("self-loop on site " + std::to_string(e.a));
    if (!has_site(e.a) || !has_site(e.b))
      throw InvalidInputError("edge (" + std::to_string(e.a) + "," + std::to_string(e.b) +
                              ") references an unknown site");
    if (!(e.coupling > 0.0))
      throw InvalidInputError("edge (" + std::to_string(e.a) + "," + std::to_string(e.b) +
                              ") must have a positive base coupling");
    if (!seen.insert(EdgeKey(e.a, e.b)).second)
      throw InvalidInputError("duplicate edge (" + std::to_string(e.a) + "," +
                              std::to_string(e.b) + ")");
    adjacency_[site_index(e.a)].push_back(e.b);
    adjacency_[site_index(e.b)].push_back(e.a);
  }
  for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());
}

bool SpinNetwork::has_site(int id) const { return index_of_id_.count(id) != 0; }

int SpinNetwork::site_index(int id) const {
  auto it = index_of_id_.find(id);
  if (it == index_of_id_.end())
    throw InvalidInputError("unknown site id " + std::to_string(id));
  return it->second;
}

bool SpinNetwork::has_edge(int a, int b) const {
  EdgeKey key(a, b);
  for (const Edge& e : edges_)
    if (EdgeKey(e.a, e.b) == key) return true;
  return false;
}

double SpinNetwork::base_coupling(int a, int b) const {
  EdgeKey key(a, b);
  for (const Edge& e : edges_)
    if (EdgeKey(e.a, e.b) == key) return e.coupling;
  throw UnknownEdgeError("no edge (" + std::to_string(a) + "," + std::to_string(b) + ")");
}

HalfInt SpinNetwork::total_spin_max() const {
  HalfInt total;
  for (const Site& s : sites_) total += s.spin;
  return total;
}

CouplingMap SpinNetwork::base_couplings() const {
  CouplingMap map;
  for (const Edge& e : edges_) map.emplace(EdgeKey(e.a, e.b), e.coupling);
  return map;
}

bool Bipartition::in_part_one(int id) const {
  return std::binary_search(part_one.begin(), part_one.end(), id);
}

HalfInt ComponentDecomposition::total_imbalance() const {
  HalfInt total;
  for (HalfInt g : imbalances) total += g;
  return total;
}

Bipartition bipartition(const SpinNetwork& network) {
  const int n = network.site_count();
  std::vector<int> color(n, -1);
  // BFS from the lowest unvisited id; sites() is ordered but ids may not be,
  // so pick seeds in ascending id order.
  std::vector<int> ids;
  ids.reserve(n);
  for (const Site& s : network.sites()) ids.push_back(s.id);
  std::sort(ids.begin(), ids.end());

  for (int seed : ids) {
    if (color[network.site_index(seed)] != -1) continue;
    color[network.site_index(seed)] = 0;
    std::deque<int> queue{seed};
    while (!queue.empty()) {
      int id = queue.front();
      queue.pop_front();
      int c = color[network.site_index(id)];
      for (int nbr : network.adjacency()[network.site_index(id)]) {
        int& nc = color[network.site_index(nbr)];
        if (nc == -1) {
          nc = 1 - c;
          queue.push_back(nbr);
        } else if (nc == c) {
          throw NotBipartiteError("network contains an odd cycle through sites " +
                                  std::to_string(id) + " and " + std::to_string(nbr));
        }
      }
    }
  }

  Bipartition parts;
  for (int id : ids) {
    (color[network.site_index(id)] == 0 ? parts.part_one : parts.part_two).push_back(id);
  }
  return parts;
}

namespace {

void check_active_covers_edges(const SpinNetwork& network, const CouplingMap& active) {
  if (active.size() != network.edges().size())
    throw InvalidInputError("active couplings must be defined on exactly the network's edges");
  for (const auto& [key, value] : active) {
    if (!network.has_edge(key.a, key.b))
      throw UnknownEdgeError("coupling given for non-edge (" + std::to_string(key.a) + "," +
                             std::to_string(key.b) + ")");
    if (value < 0.0)
      throw InvalidInputError("negative coupling on edge (" + std::to_string(key.a) + "," +
                              std::to_string(key.b) + ")");
  }
}

}  // namespace

ComponentDecomposition connected_components(const SpinNetwork& network, const CouplingMap& active,
                                            const Bipartition& parts) {
  check_active_covers_edges(network, active);

  std::vector<int> ids;
  for (const Site& s : network.sites()) ids.push_back(s.id);
  std::sort(ids.begin(), ids.end());

  std::map<int, std::vector<int>> live_adjacency;
  for (const auto& [key, value] : active) {
    if (value > 0.0) {
      live_adjacency[key.a].push_back(key.b);
      live_adjacency[key.b].push_back(key.a);
    }
  }

  ComponentDecomposition result;
  std::set<int> visited;
  for (int seed : ids) {
    if (visited.count(seed)) continue;
    std::vector<int> component;
    std::deque<int> queue{seed};
    visited.insert(seed);
    while (!queue.empty()) {
      int id = queue.front();
      queue.pop_front();
      component.push_back(id);
      auto it = live_adjacency.find(id);
      if (it == live_adjacency.end()) continue;
      for (int nbr : it->second) {
        if (visited.insert(nbr).second) queue.push_back(nbr);
      }
    }
    std::sort(component.begin(), component.end());
    result.imbalances.push_back(spin_imbalance(network, parts, component));
    result.components.push_back(std::move(component));
  }
  return result;
}

ComponentDecomposition connected_components(const SpinNetwork& network, const CouplingMap& active) {
  return connected_components(network, active, bipartition(network));
}

HalfInt spin_imbalance(const SpinNetwork& network, const Bipartition& parts,
                       std::span<const int> subset) {
  HalfInt g;
  for (int id : subset) {
    HalfInt s = network.spin_of(id);
    g += parts.in_part_one(id) ? s : -s;
  }
  return g;
}

std::uint64_t cg_multiplicity(std::span<const HalfInt> spins, HalfInt s) {
  if (s.twice() < 0) return 0;
  int twice_total = 0;
  for (HalfInt sj : spins) {
    if (sj.twice() < 0) throw InvalidInputError("negative spin in multiplicity query");
    twice_total += sj.twice();
  }
  if (s.twice() > twice_total) return 0;
  if (((twice_total - s.twice()) % 2) != 0) return 0;  // parity mismatch
  if (spins.empty()) return s.twice() == 0 ? 1 : 0;

  // table[t] = multiplicity of total spin t/2 so far, t = 0..twice_total
  std::vector<std::uint64_t> table(static_cast<std::size_t>(twice_total) + 1, 0);
  table[static_cast<std::size_t>(spins[0].twice())] = 1;
  int twice_reached = spins[0].twice();
  for (std::size_t j = 1; j < spins.size(); ++j) {
    const int twice_sj = spins[j].twice();
    std::vector<std::uint64_t> next(table.size(), 0);
    for (int t = 0; t <= twice_reached; ++t) {
      const std::uint64_t count = table[static_cast<std::size_t>(t)];
      if (count == 0) continue;
      const int lo = std::abs(t - twice_sj);
      const int hi = t + twice_sj;
      for (int u = lo; u <= hi; u += 2) {
        std::uint64_t& slot = next[static_cast<std::size_t>(u)];
        if (__builtin_add_overflow(slot, count, &slot))
          throw OverflowError("multiplicity table overflowed 64 bits");
      }
    }
    table.swap(next);
    twice_reached += twice_sj;
  }
  return table[static_cast<std::size_t>(s.twice())];
}

std::uint64_t cg_multiplicity(std::initializer_list<HalfInt> spins, HalfInt s) {
  return cg_multiplicity(std::span<const HalfInt>(spins.begin(), spins.size()), s);
}

CompatibilityResult is_spin_s_compatible(const SpinNetwork& network, const CouplingMap& active,
                                         HalfInt s) {
  ComponentDecomposition decomposition = connected_components(network, active);
  std::vector<HalfInt> magnitudes;
  magnitudes.reserve(decomposition.imbalances.size());
  for (HalfInt g : decomposition.imbalances) magnitudes.push_back(g.abs());
  std::uint64_t n = cg_multiplicity(magnitudes, s);
  return CompatibilityResult{n == 1, n, std::move(decomposition)};
}

}  // namespace spinnet
