#include "spinnet/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "spinnet/errors.hpp"

namespace spinnet {

Profile Profile::constant(double j) {
  if (j < 0.0) throw InvalidInputError("constant profile needs a value >= 0");
  return Profile(ProfileKind::Constant, j);
}

Profile Profile::ramp_on(double j) {
  if (j < 0.0) throw InvalidInputError("ramp amplitude must be >= 0");
  return Profile(ProfileKind::RampOn, j);
}

Profile Profile::ramp_off(double j) {
  if (j < 0.0) throw InvalidInputError("ramp amplitude must be >= 0");
  return Profile(ProfileKind::RampOff, j);
}

Profile Profile::piecewise(std::vector<std::pair<double, double>> points) {
  if (points.size() < 2) throw InvalidInputError("piecewise profile needs at least two points");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].second < 0.0) throw InvalidInputError("piecewise profile value < 0");
    if (i > 0 && !(points[i].first > points[i - 1].first))
      throw InvalidInputError("piecewise profile times must be strictly increasing");
  }
  Profile p(ProfileKind::Piecewise, 0.0);
  p.points_ = std::move(points);
  return p;
}

double Profile::value(double t, double total_time) const {
  switch (kind_) {
    case ProfileKind::Constant:
      return amplitude_;
    case ProfileKind::RampOn:
      if (t == 0.0) return 0.0;  // the designated zero, bit-exact
      return amplitude_ * std::sin(std::numbers::pi * t / (2.0 * total_time));
    case ProfileKind::RampOff:
      if (t == total_time) return 0.0;
      return amplitude_ * std::cos(std::numbers::pi * t / (2.0 * total_time));
    case ProfileKind::Piecewise: {
      auto it = std::lower_bound(points_.begin(), points_.end(), t,
                                 [](const auto& p, double x) { return p.first < x; });
      if (it != points_.end() && it->first == t) return it->second;  // breakpoints exact
      if (it == points_.begin() || it == points_.end())
        throw InvalidInputError("piecewise profile evaluated outside its breakpoints");
      const auto& [t1, v1] = *it;
      const auto& [t0, v0] = *(it - 1);
      if (v0 == v1) return v0;  // flat segments (including flat zero) exact
      return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
    }
  }
  throw Error("unreachable profile kind");
}

std::vector<double> Profile::breakpoints(double total_time) const {
  if (kind_ == ProfileKind::Piecewise) {
    std::vector<double> times;
    times.reserve(points_.size());
    for (const auto& [t, v] : points_) times.push_back(t);
    return times;
  }
  return {0.0, total_time};
}

Schedule::Schedule(SpinNetwork network, double total_time, std::map<EdgeKey, Profile> profiles,
                   std::vector<double> extra_checkpoints)
    : network_(std::move(network)), total_time_(total_time), profiles_(std::move(profiles)) {
  if (!(total_time_ > 0.0)) throw InvalidInputError("schedule duration must be positive");

  for (const auto& [key, profile] : profiles_) {
    if (!network_.has_edge(key.a, key.b))
      throw UnknownEdgeError("profile on non-edge (" + std::to_string(key.a) + "," +
                             std::to_string(key.b) + ")");
    if (profile.kind() == ProfileKind::Piecewise) {
      if (profile.points().front().first != 0.0 || profile.points().back().first != total_time_)
        throw InvalidInputError("piecewise profile must span exactly [0, T]");
    }
  }
  for (const Edge& e : network_.edges()) {
    EdgeKey key(e.a, e.b);
    if (!profiles_.count(key)) profiles_.emplace(key, Profile::constant(e.coupling));
  }

  std::vector<double> times{0.0, total_time_ / 2.0, total_time_};
  for (const auto& [key, profile] : profiles_) {
    auto bp = profile.breakpoints(total_time_);
    times.insert(times.end(), bp.begin(), bp.end());
  }
  for (double t : extra_checkpoints) {
    if (t < 0.0 || t > total_time_)
      throw InvalidInputError("checkpoint outside [0, T]");
    times.push_back(t);
  }
  std::sort(times.begin(), times.end());
  const double eps = 1e-12 * std::max(1.0, total_time_);
  for (double t : times) {
    if (checkpoints_.empty() || t - checkpoints_.back() > eps) checkpoints_.push_back(t);
  }
  // keep T itself exact even if the previous checkpoint was within eps
  if (checkpoints_.back() != total_time_) checkpoints_.back() = total_time_;
}

CouplingMap Schedule::couplings_at(double t) const {
  if (t < 0.0 || t > total_time_) throw InvalidInputError("time outside [0, T]");
  CouplingMap map;
  for (const auto& [key, profile] : profiles_) map.emplace(key, profile.value(t, total_time_));
  return map;
}

const std::vector<int>& ProtocolSpec::party(const std::string& name) const {
  auto it = parties.find(name);
  if (it == parties.end()) throw InvalidInputError("unknown party '" + name + "'");
  return it->second;
}

SpinNetwork star_graph(int arm_count, int arm_length, HalfInt spin, double coupling) {
  if (arm_count < 1 || arm_length < 1)
    throw InvalidInputError("star graph needs at least one arm of length one");
  std::vector<Site> sites{{0, spin}};
  std::vector<Edge> edges;
  for (int a = 0; a < arm_count; ++a) {
    for (int i = 0; i < arm_length; ++i) {
      const int id = 1 + a * arm_length + i;
      sites.push_back({id, spin});
      edges.push_back({i == 0 ? 0 : id - 1, id, coupling});
    }
  }
  return SpinNetwork(std::move(sites), std::move(edges));
}

SpinNetwork chain_graph(int n, HalfInt spin, double coupling) {
  if (n < 1) throw InvalidInputError("chain needs at least one site");
  std::vector<Site> sites;
  std::vector<Edge> edges;
  for (int i = 1; i <= n; ++i) {
    sites.push_back({i, spin});
    if (i > 1) edges.push_back({i - 1, i, coupling});
  }
  return SpinNetwork(std::move(sites), std::move(edges));
}

namespace {

bool contains(const std::vector<int>& sorted, int id) {
  return std::binary_search(sorted.begin(), sorted.end(), id);
}

std::vector<int> sorted_party(const SpinNetwork& network, const std::vector<int>& party,
                              const char* what) {
  if (party.empty()) throw InvalidInputError(std::string(what) + " party is empty");
  std::vector<int> sorted = party;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw InvalidInputError(std::string(what) + " party lists a site twice");
  for (int id : sorted) network.site_index(id);  // existence check
  return sorted;
}

bool disjoint(const std::vector<int>& a, const std::vector<int>& b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) return false;
    (a[i] < b[j] ? i : j)++;
  }
  return true;
}

}  // namespace

Schedule transfer_schedule(const SpinNetwork& network, const std::vector<int>& sender,
                           const std::vector<int>& receiver, double total_time,
                           double ramp_amplitude) {
  auto snd = sorted_party(network, sender, "sender");
  auto rcv = sorted_party(network, receiver, "receiver");
  if (!disjoint(snd, rcv)) throw InvalidInputError("sender and receiver overlap");

  std::map<EdgeKey, Profile> profiles;
  for (const Edge& e : network.edges()) {
    const bool a_snd = contains(snd, e.a), b_snd = contains(snd, e.b);
    const bool a_rcv = contains(rcv, e.a), b_rcv = contains(rcv, e.b);
    const bool crosses_sender = a_snd != b_snd;
    const bool crosses_receiver = a_rcv != b_rcv;
    if ((a_snd || b_snd) && (a_rcv || b_rcv))
      throw OverlappingEdgeError("edge (" + std::to_string(e.a) + "," + std::to_string(e.b) +
                                 ") touches both sender and receiver");
    if (crosses_sender)
      profiles.emplace(EdgeKey(e.a, e.b), Profile::ramp_on(ramp_amplitude));
    else if (crosses_receiver)
      profiles.emplace(EdgeKey(e.a, e.b), Profile::ramp_off(ramp_amplitude));
    // party-internal and bulk edges default to constant base coupling
  }
  return Schedule(network, total_time, std::move(profiles));
}

Schedule entanglement_schedule(const SpinNetwork& network, const std::vector<int>& p1,
                               const std::vector<int>& p2, double total_time) {
  auto a = sorted_party(network, p1, "p1");
  auto b = sorted_party(network, p2, "p2");
  if (!disjoint(a, b)) throw InvalidInputError("parties p1 and p2 overlap");

  std::map<EdgeKey, Profile> profiles;
  for (const Edge& e : network.edges()) {
    const bool crosses = (contains(a, e.a) != contains(a, e.b)) ||
                         (contains(b, e.a) != contains(b, e.b));
    if (crosses) profiles.emplace(EdgeKey(e.a, e.b), Profile::ramp_off(e.coupling));
  }
  return Schedule(network, total_time, std::move(profiles));
}

std::vector<int> chain_order(const SpinNetwork& network) {
  const int n = network.site_count();
  if (n == 1) return {network.sites().front().id};
  std::vector<int> endpoints;
  for (const Site& s : network.sites()) {
    const auto degree = network.adjacency()[network.site_index(s.id)].size();
    if (degree == 1)
      endpoints.push_back(s.id);
    else if (degree != 2)
      throw InvalidInputError("network is not an open chain");
  }
  if (endpoints.size() != 2 || static_cast<int>(network.edges().size()) != n - 1)
    throw InvalidInputError("network is not an open chain");

  std::vector<int> path{std::min(endpoints[0], endpoints[1])};
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  used[static_cast<std::size_t>(network.site_index(path[0]))] = true;
  while (static_cast<int>(path.size()) < n) {
    bool extended = false;
    for (int nbr : network.adjacency()[network.site_index(path.back())]) {
      if (!used[static_cast<std::size_t>(network.site_index(nbr))]) {
        used[static_cast<std::size_t>(network.site_index(nbr))] = true;
        path.push_back(nbr);
        extended = true;
        break;
      }
    }
    if (!extended) throw InvalidInputError("network is not an open chain");
  }
  return path;
}

Schedule initialization_schedule(const SpinNetwork& network, double total_time) {
  const std::vector<int> path = chain_order(network);
  const int n = network.site_count();
  if (n % 2 != 0) throw OddLengthChainError("initialization chain must have even length");

  std::map<EdgeKey, Profile> profiles;
  for (int i = 1; i < n; ++i) {
    EdgeKey key(path[i - 1], path[i]);
    if (i % 2 == 0)  // even couplings ramp on; odd ones hold the singlet pairs
      profiles.emplace(key, Profile::ramp_on(network.base_coupling(key.a, key.b)));
  }
  return Schedule(network, total_time, std::move(profiles));
}

namespace {

struct PartyCheck {
  bool structurally_disconnected = true;  // every component inside or outside
  HalfInt total;                          // sum of the party's component imbalances
  bool signs_consistent = true;           // nonzero imbalances share one sign
  std::vector<std::size_t> component_indices;
};

PartyCheck inspect_party(const ComponentDecomposition& decomposition,
                         const std::vector<int>& party_sorted) {
  PartyCheck check;
  int sign_seen = 0;
  for (std::size_t c = 0; c < decomposition.components.size(); ++c) {
    const auto& comp = decomposition.components[c];
    const bool inside =
        std::includes(party_sorted.begin(), party_sorted.end(), comp.begin(), comp.end());
    if (inside) {
      check.component_indices.push_back(c);
      const HalfInt g = decomposition.imbalances[c];
      check.total += g;
      if (g.twice() != 0) {
        const int sign = g.twice() > 0 ? 1 : -1;
        if (sign_seen == 0)
          sign_seen = sign;
        else if (sign_seen != sign)
          check.signs_consistent = false;
      }
    } else if (!disjoint(comp, party_sorted)) {
      check.structurally_disconnected = false;
    }
  }
  return check;
}

std::string imbalance_list(const ComponentDecomposition& d) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < d.imbalances.size(); ++i)
    os << (i ? ", " : "") << d.imbalances[i].str();
  os << ")";
  return os.str();
}

void check_transfer_endpoint(const ComponentDecomposition& decomposition,
                             const std::vector<int>& party, HalfInt s, const char* role,
                             CheckpointReport& report) {
  const PartyCheck check = inspect_party(decomposition, party);
  if (!check.structurally_disconnected) {
    report.endpoint_ok = false;
    report.violations.push_back(std::string(role) + " is not disconnected from the rest");
    return;
  }
  if (!check.signs_consistent || check.total.abs() != s) {
    report.endpoint_ok = false;
    report.violations.push_back(std::string(role) +
                                " component imbalances do not add up to +-s (got " +
                                check.total.str() + ", need |g| = " + s.str() + ")");
  }
  for (std::size_t c = 0; c < decomposition.components.size(); ++c) {
    if (std::find(check.component_indices.begin(), check.component_indices.end(), c) !=
        check.component_indices.end())
      continue;
    if (decomposition.imbalances[c].twice() != 0) {
      report.endpoint_ok = false;
      report.violations.push_back("component containing site " +
                                  std::to_string(decomposition.components[c].front()) +
                                  " has g = " + decomposition.imbalances[c].str() +
                                  " but must have g = 0 while the " + role + " is detached");
    }
  }
}

}  // namespace

ProtocolReport verify(const ProtocolSpec& spec, const Schedule& schedule) {
  const SpinNetwork& network = schedule.network();

  // validate the spec against the network
  std::vector<std::vector<int>> sorted_parties;
  for (const auto& [name, sites] : spec.parties)
    sorted_parties.push_back(sorted_party(network, sites, name.c_str()));
  for (std::size_t i = 0; i < sorted_parties.size(); ++i)
    for (std::size_t j = i + 1; j < sorted_parties.size(); ++j)
      if (!disjoint(sorted_parties[i], sorted_parties[j]))
        throw InvalidInputError("parties overlap");
  if (spec.s.twice() < 0) throw InvalidInputError("protocol spin s must be >= 0");

  std::vector<int> sender, receiver;
  if (spec.kind != ProtocolSpec::Kind::Initialization) {
    sender = sorted_party(network, spec.party(spec.sender), "sender");
    receiver = sorted_party(network, spec.party(spec.receiver), "receiver");
  }

  // entanglement runs in the global singlet sector; compatibility is at s=0
  const HalfInt compat_s = spec.kind == ProtocolSpec::Kind::Entanglement ? HalfInt(0) : spec.s;

  ProtocolReport report;
  const double total_time = schedule.total_time();
  for (double t : schedule.checkpoints()) {
    CouplingMap couplings = schedule.couplings_at(t);
    CompatibilityResult compat = is_spin_s_compatible(network, couplings, compat_s);

    CheckpointReport cp;
    cp.time = t;
    cp.compatible = compat.compatible;
    cp.multiplicity = compat.multiplicity;
    cp.decomposition = std::move(compat.decomposition);
    if (!cp.compatible)
      cp.violations.push_back("spin-" + compat_s.str() + " compatibility broken: N = " +
                              std::to_string(cp.multiplicity) + " for component imbalances " +
                              imbalance_list(cp.decomposition));

    switch (spec.kind) {
      case ProtocolSpec::Kind::Transfer:
        if (t == 0.0)
          check_transfer_endpoint(cp.decomposition, sender, spec.s, "sender", cp);
        if (t == total_time)
          check_transfer_endpoint(cp.decomposition, receiver, spec.s, "receiver", cp);
        break;
      case ProtocolSpec::Kind::Entanglement: {
        if (t == 0.0) {
          if (cp.decomposition.total_imbalance().twice() != 0) {
            cp.endpoint_ok = false;
            cp.violations.push_back("global imbalance must be 0 at t = 0, got " +
                                    cp.decomposition.total_imbalance().str());
          }
          // both parties inside one component
          bool together = false;
          for (const auto& comp : cp.decomposition.components) {
            const bool holds_p1 =
                std::includes(comp.begin(), comp.end(), sender.begin(), sender.end());
            const bool holds_p2 =
                std::includes(comp.begin(), comp.end(), receiver.begin(), receiver.end());
            if (holds_p1 && holds_p2) together = true;
          }
          if (!together) {
            cp.endpoint_ok = false;
            cp.violations.push_back("parties are not connected at t = 0");
          }
        }
        if (t == total_time) {
          const PartyCheck c1 = inspect_party(cp.decomposition, sender);
          const PartyCheck c2 = inspect_party(cp.decomposition, receiver);
          if (!c1.structurally_disconnected || !c2.structurally_disconnected) {
            cp.endpoint_ok = false;
            cp.violations.push_back("parties must be disconnected at t = T");
          } else {
            if (c1.total != -c2.total || c1.total.abs() != spec.s) {
              cp.endpoint_ok = false;
              cp.violations.push_back("party imbalances must be opposite with |g| = " +
                                      spec.s.str() + "; got g1 = " + c1.total.str() +
                                      ", g2 = " + c2.total.str());
            }
            for (std::size_t c = 0; c < cp.decomposition.components.size(); ++c) {
              const bool in_p1 = std::find(c1.component_indices.begin(),
                                           c1.component_indices.end(),
                                           c) != c1.component_indices.end();
              const bool in_p2 = std::find(c2.component_indices.begin(),
                                           c2.component_indices.end(),
                                           c) != c2.component_indices.end();
              if (!in_p1 && !in_p2 && cp.decomposition.imbalances[c].twice() != 0) {
                cp.endpoint_ok = false;
                cp.violations.push_back(
                    "leftover component containing site " +
                    std::to_string(cp.decomposition.components[c].front()) + " has g = " +
                    cp.decomposition.imbalances[c].str() + ", must be 0");
              }
            }
          }
        }
        break;
      }
      case ProtocolSpec::Kind::Initialization:
        break;  // compatibility at every checkpoint is the whole requirement
    }

    for (const std::string& v : cp.violations)
      report.diagnostics.push_back("t = " + std::to_string(t) + ": " + v);
    report.checkpoints.push_back(std::move(cp));
  }

  report.pass = std::all_of(report.checkpoints.begin(), report.checkpoints.end(),
                            [](const CheckpointReport& cp) { return cp.pass(); });
  return report;
}

}  // namespace spinnet
