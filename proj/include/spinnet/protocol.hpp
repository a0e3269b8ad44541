#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "spinnet/network.hpp"

namespace spinnet {

enum class ProfileKind { Constant, RampOn, RampOff, Piecewise };

// Time dependence of one coupling on [0, T]. Values are >= 0 and continuous;
// ramps reach exactly zero only at their designated endpoint, which is what
// the connectivity checks key on.
class Profile {
 public:
  static Profile constant(double j);
  static Profile ramp_on(double j);   // j * sin(pi t / 2T)
  static Profile ramp_off(double j);  // j * cos(pi t / 2T)
  static Profile piecewise(std::vector<std::pair<double, double>> points);  // (t, value)

  double value(double t, double total_time) const;
  // Times where the zero-pattern can change: profile endpoints and
  // piecewise breakpoints (always includes 0 and T).
  std::vector<double> breakpoints(double total_time) const;

  ProfileKind kind() const { return kind_; }
  double amplitude() const { return amplitude_; }
  const std::vector<std::pair<double, double>>& points() const { return points_; }

 private:
  Profile(ProfileKind kind, double amplitude) : kind_(kind), amplitude_(amplitude) {}
  ProfileKind kind_;
  double amplitude_ = 0.0;
  std::vector<std::pair<double, double>> points_;  // piecewise only, fractions of T
};

// Time-dependent coupling assignment J_e(t) on [0, T] plus checkpoint times.
// Edges without an explicit profile stay constant at their base coupling.
class Schedule {
 public:
  Schedule(SpinNetwork network, double total_time, std::map<EdgeKey, Profile> profiles,
           std::vector<double> extra_checkpoints = {});

  const SpinNetwork& network() const { return network_; }
  double total_time() const { return total_time_; }
  const std::map<EdgeKey, Profile>& profiles() const { return profiles_; }

  CouplingMap couplings_at(double t) const;

  // Sorted, deduplicated; always contains 0, T/2, T and every profile
  // breakpoint, merged with user-supplied times.
  const std::vector<double>& checkpoints() const { return checkpoints_; }

 private:
  SpinNetwork network_;
  double total_time_;
  std::map<EdgeKey, Profile> profiles_;
  std::vector<double> checkpoints_;
};

struct ProtocolSpec {
  enum class Kind { Transfer, Entanglement, Initialization };

  Kind kind = Kind::Transfer;
  // Named, disjoint site sets. For transfer, `sender`/`receiver` name the
  // acting parties; for entanglement they name the pair (p1, p2).
  std::map<std::string, std::vector<int>> parties;
  std::string sender;
  std::string receiver;
  HalfInt s;

  const std::vector<int>& party(const std::string& name) const;
};

struct CheckpointReport {
  double time;
  ComponentDecomposition decomposition;
  bool compatible = false;
  std::uint64_t multiplicity = 0;
  bool endpoint_ok = true;
  std::vector<std::string> violations;
  bool pass() const { return compatible && endpoint_ok; }
};

struct ProtocolReport {
  bool pass = false;
  std::vector<CheckpointReport> checkpoints;
  std::vector<std::string> diagnostics;  // human-readable violation list
};

// Center joined to `arm_count` chains of `arm_length` sites, uniform coupling.
// Site 0 is the center; arm a occupies ids 1 + a*arm_length ... (a+1)*arm_length.
SpinNetwork star_graph(int arm_count, int arm_length, HalfInt spin, double coupling);

// Path 1 - 2 - ... - n with uniform spin and coupling.
SpinNetwork chain_graph(int n, HalfInt spin, double coupling);

// Site ids of an open chain in path order, starting from the lower-id
// endpoint. Throws when the network is not an open chain.
std::vector<int> chain_order(const SpinNetwork& network);

// Edges incident to the sender ramp on (sin), edges incident to the receiver
// ramp off (cos) with amplitude `ramp_amplitude`; everything else stays at its
// base coupling. Throws OverlappingEdgeError if an edge touches both parties.
Schedule transfer_schedule(const SpinNetwork& network, const std::vector<int>& sender,
                           const std::vector<int>& receiver, double total_time,
                           double ramp_amplitude);

// Edges incident to p1 or p2 ramp off; the rest stay constant.
Schedule entanglement_schedule(const SpinNetwork& network, const std::vector<int>& p1,
                               const std::vector<int>& p2, double total_time);

// Even-length path: odd couplings (1st, 3rd, ...) constant, even couplings
// ramp on. The t=0 ground state is the product of nearest-neighbor singlets.
Schedule initialization_schedule(const SpinNetwork& network, double total_time);

// Static requirement check at every checkpoint. Failures are verdicts in the
// report, not errors; the criteria are sufficient conditions, so a fail means
// "requirement not met", never "protocol impossible".
ProtocolReport verify(const ProtocolSpec& spec, const Schedule& schedule);

}  // namespace spinnet
