#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "spinnet/spectral.hpp"

namespace spinnet {

struct StateVector {
  BasisPtr basis;
  Eigen::VectorXcd amplitudes;
  double norm() const { return amplitudes.norm(); }
};

struct EvolveOptions {
  int steps = 0;              // fixed step count; 0 means adaptive doubling
  double overlap_tol = 1e-8;  // doubling stops when 1 - |<psi_n|psi_2n>| drops below
  double krylov_tol = 1e-10;
  int max_krylov = 80;
  int initial_steps = 16;
  int max_steps = 1 << 21;
  double zeeman_b = 0.0;  // uniform z-field; enters as b*m inside the sector
};

struct EvolveResult {
  StateVector state;
  int steps = 0;
  bool converged = true;
  double overlap_delta = 0.0;  // 1 - |overlap| between the last two refinements
};

// The s-labeled lowest state of the m-sector. Throws DegenerateGroundError
// when that state is not unique.
StateVector ground_state_vector(const SpinNetwork& network, const CouplingMap& couplings,
                                HalfInt s, HalfInt m, const EigenSolveOptions& options = {});

// Sender's encoded state with z-magnetization m_choice, in product with the
// rest's singlet ground state, embedded in the global m = m_choice sector.
// The sender must be fully decoupled at t = 0 under the schedule.
StateVector initial_transfer_state(const Schedule& schedule, const std::vector<int>& sender,
                                   HalfInt m_choice, const EigenSolveOptions& options = {});

// Product of two-site singlets covering every site exactly once (m = 0).
StateVector singlet_product_state(const SpinNetwork& network,
                                  const std::vector<std::pair<int, int>>& pairs);

// Schroedinger propagation under H(t): midpoint-frozen Krylov exponential per
// step, with automatic step doubling until the final-state overlap settles.
EvolveResult evolve(const Schedule& schedule, const StateVector& psi0,
                    const EvolveOptions& options = {});
EvolveResult evolve_window(const Schedule& schedule, const StateVector& psi0, double t_from,
                           double t_to, const EvolveOptions& options = {});

// Partial trace onto `keep` (tensor factors in the given order), never
// materializing the full product space.
Eigen::MatrixXcd reduced_density(const StateVector& psi, const std::vector<int>& keep);

// Partial trace of sum_c coeff_c |psi_c> over components that may live in
// different m-sectors of the same network (cross terms included).
Eigen::MatrixXcd reduced_density_mixed(
    const std::vector<std::pair<std::complex<double>, const StateVector*>>& components,
    const std::vector<int>& keep);

// 1 - <psi0| rho_receiver |psi0>, clamped to [0, 1] for reporting.
double transfer_error(const StateVector& psi_final, int receiver_site,
                      const Eigen::VectorXcd& encoded_local_state);

// 1 - <singlet| rho_{ab} |singlet>; sites must carry equal spins.
double singlet_error(const StateVector& psi_final, int site_a, int site_b);

struct TransferRun {
  StateVector final_state;
  double error = 1.0;
  int steps = 0;
  bool converged = true;
};

// Full transfer simulation with a definite-m input at the sender.
TransferRun run_transfer(const Schedule& schedule, const std::vector<int>& sender,
                         int receiver_site, HalfInt m_choice, const EvolveOptions& options = {},
                         const EigenSolveOptions& solve = {});

// Superposed local input: each m-component is propagated in its own sector
// and the receiver density matrix is reassembled with phases tracked.
double transfer_error_superposed(const Schedule& schedule, const std::vector<int>& sender,
                                 int receiver_site, const Eigen::VectorXcd& local_state,
                                 const EvolveOptions& options = {},
                                 const EigenSolveOptions& solve = {});

struct SweepRow {
  int arm_count = 0;
  int arm_length = 0;
  double total_time = 0.0;
  double error = 0.0;
  double min_gap = 0.0;
  int steps = 0;
  std::string status;  // "ok", "incompatible", or "error: ..."
};

struct SweepOptions {
  int threads = 1;
  int gap_samples = 41;
  EvolveOptions evolve;
  EigenSolveOptions solve;
};

// Star-graph transfer sweep over arm counts and protocol times; rows are
// sorted by (arm_count, total_time) and failures are recorded per row.
std::vector<SweepRow> sweep_star_transfer(std::vector<int> arm_counts, int arm_length,
                                          std::vector<double> times, double coupling,
                                          const SweepOptions& options = {});

// Default sweep grid: JT log-spaced over [0.5, 100], 25 points.
std::vector<double> default_time_grid();

struct PhaseCheckReport {
  std::complex<double> measured;  // relative phase factor between components
  std::complex<double> expected;  // exp(-i b (m1 - m2) T)
  double deviation = 0.0;
  bool pass = false;
};

// Evolves two definite-m components with and without the uniform z-field and
// compares the acquired relative phase against exp(-i b dm T).
PhaseCheckReport zeeman_phase_check(const Schedule& schedule, double field_b,
                                    const StateVector& component_1,
                                    const StateVector& component_2,
                                    const EvolveOptions& options = {});

std::complex<double> overlap(const StateVector& a, const StateVector& b);
double expectation_s2(const StateVector& psi);

}  // namespace spinnet
