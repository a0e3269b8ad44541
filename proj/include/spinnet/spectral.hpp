#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "spinnet/hilbert.hpp"
#include "spinnet/protocol.hpp"

namespace spinnet {

struct EigenSolveOptions {
  int dense_threshold = 512;     // dense solver at or below this dimension
  double residual_tol = 1e-9;    // ||Hv - Ev|| < tol * max(1, |E|)
  int max_lanczos_dim = 600;     // per deflation round
  double label_tol = 1e-6;       // |<S^2> - s(s+1)| acceptance
  double degeneracy_rel = 1e-8;  // cluster tolerance, relative to spectral width
};

struct LabeledEigenpair {
  double energy;
  Eigen::VectorXd vector;
  HalfInt s = HalfInt(-1);  // -1 until labeled
  double label_residual = -1.0;
  bool labeled() const { return s.twice() >= 0; }
};

struct LabeledSpectrum {
  BasisPtr basis;
  std::vector<LabeledEigenpair> pairs;  // energies ascending
  bool complete = false;                // whole sector computed

  double degeneracy_tolerance(double rel = 1e-8) const;
};

// k lowest eigenpairs of a Hermitian sector operator. Dense below the
// threshold, deflated Lanczos with full reorthogonalization above it.
LabeledSpectrum lowest_eigenpairs(const SparseOperator& op, int k,
                                  const EigenSolveOptions& options = {});

// Assigns total-spin labels by simultaneously diagonalizing S^2 restricted to
// each degenerate energy cluster. Throws AmbiguousLabelError when a residual
// exceeds the labeling tolerance.
LabeledSpectrum label_by_total_spin(LabeledSpectrum spectrum, const SparseOperator& s2op,
                                    const EigenSolveOptions& options = {});

// Labeled lowest part of the spectrum with at least `min_states` entries (the
// whole sector when it is that small). Safe against truncation through a
// degenerate cluster: the boundary cluster is dropped and k expanded instead.
LabeledSpectrum labeled_lowest_states(const SparseOperator& hamiltonian,
                                      const SparseOperator& s2op, int min_states,
                                      const EigenSolveOptions& options = {});

struct SectorGapResult {
  double ground_energy;
  double gap;
  // True when V_{s,m} holds exactly one state; `gap` is then the distance to
  // the nearest state of any other label.
  bool sector_exhausted = false;
};

// Gap E(s, r=1, m) - E(s, r=0, m) within the m-sector, expanding the number
// of computed eigenpairs until two s-labeled states are found. Throws
// DegenerateGroundError when the ground of V_{s,m} is not unique.
SectorGapResult sector_gap(const SpinNetwork& network, const CouplingMap& couplings, HalfInt s,
                           HalfInt m, const EigenSolveOptions& options = {});

struct LiebMattisSectorCheck {
  HalfInt m;
  double ground_energy;
  HalfInt label;
  double label_residual;
  bool unique;
  bool label_ok;
};

struct LiebMattisReport {
  bool pass = false;
  HalfInt imbalance;     // g of the connected network
  HalfInt ground_label;  // s-label of the global ground state
  double ground_energy = 0.0;
  std::vector<LiebMattisSectorCheck> sectors;
  std::vector<std::string> failures;
};

// Checks the ground-state ordering expected of a connected bipartite
// antiferromagnet: the global ground state carries s = |g|, and every sector
// with m0 >= |g| has a unique ground state with s = m0.
LiebMattisReport lieb_mattis_check(const SpinNetwork& network, const CouplingMap& couplings,
                                   const EigenSolveOptions& options = {});

struct GapTrace {
  std::vector<double> times;  // fractions t/T
  Eigen::MatrixXd levels;     // n_samples x k, lowest energies
  std::vector<double> gap_in_sector;
  std::vector<bool> sector_exhausted;
  double min_gap() const;
};

// Lowest-k level trajectories and the s-labeled gap along a schedule.
GapTrace levels_over_schedule(const Schedule& schedule, HalfInt s, HalfInt m, int k,
                              int n_samples, const EigenSolveOptions& options = {});

}  // namespace spinnet
