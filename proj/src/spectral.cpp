#include "spinnet/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "spinnet/errors.hpp"

namespace spinnet {

namespace {

double spectral_width(const std::vector<LabeledEigenpair>& pairs) {
  if (pairs.empty()) return 0.0;
  return pairs.back().energy - pairs.front().energy;
}

Eigen::VectorXd deterministic_start(Eigen::Index n, int round) {
  std::mt19937_64 rng(987654321ULL + 7919ULL * static_cast<unsigned long long>(round));
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i)
    v[i] = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;
  return v;
}

// One deflation round: lowest eigenpair of op restricted to the orthogonal
// complement of the columns of `locked`. Full reorthogonalization throughout.
std::pair<double, Eigen::VectorXd> lanczos_lowest_one(const SparseOperator& op,
                                                      const Eigen::MatrixXd& locked, int round,
                                                      const EigenSolveOptions& options) {
  const auto n = static_cast<Eigen::Index>(op.dimension());
  const int max_m =
      static_cast<int>(std::min<Eigen::Index>(n - locked.cols(), options.max_lanczos_dim));
  if (max_m < 1) throw ConvergenceError("deflation exhausted the space", 0, 0.0);

  auto project_out = [&](Eigen::VectorXd& w, const Eigen::MatrixXd& V, Eigen::Index cols) {
    if (locked.cols() > 0) w.noalias() -= locked * (locked.transpose() * w);
    if (cols > 0) w.noalias() -= V.leftCols(cols) * (V.leftCols(cols).transpose() * w);
  };

  Eigen::MatrixXd V(n, max_m);
  Eigen::VectorXd alpha(max_m), beta(max_m);

  Eigen::VectorXd v = deterministic_start(n, round);
  project_out(v, V, 0);
  project_out(v, V, 0);
  if (v.norm() < 1e-12) throw ConvergenceError("start vector vanished under deflation", 0, 0.0);
  V.col(0) = v / v.norm();

  const int check_every = 8;
  double best_residual = std::numeric_limits<double>::infinity();

  for (int j = 0; j < max_m; ++j) {
    Eigen::VectorXd w = op.apply(Eigen::VectorXd(V.col(j)));
    alpha[j] = V.col(j).dot(w);
    w -= alpha[j] * V.col(j);
    if (j > 0) w -= beta[j - 1] * V.col(j - 1);
    project_out(w, V, j + 1);
    project_out(w, V, j + 1);
    beta[j] = w.norm();

    const double scale = std::max({1.0, alpha.head(j + 1).cwiseAbs().maxCoeff(),
                                   beta.head(j + 1).cwiseAbs().maxCoeff()});
    const bool happy = beta[j] < 1e-13 * scale;
    const bool last = j + 1 == max_m;

    if (happy || last || (j + 1) % check_every == 0) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
      tri.computeFromTridiagonal(alpha.head(j + 1), beta.head(j), Eigen::ComputeEigenvectors);
      const double theta = tri.eigenvalues()[0];
      const Eigen::VectorXd y = tri.eigenvectors().col(0);
      const double estimate = happy ? 0.0 : beta[j] * std::abs(y[j]);
      best_residual = std::min(best_residual, estimate);
      if (estimate <= options.residual_tol * std::max(1.0, std::abs(theta))) {
        Eigen::VectorXd x = V.leftCols(j + 1) * y;
        if (locked.cols() > 0) x.noalias() -= locked * (locked.transpose() * x);
        x.normalize();
        return {x.dot(op.apply(Eigen::VectorXd(x))), x};
      }
    }
    if (!happy && !last) V.col(j + 1) = w / beta[j];
  }
  throw ConvergenceError("Lanczos did not converge within the iteration budget", max_m,
                         best_residual);
}

// Nearest total-spin value consistent with the sector: s >= |m|, s <= sum s_j,
// and 2s sharing the parity of sum 2s_j. Casimir grows monotonically, so the
// scan can stop once the distance starts increasing.
int nearest_valid_twice_s(double expectation, int twice_m, int twice_total) {
  int lo = std::abs(twice_m);
  if (((twice_total - lo) % 2) != 0) ++lo;
  int best = lo;
  double best_err = std::numeric_limits<double>::infinity();
  for (int ts = lo; ts <= twice_total; ts += 2) {
    const double err = std::abs(expectation - HalfInt(ts).casimir());
    if (err < best_err) {
      best_err = err;
      best = ts;
    } else {
      break;
    }
  }
  return best;
}

}  // namespace

double LabeledSpectrum::degeneracy_tolerance(double rel) const {
  return rel * std::max(1.0, spectral_width(pairs));
}

LabeledSpectrum lowest_eigenpairs(const SparseOperator& op, int k,
                                  const EigenSolveOptions& options) {
  const auto dim = static_cast<int>(op.dimension());
  if (k < 1 || k > dim)
    throw InvalidInputError("requested " + std::to_string(k) + " eigenpairs of a dimension-" +
                            std::to_string(dim) + " operator");

  LabeledSpectrum spectrum;
  spectrum.basis = op.basis_ptr();
  spectrum.complete = k == dim;

  if (dim <= options.dense_threshold) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(op.dense());
    if (solver.info() != Eigen::Success)
      throw ConvergenceError("dense eigensolver failed", 0, 0.0);
    for (int i = 0; i < k; ++i)
      spectrum.pairs.push_back(
          {solver.eigenvalues()[i], solver.eigenvectors().col(i), HalfInt(-1), -1.0});
    return spectrum;
  }

  Eigen::MatrixXd locked(dim, 0);
  for (int f = 0; f < k; ++f) {
    auto [value, vector] = lanczos_lowest_one(op, locked, f, options);
    locked.conservativeResize(Eigen::NoChange, f + 1);
    locked.col(f) = vector;
    spectrum.pairs.push_back({value, std::move(vector), HalfInt(-1), -1.0});
  }
  std::sort(spectrum.pairs.begin(), spectrum.pairs.end(),
            [](const auto& a, const auto& b) { return a.energy < b.energy; });
  return spectrum;
}

LabeledSpectrum label_by_total_spin(LabeledSpectrum spectrum, const SparseOperator& s2op,
                                    const EigenSolveOptions& options) {
  if (spectrum.pairs.empty()) return spectrum;
  if (s2op.dimension() != spectrum.basis->dimension())
    throw DimensionMismatchError("S^2 operator belongs to a different basis");

  const int twice_m = spectrum.basis->m().twice();
  const int twice_total = spectrum.basis->network().total_spin_max().twice();
  const double tol_deg = spectrum.degeneracy_tolerance(options.degeneracy_rel);

  std::size_t begin = 0;
  while (begin < spectrum.pairs.size()) {
    std::size_t end = begin + 1;
    while (end < spectrum.pairs.size() &&
           spectrum.pairs[end].energy - spectrum.pairs[end - 1].energy < tol_deg)
      ++end;
    const auto count = static_cast<Eigen::Index>(end - begin);

    if (count == 1) {
      LabeledEigenpair& p = spectrum.pairs[begin];
      const double expectation = p.vector.dot(s2op.apply(Eigen::VectorXd(p.vector)));
      p.s = HalfInt(nearest_valid_twice_s(expectation, twice_m, twice_total));
      p.label_residual = std::abs(expectation - p.s.casimir());
      if (p.label_residual > options.label_tol)
        throw AmbiguousLabelError("state at energy " + std::to_string(p.energy) +
                                      " has <S^2> residual " + std::to_string(p.label_residual),
                                  p.label_residual);
    } else {
      // simultaneously diagonalize S^2 restricted to the degenerate cluster
      const auto n = static_cast<Eigen::Index>(spectrum.basis->dimension());
      Eigen::MatrixXd block(n, count);
      for (Eigen::Index c = 0; c < count; ++c) block.col(c) = spectrum.pairs[begin + c].vector;
      Eigen::MatrixXd restricted(count, count);
      for (Eigen::Index c = 0; c < count; ++c)
        restricted.col(c) = block.transpose() * s2op.apply(Eigen::VectorXd(block.col(c)));
      restricted = 0.5 * (restricted + restricted.transpose()).eval();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(restricted);
      const Eigen::MatrixXd rotated = block * solver.eigenvectors();
      for (Eigen::Index c = 0; c < count; ++c) {
        LabeledEigenpair& p = spectrum.pairs[begin + c];
        p.vector = rotated.col(c);
        const double expectation = solver.eigenvalues()[c];
        p.s = HalfInt(nearest_valid_twice_s(expectation, twice_m, twice_total));
        p.label_residual = std::abs(expectation - p.s.casimir());
        if (p.label_residual > options.label_tol)
          throw AmbiguousLabelError("degenerate cluster at energy " + std::to_string(p.energy) +
                                        " has <S^2> residual " +
                                        std::to_string(p.label_residual),
                                    p.label_residual);
      }
    }
    begin = end;
  }
  return spectrum;
}

// A truncated spectrum may cut through a degenerate cluster, whose S^2
// restriction would then be meaningless, so the trailing cluster is dropped
// before labeling and k expanded instead.
LabeledSpectrum labeled_lowest_states(const SparseOperator& hamiltonian,
                                      const SparseOperator& s2op, int min_states,
                                      const EigenSolveOptions& options) {
  const auto dim = static_cast<int>(hamiltonian.dimension());
  int k = std::min(dim, std::max(min_states + 2, 6));
  while (true) {
    LabeledSpectrum spectrum = lowest_eigenpairs(hamiltonian, k, options);
    if (!spectrum.complete) {
      const double tol_deg = spectrum.degeneracy_tolerance(options.degeneracy_rel);
      std::size_t usable = spectrum.pairs.size();
      while (usable > 1 &&
             spectrum.pairs[usable - 1].energy - spectrum.pairs[usable - 2].energy < tol_deg)
        --usable;
      --usable;  // the boundary state may have uncomputed degenerate partners
      if (static_cast<int>(usable) < min_states) {
        k = std::min(dim, 2 * k + 4);
        continue;
      }
      spectrum.pairs.resize(usable);
    }
    return label_by_total_spin(std::move(spectrum), s2op, options);
  }
}

namespace {

std::vector<std::size_t> s_labeled_indices(const LabeledSpectrum& spectrum, HalfInt s) {
  std::vector<std::size_t> indices;
  for (std::size_t i = 0; i < spectrum.pairs.size(); ++i)
    if (spectrum.pairs[i].s == s) indices.push_back(i);
  return indices;
}

}  // namespace

SectorGapResult sector_gap(const SpinNetwork& network, const CouplingMap& couplings, HalfInt s,
                           HalfInt m, const EigenSolveOptions& options) {
  if (s < m.abs()) throw InvalidInputError("V_{s,m} is empty: s < |m|");
  std::vector<HalfInt> spins;
  for (const Site& site : network.sites()) spins.push_back(site.spin);
  if (cg_multiplicity(spins, s) == 0)
    throw InvalidInputError("V_{s,m} is empty: total spin " + s.str() + " does not occur");

  BasisPtr basis = build_basis(network, m);
  const SparseOperator hamiltonian = assemble_hamiltonian(basis, couplings);
  const SparseOperator s2op = total_spin_squared(basis);

  int want = 2;
  while (true) {
    LabeledSpectrum spectrum = labeled_lowest_states(hamiltonian, s2op, want, options);
    const auto indices = s_labeled_indices(spectrum, s);
    const double tol_deg = spectrum.degeneracy_tolerance(options.degeneracy_rel);

    if (indices.size() >= 2) {
      const double e0 = spectrum.pairs[indices[0]].energy;
      const double gap = spectrum.pairs[indices[1]].energy - e0;
      if (gap < tol_deg)
        throw DegenerateGroundError("ground state of V_{s=" + s.str() + ",m=" + m.str() +
                                        "} is degenerate (gap " + std::to_string(gap) + ")",
                                    gap);
      return {e0, gap, false};
    }
    if (spectrum.complete) {
      if (indices.empty())
        throw InvalidInputError("no state with total spin " + s.str() + " in sector m = " +
                                m.str());
      // single s-state: the in-sector criterion is vacuous; report the
      // distance to the nearest state of any other label
      const double e0 = spectrum.pairs[indices[0]].energy;
      double nearest = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < spectrum.pairs.size(); ++i)
        if (i != indices[0]) nearest = std::min(nearest, std::abs(spectrum.pairs[i].energy - e0));
      return {e0, nearest, true};
    }
    want = static_cast<int>(spectrum.pairs.size()) + 4;
  }
}

LiebMattisReport lieb_mattis_check(const SpinNetwork& network, const CouplingMap& couplings,
                                   const EigenSolveOptions& options) {
  LiebMattisReport report;
  const Bipartition parts = bipartition(network);
  const ComponentDecomposition decomposition = connected_components(network, couplings, parts);
  if (decomposition.components.size() != 1) {
    report.failures.push_back("network is not connected under the given couplings");
    return report;
  }
  for (const auto& [key, value] : couplings)
    if (!(value > 0.0)) {
      report.failures.push_back("all couplings must be strictly positive");
      return report;
    }

  report.imbalance = decomposition.total_imbalance().abs();
  const int twice_g = report.imbalance.twice();
  const int twice_max = network.total_spin_max().twice();

  double global_min = std::numeric_limits<double>::infinity();
  for (int twice_m0 = twice_g; twice_m0 <= twice_max; twice_m0 += 2) {
    const HalfInt m0(twice_m0);
    BasisPtr basis = build_basis(network, m0);
    const SparseOperator hamiltonian = assemble_hamiltonian(basis, couplings);
    const SparseOperator s2op = total_spin_squared(basis);
    const int dim = static_cast<int>(basis->dimension());

    LiebMattisSectorCheck check;
    check.m = m0;
    LabeledSpectrum spectrum =
        dim == 1 ? label_by_total_spin(lowest_eigenpairs(hamiltonian, 1, options), s2op, options)
                 : labeled_lowest_states(hamiltonian, s2op, 2, options);
    check.ground_energy = spectrum.pairs[0].energy;
    check.label = spectrum.pairs[0].s;
    check.label_residual = spectrum.pairs[0].label_residual;
    check.unique =
        dim == 1 || spectrum.pairs[1].energy - spectrum.pairs[0].energy >
                        spectrum.degeneracy_tolerance(options.degeneracy_rel);
    check.label_ok = check.label == m0;
    if (!check.unique)
      report.failures.push_back("sector m = " + m0.str() + " has a degenerate ground state");
    if (!check.label_ok)
      report.failures.push_back("sector m = " + m0.str() + " ground state carries s = " +
                                check.label.str() + ", expected " + m0.str());
    global_min = std::min(global_min, check.ground_energy);
    report.sectors.push_back(check);
  }

  // Sectors with m0 < |g| hold the same ground multiplet: energy must match
  // E0(|g|) and labels must read |g|.
  const double e_g = report.sectors.front().ground_energy;
  const double same_tol = 1e-8 * std::max(1.0, std::abs(e_g));
  for (int twice_m0 = twice_max % 2; twice_m0 < twice_g; twice_m0 += 2) {
    const HalfInt m0(twice_m0);
    BasisPtr basis = build_basis(network, m0);
    const SparseOperator hamiltonian = assemble_hamiltonian(basis, couplings);
    const SparseOperator s2op = total_spin_squared(basis);
    LabeledSpectrum spectrum = labeled_lowest_states(hamiltonian, s2op, 1, options);
    if (std::abs(spectrum.pairs[0].energy - e_g) > same_tol ||
        spectrum.pairs[0].s != report.imbalance)
      report.failures.push_back("sector m = " + m0.str() +
                                " ground does not belong to the s = |g| multiplet");
    global_min = std::min(global_min, spectrum.pairs[0].energy);
  }

  report.ground_energy = global_min;
  report.ground_label = report.sectors.front().label;
  if (std::abs(global_min - e_g) > same_tol)
    report.failures.push_back("global ground state lies below the s = |g| multiplet");
  if (report.ground_label != report.imbalance)
    report.failures.push_back("global ground label " + report.ground_label.str() +
                              " differs from |g| = " + report.imbalance.str());
  report.pass = report.failures.empty();
  return report;
}

double GapTrace::min_gap() const {
  double result = std::numeric_limits<double>::infinity();
  for (double g : gap_in_sector) result = std::min(result, g);
  return result;
}

GapTrace levels_over_schedule(const Schedule& schedule, HalfInt s, HalfInt m, int k,
                              int n_samples, const EigenSolveOptions& options) {
  if (n_samples < 2) throw InvalidInputError("need at least two samples");
  if (k < 1) throw InvalidInputError("need at least one level");

  BasisPtr basis = build_basis(schedule.network(), m);
  const SparseOperator s2op = total_spin_squared(basis);
  const int dim = static_cast<int>(basis->dimension());
  const int k_levels = std::min(k, dim);

  GapTrace trace;
  trace.levels.resize(n_samples, k_levels);

  for (int i = 0; i < n_samples; ++i) {
    const double fraction = static_cast<double>(i) / (n_samples - 1);
    const double t = fraction * schedule.total_time();
    const SparseOperator hamiltonian = assemble_hamiltonian(basis, schedule.couplings_at(t));

    int want = std::max(k_levels, 2);
    double gap = std::numeric_limits<double>::infinity();
    bool exhausted = false;
    for (;;) {
      LabeledSpectrum spectrum = labeled_lowest_states(hamiltonian, s2op, want, options);
      const auto indices = s_labeled_indices(spectrum, s);
      if (indices.size() >= 2) {
        gap = spectrum.pairs[indices[1]].energy - spectrum.pairs[indices[0]].energy;
      } else if (!spectrum.complete) {
        want = static_cast<int>(spectrum.pairs.size()) + 4;
        continue;
      } else if (indices.size() == 1) {
        exhausted = true;
        const double e0 = spectrum.pairs[indices[0]].energy;
        for (std::size_t p = 0; p < spectrum.pairs.size(); ++p)
          if (p != indices[0]) gap = std::min(gap, std::abs(spectrum.pairs[p].energy - e0));
      } else {
        throw InvalidInputError("no state with total spin " + s.str() + " in sector m = " +
                                m.str());
      }
      for (int c = 0; c < k_levels; ++c) trace.levels(i, c) = spectrum.pairs[c].energy;
      break;
    }
    trace.times.push_back(fraction);
    trace.gap_in_sector.push_back(gap);
    trace.sector_exhausted.push_back(exhausted);
  }
  return trace;
}

}  // namespace spinnet
