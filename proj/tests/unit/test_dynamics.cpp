#include <doctest.h>

#include <complex>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "spinnet/dynamics.hpp"
#include "spinnet/errors.hpp"

using namespace spinnet;

namespace {

const HalfInt half(1);
using Complex = std::complex<double>;

}  // namespace

TEST_CASE("ground state vectors") {
  SUBCASE("two spin-1/2 sites: the singlet") {
    const SpinNetwork pair({{1, half}, {2, half}}, {{1, 2, 1.0}});
    const StateVector gs = ground_state_vector(pair, pair.base_couplings(), HalfInt(0), HalfInt(0));
    // basis order: (down, up), (up, down)
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    const Complex phase = gs.amplitudes[0] / inv_sqrt2;
    CHECK(std::abs(std::abs(phase) - 1.0) < 1e-12);
    CHECK(std::abs(gs.amplitudes[1] / phase + inv_sqrt2) < 1e-12);
  }
  SUBCASE("four-site chain singlet ground state has vanishing total spin") {
    const SpinNetwork chain = chain_graph(4, half, 1.0);
    const StateVector gs =
        ground_state_vector(chain, chain.base_couplings(), HalfInt(0), HalfInt(0));
    CHECK(expectation_s2(gs) < 1e-9);
    CHECK(gs.norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("star ground energy agrees with the eigensolver") {
    const SpinNetwork star = star_graph(3, 2, half, 1.0);
    const StateVector gs = ground_state_vector(star, star.base_couplings(), half, half);
    const SparseOperator h = assemble_hamiltonian(build_basis(star, half), star.base_couplings());
    const LabeledSpectrum s = lowest_eigenpairs(h, 1);
    const double energy = gs.amplitudes.dot(h.apply(gs.amplitudes)).real();
    CHECK(energy == doctest::Approx(s.pairs[0].energy).epsilon(1e-10));
  }
  SUBCASE("degenerate request is refused") {
    // two decoupled spin-1/2 sites: two s=1/2 states tie in the m=1/2 sector
    const SpinNetwork pair({{1, half}, {2, half}, {3, half}},
                           {{1, 2, 1.0}, {2, 3, 1.0}});
    CouplingMap off;
    for (const Edge& e : pair.edges()) off.emplace(EdgeKey(e.a, e.b), 0.0);
    CHECK_THROWS_AS(ground_state_vector(pair, off, half, half), DegenerateGroundError);
  }
}

TEST_CASE("initial transfer states") {
  SUBCASE("three-site chain: up times singlet") {
    const SpinNetwork chain = chain_graph(3, half, 1.0);
    const Schedule schedule = transfer_schedule(chain, {1}, {3}, 10.0, 1.0);
    const StateVector psi = initial_transfer_state(schedule, {1}, half);
    // m = 1/2 sector of 3 sites: states by code among (d1,d2,d3)
    BasisPtr basis = psi.basis;
    REQUIRE(basis->dimension() == 3);
    // expect |up>_1 (singlet on 2,3): amplitude +-1/sqrt(2) on (1,0,1),(1,1,0)
    double found = 0.0;
    for (std::size_t i = 0; i < basis->dimension(); ++i) {
      const int d1 = basis->digit(i, 0), d2 = basis->digit(i, 1), d3 = basis->digit(i, 2);
      const Complex a = psi.amplitudes[static_cast<Eigen::Index>(i)];
      if (d1 == 1 && d2 != d3) {
        CHECK(std::abs(std::abs(a) - 1.0 / std::sqrt(2.0)) < 1e-12);
        found += std::norm(a);
      } else {
        CHECK(std::abs(a) < 1e-12);
      }
    }
    CHECK(found == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("star initial state is spin-1/2 overall") {
    const SpinNetwork star = star_graph(3, 2, half, 1.0);
    const Schedule schedule = transfer_schedule(star, {0}, {2}, 10.0, 1.0);
    const StateVector psi = initial_transfer_state(schedule, {0}, half);
    CHECK(psi.basis->dimension() == 35);
    CHECK(expectation_s2(psi) == doctest::Approx(0.75).epsilon(1e-9));
    CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("a connected sender is refused") {
    const SpinNetwork chain = chain_graph(3, half, 1.0);
    Schedule frozen(chain, 5.0, {});
    CHECK_THROWS_AS(initial_transfer_state(frozen, {1}, half), InvalidInputError);
  }
}

TEST_CASE("singlet product states") {
  const SpinNetwork chain = chain_graph(4, half, 1.0);
  const StateVector product = singlet_product_state(chain, {{1, 2}, {3, 4}});
  CHECK(product.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(expectation_s2(product) < 1e-12);

  // it is the ground state of the odd-coupled chain
  CouplingMap odd{{EdgeKey(1, 2), 1.0}, {EdgeKey(2, 3), 0.0}, {EdgeKey(3, 4), 1.0}};
  BasisPtr basis = product.basis;
  const SparseOperator h = assemble_hamiltonian(basis, odd);
  const double energy = product.amplitudes.dot(h.apply(product.amplitudes)).real();
  CHECK(energy == doctest::Approx(-1.5).epsilon(1e-12));  // two singlet bonds

  CHECK_THROWS_AS(singlet_product_state(chain, {{1, 2}}), InvalidInputError);
  CHECK_THROWS_AS(singlet_product_state(chain, {{1, 2}, {2, 3}}), InvalidInputError);
  const SpinNetwork mixed({{1, half}, {2, HalfInt(2)}}, {{1, 2, 1.0}});
  CHECK_THROWS_AS(singlet_product_state(mixed, {{1, 2}}), UnequalSpinsError);
}

TEST_CASE("propagation basics") {
  const SpinNetwork chain = chain_graph(4, half, 1.0);
  SUBCASE("frozen eigenstate only picks up a phase") {
    Schedule frozen(chain, 3.0, {});
    const StateVector gs =
        ground_state_vector(chain, chain.base_couplings(), HalfInt(0), HalfInt(0));
    const SparseOperator h =
        assemble_hamiltonian(gs.basis, chain.base_couplings());
    const double energy = gs.amplitudes.dot(h.apply(gs.amplitudes)).real();
    const EvolveResult result = evolve(frozen, gs);
    const Complex expected_phase = std::exp(Complex(0.0, -energy * 3.0));
    CHECK((result.state.amplitudes - expected_phase * gs.amplitudes).norm() < 1e-7);
    CHECK(result.converged);
  }
  SUBCASE("zero hamiltonian leaves the state untouched") {
    std::map<EdgeKey, Profile> off;
    for (const Edge& e : chain.edges()) off.emplace(EdgeKey(e.a, e.b), Profile::constant(0.0));
    Schedule zero(chain, 2.0, std::move(off));
    const StateVector product = singlet_product_state(chain, {{1, 2}, {3, 4}});
    const EvolveResult result = evolve(zero, product);
    CHECK((result.state.amplitudes - product.amplitudes).norm() < 1e-12);
  }
  SUBCASE("norm and sector labels survive a real schedule") {
    const Schedule schedule = transfer_schedule(chain_graph(3, half, 1.0), {1}, {3}, 8.0, 1.0);
    const StateVector psi0 = initial_transfer_state(schedule, {1}, half);
    const double s2_before = expectation_s2(psi0);
    const EvolveResult result = evolve(schedule, psi0);
    CHECK(std::abs(result.state.norm() - 1.0) < 1e-9);
    CHECK(std::abs(expectation_s2(result.state) - s2_before) < 1e-8);
  }
}

TEST_CASE("propagation matches the dense oracle") {
  const SpinNetwork star = star_graph(2, 2, half, 1.0);  // 5 sites, sector dim <= 10
  const Schedule schedule = transfer_schedule(star, {0}, {2}, 6.0, 1.0);
  const StateVector psi0 = initial_transfer_state(schedule, {0}, half);
  const EvolveResult fast = evolve(schedule, psi0);
  const Eigen::VectorXcd slow = oracle::dense_evolve(schedule, 1, psi0.amplitudes, 60000);
  const double agreement = std::abs(fast.state.amplitudes.dot(slow));
  CHECK(agreement > 1.0 - 1e-7);
}

TEST_CASE("reduced density matrices") {
  SUBCASE("product state reduces to the local projector") {
    const SpinNetwork chain = chain_graph(3, half, 1.0);
    const Schedule schedule = transfer_schedule(chain, {1}, {3}, 10.0, 1.0);
    const StateVector psi = initial_transfer_state(schedule, {1}, half);
    const Eigen::MatrixXcd rho = reduced_density(psi, {1});
    CHECK(std::abs(rho(1, 1) - 1.0) < 1e-12);
    CHECK(std::abs(rho(0, 0)) < 1e-12);
  }
  SUBCASE("half a singlet is maximally mixed") {
    const SpinNetwork pair({{1, half}, {2, half}}, {{1, 2, 1.0}});
    const StateVector gs = ground_state_vector(pair, pair.base_couplings(), HalfInt(0), HalfInt(0));
    const Eigen::MatrixXcd rho = reduced_density(gs, {1});
    CHECK((rho - 0.5 * Eigen::MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("chain ground state against the full-space oracle") {
    const SpinNetwork chain = chain_graph(4, half, 1.0);
    const StateVector gs =
        ground_state_vector(chain, chain.base_couplings(), HalfInt(0), HalfInt(0));
    const Eigen::MatrixXcd rho = reduced_density(gs, {1, 3});
    const Eigen::VectorXcd full =
        oracle::embed_sector_vector({1, 1, 1, 1}, 0, gs.amplitudes);
    const Eigen::MatrixXcd want = oracle::dense_partial_trace({1, 1, 1, 1}, full, {0, 2});
    CHECK((rho - want).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(rho.trace().real() - 1.0) < 1e-10);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
  }
}

TEST_CASE("transfer error metric") {
  const SpinNetwork chain = chain_graph(3, half, 1.0);
  const Schedule schedule = transfer_schedule(chain, {1}, {3}, 10.0, 1.0);
  const StateVector psi0 = initial_transfer_state(schedule, {1}, half);
  Eigen::VectorXcd up(2);
  up << 0.0, 1.0;
  SUBCASE("error vanishes when the state sits at the receiver already") {
    // swap roles: treat site 1 as 'receiver' of its own initialized state
    CHECK(transfer_error(psi0, 1, up) < 1e-12);
  }
  SUBCASE("maximally mixed receiver gives 1/2") {
    const SpinNetwork pair({{1, half}, {2, half}}, {{1, 2, 1.0}});
    const StateVector gs = ground_state_vector(pair, pair.base_couplings(), HalfInt(0), HalfInt(0));
    CHECK(transfer_error(gs, 1, up) == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("dimension mismatch is loud") {
    Eigen::VectorXcd bad(3);
    bad << 1.0, 0.0, 0.0;
    CHECK_THROWS_AS(transfer_error(psi0, 1, bad), DimensionMismatchError);
  }
}

TEST_CASE("singlet error metric") {
  const SpinNetwork pair({{1, half}, {2, half}}, {{1, 2, 1.0}});
  SUBCASE("exact singlet") {
    const StateVector gs = ground_state_vector(pair, pair.base_couplings(), HalfInt(0), HalfInt(0));
    CHECK(singlet_error(gs, 1, 2) < 1e-12);
  }
  SUBCASE("stretched triplet gives 1") {
    BasisPtr basis = build_basis(pair, HalfInt(2));
    Eigen::VectorXcd amp(1);
    amp << 1.0;
    const StateVector up_up{basis, amp};
    CHECK(singlet_error(up_up, 1, 2) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("unequal spins are rejected") {
    const SpinNetwork mixed({{1, half}, {2, HalfInt(2)}, {3, half}},
                            {{1, 2, 1.0}, {2, 3, 1.0}});
    const StateVector gs =
        ground_state_vector(mixed, mixed.base_couplings(), HalfInt(0), HalfInt(0));
    CHECK_THROWS_AS(singlet_error(gs, 1, 2), UnequalSpinsError);
  }
}

TEST_CASE("transfer input independence") {
  const SpinNetwork chain = chain_graph(3, half, 1.0);
  const Schedule schedule = transfer_schedule(chain, {1}, {3}, 12.0, 1.0);
  const TransferRun up = run_transfer(schedule, {1}, 3, half);
  const TransferRun down = run_transfer(schedule, {1}, 3, HalfInt(-1));
  CHECK(std::abs(up.error - down.error) < 1e-8);

  Eigen::VectorXcd superposed(2);
  superposed << Complex(0.6, 0.0), Complex(0.0, 0.8);
  const double mixed_error =
      transfer_error_superposed(schedule, {1}, 3, superposed);
  CHECK(std::abs(mixed_error - up.error) < 1e-8);
}

TEST_CASE("zeeman field handling") {
  const SpinNetwork chain = chain_graph(3, half, 1.0);
  const Schedule schedule = transfer_schedule(chain, {1}, {3}, 10.0, 1.0);
  SUBCASE("definite-m transfer error is field independent") {
    EvolveOptions with_field;
    with_field.zeeman_b = 0.7;
    const TransferRun bare = run_transfer(schedule, {1}, 3, half);
    const TransferRun shifted = run_transfer(schedule, {1}, 3, half, with_field);
    CHECK(std::abs(bare.error - shifted.error) < 1e-8);
  }
  SUBCASE("relative phase across sectors follows exp(-i b dm T)") {
    const StateVector a = initial_transfer_state(schedule, {1}, half);
    const StateVector b = initial_transfer_state(schedule, {1}, HalfInt(-1));
    SUBCASE("b = 0 gives no relative phase") {
      const PhaseCheckReport r = zeeman_phase_check(schedule, 0.0, a, b);
      CHECK(r.pass);
      CHECK(std::abs(r.measured - Complex(1.0, 0.0)) < 1e-9);
    }
    SUBCASE("bT = pi with dm = 1 flips the sign") {
      // frozen couplings, exact diagonal evolution
      Schedule frozen(chain_graph(2, half, 1.0), std::numbers::pi, {});
      const SpinNetwork& net = frozen.network();
      BasisPtr m0 = build_basis(net, HalfInt(0));
      BasisPtr m1 = build_basis(net, HalfInt(2));
      const StateVector c0 = ground_state_vector(net, net.base_couplings(), HalfInt(0), HalfInt(0));
      Eigen::VectorXcd amp(1);
      amp << 1.0;
      const StateVector c1{m1, amp};
      const PhaseCheckReport r = zeeman_phase_check(frozen, 1.0, c1, c0);
      CHECK(r.pass);
      CHECK(std::abs(r.expected - Complex(-1.0, 0.0)) < 1e-12);
      CHECK(std::abs(r.measured - Complex(-1.0, 0.0)) < 1e-6);
    }
  }
}

TEST_CASE("star sweep rows") {
  SweepOptions options;
  options.gap_samples = 11;
  const std::vector<SweepRow> rows = sweep_star_transfer({1}, 2, {6.0, 12.0}, 1.0, options);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].total_time == 6.0);
  CHECK(rows[1].total_time == 12.0);
  CHECK(rows[0].status == "ok");
  CHECK(rows[0].min_gap > 0.0);
  CHECK(rows[0].min_gap == rows[1].min_gap);

  // a single-point sweep equals a direct simulation
  const SpinNetwork star = star_graph(1, 2, half, 1.0);
  const Schedule schedule = transfer_schedule(star, {0}, {2}, 12.0, 1.0);
  const TransferRun direct = run_transfer(schedule, {0}, 2, half);
  CHECK(rows[1].error == doctest::Approx(direct.error).epsilon(1e-12));

  // arm length 1 makes sender and receiver adjacent: flagged, not fatal
  const std::vector<SweepRow> flagged = sweep_star_transfer({2}, 1, {5.0}, 1.0, options);
  REQUIRE(flagged.size() == 1);
  CHECK(flagged[0].status.substr(0, 5) == "error");

  // threaded execution returns identical rows in identical order
  SweepOptions threaded = options;
  threaded.threads = 2;
  const std::vector<SweepRow> parallel = sweep_star_transfer({1}, 2, {6.0, 12.0}, 1.0, threaded);
  REQUIRE(parallel.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(parallel[i].error == rows[i].error);
    CHECK(parallel[i].total_time == rows[i].total_time);
  }
}

TEST_CASE("transfer error decays in the adiabatic tail") {
  const SpinNetwork star = star_graph(2, 2, half, 1.0);
  std::vector<double> errors;
  for (double total_time : {25.0, 50.0, 100.0}) {
    const Schedule schedule = transfer_schedule(star, {0}, {2}, total_time, 1.0);
    errors.push_back(run_transfer(schedule, {0}, 2, half).error);
  }
  CHECK(errors[1] < errors[0]);
  CHECK(errors[2] < errors[1]);
  CHECK(errors[2] < 1e-3);
}

TEST_CASE("higher-spin and multi-component protocols") {
  SUBCASE("spin-1 transfer along a three-site chain") {
    const SpinNetwork chain = chain_graph(3, HalfInt(2), 1.0);
    const Schedule schedule = transfer_schedule(chain, {1}, {3}, 40.0, 1.0);
    const TransferRun run = run_transfer(schedule, {1}, 3, HalfInt(2));
    CHECK(run.error < 1e-2);
  }
  SUBCASE("spin-1 singlet pairs initialize a four-site chain") {
    const SpinNetwork chain = chain_graph(4, HalfInt(2), 1.0);
    const Schedule schedule = initialization_schedule(chain, 40.0);
    const StateVector start = singlet_product_state(chain, {{1, 2}, {3, 4}});
    const StateVector target = ground_state_vector(
        chain, schedule.couplings_at(schedule.total_time()), HalfInt(0), HalfInt(0));
    const StateVector finished = evolve(schedule, start).state;
    CHECK(std::abs(overlap(target, finished)) > 0.999);
  }
  SUBCASE("two detached spin-1/2 senders jointly encode s=1 for a spin-1 receiver") {
    const SpinNetwork net({{1, half}, {2, half}, {3, HalfInt(2)}, {4, half}, {5, half}},
                          {{1, 2, 1.0}, {2, 3, 1.0}, {3, 4, 1.0}, {4, 5, 1.0}});
    const Schedule schedule = transfer_schedule(net, {1, 5}, {3}, 60.0, 1.0);
    const TransferRun run = run_transfer(schedule, {1, 5}, 3, HalfInt(2));
    CHECK(run.error < 1e-2);
  }
}
