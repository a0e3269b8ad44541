#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "spinnet/errors.hpp"
#include "spinnet/hilbert.hpp"
#include "spinnet/protocol.hpp"

using namespace spinnet;

namespace {

const HalfInt half(1);
const HalfInt one(2);

SpinNetwork two_sites(HalfInt spin) {
  return SpinNetwork({{1, spin}, {2, spin}}, {{1, 2, 1.0}});
}

CouplingMap random_couplings(const SpinNetwork& net, std::mt19937& rng) {
  CouplingMap map;
  for (const Edge& e : net.edges())
    map.emplace(EdgeKey(e.a, e.b), 0.1 + (rng() % 1000) / 500.0);
  return map;
}

}  // namespace

TEST_CASE("basis enumeration matches counting") {
  SUBCASE("two spin-1/2 sites") {
    CHECK(build_basis(two_sites(half), HalfInt(0))->dimension() == 2);
    CHECK(build_basis(two_sites(half), HalfInt(2))->dimension() == 1);
    CHECK_THROWS_AS(build_basis(two_sites(half), HalfInt(1)), EmptySectorError);
    CHECK_THROWS_AS(build_basis(two_sites(half), HalfInt(4)), EmptySectorError);
  }
  SUBCASE("star M=3 K=2 sector m=1/2 has dimension C(7,4)") {
    const SpinNetwork star = star_graph(3, 2, half, 1.0);
    BasisPtr basis = build_basis(star, half);
    CHECK(basis->dimension() == 35);
    CHECK(basis->dimension() == oracle::sector_dimension_poly({1, 1, 1, 1, 1, 1, 1}, 1));
    CHECK(basis->dimension() == oracle::sector_indices({1, 1, 1, 1, 1, 1, 1}, 1).size());
  }
  SUBCASE("mixed spins against the generating function") {
    std::mt19937 rng(5150);
    for (int round = 0; round < 10; ++round) {
      std::vector<Site> sites;
      std::vector<int> twice_spins;
      const int n = 2 + static_cast<int>(rng() % 4u);
      int twice_total = 0;
      for (int i = 0; i < n; ++i) {
        const int t = 1 + static_cast<int>(rng() % 3u);
        sites.push_back({i, HalfInt(t)});
        twice_spins.push_back(t);
        twice_total += t;
      }
      const SpinNetwork net(sites, {});
      for (int tm = -twice_total; tm <= twice_total; tm += 2) {
        const auto expected = oracle::sector_dimension_poly(twice_spins, tm);
        if (expected == 0) continue;
        CHECK(build_basis(net, HalfInt(tm))->dimension() == expected);
      }
    }
  }
}

TEST_CASE("basis codes ascend and invert") {
  const SpinNetwork star = star_graph(2, 2, one, 0.5);
  BasisPtr basis = build_basis(star, HalfInt(2));
  for (std::size_t i = 1; i < basis->dimension(); ++i)
    CHECK(basis->code(i) > basis->code(i - 1));
  for (std::size_t i = 0; i < basis->dimension(); ++i) {
    REQUIRE(basis->find_code(basis->code(i)).has_value());
    CHECK(*basis->find_code(basis->code(i)) == i);
  }
  // a code outside the sector is not found
  std::vector<int> digits(star.site_count(), 0);
  CHECK_FALSE(basis->find_code(basis->encode(digits)).has_value());
  // local magnetizations sum to m for every state
  for (std::size_t i = 0; i < basis->dimension(); ++i) {
    HalfInt sum;
    for (int j = 0; j < basis->site_count(); ++j) sum += basis->local_m(i, j);
    CHECK(sum == HalfInt(2));
  }
}

TEST_CASE("two-spin pair term is exact") {
  BasisPtr basis = build_basis(two_sites(half), HalfInt(0));
  const SparseOperator term = heisenberg_term(basis, 1, 2);
  const Eigen::MatrixXd mat = term.dense();
  // states ordered by code: (down, up) then (up, down)
  CHECK(mat(0, 0) == -0.25);
  CHECK(mat(1, 1) == -0.25);
  CHECK(mat(0, 1) == 0.5);
  CHECK(mat(1, 0) == 0.5);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mat);
  CHECK(es.eigenvalues()[0] == doctest::Approx(-0.75).epsilon(1e-14));
  CHECK(es.eigenvalues()[1] == doctest::Approx(0.25).epsilon(1e-14));

  BasisPtr stretched = build_basis(two_sites(half), HalfInt(2));
  CHECK(heisenberg_term(stretched, 1, 2).dense()(0, 0) == 0.25);
}

TEST_CASE("two spin-1 pair eigenvalues are -2, -1, +1") {
  BasisPtr basis = build_basis(two_sites(one), HalfInt(0));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(heisenberg_term(basis, 1, 2).dense());
  REQUIRE(es.eigenvalues().size() == 3);
  CHECK(es.eigenvalues()[0] == doctest::Approx(-2.0).epsilon(1e-13));
  CHECK(es.eigenvalues()[1] == doctest::Approx(-1.0).epsilon(1e-13));
  CHECK(es.eigenvalues()[2] == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("hamiltonian assembly") {
  const SpinNetwork chain = chain_graph(3, half, 2.0);
  BasisPtr basis = build_basis(chain, half);

  SUBCASE("zero couplings give the zero operator") {
    CouplingMap zero;
    for (const Edge& e : chain.edges()) zero.emplace(EdgeKey(e.a, e.b), 0.0);
    CHECK(assemble_hamiltonian(basis, zero).dense().cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("single active edge is J times the pair term") {
    CouplingMap single{{EdgeKey(1, 2), 1.7}};
    const Eigen::MatrixXd got = assemble_hamiltonian(basis, single).dense();
    const Eigen::MatrixXd want = 1.7 * heisenberg_term(basis, 1, 2).dense();
    CHECK((got - want).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("uniform three-site chain has ground energy -J in m=1/2") {
    CouplingMap uniform{{EdgeKey(1, 2), 2.0}, {EdgeKey(2, 3), 2.0}};
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        assemble_hamiltonian(basis, uniform).dense());
    CHECK(es.eigenvalues()[0] == doctest::Approx(-2.0).epsilon(1e-13));
  }
  SUBCASE("unknown edges are rejected") {
    CouplingMap bogus{{EdgeKey(1, 3), 1.0}};
    CHECK_THROWS_AS(assemble_hamiltonian(basis, bogus), UnknownEdgeError);
  }
}

TEST_CASE("assembled operators match the Kronecker oracle") {
  std::mt19937 rng(2024);
  for (int round = 0; round < 6; ++round) {
    const int n = 2 + static_cast<int>(rng() % 3u);
    std::vector<Site> sites;
    for (int i = 0; i < n; ++i)
      sites.push_back({i, HalfInt(1 + static_cast<int>(rng() % 2u))});
    std::vector<Edge> edges;
    for (int i = 1; i < n; ++i)
      edges.push_back({static_cast<int>(rng() % static_cast<unsigned>(i)), i, 1.0});
    const SpinNetwork net(sites, edges);
    const std::vector<int> twice_spins = oracle::network_twice_spins(net);
    const CouplingMap couplings = random_couplings(net, rng);

    int twice_total = 0;
    for (int t : twice_spins) twice_total += t;
    const int tm = (twice_total % 2 == 0) ? 0 : 1;
    BasisPtr basis = build_basis(net, HalfInt(tm));
    const auto idx = oracle::sector_indices(twice_spins, tm);

    const Eigen::MatrixXd h_got = assemble_hamiltonian(basis, couplings).dense();
    const Eigen::MatrixXd h_want =
        oracle::restrict_to(oracle::full_hamiltonian(net, couplings), idx);
    CHECK((h_got - h_want).cwiseAbs().maxCoeff() < 1e-12);

    const Eigen::MatrixXd s2_got = total_spin_squared(basis).dense();
    const Eigen::MatrixXd s2_want =
        oracle::restrict_to(oracle::full_s2(twice_spins), idx);
    CHECK((s2_got - s2_want).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("total spin squared spectra") {
  SUBCASE("single spin-1/2 site") {
    const SpinNetwork single({{1, half}}, {});
    BasisPtr basis = build_basis(single, half);
    CHECK(total_spin_squared(basis).dense()(0, 0) == 0.75);
  }
  SUBCASE("two spin-1/2 sites, m=0: eigenvalues 0 and 2") {
    BasisPtr basis = build_basis(two_sites(half), HalfInt(0));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(total_spin_squared(basis).dense());
    CHECK(es.eigenvalues()[0] == doctest::Approx(0.0).epsilon(1e-13));
    CHECK(es.eigenvalues()[1] == doctest::Approx(2.0).epsilon(1e-13));
  }
  SUBCASE("four spin-1/2 sites, m=0: multiplicities 2, 3, 1") {
    const SpinNetwork chain = chain_graph(4, half, 1.0);
    BasisPtr basis = build_basis(chain, HalfInt(0));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(total_spin_squared(basis).dense());
    REQUIRE(es.eigenvalues().size() == 6);
    int n0 = 0, n2 = 0, n6 = 0;
    for (Eigen::Index i = 0; i < 6; ++i) {
      if (std::abs(es.eigenvalues()[i] - 0.0) < 1e-9) ++n0;
      if (std::abs(es.eigenvalues()[i] - 2.0) < 1e-9) ++n2;
      if (std::abs(es.eigenvalues()[i] - 6.0) < 1e-9) ++n6;
    }
    CHECK(n0 == 2);
    CHECK(n2 == 3);
    CHECK(n6 == 1);
  }
}

TEST_CASE("zeeman term is b m identity") {
  const SpinNetwork chain = chain_graph(3, half, 1.0);
  CHECK(zeeman_z(build_basis(chain, half), 0.0).dense().cwiseAbs().maxCoeff() == 0.0);
  const Eigen::MatrixXd up = zeeman_z(build_basis(chain, HalfInt(3)), 2.0).dense();
  CHECK((up - 3.0 * Eigen::MatrixXd::Identity(1, 1)).cwiseAbs().maxCoeff() < 1e-15);
  const Eigen::MatrixXd down = zeeman_z(build_basis(chain, HalfInt(-1)), 1.0).dense();
  CHECK((down + 0.5 * Eigen::MatrixXd::Identity(down.rows(), down.cols()))
            .cwiseAbs()
            .maxCoeff() < 1e-15);
}

TEST_CASE("H commutes with total spin squared") {
  std::mt19937 rng(88);
  for (int round = 0; round < 5; ++round) {
    const int n = 3 + static_cast<int>(rng() % 3u);
    std::vector<Site> sites;
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) {
      sites.push_back({i, HalfInt(1 + static_cast<int>(rng() % 2u))});
      if (i > 0) edges.push_back({static_cast<int>(rng() % static_cast<unsigned>(i)), i, 1.0});
    }
    const SpinNetwork net(sites, edges);
    BasisPtr basis = build_basis(net, HalfInt(net.total_spin_max().twice() % 2));
    const CouplingMap couplings = random_couplings(net, rng);
    const auto h = assemble_hamiltonian(basis, couplings).matrix();
    const auto s2 = total_spin_squared(basis).matrix();
    Eigen::SparseMatrix<double> commutator = (h * s2 - s2 * h).pruned();
    double worst = 0.0;
    for (int col = 0; col < commutator.outerSize(); ++col)
      for (Eigen::SparseMatrix<double>::InnerIterator it(commutator, col); it; ++it)
        worst = std::max(worst, std::abs(it.value()));
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("operators are hermitian") {
  std::mt19937 rng(11);
  const SpinNetwork star = star_graph(2, 2, one, 1.0);
  BasisPtr basis = build_basis(star, HalfInt(0));
  CHECK(assemble_hamiltonian(basis, random_couplings(star, rng)).hermiticity_defect() < 1e-12);
  CHECK(total_spin_squared(basis).hermiticity_defect() < 1e-12);
}

TEST_CASE("schedule assembler reproduces direct assembly") {
  std::mt19937 rng(314);
  const SpinNetwork star = star_graph(3, 2, half, 1.0);
  BasisPtr basis = build_basis(star, half);
  HamiltonianAssembler assembler(basis);
  for (int round = 0; round < 4; ++round) {
    CouplingMap couplings = random_couplings(star, rng);
    if (round == 1) couplings[EdgeKey(0, 1)] = 0.0;
    assembler.set_couplings(couplings);
    const Eigen::MatrixXd direct = assemble_hamiltonian(basis, couplings).dense();
    const Eigen::MatrixXd cached = Eigen::MatrixXd(assembler.current_matrix());
    CHECK((direct - cached).cwiseAbs().maxCoeff() < 1e-14);

    Eigen::VectorXcd x = Eigen::VectorXcd::Random(direct.rows());
    Eigen::VectorXcd y;
    assembler.apply(x, y, 0.25);
    const Eigen::VectorXcd want = direct * x + 0.25 * x;
    CHECK((y - want).cwiseAbs().maxCoeff() < 1e-12);
  }
}
