#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "spinnet/dynamics.hpp"
#include "spinnet/errors.hpp"
#include "spinnet/run_description.hpp"
#include "spinnet/version.hpp"

namespace py = pybind11;
using namespace spinnet;

namespace {

// python passes couplings / profiles keyed by (a, b) tuples
CouplingMap to_couplings(const std::map<std::pair<int, int>, double>& raw) {
  CouplingMap map;
  for (const auto& [key, value] : raw) map.emplace(EdgeKey(key.first, key.second), value);
  return map;
}

SpinNetwork make_network(const std::vector<std::pair<int, int>>& sites,
                         const std::vector<std::tuple<int, int, double>>& edges) {
  std::vector<Site> s;
  for (const auto& [id, twice_spin] : sites) s.push_back({id, HalfInt(twice_spin)});
  std::vector<Edge> e;
  for (const auto& [a, b, coupling] : edges) e.push_back({a, b, coupling});
  return SpinNetwork(std::move(s), std::move(e));
}

}  // namespace

PYBIND11_MODULE(_spinnet, m) {
  m.doc() = "Adiabatic state transfer and entanglement distribution on "
            "anti-ferromagnetic Heisenberg spin networks";
  m.attr("__version__") = kVersion;

  // translators run newest-first: register the base before the derived types
  py::register_exception<Error>(m, "SpinnetError", PyExc_RuntimeError);
  py::register_exception<DegenerateGroundError>(m, "DegenerateGroundError", PyExc_RuntimeError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
  py::register_exception<AmbiguousLabelError>(m, "AmbiguousLabelError", PyExc_RuntimeError);
  py::register_exception<InvalidInputError>(m, "InvalidInputError", PyExc_ValueError);

  py::class_<HalfInt>(m, "HalfInt")
      .def(py::init<int>(), py::arg("twice"))
      .def_property_readonly("twice", &HalfInt::twice)
      .def_property_readonly("value", &HalfInt::value)
      .def("__repr__", [](HalfInt h) { return "HalfInt(" + h.str() + ")"; })
      .def("__eq__", [](HalfInt a, HalfInt b) { return a == b; })
      .def("__hash__", [](HalfInt h) { return h.twice(); });
  py::implicitly_convertible<py::int_, HalfInt>();

  py::class_<EigenSolveOptions>(m, "EigenSolveOptions")
      .def(py::init<>())
      .def_readwrite("dense_threshold", &EigenSolveOptions::dense_threshold)
      .def_readwrite("residual_tol", &EigenSolveOptions::residual_tol)
      .def_readwrite("label_tol", &EigenSolveOptions::label_tol);

  py::class_<EvolveOptions>(m, "EvolveOptions")
      .def(py::init<>())
      .def_readwrite("steps", &EvolveOptions::steps)
      .def_readwrite("overlap_tol", &EvolveOptions::overlap_tol)
      .def_readwrite("krylov_tol", &EvolveOptions::krylov_tol)
      .def_readwrite("zeeman_b", &EvolveOptions::zeeman_b);

  py::class_<SweepOptions>(m, "SweepOptions")
      .def(py::init<>())
      .def_readwrite("threads", &SweepOptions::threads)
      .def_readwrite("gap_samples", &SweepOptions::gap_samples)
      .def_readwrite("evolve", &SweepOptions::evolve);


  py::class_<SpinNetwork>(m, "SpinNetwork")
      .def(py::init(&make_network), py::arg("sites"), py::arg("edges"),
           "sites: [(id, twice_spin)], edges: [(a, b, coupling)]")
      .def_property_readonly("site_count", &SpinNetwork::site_count)
      .def_property_readonly("sites",
                             [](const SpinNetwork& n) {
                               std::vector<std::pair<int, int>> out;
                               for (const Site& s : n.sites())
                                 out.emplace_back(s.id, s.spin.twice());
                               return out;
                             })
      .def_property_readonly("edges",
                             [](const SpinNetwork& n) {
                               std::vector<std::tuple<int, int, double>> out;
                               for (const Edge& e : n.edges())
                                 out.emplace_back(e.a, e.b, e.coupling);
                               return out;
                             })
      .def("base_couplings", [](const SpinNetwork& n) {
        std::map<std::pair<int, int>, double> out;
        for (const Edge& e : n.edges()) out[{std::min(e.a, e.b), std::max(e.a, e.b)}] = e.coupling;
        return out;
      });

  m.def("star_graph", &star_graph, py::arg("arm_count"), py::arg("arm_length"), py::arg("spin"),
        py::arg("coupling"));
  m.def("chain_graph", &chain_graph, py::arg("n"), py::arg("spin"), py::arg("coupling"));
  m.def("chain_order", &chain_order);

  m.def(
      "cg_multiplicity",
      [](const std::vector<int>& twice_spins, int twice_s) {
        std::vector<HalfInt> spins;
        for (int t : twice_spins) spins.emplace_back(t);
        return cg_multiplicity(spins, HalfInt(twice_s));
      },
      py::arg("twice_spins"), py::arg("twice_s"));

  py::class_<Bipartition>(m, "Bipartition")
      .def_readonly("part_one", &Bipartition::part_one)
      .def_readonly("part_two", &Bipartition::part_two);
  m.def("bipartition", &bipartition);

  py::class_<ComponentDecomposition>(m, "ComponentDecomposition")
      .def_readonly("components", &ComponentDecomposition::components)
      .def_property_readonly("twice_imbalances", [](const ComponentDecomposition& d) {
        std::vector<int> out;
        for (HalfInt g : d.imbalances) out.push_back(g.twice());
        return out;
      });
  m.def(
      "connected_components",
      [](const SpinNetwork& network, const std::map<std::pair<int, int>, double>& active) {
        return connected_components(network, to_couplings(active));
      },
      py::arg("network"), py::arg("active_couplings"));
  m.def(
      "spin_imbalance",
      [](const SpinNetwork& network, const std::vector<int>& subset) {
        return spin_imbalance(network, bipartition(network),
                              std::span<const int>(subset.data(), subset.size()))
            .twice();
      },
      py::arg("network"), py::arg("subset"), "signed 2g of the subset, canonical coloring");

  py::class_<CompatibilityResult>(m, "CompatibilityResult")
      .def_readonly("compatible", &CompatibilityResult::compatible)
      .def_readonly("multiplicity", &CompatibilityResult::multiplicity)
      .def_readonly("decomposition", &CompatibilityResult::decomposition);
  m.def(
      "is_spin_s_compatible",
      [](const SpinNetwork& network, const std::map<std::pair<int, int>, double>& active,
         HalfInt s) { return is_spin_s_compatible(network, to_couplings(active), s); },
      py::arg("network"), py::arg("active_couplings"), py::arg("s"));

  py::class_<SectorBasis, std::shared_ptr<SectorBasis>>(m, "SectorBasis")
      .def_property_readonly("dimension", &SectorBasis::dimension)
      .def_property_readonly("twice_m", [](const SectorBasis& b) { return b.m().twice(); })
      .def("state_twice_ms", [](const SectorBasis& b, std::size_t state) {
        std::vector<int> out;
        for (int j = 0; j < b.site_count(); ++j) out.push_back(b.local_m(state, j).twice());
        return out;
      });
  m.def(
      "build_basis",
      [](const SpinNetwork& network, HalfInt m_) {
        return std::const_pointer_cast<SectorBasis>(build_basis(network, m_));
      },
      py::arg("network"), py::arg("m"));

  py::class_<SparseOperator>(m, "SparseOperator")
      .def_property_readonly("dimension", &SparseOperator::dimension)
      .def("to_dense", &SparseOperator::dense)
      .def("apply",
           [](const SparseOperator& op, const Eigen::VectorXcd& x) { return op.apply(x); })
      .def_property_readonly("hermiticity_defect", &SparseOperator::hermiticity_defect);
  m.def(
      "heisenberg_term",
      [](const std::shared_ptr<SectorBasis>& basis, int j, int k) {
        return heisenberg_term(basis, j, k);
      },
      py::arg("basis"), py::arg("site_j"), py::arg("site_k"));
  m.def(
      "assemble_hamiltonian",
      [](const std::shared_ptr<SectorBasis>& basis,
         const std::map<std::pair<int, int>, double>& couplings) {
        return assemble_hamiltonian(basis, to_couplings(couplings));
      },
      py::arg("basis"), py::arg("couplings"));
  m.def(
      "total_spin_squared",
      [](const std::shared_ptr<SectorBasis>& basis) { return total_spin_squared(basis); },
      py::arg("basis"));
  m.def(
      "zeeman_z",
      [](const std::shared_ptr<SectorBasis>& basis, double b) { return zeeman_z(basis, b); },
      py::arg("basis"), py::arg("b"));

  py::class_<LabeledSpectrum>(m, "LabeledSpectrum")
      .def_property_readonly("energies",
                             [](const LabeledSpectrum& s) {
                               std::vector<double> out;
                               for (const auto& p : s.pairs) out.push_back(p.energy);
                               return out;
                             })
      .def_property_readonly("twice_labels",
                             [](const LabeledSpectrum& s) {
                               std::vector<int> out;
                               for (const auto& p : s.pairs) out.push_back(p.s.twice());
                               return out;
                             })
      .def_property_readonly("label_residuals",
                             [](const LabeledSpectrum& s) {
                               std::vector<double> out;
                               for (const auto& p : s.pairs) out.push_back(p.label_residual);
                               return out;
                             })
      .def_readonly("complete", &LabeledSpectrum::complete)
      .def("vector", [](const LabeledSpectrum& s, std::size_t i) { return s.pairs.at(i).vector; });
  m.def("lowest_eigenpairs", &lowest_eigenpairs, py::arg("op"), py::arg("k"),
        py::arg("options") = EigenSolveOptions{});
  m.def("label_by_total_spin", &label_by_total_spin, py::arg("spectrum"), py::arg("s2op"),
        py::arg("options") = EigenSolveOptions{});

  py::class_<SectorGapResult>(m, "SectorGapResult")
      .def_readonly("ground_energy", &SectorGapResult::ground_energy)
      .def_readonly("gap", &SectorGapResult::gap)
      .def_readonly("sector_exhausted", &SectorGapResult::sector_exhausted);
  m.def(
      "sector_gap",
      [](const SpinNetwork& network, const std::map<std::pair<int, int>, double>& couplings,
         HalfInt s, HalfInt m_) { return sector_gap(network, to_couplings(couplings), s, m_); },
      py::arg("network"), py::arg("couplings"), py::arg("s"), py::arg("m"));

  py::class_<LiebMattisReport>(m, "LiebMattisReport")
      .def_readonly("ok", &LiebMattisReport::pass)
      .def_property_readonly("twice_imbalance",
                             [](const LiebMattisReport& r) { return r.imbalance.twice(); })
      .def_property_readonly("twice_ground_label",
                             [](const LiebMattisReport& r) { return r.ground_label.twice(); })
      .def_readonly("ground_energy", &LiebMattisReport::ground_energy)
      .def_readonly("failures", &LiebMattisReport::failures);
  m.def(
      "lieb_mattis_check",
      [](const SpinNetwork& network, const std::map<std::pair<int, int>, double>& couplings) {
        return lieb_mattis_check(network, to_couplings(couplings));
      },
      py::arg("network"), py::arg("couplings"));

  py::class_<Profile>(m, "Profile")
      .def_static("constant", &Profile::constant)
      .def_static("ramp_on", &Profile::ramp_on)
      .def_static("ramp_off", &Profile::ramp_off)
      .def_static("piecewise", &Profile::piecewise)
      .def("value", &Profile::value, py::arg("t"), py::arg("total_time"));

  py::class_<Schedule>(m, "Schedule")
      .def(py::init([](const SpinNetwork& network, double total_time,
                       const std::map<std::pair<int, int>, Profile>& profiles,
                       const std::vector<double>& checkpoints) {
             std::map<EdgeKey, Profile> map;
             for (const auto& [key, profile] : profiles)
               map.emplace(EdgeKey(key.first, key.second), profile);
             return Schedule(network, total_time, std::move(map), checkpoints);
           }),
           py::arg("network"), py::arg("total_time"), py::arg("profiles"),
           py::arg("checkpoints") = std::vector<double>{})
      .def_property_readonly("total_time", &Schedule::total_time)
      .def_property_readonly("checkpoints", &Schedule::checkpoints)
      .def_property_readonly("network", &Schedule::network)
      .def("couplings_at", [](const Schedule& s, double t) {
        std::map<std::pair<int, int>, double> out;
        for (const auto& [key, value] : s.couplings_at(t)) out[{key.a, key.b}] = value;
        return out;
      });

  m.def("transfer_schedule", &transfer_schedule, py::arg("network"), py::arg("sender"),
        py::arg("receiver"), py::arg("total_time"), py::arg("ramp_amplitude"));
  m.def("entanglement_schedule", &entanglement_schedule, py::arg("network"), py::arg("p1"),
        py::arg("p2"), py::arg("total_time"));
  m.def("initialization_schedule", &initialization_schedule, py::arg("network"),
        py::arg("total_time"));

  py::class_<ProtocolSpec> protocol_spec(m, "ProtocolSpec");
  py::enum_<ProtocolSpec::Kind>(protocol_spec, "Kind")
      .value("Transfer", ProtocolSpec::Kind::Transfer)
      .value("Entanglement", ProtocolSpec::Kind::Entanglement)
      .value("Initialization", ProtocolSpec::Kind::Initialization);
  protocol_spec.def(py::init<>())
      .def_readwrite("kind", &ProtocolSpec::kind)
      .def_readwrite("parties", &ProtocolSpec::parties)
      .def_readwrite("sender", &ProtocolSpec::sender)
      .def_readwrite("receiver", &ProtocolSpec::receiver)
      .def_readwrite("s", &ProtocolSpec::s);

  py::class_<CheckpointReport>(m, "CheckpointReport")
      .def_readonly("time", &CheckpointReport::time)
      .def_readonly("compatible", &CheckpointReport::compatible)
      .def_readonly("multiplicity", &CheckpointReport::multiplicity)
      .def_readonly("endpoint_ok", &CheckpointReport::endpoint_ok)
      .def_readonly("violations", &CheckpointReport::violations)
      .def_readonly("decomposition", &CheckpointReport::decomposition);
  py::class_<ProtocolReport>(m, "ProtocolReport")
      .def_property_readonly("ok", [](const ProtocolReport& r) { return r.pass; })
      .def_readonly("checkpoints", &ProtocolReport::checkpoints)
      .def_readonly("diagnostics", &ProtocolReport::diagnostics);
  m.def("verify", &verify, py::arg("spec"), py::arg("schedule"));

  py::class_<GapTrace>(m, "GapTrace")
      .def_readonly("times", &GapTrace::times)
      .def_readonly("levels", &GapTrace::levels)
      .def_readonly("gap_in_sector", &GapTrace::gap_in_sector)
      .def("min_gap", &GapTrace::min_gap);
  m.def("levels_over_schedule", &levels_over_schedule, py::arg("schedule"), py::arg("s"),
        py::arg("m"), py::arg("k"), py::arg("n_samples"),
        py::arg("options") = EigenSolveOptions{});

  py::class_<StateVector>(m, "StateVector")
      .def_property_readonly("amplitudes",
                             [](const StateVector& s) { return s.amplitudes; })
      .def_property_readonly(
          "basis",
          [](const StateVector& s) { return std::const_pointer_cast<SectorBasis>(s.basis); })
      .def_property_readonly("norm", &StateVector::norm);

  py::class_<EvolveResult>(m, "EvolveResult")
      .def_readonly("state", &EvolveResult::state)
      .def_readonly("steps", &EvolveResult::steps)
      .def_readonly("converged", &EvolveResult::converged)
      .def_readonly("overlap_delta", &EvolveResult::overlap_delta);

  m.def(
      "ground_state_vector",
      [](const SpinNetwork& network, const std::map<std::pair<int, int>, double>& couplings,
         HalfInt s, HalfInt m_) {
        return ground_state_vector(network, to_couplings(couplings), s, m_);
      },
      py::arg("network"), py::arg("couplings"), py::arg("s"), py::arg("m"));
  m.def("initial_transfer_state", &initial_transfer_state, py::arg("schedule"),
        py::arg("sender"), py::arg("m_choice"), py::arg("options") = EigenSolveOptions{});
  m.def("singlet_product_state", &singlet_product_state, py::arg("network"), py::arg("pairs"));
  m.def("evolve", &evolve, py::arg("schedule"), py::arg("psi0"),
        py::arg("options") = EvolveOptions{});
  m.def("reduced_density", &reduced_density, py::arg("psi"), py::arg("keep"));
  m.def("transfer_error", &transfer_error, py::arg("psi_final"), py::arg("receiver_site"),
        py::arg("encoded_local_state"));
  m.def("singlet_error", &singlet_error, py::arg("psi_final"), py::arg("site_a"),
        py::arg("site_b"));

  py::class_<TransferRun>(m, "TransferRun")
      .def_readonly("final_state", &TransferRun::final_state)
      .def_readonly("error", &TransferRun::error)
      .def_readonly("steps", &TransferRun::steps)
      .def_readonly("converged", &TransferRun::converged);
  m.def("run_transfer", &run_transfer, py::arg("schedule"), py::arg("sender"),
        py::arg("receiver_site"), py::arg("m_choice"), py::arg("options") = EvolveOptions{},
        py::arg("solve") = EigenSolveOptions{});
  m.def("transfer_error_superposed", &transfer_error_superposed, py::arg("schedule"),
        py::arg("sender"), py::arg("receiver_site"), py::arg("local_state"),
        py::arg("options") = EvolveOptions{}, py::arg("solve") = EigenSolveOptions{});

  py::class_<SweepRow>(m, "SweepRow")
      .def_readonly("arm_count", &SweepRow::arm_count)
      .def_readonly("arm_length", &SweepRow::arm_length)
      .def_readonly("total_time", &SweepRow::total_time)
      .def_readonly("error", &SweepRow::error)
      .def_readonly("min_gap", &SweepRow::min_gap)
      .def_readonly("steps", &SweepRow::steps)
      .def_readonly("status", &SweepRow::status);
  m.def("sweep_star_transfer", &sweep_star_transfer, py::arg("arm_counts"),
        py::arg("arm_length"), py::arg("times"), py::arg("coupling"),
        py::arg("options") = SweepOptions{});
  m.def("default_time_grid", &default_time_grid);

  py::class_<PhaseCheckReport>(m, "PhaseCheckReport")
      .def_readonly("measured", &PhaseCheckReport::measured)
      .def_readonly("expected", &PhaseCheckReport::expected)
      .def_readonly("deviation", &PhaseCheckReport::deviation)
      .def_property_readonly("ok", [](const PhaseCheckReport& r) { return r.pass; });
  m.def("zeeman_phase_check", &zeeman_phase_check, py::arg("schedule"), py::arg("field_b"),
        py::arg("component_1"), py::arg("component_2"), py::arg("options") = EvolveOptions{});

  m.def("overlap", &overlap);
  m.def("expectation_s2", &expectation_s2);
}
