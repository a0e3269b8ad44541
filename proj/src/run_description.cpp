#include "spinnet/run_description.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "spinnet/errors.hpp"
#include "spinnet/version.hpp"

namespace spinnet {

namespace {

using nlohmann::json;

double finite(double v, const char* what) {
  if (!std::isfinite(v)) throw InvalidInputError(std::string(what) + " must be finite");
  return v;
}

SpinNetwork parse_network(const json& j) {
  std::vector<Site> sites;
  for (const json& s : j.at("sites"))
    sites.push_back({s.at("id").get<int>(), HalfInt(s.at("twice_spin").get<int>())});
  std::vector<Edge> edges;
  for (const json& e : j.at("edges"))
    edges.push_back({e.at("a").get<int>(), e.at("b").get<int>(),
                     finite(e.at("coupling").get<double>(), "edge coupling")});
  return SpinNetwork(std::move(sites), std::move(edges));
}

Profile parse_profile(const json& j, const SpinNetwork& network, int a, int b) {
  const std::string kind = j.at("profile").get<std::string>();
  const double amplitude =
      finite(j.value("amplitude", network.base_coupling(a, b)), "profile amplitude");
  if (kind == "constant") return Profile::constant(amplitude);
  if (kind == "ramp_on") return Profile::ramp_on(amplitude);
  if (kind == "ramp_off") return Profile::ramp_off(amplitude);
  if (kind == "piecewise") {
    std::vector<std::pair<double, double>> points;
    for (const json& p : j.at("points"))
      points.emplace_back(finite(p.at(0).get<double>(), "breakpoint time"),
                          finite(p.at(1).get<double>(), "breakpoint value"));
    return Profile::piecewise(std::move(points));
  }
  throw InvalidInputError("unknown profile kind '" + kind + "'");
}

Schedule parse_schedule(const json& j, const SpinNetwork& network) {
  const double total_time = finite(j.at("T").get<double>(), "T");
  std::map<EdgeKey, Profile> profiles;
  for (const json& p : j.value("profiles", json::array())) {
    const int a = p.at("a").get<int>();
    const int b = p.at("b").get<int>();
    if (!profiles.emplace(EdgeKey(a, b), parse_profile(p, network, a, b)).second)
      throw InvalidInputError("two profiles for edge (" + std::to_string(a) + "," +
                              std::to_string(b) + ")");
  }
  std::vector<double> checkpoints;
  for (const json& c : j.value("checkpoints", json::array()))
    checkpoints.push_back(finite(c.get<double>(), "checkpoint"));
  return Schedule(network, total_time, std::move(profiles), std::move(checkpoints));
}

ProtocolSpec parse_protocol(const json& j) {
  ProtocolSpec spec;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "transfer")
    spec.kind = ProtocolSpec::Kind::Transfer;
  else if (kind == "entanglement")
    spec.kind = ProtocolSpec::Kind::Entanglement;
  else if (kind == "initialization")
    spec.kind = ProtocolSpec::Kind::Initialization;
  else
    throw InvalidInputError("unknown protocol kind '" + kind + "'");

  const json parties = j.value("parties", json::object());
  for (const auto& [name, ids] : parties.items())
    spec.parties.emplace(name, ids.get<std::vector<int>>());
  spec.sender = j.value("sender", "");
  spec.receiver = j.value("receiver", "");
  spec.s = HalfInt(j.value("twice_s", 0));
  if (spec.kind != ProtocolSpec::Kind::Initialization) {
    if (spec.sender.empty() || spec.receiver.empty())
      throw InvalidInputError("protocol needs sender and receiver party names");
  }
  return spec;
}

TaskParams parse_task(const json& j) {
  TaskParams task;
  task.k = j.value("k", task.k);
  task.n_samples = j.value("n_samples", task.n_samples);
  task.steps = j.value("steps", task.steps);
  task.b = finite(j.value("b", task.b), "field b");
  if (j.contains("twice_m")) task.twice_m = j.at("twice_m").get<int>();
  if (j.contains("arm_counts")) task.arm_counts = j.at("arm_counts").get<std::vector<int>>();
  task.arm_length = j.value("arm_length", task.arm_length);
  if (j.contains("t_grid")) {
    task.t_grid = j.at("t_grid").get<std::vector<double>>();
    for (double t : *task.t_grid) finite(t, "t_grid entry");
  }
  task.coupling = finite(j.value("coupling", task.coupling), "coupling");
  return task;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInputError("cannot read '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string digest_hex(const std::string& bytes) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

void csv_preamble(std::ostream& os, const std::string& input_path, const std::string& digest) {
  os << "# spinnet " << kVersion << " input=" << input_path << " digest=fnv1a:" << digest
     << "\n";
}

// Runs `body` and maps failures onto the exit-code contract.
int guarded(std::ostream& out, const std::function<int()>& body) {
  try {
    return body();
  } catch (const InvalidInputError& e) {
    out << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    out << "error: " << e.what() << "\n";
    return 1;
  }
}

json report_to_json(const ProtocolReport& report) {
  json j;
  j["verdict"] = report.pass ? "pass" : "fail";
  j["checkpoints"] = json::array();
  for (const CheckpointReport& cp : report.checkpoints) {
    json c;
    c["time"] = cp.time;
    c["components"] = cp.decomposition.components;
    json imbalances = json::array();
    for (HalfInt g : cp.decomposition.imbalances) imbalances.push_back(g.twice());
    c["twice_imbalances"] = imbalances;
    c["multiplicity"] = cp.multiplicity;
    c["compatible"] = cp.compatible;
    c["endpoint_ok"] = cp.endpoint_ok;
    c["violations"] = cp.violations;
    j["checkpoints"].push_back(c);
  }
  j["diagnostics"] = report.diagnostics;
  return j;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw InvalidInputError("cannot open output file '" + path + "'");
  return file;
}

}  // namespace

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

RunDescription parse_run_description_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidInputError(std::string("not valid JSON: ") + e.what());
  }
  try {
    RunDescription rd;
    if (j.contains("network")) rd.network = parse_network(j.at("network"));
    if (j.contains("schedule")) {
      if (!rd.network)
        throw InvalidInputError("a schedule section requires a network section");
      rd.schedule = parse_schedule(j.at("schedule"), *rd.network);
    }
    if (j.contains("protocol")) rd.protocol = parse_protocol(j.at("protocol"));
    if (j.contains("task")) rd.task = parse_task(j.at("task"));
    return rd;
  } catch (const json::exception& e) {
    throw InvalidInputError(std::string("malformed run description: ") + e.what());
  }
}

RunDescription parse_run_description(const std::string& path) {
  return parse_run_description_text(read_file(path));
}

namespace {

struct LoadedRun {
  RunDescription rd;
  std::string digest;
};

LoadedRun load(const std::string& file) {
  const std::string text = read_file(file);
  return {parse_run_description_text(text), digest_hex(text)};
}

const SpinNetwork& need_network(const RunDescription& rd) {
  if (!rd.network) throw InvalidInputError("run description has no network section");
  return *rd.network;
}
const Schedule& need_schedule(const RunDescription& rd) {
  if (!rd.schedule) throw InvalidInputError("run description has no schedule section");
  return *rd.schedule;
}
const ProtocolSpec& need_protocol(const RunDescription& rd) {
  if (!rd.protocol) throw InvalidInputError("run description has no protocol section");
  return *rd.protocol;
}

int single_site(const std::vector<int>& party, const char* what) {
  if (party.size() != 1)
    throw InvalidInputError(std::string(what) +
                            " must be a single site for this simulation metric");
  return party.front();
}

std::string component_text(const ComponentDecomposition& d) {
  std::ostringstream os;
  for (std::size_t c = 0; c < d.components.size(); ++c) {
    os << "{";
    for (std::size_t i = 0; i < d.components[c].size(); ++i)
      os << (i ? "," : "") << d.components[c][i];
    os << "}g=" << d.imbalances[c].str();
    if (c + 1 < d.components.size()) os << " ";
  }
  return os.str();
}

}  // namespace

int cmd_check(const std::string& file, const CliOptions& options, std::ostream& out) {
  return guarded(out, [&]() -> int {
    const LoadedRun run = load(file);
    const Schedule& schedule = need_schedule(run.rd);
    const ProtocolSpec& spec = need_protocol(run.rd);

    const ProtocolReport report = verify(spec, schedule);

    out << "verdict: " << (report.pass ? "PASS" : "FAIL") << "\n";
    for (const CheckpointReport& cp : report.checkpoints) {
      out << "  t/T=" << format_number(cp.time / schedule.total_time())
          << "  components " << component_text(cp.decomposition) << "  N=" << cp.multiplicity
          << (cp.compatible ? "  compatible" : "  NOT COMPATIBLE")
          << (cp.endpoint_ok ? "" : "  endpoint violated") << "\n";
      for (const std::string& v : cp.violations) out << "    ! " << v << "\n";
    }
    if (!options.output.empty()) {
      std::ofstream f = open_output(options.output);
      f << report_to_json(report).dump(2) << "\n";
    }
    return report.pass ? 0 : 1;
  });
}

int cmd_spectrum(const std::string& file, const CliOptions& options, std::ostream& out) {
  return guarded(out, [&]() -> int {
    const LoadedRun run = load(file);
    const Schedule& schedule = need_schedule(run.rd);
    const ProtocolSpec& spec = need_protocol(run.rd);

    const HalfInt s = spec.s;
    const HalfInt m = run.rd.task.twice_m ? HalfInt(*run.rd.task.twice_m) : s;
    const int k = options.k > 0 ? options.k : run.rd.task.k;
    const int samples = options.samples > 0 ? options.samples : run.rd.task.n_samples;

    const GapTrace trace = levels_over_schedule(schedule, s, m, k, samples);

    auto write = [&](std::ostream& os) {
      csv_preamble(os, file, run.digest);
      os << "time";
      for (int c = 0; c < trace.levels.cols(); ++c) os << ",E_" << c;
      os << ",gap\n";
      for (std::size_t i = 0; i < trace.times.size(); ++i) {
        os << format_number(trace.times[i]);
        for (int c = 0; c < trace.levels.cols(); ++c)
          os << "," << format_number(trace.levels(static_cast<Eigen::Index>(i), c));
        os << "," << format_number(trace.gap_in_sector[i]) << "\n";
      }
    };
    if (!options.output.empty()) {
      std::ofstream f = open_output(options.output);
      write(f);
      out << "spectrum: " << trace.times.size() << " samples, min gap "
          << format_number(trace.min_gap()) << " -> " << options.output << "\n";
    } else {
      write(out);
    }
    return 0;
  });
}

int cmd_evolve(const std::string& file, const CliOptions& options, std::ostream& out) {
  return guarded(out, [&]() -> int {
    const LoadedRun run = load(file);
    const SpinNetwork& network = need_network(run.rd);
    const Schedule& schedule = need_schedule(run.rd);
    const ProtocolSpec& spec = need_protocol(run.rd);

    EvolveOptions evolve_options;
    evolve_options.steps = options.steps >= 0 ? options.steps : run.rd.task.steps;
    evolve_options.zeeman_b = run.rd.task.b;

    StateVector state;
    std::function<double(const StateVector&)> error_metric;

    switch (spec.kind) {
      case ProtocolSpec::Kind::Transfer: {
        const std::vector<int>& sender = spec.party(spec.sender);
        const int receiver = single_site(spec.party(spec.receiver), "receiver");
        state = initial_transfer_state(schedule, sender, spec.s);
        const int ts = network.spin_of(receiver).twice();
        Eigen::VectorXcd local = Eigen::VectorXcd::Zero(ts + 1);
        local[(spec.s.twice() + ts) / 2] = 1.0;
        error_metric = [receiver, local](const StateVector& psi) {
          return transfer_error(psi, receiver, local);
        };
        break;
      }
      case ProtocolSpec::Kind::Entanglement: {
        const int p1 = single_site(spec.party(spec.sender), "p1");
        const int p2 = single_site(spec.party(spec.receiver), "p2");
        state = ground_state_vector(network, schedule.couplings_at(0.0), HalfInt(0), HalfInt(0));
        error_metric = [p1, p2](const StateVector& psi) { return singlet_error(psi, p1, p2); };
        break;
      }
      case ProtocolSpec::Kind::Initialization: {
        const std::vector<int> path = chain_order(network);
        if (path.size() % 2 != 0)
          throw OddLengthChainError("initialization chain must have even length");
        std::vector<std::pair<int, int>> pairs;
        for (std::size_t i = 0; i + 1 < path.size(); i += 2)
          pairs.emplace_back(path[i], path[i + 1]);
        state = singlet_product_state(network, pairs);
        const HalfInt s_target =
            spin_imbalance(network, bipartition(network),
                           std::span<const int>(path.data(), path.size()))
                .abs();
        const StateVector target = ground_state_vector(
            network, schedule.couplings_at(schedule.total_time()), s_target, HalfInt(0));
        error_metric = [target](const StateVector& psi) {
          const double f = std::norm(overlap(target, psi));
          return std::max(0.0, 1.0 - f);
        };
        break;
      }
    }

    struct Row {
      double time, norm, s2, error;
      int steps;
    };
    std::vector<Row> rows;
    rows.push_back({0.0, state.norm(), expectation_s2(state), error_metric(state), 0});

    const auto& checkpoints = schedule.checkpoints();
    int total_steps = 0;
    bool converged = true;
    for (std::size_t i = 1; i < checkpoints.size(); ++i) {
      EvolveOptions window_options = evolve_options;
      if (evolve_options.steps > 0) {
        const double fraction =
            (checkpoints[i] - checkpoints[i - 1]) / schedule.total_time();
        window_options.steps = std::max(
            1, static_cast<int>(std::lround(evolve_options.steps * fraction)));
      }
      EvolveResult result =
          evolve_window(schedule, state, checkpoints[i - 1], checkpoints[i], window_options);
      state = std::move(result.state);
      total_steps += result.steps;
      converged = converged && result.converged;
      rows.push_back({checkpoints[i] / schedule.total_time(), state.norm(),
                      expectation_s2(state), error_metric(state), result.steps});
    }

    auto write = [&](std::ostream& os) {
      csv_preamble(os, file, run.digest);
      os << "time,norm,s2,error\n";
      for (const Row& r : rows)
        os << format_number(r.time) << "," << format_number(r.norm) << ","
           << format_number(r.s2) << "," << format_number(r.error) << "\n";
    };
    out << "final error = " << format_number(rows.back().error) << ", steps = " << total_steps
        << ", converged = " << (converged ? "yes" : "no") << "\n";
    if (!options.output.empty()) {
      std::ofstream f = open_output(options.output);
      write(f);
    } else {
      write(out);
    }
    return 0;
  });
}

int cmd_sweep(const std::string& file, const CliOptions& options, std::ostream& out) {
  return guarded(out, [&]() -> int {
    const LoadedRun run = load(file);
    const TaskParams& task = run.rd.task;

    SweepOptions sweep_options;
    sweep_options.threads = options.threads;
    sweep_options.evolve.steps = options.steps >= 0 ? options.steps : task.steps;

    const std::vector<double> times = task.t_grid ? *task.t_grid : default_time_grid();
    const std::vector<SweepRow> rows =
        sweep_star_transfer(task.arm_counts, task.arm_length, times, task.coupling,
                            sweep_options);

    auto write = [&](std::ostream& os) {
      csv_preamble(os, file, run.digest);
      os << "M,K,T,error,min_gap,steps,status\n";
      for (const SweepRow& r : rows)
        os << r.arm_count << "," << r.arm_length << "," << format_number(r.total_time) << ","
           << format_number(r.error) << "," << format_number(r.min_gap) << "," << r.steps << ","
           << r.status << "\n";
    };
    int warnings = 0;
    for (const SweepRow& r : rows)
      if (r.status != "ok") ++warnings;
    out << "sweep: " << rows.size() << " rows, " << warnings << " warnings\n";
    if (!options.output.empty()) {
      std::ofstream f = open_output(options.output);
      write(f);
    } else {
      write(out);
    }
    return 0;
  });
}

int cmd_cg(const std::vector<int>& twice_spins, int twice_s, std::ostream& out) {
  return guarded(out, [&]() -> int {
    std::vector<HalfInt> spins;
    for (int t : twice_spins) {
      if (t < 0) throw InvalidInputError("twice-spin values must be >= 0");
      spins.emplace_back(t);
    }
    if (twice_s < 0) throw InvalidInputError("twice-s must be >= 0");
    out << cg_multiplicity(spins, HalfInt(twice_s)) << "\n";
    return 0;
  });
}

}  // namespace spinnet
