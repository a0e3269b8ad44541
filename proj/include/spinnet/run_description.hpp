#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "spinnet/dynamics.hpp"

namespace spinnet {

struct TaskParams {
  int k = 10;
  int n_samples = 101;
  int steps = 0;  // 0 = adaptive
  double b = 0.0;
  std::optional<int> twice_m;  // sector override for spectrum
  std::vector<int> arm_counts = {1, 2, 3, 4, 5, 6};
  int arm_length = 2;
  // absent = default log grid; an explicitly empty grid yields no rows
  std::optional<std::vector<double>> t_grid;
  double coupling = 1.0;
};

// One parsed run file: network, schedule, protocol and task sections.
// Commands validate that the sections they need are present.
struct RunDescription {
  std::optional<SpinNetwork> network;
  std::optional<Schedule> schedule;
  std::optional<ProtocolSpec> protocol;
  TaskParams task;
};

RunDescription parse_run_description_text(const std::string& text);
RunDescription parse_run_description(const std::string& path);

std::string format_number(double v);
std::uint64_t fnv1a64(const std::string& bytes);

struct CliOptions {
  std::string output;  // empty = stdout only
  int threads = 1;
  int steps = -1;    // -1 = take from the file's task section
  int samples = -1;
  int k = -1;
};

// Exit codes: 0 success/pass, 1 verdict fail or computation failure,
// 2 malformed input.
int cmd_check(const std::string& file, const CliOptions& options, std::ostream& out);
int cmd_spectrum(const std::string& file, const CliOptions& options, std::ostream& out);
int cmd_evolve(const std::string& file, const CliOptions& options, std::ostream& out);
int cmd_sweep(const std::string& file, const CliOptions& options, std::ostream& out);
int cmd_cg(const std::vector<int>& twice_spins, int twice_s, std::ostream& out);

}  // namespace spinnet
