#pragma once

#include <string>
#include <vector>

#include "fraclab/config.hpp"

namespace fraclab {

struct RunReport {
  std::string command;
  ojson summary = ojson::object();
  std::vector<std::string> files;  // relative to the output directory
  double wall_seconds = 0.0;
};

RunReport cmd_eig(const RunConfig& cfg);
RunReport cmd_sweep(const RunConfig& cfg);
RunReport cmd_infinity(const RunConfig& cfg);
RunReport cmd_verify1d(const RunConfig& cfg);

/// Writes report.json (deterministic) and timing.json (wall time) into the
/// output directory and appends both to report.files.
void write_report(RunReport& report, const RunConfig& cfg);

}  // namespace fraclab
