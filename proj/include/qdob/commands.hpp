#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qdob/config_io.hpp"
#include "qdob/freq_analysis.hpp"

namespace qdob {

// The CLI subcommands, callable directly for testing. File-writing commands
// return the paths they wrote; `log` receives human-readable progress and
// summaries (silenced by quiet except for errors, which are thrown).
// Filesystem problems surface as io_error, bad configs as config_error.

// Writes frequency-response CSVs (delay path, comb filter, open loop,
// sensitivity, complementary) over the default analysis grid.
std::vector<std::string> cmd_bode(const ExperimentConfig& config,
                                  const std::string& out_dir,
                                  std::ostream& log, bool quiet = false);

// Runs the empirical disturbance-to-output sweep against the configured
// closed loop and writes measured-vs-analytic CSV with a deviation column.
std::vector<std::string> cmd_sweep(const ExperimentConfig& config,
                                   const std::string& out_dir,
                                   std::ostream& log, bool quiet = false);

// Runs the closed-loop simulation; writes the trace CSV and a summary JSON
// (RMS before/after settling, per-harmonic attenuation, lifted-spectrum
// fraction above the configured band limit).
std::vector<std::string> cmd_simulate(const ExperimentConfig& config,
                                      const std::string& out_dir,
                                      std::ostream& log, bool quiet = false);

// Nominal + robust stability checks on the default grid; writes a JSON
// report and returns it.
StabilityReport cmd_stability(const ExperimentConfig& config,
                              const std::string& out_dir,
                              std::ostream& log, bool quiet = false);

// Validates the config and prints tuning advice; returns the warning list
// (empty means clean). Hard violations throw config_error.
std::vector<std::string> cmd_tune_check(const ExperimentConfig& config,
                                        std::ostream& log, bool quiet = false);

}  // namespace qdob
