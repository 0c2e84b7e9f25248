#pragma once

#include <string>

#include "dmim/matrix.hpp"
#include "dmim/mechanism.hpp"
#include "dmim/sim.hpp"

namespace dmim {

/// Reads a comma-separated reports file with header `agent,task,answer`,
/// one-based agent and task ids, answers in 1..C. Every (agent, task) cell
/// must appear exactly once; diagnostics carry the offending line number.
ReportMatrix parse_reports_csv(const std::string& path, int choices);

/// Reads a simulation config document (JSON). Keys: world, strategies, T,
/// split ("half" or a one-based list of first-block task ids), trials,
/// seed, alpha_thresholds (optional), threads (optional). Probabilities
/// may be numbers or exact "num/den" strings.
TrialConfig parse_sim_config(const std::string& path);

/// Reads a square matrix from a JSON file holding an array of row arrays.
RealMat parse_matrix_file(const std::string& path);

/// Number formatting for output documents: 12 significant digits.
std::string fmt_g12(double v);

std::string json_escape(const std::string& s);

/// Writes text to the file at `path`, or to stdout when path is empty.
/// The file is only created once the full document exists, so failed runs
/// leave nothing behind.
void write_output(const std::string& text, const std::string& path);

} // namespace dmim
