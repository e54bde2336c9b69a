#pragma once

#include "grpsis/simulator.hpp"
#include "grpsis/stats.hpp"

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace grpsis {

/// Ordered key/value record of a run's full parameterisation, written as the "# ..." line.
using ParamList = std::vector<std::pair<std::string, std::string>>;

std::string params_comment(const ParamList& params);

/// Writes "# params", a header row, then one row per index; all columns must be equally long.
void write_columns(std::ostream& out, const ParamList& params, const std::vector<std::string>& header,
                   const std::vector<std::span<const double>>& columns);

/// t, rho_I, rho_S
void write_trajectory_csv(std::ostream& out, const ParamList& params, const Trajectory& traj);

/// run_id, t, rho_I, rho_S
void write_ensemble_csv(std::ostream& out, const ParamList& params, std::span<const Trajectory> runs);

/// t, mean, std, ci_low, ci_high
void write_summary_csv(std::ostream& out, const ParamList& params, const EnsembleSummary& summary);

/// One age per line under the header "age".
void write_ages_csv(std::ostream& out, const ParamList& params, std::span<const double> ages);

/// First numeric column of a CSV, skipping '#' comments and a non-numeric header row.
std::vector<double> read_first_column(std::istream& in);

/// Writes a file via `emit`, creating parent directories; throws std::runtime_error on I/O failure.
void write_file(const std::string& path, const std::function<void(std::ostream&)>& emit);

} // namespace grpsis
