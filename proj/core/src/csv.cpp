#include "grpsis/csv.hpp"

#include "grpsis/format.hpp"

#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace grpsis {

std::string params_comment(const ParamList& params) {
    std::string line = "# params";
    for (const auto& [key, value] : params) line += " " + key + "=" + value;
    return line;
}

void write_columns(std::ostream& out, const ParamList& params, const std::vector<std::string>& header,
                   const std::vector<std::span<const double>>& columns) {
    if (header.size() != columns.size()) throw std::invalid_argument("header and column counts differ");
    const std::size_t rows = columns.empty() ? 0 : columns.front().size();
    for (const auto& column : columns)
        if (column.size() != rows) throw std::invalid_argument("columns differ in length");

    out << params_comment(params) << '\n';
    for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
    out << '\n';
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << format_number(columns[c][r]);
        out << '\n';
    }
}

void write_trajectory_csv(std::ostream& out, const ParamList& params, const Trajectory& traj) {
    write_columns(out, params, {"t", "rho_I", "rho_S"}, {traj.grid, traj.rho_I, traj.rho_S});
}

void write_ensemble_csv(std::ostream& out, const ParamList& params, std::span<const Trajectory> runs) {
    out << params_comment(params) << '\n' << "run_id,t,rho_I,rho_S\n";
    for (std::size_t r = 0; r < runs.size(); ++r)
        for (std::size_t i = 0; i < runs[r].grid.size(); ++i)
            out << r << ',' << format_number(runs[r].grid[i]) << ',' << format_number(runs[r].rho_I[i]) << ','
                << format_number(runs[r].rho_S[i]) << '\n';
}

void write_summary_csv(std::ostream& out, const ParamList& params, const EnsembleSummary& summary) {
    write_columns(out, params, {"t", "mean", "std", "ci_low", "ci_high"},
                  {summary.grid, summary.mean, summary.std, summary.ci_low, summary.ci_high});
}

void write_ages_csv(std::ostream& out, const ParamList& params, std::span<const double> ages) {
    write_columns(out, params, {"age"}, {ages});
}

std::vector<double> read_first_column(std::istream& in) {
    std::vector<double> values;
    std::string line;
    bool header_allowed = true;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        const std::string field = line.substr(0, line.find(','));
        try {
            values.push_back(parse_number(field, "line " + std::to_string(line_no)));
            header_allowed = false;
        } catch (const std::invalid_argument&) {
            if (!header_allowed) throw;
            header_allowed = false;
        }
    }
    return values;
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& emit) {
    const std::filesystem::path target(path);
    if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
    std::ofstream out(target, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    emit(out);
    out.flush();
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

} // namespace grpsis
