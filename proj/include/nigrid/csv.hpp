#pragma once

#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "nigrid/errors.hpp"
#include "nigrid/swing.hpp"

namespace nigrid {

namespace detail {

// shortest printf form that round-trips a double exactly
inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_trajectory_row(std::ostream& out, const Trajectory& traj,
                                 const NominalFrequency& w0, Eigen::Index k) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    out << format_double(traj.time(k));
    for (int i = 0; i < traj.n_buses(); ++i) {
        out << ',' << format_double(traj.theta_dev()(k, i));
    }
    for (int i = 0; i < traj.n_buses(); ++i) {
        out << ',' << format_double(w0.hz() + traj.theta_dev_rate()(k, i) / two_pi);
    }
    for (int i = 0; i < traj.n_buses(); ++i) {
        out << ',' << format_double(traj.p_storage_dev()(k, i));
    }
    for (int e = 0; e < traj.n_edges(); ++e) {
        out << ',' << format_double(traj.angle_diff()(k, e));
    }
    for (int e = 0; e < traj.n_edges(); ++e) {
        out << ',' << format_double(traj.line_flow()(k, e));
    }
    out << '\n';
}

}  // namespace detail

/// Writes a trajectory as RFC-4180-style CSV (LF line endings, '.' decimal
/// separator), decimated by `stride` but always including the final row.
/// Header: t, theta_dev_<i>, freq_hz_<i>, pst_dev_<i>, angle_diff_<e>,
/// flow_<e>.
inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                                 const NominalFrequency& w0, int stride = 10) {
    if (stride < 1) throw ValidationError("csv stride must be >= 1");
    const int n = traj.n_buses();
    const int l = traj.n_edges();

    out << "t";
    for (int i = 1; i <= n; ++i) out << ",theta_dev_" << i;
    for (int i = 1; i <= n; ++i) out << ",freq_hz_" << i;
    for (int i = 1; i <= n; ++i) out << ",pst_dev_" << i;
    for (int e = 1; e <= l; ++e) out << ",angle_diff_" << e;
    for (int e = 1; e <= l; ++e) out << ",flow_" << e;
    out << '\n';

    const Eigen::Index last = traj.size() - 1;
    Eigen::Index k = 0;
    for (; k <= last; k += stride) detail::write_trajectory_row(out, traj, w0, k);
    if (k - stride != last) detail::write_trajectory_row(out, traj, w0, last);
}

/// Columnar CSV content as read back from disk.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    int column(const std::string& name) const {
        for (size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return static_cast<int>(i);
        }
        throw ValidationError("csv column not found: " + name);
    }
};

inline CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("csv is empty");
    std::stringstream hs(line);
    std::string field;
    while (std::getline(hs, field, ',')) table.header.push_back(field);

    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        row.reserve(table.header.size());
        std::stringstream ls(line);
        while (std::getline(ls, field, ',')) row.push_back(std::stod(field));
        if (row.size() != table.header.size()) {
            throw ValidationError("csv row width does not match header");
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace nigrid
