#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "patchlv/almost_period.hpp"
#include "patchlv/bounds.hpp"
#include "patchlv/stability.hpp"
#include "patchlv/trajectory.hpp"

namespace patchlv {

class CsvError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Full-precision decimal rendering: %.17g round-trips every double.
inline std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Compact rendering for labels and report text.
inline std::string format_short(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

inline std::string to_trajectory_csv(const Trajectory<4>& traj) {
    std::string out = "t,x1,y1,x2,y2\n";
    for (const TrajectoryNode<4>& node : traj.nodes()) {
        out += format_full(node.t);
        for (double v : node.y) {
            out += ',';
            out += format_full(v);
        }
        out += '\n';
    }
    return out;
}

inline std::string to_scan_csv(const AlmostPeriodScan& scan) {
    std::string out = "T,defect,accepted\n";
    for (const ScanPoint& point : scan.curve) {
        out += format_full(point.shift);
        out += ',';
        out += format_full(point.defect);
        out += point.accepted ? ",1\n" : ",0\n";
    }
    return out;
}

inline std::string to_inequalities_csv(std::span<const InequalityRecord> records) {
    std::string out = "name,lhs,rhs,margin,holds\n";
    for (const InequalityRecord& rec : records) {
        out += rec.name;
        out += ',';
        out += format_full(rec.lhs);
        out += ',';
        out += format_full(rec.rhs);
        out += ',';
        out += format_full(rec.margin);
        out += rec.holds ? ",1\n" : ",0\n";
    }
    return out;
}

inline std::string to_diff_csv(const ConvergenceReport& rep) {
    std::string out = "t";
    for (const PairConvergence& pc : rep.pairs)
        out += ",d_" + std::to_string(pc.first) + "_" + std::to_string(pc.second);
    out += '\n';
    for (std::size_t k = 0; k < rep.times.size(); ++k) {
        out += format_full(rep.times[k]);
        for (const auto& curve : rep.sup_diffs) {
            out += ',';
            out += format_full(curve[k]);
        }
        out += '\n';
    }
    return out;
}

inline std::string to_decay_csv(const DecayReport& rep) {
    std::string out = "t,V\n";
    for (const auto& [t, v] : rep.samples) {
        out += format_full(t);
        out += ',';
        out += format_full(v);
        out += '\n';
    }
    return out;
}

/// Numeric CSV with a named header row; the parse target for plotting and
/// for tests that read artifacts back.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

inline CsvTable parse_csv(const std::string& text) {
    CsvTable table;
    std::istringstream stream(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        std::vector<std::string> cells;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            cells.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }

        if (line_no == 1) {
            table.columns = std::move(cells);
            continue;
        }
        if (cells.size() != table.columns.size())
            throw CsvError("csv line " + std::to_string(line_no) + ": expected " +
                           std::to_string(table.columns.size()) + " cells, got " +
                           std::to_string(cells.size()));
        std::vector<double> row(cells.size());
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const std::string& cell = cells[i];
            const auto [ptr, ec] =
                std::from_chars(cell.data(), cell.data() + cell.size(), row[i]);
            if (ec != std::errc{} || ptr != cell.data() + cell.size())
                throw CsvError("csv line " + std::to_string(line_no) + ": cell '" + cell +
                               "' is not a number");
        }
        table.rows.push_back(std::move(row));
    }
    if (table.columns.empty()) throw CsvError("csv: missing header row");
    return table;
}

inline void expect_columns(const CsvTable& table, const std::vector<std::string>& expected,
                           const std::string& what) {
    if (table.columns != expected) {
        std::string got;
        for (const auto& c : table.columns) got += (got.empty() ? "" : ",") + c;
        std::string want;
        for (const auto& c : expected) want += (want.empty() ? "" : ",") + c;
        throw CsvError(what + ": expected columns '" + want + "', got '" + got + "'");
    }
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace patchlv
