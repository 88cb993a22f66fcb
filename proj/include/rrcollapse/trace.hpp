#pragma once

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rrcollapse/errors.hpp"

namespace rrc {

/// Time series of named observables. The first column is always "t".
class Trace {
  public:
    explicit Trace(std::vector<std::string> observable_names = {})
        : columns_{"t"} {
        for (auto& n : observable_names) columns_.push_back(std::move(n));
    }

    const std::vector<std::string>& columns() const { return columns_; }
    const std::vector<std::vector<double>>& rows() const { return rows_; }
    std::size_t size() const { return rows_.size(); }
    bool empty() const { return rows_.empty(); }

    void add_row(double t, const std::vector<double>& values) {
        if (values.size() + 1 != columns_.size())
            throw Error("Trace: row width does not match columns");
        if (!rows_.empty() && t < rows_.back()[0])
            throw Error("Trace: time must be monotone");
        std::vector<double> row;
        row.reserve(columns_.size());
        row.push_back(t);
        row.insert(row.end(), values.begin(), values.end());
        rows_.push_back(std::move(row));
    }

    int column_index(const std::string& name) const {
        for (std::size_t i = 0; i < columns_.size(); ++i)
            if (columns_[i] == name) return static_cast<int>(i);
        return -1;
    }

    std::vector<double> column(const std::string& name) const {
        const int idx = column_index(name);
        if (idx < 0) throw Error("Trace: unknown column '" + name + "'");
        std::vector<double> out;
        out.reserve(rows_.size());
        for (const auto& r : rows_) out.push_back(r[idx]);
        return out;
    }

    bool operator==(const Trace& o) const {
        return columns_ == o.columns_ && rows_ == o.rows_;
    }

  private:
    std::vector<std::string> columns_;
    std::vector<std::vector<double>> rows_;
};

/// Shortest decimal representation that round-trips to the same double.
inline std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

/// CSV: UTF-8, LF line endings, header row, shortest round-trip decimals.
inline void write_trace(const Trace& trace, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    for (std::size_t i = 0; i < trace.columns().size(); ++i) {
        if (i) out << ',';
        out << trace.columns()[i];
    }
    out << '\n';
    for (const auto& row : trace.rows()) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << format_double(row[i]);
        }
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

inline Trace read_trace(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty trace file: " + path);
    std::vector<std::string> cols;
    std::stringstream header(line);
    std::string field;
    while (std::getline(header, field, ',')) cols.push_back(field);
    if (cols.empty() || cols[0] != "t") throw IoError("malformed trace header: " + path);
    Trace trace(std::vector<std::string>(cols.begin() + 1, cols.end()));
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> values;
        std::stringstream row(line);
        while (std::getline(row, field, ','))
            values.push_back(std::strtod(field.c_str(), nullptr));
        if (values.size() != cols.size()) throw IoError("malformed trace row: " + path);
        trace.add_row(values[0], std::vector<double>(values.begin() + 1, values.end()));
    }
    return trace;
}

/// One two-column data file per observable plus a gnuplot script that
/// references them. Returns the list of files written.
inline std::vector<std::string> emit_plot_data(const Trace& trace,
                                               const std::vector<std::string>& observables,
                                               const std::string& prefix) {
    for (const auto& name : observables) {
        if (trace.column_index(name) < 0) {
            std::string available;
            for (std::size_t i = 1; i < trace.columns().size(); ++i) {
                if (i > 1) available += ", ";
                available += trace.columns()[i];
            }
            throw Error("emit_plot_data: unknown observable '" + name +
                        "' (available: " + available + ")");
        }
    }
    std::vector<std::string> written;
    const std::vector<double> t = trace.column("t");
    for (const auto& name : observables) {
        const std::string path = prefix + "_" + name + ".dat";
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot open for writing: " + path);
        const std::vector<double> values = trace.column(name);
        for (std::size_t i = 0; i < t.size(); ++i)
            out << format_double(t[i]) << ' ' << format_double(values[i]) << '\n';
        written.push_back(path);
    }
    const std::string script_path = prefix + ".gp";
    std::ofstream script(script_path, std::ios::binary);
    if (!script) throw IoError("cannot open for writing: " + script_path);
    script << "set xlabel 't'\n";
    script << "plot";
    for (std::size_t i = 0; i < observables.size(); ++i) {
        if (i) script << ',';
        script << " '" << prefix + "_" + observables[i] + ".dat'"
               << " using 1:2 with lines title '" << observables[i] << "'";
    }
    script << '\n';
    written.push_back(script_path);
    return written;
}

}  // namespace rrc
