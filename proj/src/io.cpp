#include "dynlab/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace dynlab {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text_file(const std::filesystem::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + file.string());
    out << text;
}

void write_trajectory_csv(const std::filesystem::path& file,
                          std::span<const double> grid,
                          std::span<const double> states, int dim) {
    std::ostringstream os;
    os << "t";
    for (int k = 1; k <= dim; ++k) os << ",y_" << k;
    for (int k = 1; k <= dim; ++k) os << ",c_" << k;
    os << "\n";
    const std::size_t d = static_cast<std::size_t>(dim);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        os << format_double(grid[i]);
        const double* row = states.data() + i * 2 * d;
        for (std::size_t k = 0; k < 2 * d; ++k) os << "," << format_double(row[k]);
        os << "\n";
    }
    write_text_file(file, os.str());
}

void write_metrics_csv(const std::filesystem::path& file, const MetricSeries& series) {
    std::ostringstream os;
    os << "t,metric,value\n";
    for (const auto& [name, values] : series.values)
        for (std::size_t i = 0; i < series.grid.size(); ++i)
            os << format_double(series.grid[i]) << "," << name << ","
               << format_double(values[i]) << "\n";
    write_text_file(file, os.str());
}

void write_ensemble_csv(const std::filesystem::path& file, const EnsembleStats& stats) {
    std::ostringstream os;
    os << "t,metric,mean,sd,ci_lo,ci_hi\n";
    for (const auto& [name, ms] : stats.metrics)
        for (std::size_t i = 0; i < stats.grid.size(); ++i)
            os << format_double(stats.grid[i]) << "," << name << ","
               << format_double(ms.mean[i]) << "," << format_double(ms.sd[i]) << ","
               << format_double(ms.ci_lo[i]) << "," << format_double(ms.ci_hi[i])
               << "\n";
    write_text_file(file, os.str());
}

void write_equivalence_csv(const std::filesystem::path& file,
                           const EquivalenceReport& report) {
    std::ostringstream os;
    os << "s,position_error,velocity_error\n";
    for (std::size_t i = 0; i < report.s_grid.size(); ++i)
        os << format_double(report.s_grid[i]) << ","
           << format_double(report.position_error[i]) << ","
           << format_double(report.velocity_error[i]) << "\n";
    write_text_file(file, os.str());
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

MetricSeries read_long_csv(const std::filesystem::path& file, std::size_t value_col) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open: " + file.string());
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("empty metrics file: " + file.string());

    MetricSeries series;
    std::string grid_metric; // grid comes from the first metric block
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cols = split_line(line);
        if (cols.size() <= value_col)
            throw std::runtime_error("malformed metrics row in " + file.string());
        const double t = std::stod(cols[0]);
        const std::string& name = cols[1];
        if (grid_metric.empty()) grid_metric = name;
        if (name == grid_metric) series.grid.push_back(t);
        series.values[name].push_back(std::stod(cols[value_col]));
    }
    return series;
}

} // namespace

MetricSeries read_metrics_csv(const std::filesystem::path& file) {
    return read_long_csv(file, 2);
}

MetricSeries read_ensemble_mean_csv(const std::filesystem::path& file) {
    return read_long_csv(file, 2);
}

} // namespace dynlab
