// Trajectory and reference-coordinate CSV files. Floating-point values are
// written in the shortest decimal form that round-trips exactly, so a file
// read back reproduces every double bit for bit.
#pragma once

#include <charconv>
#include <cstddef>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pdmosc/core.hpp"
#include "pdmosc/transforms.hpp"

namespace pdmosc::io {

struct CsvError : Error {
    using Error::Error;
};

inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s, std::size_t line_no) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw CsvError("csv: bad number '" + std::string(s) + "' on line " +
                       std::to_string(line_no));
    return v;
}

/// Header t,tau,x1,...,xn,v1,...,vn,E; one row per recorded sample; LF line
/// endings.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    const std::size_t n = traj.model.dim;
    os << "t,tau";
    for (std::size_t i = 1; i <= n; ++i) os << ",x" << i;
    for (std::size_t i = 1; i <= n; ++i) os << ",v" << i;
    os << ",E\n";
    for (const auto& s : traj.samples) {
        os << format_double(s.state.t) << ',' << format_double(s.tau);
        for (double c : s.state.x) os << ',' << format_double(c);
        for (double c : s.state.v) os << ',' << format_double(c);
        os << ',' << format_double(s.energy) << '\n';
    }
}

struct CsvTrajectory {
    std::size_t dim = 0;
    std::vector<double> t, tau, energy;
    std::vector<Vec> x, v;
};

inline std::vector<std::string_view> split_line(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

inline CsvTrajectory read_trajectory_csv(std::istream& is) {
    CsvTrajectory out;
    std::string line;
    if (!std::getline(is, line))
        throw CsvError("csv: missing header");
    const auto header = split_line(line);
    if (header.size() < 4 || header[0] != "t" || header[1] != "tau" ||
        header.back() != "E" || (header.size() - 3) % 2 != 0)
        throw CsvError("csv: unexpected trajectory header");
    out.dim = (header.size() - 3) / 2;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto cells = split_line(line);
        if (cells.size() != header.size())
            throw CsvError("csv: wrong column count on line " +
                           std::to_string(line_no));
        out.t.push_back(parse_double(cells[0], line_no));
        out.tau.push_back(parse_double(cells[1], line_no));
        Vec x(out.dim), v(out.dim);
        for (std::size_t i = 0; i < out.dim; ++i)
            x[i] = parse_double(cells[2 + i], line_no);
        for (std::size_t i = 0; i < out.dim; ++i)
            v[i] = parse_double(cells[2 + out.dim + i], line_no);
        out.x.push_back(std::move(x));
        out.v.push_back(std::move(v));
        out.energy.push_back(parse_double(cells.back(), line_no));
    }
    return out;
}

/// Header tau,q1,...,qn,qt1,...,qtn.
inline void write_reference_csv(std::ostream& os,
                                const transforms::ReferenceTrajectory& ref) {
    const std::size_t n = ref.q.empty() ? 0 : ref.q.front().size();
    os << "tau";
    for (std::size_t i = 1; i <= n; ++i) os << ",q" << i;
    for (std::size_t i = 1; i <= n; ++i) os << ",qt" << i;
    os << '\n';
    for (std::size_t k = 0; k < ref.tau.size(); ++k) {
        os << format_double(ref.tau[k]);
        for (double c : ref.q[k]) os << ',' << format_double(c);
        for (double c : ref.qtilde[k]) os << ',' << format_double(c);
        os << '\n';
    }
}

}  // namespace pdmosc::io
