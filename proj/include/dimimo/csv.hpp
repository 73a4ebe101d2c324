#pragma once

#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dimimo/experiments.hpp"
#include "dimimo/pipeline.hpp"

namespace dimimo {

// Shortest round-trippable decimal form; locale-independent.
inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// Inclusive "start:step:stop" grid; a bare number is a single-point grid.
inline std::vector<double> parse_snr_grid(const std::string& text) {
    std::vector<double> grid;
    const auto c1 = text.find(':');
    if (c1 == std::string::npos) {
        grid.push_back(std::stod(text));
        return grid;
    }
    const auto c2 = text.find(':', c1 + 1);
    if (c2 == std::string::npos) throw std::invalid_argument("snr grid must be start:step:stop");
    const double start = std::stod(text.substr(0, c1));
    const double step = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    const double stop = std::stod(text.substr(c2 + 1));
    if (step <= 0.0) throw std::invalid_argument("snr grid step must be positive");
    for (double v = start; v <= stop + 1e-9; v += step) grid.push_back(v);
    return grid;
}

inline void write_ber_csv(const std::vector<ResultRow>& rows, std::ostream& os) {
    os << "detector,modulation,snr_db,ber,bits,seed\n";
    for (const auto& r : rows)
        os << r.detector << ',' << r.modulation << ',' << format_number(r.snr_db) << ','
           << format_number(r.ber) << ',' << r.bits << ',' << r.seed << '\n';
}

inline void write_throughput_csv(const std::vector<ResultRow>& rows, std::ostream& os) {
    os << "detector,modulation,code_rate,snr_db,bler,throughput,seed\n";
    for (const auto& r : rows)
        os << r.detector << ',' << r.modulation << ',' << r.code_rate << ','
           << format_number(r.snr_db) << ',' << format_number(r.bler) << ','
           << format_number(r.throughput) << ',' << r.seed << '\n';
}

inline void write_trajectory_csv(const std::vector<TraceRow>& rows, std::ostream& os) {
    os << "formulation,step,t,user,i_value,q_value\n";
    for (const auto& r : rows)
        os << r.formulation << ',' << r.step << ',' << format_number(r.t) << ',' << r.user << ','
           << format_number(r.i_value) << ',' << format_number(r.q_value) << '\n';
}

inline void write_oracle_csv(const std::vector<OracleCompareRow>& rows, std::ostream& os) {
    os << "instance,obj_mmse,obj_di,obj_oracle,match\n";
    for (const auto& r : rows)
        os << r.instance << ',' << format_number(r.obj_mmse) << ',' << format_number(r.obj_di)
           << ',' << format_number(r.obj_oracle) << ',' << (r.match ? 1 : 0) << '\n';
}

}  // namespace dimimo
