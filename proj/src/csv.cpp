// Copyright 2026 The hqsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hqsim/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "hqsim/config.hpp"

namespace hqsim {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

std::uint64_t parse_count(const std::string& field) {
    std::uint64_t x = 0;
    const char* last = field.data() + field.size();
    const auto res = std::from_chars(field.data(), last, x);
    if (field.empty() || res.ec != std::errc() || res.ptr != last) {
        throw InputError("not a non-negative integer: '" + field + "'");
    }
    return x;
}

bool parse_bool(const std::string& field) {
    if (field == "true") return true;
    if (field == "false") return false;
    throw InputError("not a boolean: '" + field + "'");
}

constexpr const char* kTraceHeader = "t_ns,p_avg,std_err";
constexpr const char* kSweepHeader =
    "material,sigma_ratio,j0_eV,t2_star_ns,alpha,p_sat,q,rmse,converged,n_peaks,window_ns,seed";

}  // namespace

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& field) {
    if (field == "nan") return std::nan("");
    if (field == "inf") return INFINITY;
    if (field == "-inf") return -INFINITY;
    double x = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    const auto res = std::from_chars(first, last, x);
    if (field.empty() || res.ec != std::errc() || res.ptr != last) {
        throw InputError("not a number: '" + field + "'");
    }
    return x;
}

void write_trace_csv(std::ostream& out, const AveragedTrace& trace) {
    out << kTraceHeader << '\n';
    for (std::size_t k = 0; k < trace.times.size(); ++k) {
        const double se = k < trace.std_error.size() ? trace.std_error[k] : 0.0;
        out << format_double(trace.times[k]) << ',' << format_double(trace.probabilities[k]) << ','
            << format_double(se) << '\n';
    }
}

TraceTable read_trace_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || strip_cr(line) != kTraceHeader) {
        throw InputError("trace CSV line 1: expected header '" + std::string(kTraceHeader) + "'");
    }
    TraceTable table;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto fields = split(line);
        if (fields.size() != 3) {
            throw InputError("trace CSV line " + std::to_string(line_no) + ": expected 3 fields");
        }
        try {
            table.t_ns.push_back(parse_double(fields[0]));
            table.p_avg.push_back(parse_double(fields[1]));
            table.std_err.push_back(parse_double(fields[2]));
        } catch (const InputError& e) {
            throw InputError("trace CSV line " + std::to_string(line_no) + ": " + e.what());
        }
        const std::size_t n = table.t_ns.size();
        if (n > 1 && !(table.t_ns[n - 1] > table.t_ns[n - 2])) {
            throw InputError("trace CSV line " + std::to_string(line_no) + ": times must increase");
        }
    }
    return table;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
    out << kSweepHeader << '\n';
    for (const SweepRow& r : result.rows) {
        out << r.material << ',' << format_double(r.sigma_ratio) << ',' << format_double(r.j0) << ','
            << format_double(r.t2_star) << ',' << format_double(r.alpha) << ',' << format_double(r.p_sat) << ','
            << format_double(r.q) << ',' << format_double(r.rmse) << ',' << (r.converged ? "true" : "false") << ','
            << r.n_peaks << ',' << format_double(r.window) << ',' << r.seed << '\n';
    }
}

std::string sweep_csv(const SweepResult& result) {
    std::ostringstream ss;
    write_sweep_csv(ss, result);
    return ss.str();
}

std::vector<SweepRow> read_sweep_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || strip_cr(line) != kSweepHeader) {
        throw InputError("sweep CSV line 1: unexpected header");
    }
    std::vector<SweepRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto f = split(line);
        if (f.size() != 12) throw InputError("sweep CSV line " + std::to_string(line_no) + ": expected 12 fields");
        SweepRow r;
        r.material = f[0];
        try {
            r.sigma_ratio = parse_double(f[1]);
            r.j0 = parse_double(f[2]);
            r.t2_star = parse_double(f[3]);
            r.alpha = parse_double(f[4]);
            r.p_sat = parse_double(f[5]);
            r.q = parse_double(f[6]);
            r.rmse = parse_double(f[7]);
            r.converged = parse_bool(f[8]);
            r.n_peaks = parse_count(f[9]);
            r.window = parse_double(f[10]);
            r.seed = parse_count(f[11]);
        } catch (const InputError& e) {
            throw InputError("sweep CSV line " + std::to_string(line_no) + ": " + e.what());
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_plot_script(std::ostream& out, const std::string& csv_path, const SweepResult& result) {
    std::set<std::string> materials_seen;
    std::vector<std::string> materials;
    std::vector<double> ratios;
    for (const auto& r : result.rows) {
        if (materials_seen.insert(r.material).second) materials.push_back(r.material);
        bool seen = false;
        for (double x : ratios) seen = seen || x == r.sigma_ratio;
        if (!seen) ratios.push_back(r.sigma_ratio);
    }

    out << "# gnuplot script: T2* and Q versus j0\n"
        << "set datafile separator ','\n"
        << "set key autotitle columnhead\n"
        << "set logscale x\n"
        << "set format x '10^{%L}'\n"
        << "set xlabel 'j_0 (eV)'\n"
        << "set terminal pngcairo size 1600,700\n"
        << "set output '" << csv_path << ".png'\n"
        << "set multiplot layout 1,2\n";

    auto plot = [&](int column, const char* ylabel, bool logy) {
        out << (logy ? "set logscale y\n" : "unset logscale y\n") << "set ylabel '" << ylabel << "'\n" << "plot ";
        bool first = true;
        int style = 1;
        for (const auto& m : materials) {
            for (double ratio : ratios) {
                if (!first) out << ", \\\n     ";
                first = false;
                out << "'" << csv_path << "' using (strcol(1) eq '" << m << "' && abs($2 - " << format_double(ratio)
                    << ") < 1e-15 ? $3 : 1/0):" << column << " with linespoints pt " << style << " title '" << m
                    << " ratio " << format_double(ratio) << "'";
                ++style;
            }
        }
        out << "\n";
    };
    plot(4, "T_2^* (ns)", true);
    plot(7, "Q", false);
    out << "unset multiplot\n";
}

}  // namespace hqsim
