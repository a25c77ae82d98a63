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

#ifndef HQSIM_CSV_HPP
#define HQSIM_CSV_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "hqsim/noise.hpp"
#include "hqsim/sweep.hpp"

namespace hqsim {

/// 17 significant digits, locale independent; "nan"/"inf" for non-finite values.
std::string format_double(double x);

/// Strict parse of a whole field; throws InputError.
double parse_double(const std::string& field);

/// Columns t_ns,p_avg,std_err with a header row and LF line endings.
void write_trace_csv(std::ostream& out, const AveragedTrace& trace);

struct TraceTable {
    std::vector<double> t_ns;
    std::vector<double> p_avg;
    std::vector<double> std_err;
};

/// Reads the write_trace_csv format. Throws InputError naming the line.
TraceTable read_trace_csv(std::istream& in);

/// Columns material,sigma_ratio,j0_eV,t2_star_ns,alpha,p_sat,q,rmse,converged,
/// n_peaks,window_ns,seed.
void write_sweep_csv(std::ostream& out, const SweepResult& result);
std::string sweep_csv(const SweepResult& result);
std::vector<SweepRow> read_sweep_csv(std::istream& in);

/// gnuplot script drawing T2* and Q against j0 on log axes from `csv_path`.
void write_plot_script(std::ostream& out, const std::string& csv_path, const SweepResult& result);

}  // namespace hqsim

#endif  // HQSIM_CSV_HPP
