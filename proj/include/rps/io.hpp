#pragma once

#include <ostream>
#include <string>

#include "rps/analysis.hpp"
#include "rps/floquet.hpp"
#include "rps/pullback.hpp"
#include "rps/schemes.hpp"

namespace rps {

// 17 significant digits, enough to round-trip a double.
std::string format_g17(double x);

// CSV schemas are part of the tool contract: LF line endings, 17
// significant digits, header row first.

// t,x_1,...,x_m
void write_trajectory_csv(const Trajectory& traj, std::ostream& os);

// dt,rmse,n,stderr
void write_error_table_csv(const ErrorTable& table, std::ostream& os);

// t,value,seed (one row per grid time per seed)
void write_diagnostic_csv(const DiagnosticSeries& series, std::ostream& os);

// t,base,shifted (scalar problems)
void write_pair_csv(const ShiftedPair& pair, std::ostream& os);

// dt,distance,ci_lo,ci_hi,se
void write_measure_rows_csv(const std::vector<MeasureRow>& rows,
                            std::ostream& os);

std::string pullback_result_to_json(const PullbackResult& result);
std::string order_fit_to_json(const OrderFit& fit, const ErrorTable& table);
std::string floquet_to_json(const FloquetData& data, bool include_grids = true);

}  // namespace rps
