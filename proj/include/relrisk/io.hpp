#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "relrisk/glm.hpp"
#include "relrisk/risk.hpp"
#include "relrisk/switchmodel.hpp"

namespace relrisk::io {

// Canonical 2x2 JSON form: {"a1_y1":..,"a1_y0":..,"a0_y1":..,"a0_y0":..}
// with nonnegative integer counts. Malformed input throws
// std::invalid_argument.
TwoByTwoTable table_from_json(const nlohmann::json& j);
nlohmann::ordered_json table_to_json(const TwoByTwoTable& t);

// Individual-level CSV with header "a,y[,covariate...]": a and y are 0/1,
// covariate columns are 0/1 indicators named by the header.
RegressionDataset read_regression_csv(std::istream& in);
RegressionDataset read_regression_csv_file(const std::string& path);

// Fixed sweep schema: r,p0,p1,rr,sr,rd,or,grrr,stable_scale_value.
// Undefined cells are empty in CSV and null in JSON.
std::string sweep_csv(const std::vector<SweepRow>& rows, int precision);
nlohmann::ordered_json sweep_json(const std::vector<SweepRow>& rows);

// Fixed-point rendering used by all CSV output.
std::string format_double(double v, int precision);

}  // namespace relrisk::io
