#pragma once

#include <filesystem>
#include <vector>

#include "gridfill/series.hpp"

namespace gridfill {

// CSV schemas (header row required, timestamps strictly increasing and
// uniformly spaced per id):
//   high-res / low-res:  timestamp_s,transformer_id,p_kw
//   customer:            timestamp_s,customer_id,transformer_id,kwh
// Customer energy readings are converted to average power (kW) on load and
// back to kWh on write.

HighResSeries load_high_res_csv(const std::filesystem::path& path);
LowResSeries load_low_res_csv(const std::filesystem::path& path);
std::vector<CustomerSeries> load_customer_csv(const std::filesystem::path& path);

void write_high_res_csv(const std::filesystem::path& path, const HighResSeries& s);
void write_low_res_csv(const std::filesystem::path& path, const LowResSeries& s);
void write_customer_csv(const std::filesystem::path& path,
                        const std::vector<CustomerSeries>& customers);

// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

}  // namespace gridfill
