#include "gridfill/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "gridfill/errors.hpp"

namespace gridfill {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

[[noreturn]] void bad_row(const std::filesystem::path& path, std::size_t line_no,
                          const std::string& what) {
  throw InputError(path.string() + ":" + std::to_string(line_no) + ": " + what);
}

std::int64_t parse_i64(const std::string& s, const std::filesystem::path& path,
                       std::size_t line_no) {
  std::int64_t v{};
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    bad_row(path, line_no, "malformed integer '" + s + "'");
  }
  return v;
}

double parse_f64(const std::string& s, const std::filesystem::path& path, std::size_t line_no) {
  double v{};
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
    bad_row(path, line_no, "malformed number '" + s + "'");
  }
  return v;
}

struct IdStream {
  std::vector<std::int64_t> ts;
  std::vector<double> values;
  std::size_t order = 0;  // first-appearance rank, keeps output order stable
};

// Checks strictly increasing, uniformly spaced timestamps; returns dt.
std::int64_t check_clock(const IdStream& s, const std::string& id,
                         const std::filesystem::path& path) {
  if (s.ts.size() < 2) {
    throw InputError(path.string() + ": id '" + id +
                     "' has fewer than 2 rows; cannot infer sample period");
  }
  std::int64_t dt = s.ts[1] - s.ts[0];
  if (dt <= 0) {
    throw InputError(path.string() + ": id '" + id + "' timestamps out of order at t=" +
                     std::to_string(s.ts[1]));
  }
  for (std::size_t i = 1; i < s.ts.size(); ++i) {
    std::int64_t step = s.ts[i] - s.ts[i - 1];
    if (step <= 0) {
      throw InputError(path.string() + ": id '" + id + "' timestamps out of order at t=" +
                       std::to_string(s.ts[i]));
    }
    if (step != dt) {
      throw InputError(path.string() + ": id '" + id + "' gap in timestamps between t=" +
                       std::to_string(s.ts[i - 1]) + " and t=" + std::to_string(s.ts[i]) +
                       " (expected step " + std::to_string(dt) + " s)");
    }
  }
  return dt;
}

struct ParsedSeriesFile {
  // keyed by id, values in file column units
  std::map<std::string, IdStream> streams;
};

ParsedSeriesFile parse_three_column(const std::filesystem::path& path,
                                    const std::string& expected_header) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw InputError(path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected_header) {
    throw InputError(path.string() + ":1: expected header '" + expected_header + "', got '" +
                     line + "'");
  }
  ParsedSeriesFile out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto f = split_fields(line);
    if (f.size() != 3) bad_row(path, line_no, "expected 3 fields, got " + std::to_string(f.size()));
    std::int64_t ts = parse_i64(f[0], path, line_no);
    double v = parse_f64(f[2], path, line_no);
    auto [it, inserted] = out.streams.try_emplace(f[1]);
    if (inserted) it->second.order = out.streams.size() - 1;
    it->second.ts.push_back(ts);
    it->second.values.push_back(v);
  }
  if (out.streams.empty()) throw InputError(path.string() + ": no data rows");
  return out;
}

template <typename Series>
Series single_series_from(const std::filesystem::path& path, ParsedSeriesFile&& parsed) {
  if (parsed.streams.size() != 1) {
    throw InputError(path.string() + ": expected a single transformer id, found " +
                     std::to_string(parsed.streams.size()));
  }
  auto& [id, stream] = *parsed.streams.begin();
  Series s;
  s.transformer_id = id;
  s.dt = check_clock(stream, id, path);
  s.t0 = stream.ts.front();
  s.values = std::move(stream.values);
  return s;
}

}  // namespace

HighResSeries load_high_res_csv(const std::filesystem::path& path) {
  return single_series_from<HighResSeries>(
      path, parse_three_column(path, "timestamp_s,transformer_id,p_kw"));
}

LowResSeries load_low_res_csv(const std::filesystem::path& path) {
  return single_series_from<LowResSeries>(
      path, parse_three_column(path, "timestamp_s,transformer_id,p_kw"));
}

std::vector<CustomerSeries> load_customer_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw InputError(path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::string header = "timestamp_s,customer_id,transformer_id,kwh";
  if (line != header) {
    throw InputError(path.string() + ":1: expected header '" + header + "', got '" + line + "'");
  }
  std::map<std::string, IdStream> streams;
  std::map<std::string, std::string> transformer_of;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto f = split_fields(line);
    if (f.size() != 4) bad_row(path, line_no, "expected 4 fields, got " + std::to_string(f.size()));
    std::int64_t ts = parse_i64(f[0], path, line_no);
    double kwh = parse_f64(f[3], path, line_no);
    auto [it, inserted] = streams.try_emplace(f[1]);
    if (inserted) {
      it->second.order = streams.size() - 1;
      transformer_of[f[1]] = f[2];
    } else if (transformer_of[f[1]] != f[2]) {
      bad_row(path, line_no, "customer '" + f[1] + "' listed under two transformers");
    }
    it->second.ts.push_back(ts);
    it->second.values.push_back(kwh);
  }
  if (streams.empty()) throw InputError(path.string() + ": no data rows");

  std::vector<CustomerSeries> out(streams.size());
  for (auto& [id, stream] : streams) {
    CustomerSeries c;
    c.customer_id = id;
    c.transformer_id = transformer_of[id];
    c.dt = check_clock(stream, id, path);
    c.t0 = stream.ts.front();
    // kWh per interval -> average kW
    const double to_kw = 3600.0 / static_cast<double>(c.dt);
    c.values.resize(stream.values.size());
    for (std::size_t i = 0; i < c.values.size(); ++i) c.values[i] = stream.values[i] * to_kw;
    out[stream.order] = std::move(c);
  }
  return out;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  return out;
}

template <typename Series>
void write_power_csv(const std::filesystem::path& path, const Series& s) {
  auto out = open_out(path);
  out << "timestamp_s,transformer_id,p_kw\n";
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    out << (s.t0 + static_cast<std::int64_t>(i) * s.dt) << ',' << s.transformer_id << ','
        << format_double(s.values[i]) << '\n';
  }
}

}  // namespace

void write_high_res_csv(const std::filesystem::path& path, const HighResSeries& s) {
  write_power_csv(path, s);
}

void write_low_res_csv(const std::filesystem::path& path, const LowResSeries& s) {
  write_power_csv(path, s);
}

void write_customer_csv(const std::filesystem::path& path,
                        const std::vector<CustomerSeries>& customers) {
  auto out = open_out(path);
  out << "timestamp_s,customer_id,transformer_id,kwh\n";
  for (const CustomerSeries& c : customers) {
    const double to_kwh = static_cast<double>(c.dt) / 3600.0;
    for (std::size_t i = 0; i < c.values.size(); ++i) {
      out << (c.t0 + static_cast<std::int64_t>(i) * c.dt) << ',' << c.customer_id << ','
          << c.transformer_id << ',' << format_double(c.values[i] * to_kwh) << '\n';
    }
  }
}

}  // namespace gridfill
