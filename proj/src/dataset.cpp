#include "lava/dataset.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace lava {

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

void check_header(const std::vector<std::string>& names, int n_u, int n_y,
                  const std::string& path) {
  if (static_cast<int>(names.size()) != n_u + n_y)
    throw SchemaError(path + ": header has " + std::to_string(names.size()) +
                      " columns, expected " + std::to_string(n_u + n_y));
  for (int k = 0; k < n_u + n_y; ++k) {
    std::string want = k < n_u ? "u" + std::to_string(k + 1)
                               : "y" + std::to_string(k - n_u + 1);
    if (names[k] != want)
      throw SchemaError(path + ": header column " + std::to_string(k + 1) +
                        " is '" + names[k] + "', expected '" + want + "'");
  }
}

Dataset parse_csv(std::ifstream& in, const std::string& path, int n_u,
                  int n_y) {
  std::vector<double> values;
  long rows = 0;
  std::string line;
  long line_no = 1;  // header already consumed
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_fields(line);
    if (static_cast<int>(fields.size()) != n_u + n_y)
      throw SchemaError(path + ": row " + std::to_string(line_no) + " has " +
                        std::to_string(fields.size()) + " fields, expected " +
                        std::to_string(n_u + n_y));
    for (const auto& f : fields) {
      double v = 0.0;
      const char* first = f.data();
      const char* last = f.data() + f.size();
      while (first != last && (*first == ' ' || *first == '\t')) ++first;
      auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc{} || ptr != last)
        throw ParseError(path + ": row " + std::to_string(line_no) +
                         ": not a number: '" + f + "'");
      values.push_back(v);
    }
    ++rows;
  }
  if (rows == 0) throw SchemaError(path + ": no data rows");
  Dataset d;
  d.inputs.resize(n_u, rows);
  d.outputs.resize(n_y, rows);
  for (long t = 0; t < rows; ++t) {
    const double* row = values.data() + static_cast<std::size_t>(t) * (n_u + n_y);
    for (int k = 0; k < n_u; ++k) d.inputs(k, t) = row[k];
    for (int k = 0; k < n_y; ++k) d.outputs(k, t) = row[n_u + k];
  }
  return d;
}

}  // namespace

Dataset load_csv(const std::string& path, int n_u, int n_y) {
  if (n_u < 0 || n_y < 1) throw ArgumentError("load_csv: bad channel counts");
  std::ifstream in(path);
  if (!in) throw ArgumentError("load_csv: cannot open " + path);
  std::string header;
  if (!std::getline(in, header)) throw SchemaError(path + ": empty file");
  if (!header.empty() && header.back() == '\r') header.pop_back();
  check_header(split_fields(header), n_u, n_y, path);
  return parse_csv(in, path, n_u, n_y);
}

Dataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("load_csv: cannot open " + path);
  std::string header;
  if (!std::getline(in, header)) throw SchemaError(path + ": empty file");
  if (!header.empty() && header.back() == '\r') header.pop_back();
  auto names = split_fields(header);
  int n_u = 0;
  while (n_u < static_cast<int>(names.size()) &&
         names[n_u] == "u" + std::to_string(n_u + 1))
    ++n_u;
  int n_y = static_cast<int>(names.size()) - n_u;
  if (n_y < 1) throw SchemaError(path + ": no output columns in header");
  check_header(names, n_u, n_y, path);
  return parse_csv(in, path, n_u, n_y);
}

void write_csv(const std::string& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary);  // binary: LF endings everywhere
  if (!out) throw ArgumentError("write_csv: cannot open " + path);
  const int n_u = static_cast<int>(data.n_u());
  const int n_y = static_cast<int>(data.n_y());
  for (int k = 0; k < n_u; ++k) out << "u" << (k + 1) << ",";
  for (int k = 0; k < n_y; ++k) out << "y" << (k + 1) << (k + 1 < n_y ? "," : "");
  out << "\n";
  char buf[40];
  for (Eigen::Index t = 0; t < data.samples(); ++t) {
    for (int k = 0; k < n_u; ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", data.inputs(k, t));
      out << buf << ",";
    }
    for (int k = 0; k < n_y; ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", data.outputs(k, t));
      out << buf << (k + 1 < n_y ? "," : "");
    }
    out << "\n";
  }
  if (!out) throw ArgumentError("write_csv: write failed on " + path);
}

namespace {

// Maximal-length feedback taps (1-based bit positions), XOR form.
const std::vector<int>& lfsr_taps(int order) {
  static const std::vector<std::vector<int>> table = {
      {3, 2},          {4, 3},           {5, 3},           {6, 5},
      {7, 6},          {8, 6, 5, 4},     {9, 5},           {10, 7},
      {11, 9},         {12, 11, 10, 4},  {13, 12, 11, 8},  {14, 13, 12, 2},
      {15, 14},        {16, 15, 13, 4}};
  if (order < 3 || order > 16)
    throw ArgumentError("generate_rs: lfsr_order must be in [3,16]");
  return table[order - 3];
}

}  // namespace

Eigen::VectorXd generate_rs(const RsSignalSpec& spec) {
  if (spec.amplitude <= 0) throw ArgumentError("generate_rs: amplitude must be > 0");
  if (spec.length < 1) throw ArgumentError("generate_rs: length must be >= 1");
  if (spec.base_period < 1) throw ArgumentError("generate_rs: base_period must be >= 1");
  const auto& taps = lfsr_taps(spec.lfsr_order);
  const std::uint32_t mask = (1u << spec.lfsr_order) - 1u;

  Rng rng(spec.seed);
  std::uint32_t state = static_cast<std::uint32_t>(rng.next_u64()) & mask;
  if (state == 0) state = 1;

  Eigen::VectorXd out(spec.length);
  int sign = 0;       // current PRBS level, set on first block
  double value = 0.0; // current interval value
  for (long t = 0; t < spec.length; ++t) {
    if (t % spec.base_period == 0) {
      std::uint32_t fb = 0;
      for (int tap : taps) fb ^= (state >> (tap - 1)) & 1u;
      state = ((state << 1) | fb) & mask;
      int s = (state & 1u) ? 1 : -1;
      if (s != sign) {  // new interval: fresh amplitude draw
        sign = s;
        value = sign * rng.uniform(0.0, spec.amplitude);
      }
    }
    out[t] = value;
  }
  return out;
}

std::pair<Dataset, Dataset> split(const Dataset& data, long boundary) {
  const long n = data.samples();
  if (boundary < 1 || boundary >= n)
    throw ArgumentError("split: boundary " + std::to_string(boundary) +
                        " outside [1, " + std::to_string(n - 1) + "]");
  Dataset a, b;
  a.sample_period = b.sample_period = data.sample_period;
  a.inputs = data.inputs.leftCols(boundary);
  a.outputs = data.outputs.leftCols(boundary);
  b.inputs = data.inputs.rightCols(n - boundary);
  b.outputs = data.outputs.rightCols(n - boundary);
  return {std::move(a), std::move(b)};
}

}  // namespace lava
