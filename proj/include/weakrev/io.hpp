#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "weakrev/matrix.hpp"
#include "weakrev/tomography.hpp"

namespace weakrev {

// Stable text form for doubles; CSV/JSON outputs must be byte-identical
// across runs with the same config and seed.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return std::string(buf);
}

// CSV with a versioned `#schema=` comment line ahead of the header.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& schema,
            const std::vector<std::string>& header) {
    out_.open(path);
    if (!out_)
      throw std::runtime_error("cannot open " + path.string() + " for writing");
    out_ << "#schema=" << schema << "\n";
    write_row(header);
  }

  void write_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ",";
      out_ << cells[i];
    }
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

// Complex matrices serialize as nested row-major arrays of [re, im] pairs.
template <std::size_t N>
nlohmann::json matrix_to_json(const Matrix<N>& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t r = 0; r < N; ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t c = 0; c < N; ++c)
      row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(row);
  }
  return rows;
}

inline void write_json_file(const std::filesystem::path& path,
                            const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << "\n";
}

inline void write_counts_csv(const std::filesystem::path& path,
                             const std::vector<CountRecord>& records) {
  CsvWriter csv(path, "counts/v1", {"setting", "count", "shots"});
  for (const CountRecord& r : records) {
    csv.write_row({to_string(r.setting.label), std::to_string(r.count),
                   std::to_string(r.shots_nominal)});
  }
}

}  // namespace weakrev
