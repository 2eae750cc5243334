#include <cstdio>
#include <fstream>
#include <sstream>

#include "inls/error.hpp"
#include "inls/runner.hpp"

namespace inls {

namespace {

constexpr std::size_t kColumns = 13;

double* columns(TimeSeriesRecord& r, std::size_t k) {
  double* cols[kColumns] = {&r.t,      &r.mass,         &r.energy, &r.grad_norm_sq, &r.K,
                            &r.I,      &r.Iprime,       &r.Idoubleprime, &r.R1,     &r.R2,
                            &r.R3,     &r.delta_instant, &r.R_cutoff};
  return cols[k];
}

}  // namespace

void write_text_atomic(const std::string& text, const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

void write_json_atomic(const nlohmann::json& j, const std::filesystem::path& path) {
  write_text_atomic(j.dump(2) + "\n", path);
}

void write_series_csv(const std::vector<TimeSeriesRecord>& series, const std::filesystem::path& path) {
  std::string text = kSeriesHeader;
  text += '\n';
  char buf[32];
  for (auto r : series) {
    for (std::size_t k = 0; k < kColumns; ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", *columns(r, k));
      if (k) text += ',';
      text += buf;
    }
    text += '\n';
  }
  write_text_atomic(text, path);
}

std::vector<TimeSeriesRecord> read_series_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kSeriesHeader) {
    throw IoError(path.string() + ": unexpected header");
  }
  std::vector<TimeSeriesRecord> series;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    TimeSeriesRecord r;
    std::istringstream ss(line);
    std::string cell;
    std::size_t k = 0;
    for (; std::getline(ss, cell, ','); ++k) {
      if (k >= kColumns) {
        throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected 13 columns");
      }
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0') {
        throw IoError(path.string() + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
      *columns(r, k) = v;
    }
    if (k != kColumns) {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected 13 columns");
    }
    series.push_back(r);
  }
  return series;
}

}  // namespace inls
