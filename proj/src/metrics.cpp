// SPDX-License-Identifier: Apache-2.0
#include "mmbf/metrics.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace mmbf {

namespace {

std::string fmt_g6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

MetricsWriter::MetricsWriter(const std::filesystem::path& path)
    : out_(path, std::ios::binary), path_(path) {
  if (!out_)
    throw std::runtime_error("cannot open metrics file for writing: " +
                             path.string());
  out_ << kMetricsHeader << '\n';
}

void MetricsWriter::write(const StepRecord& r) {
  out_ << format_record(r) << '\n';
  if (!out_)
    throw std::runtime_error("metrics write failed: " + path_.string());
}

std::string format_record(const StepRecord& r) {
  std::string row;
  row.reserve(128);
  row += std::to_string(r.episode);
  row += ',';
  row += std::to_string(r.step);
  row += ',';
  row += std::to_string(r.bs_id);
  row += ',';
  row += std::to_string(r.action);
  row += ',';
  row += fmt_g6(r.reward);
  row += ',';
  row += fmt_g6(r.r_omni);
  row += ',';
  row += fmt_g6(r.r_beam);
  row += ',';
  row += fmt_g6(r.sum_ddqn);
  row += ',';
  row += fmt_g6(r.sum_exhaustive);
  row += ',';
  row += fmt_g6(r.sum_random);
  row += ',';
  row += fmt_g6(r.epsilon);
  row += ',';
  if (r.loss) row += fmt_g6(*r.loss);
  return row;
}

std::vector<StepRecord> read_metrics_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read metrics file: " + path.string());
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("metrics file is empty: " + path.string());
  if (line != kMetricsHeader)
    throw std::runtime_error("unexpected metrics header in " + path.string());

  std::vector<StepRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != 12)
      throw std::runtime_error("malformed metrics row in " + path.string());
    StepRecord r;
    r.episode = std::stoi(cells[0]);
    r.step = std::stoi(cells[1]);
    r.bs_id = std::stoi(cells[2]);
    r.action = std::stoi(cells[3]);
    r.reward = std::stod(cells[4]);
    r.r_omni = std::stod(cells[5]);
    r.r_beam = std::stod(cells[6]);
    r.sum_ddqn = std::stod(cells[7]);
    r.sum_exhaustive = std::stod(cells[8]);
    r.sum_random = std::stod(cells[9]);
    r.epsilon = std::stod(cells[10]);
    if (!cells[11].empty()) r.loss = std::stod(cells[11]);
    records.push_back(r);
  }
  return records;
}

}  // namespace mmbf
