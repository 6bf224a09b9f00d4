#include "eisenhart/trajectory.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace eisenhart {

Vec Trajectory::x_at(double p) const {
  const Vec y = sol.eval(p);
  Vec x(n);
  const int off = is_lift ? 2 : 0;
  for (int i = 0; i < n; ++i) x[i] = y[off + i];
  return x;
}

Vec Trajectory::xdot_at(double p) const {
  const Vec y = sol.eval(p);
  Vec xd(n);
  const int off = is_lift ? (n + 4) : n;
  for (int i = 0; i < n; ++i) xd[i] = y[off + i];
  return xd;
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void write_rows(const std::string& path, const std::vector<std::string>& headers,
                const std::vector<Vec>& rows) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  for (size_t i = 0; i < headers.size(); ++i) f << (i ? "," : "") << headers[i];
  f << "\n";
  for (const Vec& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) f << (i ? "," : "") << format_g17(row[i]);
    f << "\n";
  }
  if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace

void write_lift_csv(const std::string& path, const Trajectory& tr) {
  if (!tr.is_lift) throw std::invalid_argument("write_lift_csv: base trajectory supplied");
  std::vector<std::string> headers = {"s", "v", "t"};
  for (int i = 1; i <= tr.n; ++i) headers.push_back("x" + std::to_string(i));
  headers.push_back("vdot");
  headers.push_back("tdot");
  for (int i = 1; i <= tr.n; ++i) headers.push_back("xdot" + std::to_string(i));
  std::vector<Vec> rows;
  rows.reserve(tr.sol.grid.size());
  for (size_t k = 0; k < tr.sol.grid.size(); ++k) {
    Vec row;
    row.reserve(1 + tr.sol.states[k].size());
    row.push_back(tr.sol.grid[k]);
    for (double v : tr.sol.states[k]) row.push_back(v);
    rows.push_back(std::move(row));
  }
  write_rows(path, headers, rows);
}

void write_base_csv(const std::string& path, const Trajectory& tr) {
  if (tr.is_lift) throw std::invalid_argument("write_base_csv: lift trajectory supplied");
  std::vector<std::string> headers = {"t"};
  for (int i = 1; i <= tr.n; ++i) headers.push_back("x" + std::to_string(i));
  for (int i = 1; i <= tr.n; ++i) headers.push_back("xdot" + std::to_string(i));
  std::vector<Vec> rows;
  rows.reserve(tr.sol.grid.size());
  for (size_t k = 0; k < tr.sol.grid.size(); ++k) {
    Vec row;
    row.reserve(1 + tr.sol.states[k].size());
    row.push_back(tr.sol.grid[k]);
    for (double v : tr.sol.states[k]) row.push_back(v);
    rows.push_back(std::move(row));
  }
  write_rows(path, headers, rows);
}

void write_columns_csv(const std::string& path, const std::vector<std::string>& headers,
                       const std::vector<Vec>& rows) {
  write_rows(path, headers, rows);
}

}  // namespace eisenhart
