#include "stabkit/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace stabkit {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void append_vector(std::string& out, const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out += format_g17(v[i]);
    out += ',';
  }
}

std::string header(const std::initializer_list<std::pair<const char*, int>>& groups) {
  std::string h;
  for (const auto& [prefix, count] : groups)
    for (int i = 1; i <= count; ++i) {
      if (!h.empty()) h += ',';
      h += prefix;
      h += std::to_string(i);
    }
  return h;
}

}  // namespace

std::string to_csv(const SectionTable& table) {
  const int n = table.grid.dim(), m = table.control_dim;
  std::string out = header({{"y", n}, {"x", n}, {"u", m}});
  out += ",residual\n";
  for (int lex : table.grid.order()) {
    if (!table.solved[lex]) continue;
    append_vector(out, table.grid.point(lex));
    append_vector(out, table.values[lex]);
    out += format_g17(table.residuals[lex]);
    out += '\n';
  }
  return out;
}

std::string to_csv(const FeedbackTable& table) {
  const int n = table.grid.dim(), m = table.control_dim;
  std::string out = header({{"x", n}, {"u", m}});
  out += ",residual\n";
  for (int lex : table.grid.order()) {
    if (!table.solved[lex]) continue;
    append_vector(out, table.grid.point(lex));
    append_vector(out, table.values[lex]);
    out += format_g17(table.residuals[lex]);
    out += '\n';
  }
  return out;
}

std::string to_csv(const SymbolTable& table) {
  const int n = table.grid.dim(), m = table.control_dim;
  std::string out = header({{"x", n}, {"hx", n}, {"hu", m}});
  out += ",residual\n";
  for (int lex : table.grid.order()) {
    if (!table.solved[lex]) continue;
    append_vector(out, table.grid.point(lex));
    append_vector(out, table.values[lex]);
    out += format_g17(table.residuals[lex]);
    out += '\n';
  }
  return out;
}

std::string to_csv(const Trajectory& traj) {
  std::string out = "t";
  if (!traj.states.empty())
    for (Eigen::Index i = 1; i <= traj.states[0].size(); ++i) out += ",x" + std::to_string(i);
  out += '\n';
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    out += format_g17(traj.times[k]);
    for (Eigen::Index i = 0; i < traj.states[k].size(); ++i) {
      out += ',';
      out += format_g17(traj.states[k][i]);
    }
    out += '\n';
  }
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace stabkit
