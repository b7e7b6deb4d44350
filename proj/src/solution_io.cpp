#include "ballcrit/solution_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace ballcrit {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move output into place at " + path);
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string solution_csv(const GridVector& u) {
  std::string out = "i,j,u\n";
  for (std::size_t j = 1; j <= u.shape.n; ++j)
    for (std::size_t i = 1; i <= u.shape.m; ++i)
      out += std::to_string(i) + "," + std::to_string(j) + "," + format_double(u.at(i, j)) + "\n";
  return out;
}

void export_solution(const GridVector& u, const GridShape& shape, const std::string& path) {
  require_same_shape(shape, u.shape, "export_solution");
  if (static_cast<std::size_t>(u.values.size()) != shape.size())
    throw ShapeMismatch("export_solution: vector length does not match " + to_string(shape));
  write_file_atomic(path, solution_csv(u));
}

void export_solution(const CriticalPoint& point, const GridShape& shape, const std::string& path) {
  export_solution(point.point, shape, path);
}

GridVector read_vector_file(const std::string& path, const GridShape& shape) {
  const std::string text = read_file(path);
  GridVector u(shape);
  std::istringstream in(text);
  std::string line;
  std::vector<double> flat;
  bool csv = false;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line[0] == '#') continue;
    if (row == 1 && line.rfind("i,j,u", 0) == 0) {
      csv = true;
      continue;
    }
    if (csv) {
      std::size_t i = 0, j = 0;
      double v = 0.0;
      if (std::sscanf(line.c_str(), "%zu,%zu,%lf", &i, &j, &v) != 3 || i < 1 || i > shape.m || j < 1 ||
          j > shape.n)
        throw IoError(path + ":" + std::to_string(row) + ": malformed row '" + line + "'");
      u.at(i, j) = v;
      continue;
    }
    for (char& c : line)
      if (c == ',' || c == ';') c = ' ';
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
      char* end = nullptr;
      const double v = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str() || *end != '\0')
        throw IoError(path + ":" + std::to_string(row) + ": not a number '" + tok + "'");
      flat.push_back(v);
    }
  }
  if (!csv) {
    if (flat.size() != shape.size())
      throw IoError(path + ": expected " + std::to_string(shape.size()) + " values, found " +
                    std::to_string(flat.size()));
    for (std::size_t k = 0; k < flat.size(); ++k) u.values[static_cast<Eigen::Index>(k)] = flat[k];
  }
  return u;
}

std::string matrix_csv(const Eigen::MatrixXd& a) {
  std::string out;
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
      if (c) out += ',';
      out += format_double(a(r, c));
    }
    out += '\n';
  }
  return out;
}

}  // namespace ballcrit
