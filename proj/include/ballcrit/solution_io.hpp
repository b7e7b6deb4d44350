#pragma once

#include <stdexcept>
#include <string>

#include "ballcrit/solvers.hpp"

namespace ballcrit {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 17 significant digits, enough to round-trip any double.
std::string format_double(double x);

/// Writes via a sibling temporary file and rename, so a failed write never
/// leaves a partial file behind.
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

/// CSV "i,j,u", one row per interior node in flattening order.
std::string solution_csv(const GridVector& u);
void export_solution(const CriticalPoint& point, const GridShape& shape, const std::string& path);
void export_solution(const GridVector& u, const GridShape& shape, const std::string& path);

/// Reads a vector for `certify`. Accepts the "i,j,u" CSV written above or a
/// whitespace/comma separated list of N values in flattening order.
GridVector read_vector_file(const std::string& path, const GridShape& shape);

/// Row-major dense matrix, full precision.
std::string matrix_csv(const Eigen::MatrixXd& a);

}  // namespace ballcrit
