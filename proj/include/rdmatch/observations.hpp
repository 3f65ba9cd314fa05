#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rdmatch {

/// Smallest sample for which every one of the three splits is nonempty.
inline constexpr std::size_t kMinRows = 9;

/// Columnar sample {Y, X, Z, Q} plus the treatment threshold.
///
/// Row i is treated iff q(i) >= tau0; an observation sitting exactly at the
/// cutoff counts as treated. X (outcome covariates) and Z (score covariates)
/// may share columns. Immutable once constructed; construction rejects
/// mismatched row counts, n < 9, empty X or Z, and any non-finite entry.
class ObservationSet {
 public:
  ObservationSet(Eigen::VectorXd y, Eigen::MatrixXd x, Eigen::MatrixXd z,
                 Eigen::VectorXd q, double tau0);

  std::size_t size() const noexcept { return static_cast<std::size_t>(y_.size()); }
  Eigen::Index dim_x() const noexcept { return x_.cols(); }
  Eigen::Index dim_z() const noexcept { return z_.cols(); }

  const Eigen::VectorXd& y() const noexcept { return y_; }
  const Eigen::MatrixXd& x() const noexcept { return x_; }
  const Eigen::MatrixXd& z() const noexcept { return z_; }
  const Eigen::VectorXd& q() const noexcept { return q_; }
  double tau0() const noexcept { return tau0_; }

  bool treated(std::size_t row) const { return q_(static_cast<Eigen::Index>(row)) >= tau0_; }

  /// Rows gathered in the given order (duplicates allowed, as in resampling).
  ObservationSet subset(const std::vector<std::size_t>& rows) const;

  /// Copy with a constant column appended to Z.
  ObservationSet with_intercept_z() const;

  /// Copy with Y replaced; used by invariance checks.
  ObservationSet with_outcome(Eigen::VectorXd y) const;

 private:
  Eigen::VectorXd y_;
  Eigen::MatrixXd x_;
  Eigen::MatrixXd z_;
  Eigen::VectorXd q_;
  double tau0_;
};

struct ColumnSpec {
  std::string y_col;
  std::string q_col;
  std::vector<std::string> x_cols;
  std::vector<std::string> z_cols;
  double tau0 = 0.0;
};

/// Entry i is true iff q_i >= tau0.
std::vector<bool> treatment_mask(const ObservationSet& obs);

/// Reads a comma-separated file with a header row. Cells are parsed as plain
/// decimal reals with std::from_chars, so the result never depends on the
/// process locale.
ObservationSet load_csv(const std::filesystem::path& path, const ColumnSpec& spec);

/// A parsed CSV: header names plus row-major numeric cells.
struct NumericTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const;
};

NumericTable read_numeric_csv(const std::filesystem::path& path);

/// Writes an ObservationSet with header y,x1..xdX,z1..zdZ,q. Values use the
/// shortest representation that parses back to the identical double.
void write_csv(const std::filesystem::path& path, const ObservationSet& obs);

/// Shortest round-trip decimal representation of a double.
std::string format_double(double value);

}  // namespace rdmatch
