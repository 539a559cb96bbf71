#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fdcate {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Raised for malformed or invalid input data. The message carries the
/// offending row and column when they are known.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One observation V = (C, X, Z, Y) viewed in place.
struct Observation {
  std::span<const double> c;
  int x;
  int z;
  double y;
};

/// Immutable columnar sample of (C, X, Z, Y).
///
/// Invariants are checked on construction: all columns share n >= 1 rows,
/// X and Z are binary, and C and Y are finite.
class SampleTable {
 public:
  SampleTable(RowMatrix c, std::vector<int> x, std::vector<int> z, std::vector<double> y,
              std::vector<std::string> covariate_names = {});

  std::size_t rows() const { return y_.size(); }
  std::size_t covariate_dim() const { return static_cast<std::size_t>(c_.cols()); }

  const RowMatrix& c() const { return c_; }
  const std::vector<int>& x() const { return x_; }
  const std::vector<int>& z() const { return z_; }
  const std::vector<double>& y() const { return y_; }
  const std::vector<std::string>& covariate_names() const { return names_; }

  std::span<const double> covariates(std::size_t i) const {
    return {c_.data() + i * c_.cols(), static_cast<std::size_t>(c_.cols())};
  }
  Observation row(std::size_t i) const { return {covariates(i), x_[i], z_[i], y_[i]}; }

  /// Copy of the given rows, in the given order.
  SampleTable subset(std::span<const std::size_t> indices) const;

 private:
  RowMatrix c_;
  std::vector<int> x_;
  std::vector<int> z_;
  std::vector<double> y_;
  std::vector<std::string> names_;
};

/// Balanced random partition of row indices into K folds.
struct FoldPlan {
  std::vector<int> assignments;
  int k = 2;
  std::uint64_t seed = 0;

  std::vector<std::size_t> rows_in(int fold) const;
  std::vector<std::size_t> rows_not_in(int fold) const;
  std::vector<std::size_t> fold_sizes() const;
};

/// Seeded shuffle of 0..n-1, then round-robin fold labels. Throws if n < K or K < 2.
FoldPlan make_folds(std::size_t n, int k, std::uint64_t seed);

/// Column-role mapping for CSV ingestion.
struct CsvSchema {
  std::string x_col = "x";
  std::string z_col = "z";
  std::string y_col = "y";
  std::vector<std::string> c_cols;
};

/// Reads a header-first CSV. Missing, non-numeric, non-finite, or non-binary
/// cells are hard errors naming the 1-based data row and the column.
SampleTable load_csv(const std::filesystem::path& path, const CsvSchema& schema);

/// Writes covariates, then x, z, y, with 17 significant digits. Covariate
/// headers come from the table's names or default to c1..cd.
void write_csv(const SampleTable& table, const std::filesystem::path& path);

/// Schema matching the layout produced by write_csv.
CsvSchema default_schema(const SampleTable& table);

}  // namespace fdcate
