#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace kselect {

// Dense row-major matrix, rows = samples.
struct DataMatrix {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<double> values;

  DataMatrix() = default;
  DataMatrix(std::size_t rows, std::size_t cols)
      : n_rows(rows), n_cols(cols), values(rows * cols, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return values[r * n_cols + c]; }
  double at(std::size_t r, std::size_t c) const { return values[r * n_cols + c]; }
  const double* row(std::size_t r) const { return values.data() + r * n_cols; }
  double* row(std::size_t r) { return values.data() + r * n_cols; }
};

struct StandardizationParams {
  std::vector<double> means;
  std::vector<double> stddevs;  // population convention, zero for constant columns
};

struct BatchPlan {
  std::size_t batch_size = 0;
  std::size_t n_batches = 0;
};

struct CsvOptions {
  char delimiter = ',';
  bool has_header = false;
  std::vector<std::size_t> columns;  // empty = all columns
};

// Throws std::runtime_error on IO failure, ragged rows, or non-numeric
// cells (message names the 1-based row and column).
DataMatrix load_csv(const std::string& path, const CsvOptions& options = {});

void write_csv(const DataMatrix& X, const std::string& path,
               const std::vector<std::size_t>* labels = nullptr);

// Z-scores each column to mean 0, sd 1 (population sd). Constant columns
// map to all zeros instead of erroring; their stored sd is 0.
std::pair<DataMatrix, StandardizationParams> standardize(const DataMatrix& X);

DataMatrix destandardize(const DataMatrix& Z, const StandardizationParams& params);

BatchPlan plan_batches(std::size_t n, std::size_t batch_size);

// Splits X into ceil(n/b) contiguous row slices and returns the plain mean
// of func over them. The final batch may be smaller; it still counts with
// weight 1 unless weight_by_size is set.
double process_in_batches(const DataMatrix& X,
                          const std::function<double(const DataMatrix&)>& func,
                          std::size_t batch_size, bool weight_by_size = false);

// m distinct rows, uniform without replacement, original row order kept.
DataMatrix sample_rows(const DataMatrix& X, std::size_t m, std::uint64_t seed);

}  // namespace kselect
