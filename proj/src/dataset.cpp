#include "kselect/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "kselect/rng.hpp"

namespace kselect {

namespace {

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, delim)) out.push_back(cell);
  if (!line.empty() && line.back() == delim) out.emplace_back();
  return out;
}

double parse_cell(const std::string& raw, std::size_t row_1b, std::size_t col_1b) {
  // trim whitespace and a possible trailing \r from CRLF files
  std::size_t b = raw.find_first_not_of(" \t\r");
  std::size_t e = raw.find_last_not_of(" \t\r");
  if (b == std::string::npos) {
    throw std::runtime_error("empty cell at row " + std::to_string(row_1b) +
                             ", column " + std::to_string(col_1b));
  }
  const std::string s = raw.substr(b, e - b + 1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::runtime_error("non-numeric cell \"" + s + "\" at row " +
                             std::to_string(row_1b) + ", column " +
                             std::to_string(col_1b));
  }
  if (!std::isfinite(v)) {
    throw std::runtime_error("non-finite value at row " + std::to_string(row_1b) +
                             ", column " + std::to_string(col_1b));
  }
  return v;
}

}  // namespace

DataMatrix load_csv(const std::string& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);

  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  bool skipped_header = false;
  std::size_t width = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (options.has_header && !skipped_header) {
      skipped_header = true;
      continue;
    }
    auto cells = split_line(line, options.delimiter);
    std::vector<double> row;
    if (options.columns.empty()) {
      row.reserve(cells.size());
      for (std::size_t c = 0; c < cells.size(); ++c)
        row.push_back(parse_cell(cells[c], line_no, c + 1));
    } else {
      row.reserve(options.columns.size());
      for (std::size_t c : options.columns) {
        if (c >= cells.size()) {
          throw std::runtime_error("row " + std::to_string(line_no) +
                                   " has no column " + std::to_string(c + 1));
        }
        row.push_back(parse_cell(cells[c], line_no, c + 1));
      }
    }
    if (width == 0) {
      width = row.size();
    } else if (row.size() != width) {
      throw std::runtime_error("ragged row " + std::to_string(line_no) + ": expected " +
                               std::to_string(width) + " columns, got " +
                               std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("no data rows in " + path);

  DataMatrix X(rows.size(), width);
  for (std::size_t r = 0; r < rows.size(); ++r)
    std::copy(rows[r].begin(), rows[r].end(), X.row(r));
  return X;
}

void write_csv(const DataMatrix& X, const std::string& path,
               const std::vector<std::size_t>* labels) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(17);
  for (std::size_t r = 0; r < X.n_rows; ++r) {
    for (std::size_t c = 0; c < X.n_cols; ++c) {
      if (c) out << ',';
      out << X.at(r, c);
    }
    if (labels) out << ',' << (*labels)[r];
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

std::pair<DataMatrix, StandardizationParams> standardize(const DataMatrix& X) {
  if (X.n_rows < 2) throw std::invalid_argument("standardize needs at least 2 rows");
  const std::size_t n = X.n_rows, d = X.n_cols;
  StandardizationParams p;
  p.means.assign(d, 0.0);
  p.stddevs.assign(d, 0.0);

  for (std::size_t c = 0; c < d; ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < n; ++r) s += X.at(r, c);
    p.means[c] = s / static_cast<double>(n);
  }
  for (std::size_t c = 0; c < d; ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      double dv = X.at(r, c) - p.means[c];
      s += dv * dv;
    }
    p.stddevs[c] = std::sqrt(s / static_cast<double>(n));
  }

  DataMatrix Z(n, d);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c)
      Z.at(r, c) = p.stddevs[c] > 0.0 ? (X.at(r, c) - p.means[c]) / p.stddevs[c] : 0.0;
  return {std::move(Z), std::move(p)};
}

DataMatrix destandardize(const DataMatrix& Z, const StandardizationParams& params) {
  if (params.means.size() != Z.n_cols)
    throw std::invalid_argument("params do not match matrix width");
  DataMatrix X(Z.n_rows, Z.n_cols);
  for (std::size_t r = 0; r < Z.n_rows; ++r)
    for (std::size_t c = 0; c < Z.n_cols; ++c)
      X.at(r, c) = Z.at(r, c) * params.stddevs[c] + params.means[c];
  return X;
}

BatchPlan plan_batches(std::size_t n, std::size_t batch_size) {
  if (batch_size == 0 || batch_size > n)
    throw std::invalid_argument("batch size must be in [1, n]");
  return BatchPlan{batch_size, (n + batch_size - 1) / batch_size};
}

double process_in_batches(const DataMatrix& X,
                          const std::function<double(const DataMatrix&)>& func,
                          std::size_t batch_size, bool weight_by_size) {
  const BatchPlan plan = plan_batches(X.n_rows, batch_size);
  double acc = 0.0;
  double weight_acc = 0.0;
  for (std::size_t t = 0; t < plan.n_batches; ++t) {
    const std::size_t begin = t * plan.batch_size;
    const std::size_t end = std::min(begin + plan.batch_size, X.n_rows);
    DataMatrix batch(end - begin, X.n_cols);
    std::copy(X.row(begin), X.row(begin) + (end - begin) * X.n_cols,
              batch.values.begin());
    const double r = func(batch);
    if (weight_by_size) {
      acc += r * static_cast<double>(end - begin);
      weight_acc += static_cast<double>(end - begin);
    } else {
      acc += r;
      weight_acc += 1.0;
    }
  }
  return acc / weight_acc;
}

DataMatrix sample_rows(const DataMatrix& X, std::size_t m, std::uint64_t seed) {
  if (m == 0 || m > X.n_rows) throw std::invalid_argument("sample size must be in [1, n]");

  // partial Fisher-Yates over the index vector, then restore row order so
  // downstream batch slicing stays stable
  std::vector<std::size_t> idx(X.n_rows);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t j = i + rng.index(X.n_rows - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(m);
  std::sort(idx.begin(), idx.end());

  DataMatrix out(m, X.n_cols);
  for (std::size_t r = 0; r < m; ++r)
    std::copy(X.row(idx[r]), X.row(idx[r]) + X.n_cols, out.row(r));
  return out;
}

}  // namespace kselect
