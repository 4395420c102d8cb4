#include "cayleyheat/integer_kernel.hpp"

#include <cstdlib>
#include <utility>

#include "cayleyheat/errors.hpp"

namespace cayleyheat {

namespace {

long long checked_mul(long long a, long long b) {
  long long r;
  if (__builtin_mul_overflow(a, b, &r)) throw NumericalError("integer_kernel_mod: overflow");
  return r;
}

long long checked_sub(long long a, long long b) {
  long long r;
  if (__builtin_sub_overflow(a, b, &r)) throw NumericalError("integer_kernel_mod: overflow");
  return r;
}

// Column operations on A (rows x cols) mirrored on U (cols x cols).
struct ColumnReducer {
  IntMatrix a;
  IntMatrix u;

  void swap_cols(std::size_t i, std::size_t j) {
    for (auto& row : a) std::swap(row[i], row[j]);
    for (auto& row : u) std::swap(row[i], row[j]);
  }
  // col_j -= q * col_i
  void axpy(std::size_t j, std::size_t i, long long q) {
    for (auto& row : a) row[j] = checked_sub(row[j], checked_mul(q, row[i]));
    for (auto& row : u) row[j] = checked_sub(row[j], checked_mul(q, row[i]));
  }
};

}  // namespace

IntMatrix integer_kernel_mod(const IntMatrix& m, const std::vector<long long>& moduli) {
  const std::size_t rows = moduli.size();
  if (m.size() != rows) throw StructuralError("integer_kernel_mod: row count mismatch");
  const std::size_t d = rows ? m.front().size() : 0;
  const std::size_t cols = d + rows;

  ColumnReducer red;
  red.a.assign(rows, std::vector<long long>(cols, 0));
  for (std::size_t r = 0; r < rows; ++r) {
    if (m[r].size() != d) throw StructuralError("integer_kernel_mod: ragged matrix");
    if (moduli[r] < 1) throw DomainError("integer_kernel_mod: modulus must be >= 1");
    for (std::size_t c = 0; c < d; ++c) red.a[r][c] = m[r][c] % moduli[r];
    red.a[r][d + r] = moduli[r];
  }
  red.u.assign(cols, std::vector<long long>(cols, 0));
  for (std::size_t i = 0; i < cols; ++i) red.u[i][i] = 1;

  std::size_t pivot = 0;
  for (std::size_t r = 0; r < rows && pivot < cols; ++r) {
    // Euclid across columns pivot..cols-1 on row r.
    while (true) {
      std::size_t best = cols;
      for (std::size_t c = pivot; c < cols; ++c) {
        if (red.a[r][c] != 0 &&
            (best == cols || std::llabs(red.a[r][c]) < std::llabs(red.a[r][best]))) {
          best = c;
        }
      }
      if (best == cols) break;  // row already zero beyond pivot
      red.swap_cols(pivot, best);
      bool done = true;
      for (std::size_t c = pivot + 1; c < cols; ++c) {
        if (red.a[r][c] != 0) {
          red.axpy(c, pivot, red.a[r][c] / red.a[r][pivot]);
          if (red.a[r][c] != 0) done = false;
        }
      }
      if (done) {
        ++pivot;
        break;
      }
    }
  }
  if (cols - pivot != d) throw NumericalError("integer_kernel_mod: unexpected rank");

  IntMatrix basis;
  basis.reserve(d);
  for (std::size_t c = pivot; c < cols; ++c) {
    std::vector<long long> v(d);
    for (std::size_t i = 0; i < d; ++i) v[i] = red.u[i][c];
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace cayleyheat
