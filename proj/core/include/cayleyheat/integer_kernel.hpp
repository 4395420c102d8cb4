#pragma once

#include <vector>

namespace cayleyheat {

using IntMatrix = std::vector<std::vector<long long>>;  // row-major

/// Basis of {c in Z^d : M c = 0 (mod moduli[r]) for every row r}, found by
/// column-style Hermite reduction of [M | diag(moduli)] with a tracked
/// unimodular transform. Returns d column vectors (each of length d).
/// Throws NumericalError on int64 overflow.
IntMatrix integer_kernel_mod(const IntMatrix& m, const std::vector<long long>& moduli);

}  // namespace cayleyheat
