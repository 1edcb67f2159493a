#pragma once

#include "amsad/matrix.hpp"

#include <cstddef>

namespace amsad::detail {

// Throws Error(fit) for too few rows or all-identical rows, Error(input) for non-finite values.
void check_training_rows(const Matrix& rows, std::size_t min_rows);

}  // namespace amsad::detail
