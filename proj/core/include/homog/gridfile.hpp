#pragma once

// Binary coefficient grid files:
//   "PHOM", int32 d, int32 size, int32 dims[d], then size x size complex
//   entries per grid point (row-major grid, row-major entries), float64 re/im
//   interleaved, little endian.

#include "homog/fourier.hpp"

#include <string>
#include <utility>

namespace homog {

void write_grid_file(const std::string& path, const Grid& g, const MatField& f);
/// Throws DataError on a bad header, unequal axis sizes, short data or non-finite values.
std::pair<Grid, MatField> read_grid_file(const std::string& path);

}  // namespace homog
