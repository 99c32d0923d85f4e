#include "homog/gridfile.hpp"

#include "homog/errors.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace homog {

void write_grid_file(const std::string& path, const Grid& g, const MatField& f) {
  if (f.rows != f.cols) throw Error(ErrorCode::InvalidInput, "grid files hold square fields");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::DataError, "cannot open " + path);
  out.write("PHOM", 4);
  const auto put = [&](std::int32_t v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); };
  put(g.d);
  put(static_cast<std::int32_t>(f.rows));
  for (int i = 0; i < g.d; ++i) put(g.M);
  for (Index k = 0; k < g.size(); ++k)
    for (Index i = 0; i < f.rows; ++i)
      for (Index j = 0; j < f.cols; ++j) {
        const cplx v = f.at(i, j)(k);
        const double re = v.real(), im = v.imag();
        out.write(reinterpret_cast<const char*>(&re), sizeof re);
        out.write(reinterpret_cast<const char*>(&im), sizeof im);
      }
  if (!out) throw Error(ErrorCode::DataError, "write failed for " + path);
}

std::pair<Grid, MatField> read_grid_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::DataError, "cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "PHOM", 4) != 0) throw Error(ErrorCode::DataError, path + ": bad magic");
  const auto get = [&]() {
    std::int32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw Error(ErrorCode::DataError, path + ": truncated header");
    return v;
  };
  const int d = get();
  const int size = get();
  if (d < 1 || d > 3 || size < 1 || size > 64) throw Error(ErrorCode::DataError, path + ": bad header");
  Grid g;
  g.d = d;
  g.M = get();
  for (int i = 1; i < d; ++i)
    if (get() != g.M) throw Error(ErrorCode::DataError, path + ": axes must have equal sizes");
  if (g.M < 1 || g.M > 4096) throw Error(ErrorCode::DataError, path + ": bad grid size");
  MatField f(size, size, g.size());
  for (Index k = 0; k < g.size(); ++k)
    for (Index i = 0; i < size; ++i)
      for (Index j = 0; j < size; ++j) {
        double re = 0, im = 0;
        in.read(reinterpret_cast<char*>(&re), sizeof re);
        in.read(reinterpret_cast<char*>(&im), sizeof im);
        if (!in) throw Error(ErrorCode::DataError, path + ": truncated data");
        if (!std::isfinite(re) || !std::isfinite(im)) throw Error(ErrorCode::DataError, path + ": non-finite value");
        f.at(i, j)(k) = cplx(re, im);
      }
  return {g, f};
}

}  // namespace homog
