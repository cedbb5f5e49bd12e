#pragma once

#include "bbvi/common.hpp"

namespace bbvi {

/// Variable layout of a 2-level hierarchy: one global block of dimension
/// `dz` followed by `n_blocks` local blocks of dimension `dy` each, in the
/// order [z; y_1; ...; y_N]. dz = 0 is allowed (no global block).
struct BlockLayout {
  int dz = 0;
  int dy = 1;
  int n_blocks = 1;

  BlockLayout() = default;
  BlockLayout(int dz_, int dy_, int n_blocks_)
      : dz(dz_), dy(dy_), n_blocks(n_blocks_) {
    detail::require(dz >= 0, "BlockLayout: dz must be >= 0");
    detail::require(dy >= 1, "BlockLayout: dy must be >= 1");
    detail::require(n_blocks >= 1, "BlockLayout: N must be >= 1");
  }

  int dim() const { return dz + n_blocks * dy; }
  int local_offset(int n) const { return dz + n * dy; }

  bool operator==(const BlockLayout&) const = default;
};

}  // namespace bbvi
