#pragma once

#include <vector>

#include "bbvi/scale_matrix.hpp"
#include "bbvi/target.hpp"

namespace bbvi {

/// Per-component column indicators delta_{n,j}: delta_{n,j} = 1 iff column j
/// of C restricted to component n's rows is structurally non-zero. Derived
/// jointly from the scale structure and the target's index sets.
class SparsityDescriptor {
 public:
  static SparsityDescriptor build(const ScaleMatrix& c, const Target& target) {
    detail::require(c.dim() == target.dim(), "SparsityDescriptor: dimension mismatch");
    SparsityDescriptor out;
    out.d_ = c.dim();
    const int nc = target.components();
    out.marked_.resize(nc);
    std::vector<char> row_mask(out.d_), col_mask(out.d_);
    for (int n = 0; n < nc; ++n) {
      std::fill(row_mask.begin(), row_mask.end(), 0);
      std::fill(col_mask.begin(), col_mask.end(), 0);
      for (int i : target.component_indices(n)) row_mask[i] = 1;
      c.for_each_entry([&](int i, int j, size_t) {
        if (row_mask[i]) col_mask[j] = 1;
      });
      auto& cols = out.marked_[n];
      for (int j = 0; j < out.d_; ++j)
        if (col_mask[j]) cols.push_back(j);
    }
    return out;
  }

  int dim() const { return d_; }
  int components() const { return static_cast<int>(marked_.size()); }
  std::span<const int> marked_columns(int n) const { return marked_[n]; }
  int column_count(int n) const { return static_cast<int>(marked_[n].size()); }

  int effective_dimensionality() const {
    int best = 0;
    for (const auto& cols : marked_) best = std::max(best, static_cast<int>(cols.size()));
    return best;
  }

 private:
  int d_ = 0;
  std::vector<std::vector<int>> marked_;
};

}  // namespace bbvi
