#pragma once

#include <charconv>
#include <cmath>
#include <cstring>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "bbvi/block_layout.hpp"
#include "bbvi/common.hpp"

namespace bbvi {

enum class ScaleStructure { Diagonal, DenseLowerTriangular, BorderedBlockDiagonal };

inline const char* to_string(ScaleStructure s) {
  switch (s) {
    case ScaleStructure::Diagonal: return "diagonal";
    case ScaleStructure::DenseLowerTriangular: return "dense";
    case ScaleStructure::BorderedBlockDiagonal: return "bordered";
  }
  return "?";
}

/// Lower-triangular scale factor with one of three storage patterns:
/// a diagonal, a packed dense lower triangle, or the bordered
/// block-diagonal pattern of a 2-level hierarchy (global block C_zz,
/// border blocks C_{y_n,z}, local blocks C_{y_n,y_n}).
///
/// Entries live in one flat buffer so that gradient-shaped instances
/// (which may carry arbitrary signs) share the representation. Membership
/// in the feasible domain (positive diagonal) is checked by the operations
/// that require it, not by the container.
class ScaleMatrix {
 public:
  ScaleMatrix() = default;

  static ScaleMatrix diagonal(int d, double diag_value = 1.0) {
    detail::require(d >= 1, "ScaleMatrix: dimension must be positive");
    ScaleMatrix c;
    c.structure_ = ScaleStructure::Diagonal;
    c.d_ = d;
    c.buf_.assign(static_cast<size_t>(d), diag_value);
    return c;
  }

  static ScaleMatrix dense_lower(int d, double diag_value = 1.0) {
    detail::require(d >= 1, "ScaleMatrix: dimension must be positive");
    ScaleMatrix c;
    c.structure_ = ScaleStructure::DenseLowerTriangular;
    c.d_ = d;
    c.buf_.assign(static_cast<size_t>(d) * (d + 1) / 2, 0.0);
    for (int i = 0; i < d; ++i) c.buf_[tri_pos(i, i)] = diag_value;
    return c;
  }

  static ScaleMatrix bordered(const BlockLayout& layout, double diag_value = 1.0) {
    ScaleMatrix c;
    c.structure_ = ScaleStructure::BorderedBlockDiagonal;
    c.layout_ = layout;
    c.d_ = layout.dim();
    const size_t zz = static_cast<size_t>(layout.dz) * (layout.dz + 1) / 2;
    const size_t stride = block_stride(layout);
    c.buf_.assign(zz + static_cast<size_t>(layout.n_blocks) * stride, 0.0);
    for (int i = 0; i < layout.dz; ++i) c.buf_[tri_pos(i, i)] = diag_value;
    for (int n = 0; n < layout.n_blocks; ++n)
      for (int r = 0; r < layout.dy; ++r)
        c.buf_[c.yy_pos(n, r, r)] = diag_value;
    return c;
  }

  static ScaleMatrix zeros_like(const ScaleMatrix& other) {
    ScaleMatrix c = other;
    std::fill(c.buf_.begin(), c.buf_.end(), 0.0);
    return c;
  }

  ScaleStructure structure() const { return structure_; }
  int dim() const { return d_; }
  const BlockLayout& layout() const { return layout_; }
  bool same_shape(const ScaleMatrix& o) const {
    return structure_ == o.structure_ && d_ == o.d_ &&
           (structure_ != ScaleStructure::BorderedBlockDiagonal || layout_ == o.layout_);
  }

  std::span<double> values() { return buf_; }
  std::span<const double> values() const { return buf_; }
  size_t stored_count() const { return buf_.size(); }

  // Enumerates stored positions as f(row, col, buffer_pos). Row-major within
  // each structural piece; used by oracles, masking, and dense expansion.
  template <class F>
  void for_each_entry(F&& f) const {
    switch (structure_) {
      case ScaleStructure::Diagonal:
        for (int i = 0; i < d_; ++i) f(i, i, static_cast<size_t>(i));
        break;
      case ScaleStructure::DenseLowerTriangular:
        for (int i = 0; i < d_; ++i)
          for (int j = 0; j <= i; ++j) f(i, j, dense_pos(i, j));
        break;
      case ScaleStructure::BorderedBlockDiagonal: {
        for (int i = 0; i < layout_.dz; ++i)
          for (int j = 0; j <= i; ++j) f(i, j, tri_pos(i, j));
        for (int n = 0; n < layout_.n_blocks; ++n) {
          const int row0 = layout_.local_offset(n);
          for (int r = 0; r < layout_.dy; ++r) {
            for (int j = 0; j < layout_.dz; ++j) f(row0 + r, j, border_pos(n, r, j));
            for (int c = 0; c <= r; ++c) f(row0 + r, row0 + c, yy_pos(n, r, c));
          }
        }
        break;
      }
    }
  }

  // Diagonal positions as f(coord, buffer_pos).
  template <class F>
  void for_each_diagonal(F&& f) const {
    switch (structure_) {
      case ScaleStructure::Diagonal:
        for (int i = 0; i < d_; ++i) f(i, static_cast<size_t>(i));
        break;
      case ScaleStructure::DenseLowerTriangular:
        for (int i = 0; i < d_; ++i) f(i, dense_pos(i, i));
        break;
      case ScaleStructure::BorderedBlockDiagonal:
        for (int i = 0; i < layout_.dz; ++i) f(i, tri_pos(i, i));
        for (int n = 0; n < layout_.n_blocks; ++n)
          for (int r = 0; r < layout_.dy; ++r)
            f(layout_.local_offset(n) + r, yy_pos(n, r, r));
        break;
    }
  }

  double diagonal_entry(int i) const {
    switch (structure_) {
      case ScaleStructure::Diagonal: return buf_[i];
      case ScaleStructure::DenseLowerTriangular: return buf_[dense_pos(i, i)];
      case ScaleStructure::BorderedBlockDiagonal:
        if (i < layout_.dz) return buf_[tri_pos(i, i)];
        const int n = (i - layout_.dz) / layout_.dy;
        const int r = (i - layout_.dz) % layout_.dy;
        return buf_[yy_pos(n, r, r)];
    }
    return 0.0;
  }

  bool positive_diagonal() const {
    bool ok = true;
    for_each_diagonal([&](int, size_t p) { ok = ok && buf_[p] > 0.0; });
    return ok;
  }

  /// Cu, exploiting the storage pattern; cost is linear in stored entries.
  void matvec(const double* u, double* out) const {
    switch (structure_) {
      case ScaleStructure::Diagonal:
        for (int i = 0; i < d_; ++i) out[i] = buf_[i] * u[i];
        break;
      case ScaleStructure::DenseLowerTriangular: {
        const double* row = buf_.data();
        for (int i = 0; i < d_; ++i) {
          double acc = 0.0;
          for (int j = 0; j <= i; ++j) acc += row[j] * u[j];
          out[i] = acc;
          row += i + 1;
        }
        break;
      }
      case ScaleStructure::BorderedBlockDiagonal: {
        const int dz = layout_.dz, dy = layout_.dy;
        const double* row = buf_.data();
        for (int i = 0; i < dz; ++i) {
          double acc = 0.0;
          for (int j = 0; j <= i; ++j) acc += row[j] * u[j];
          out[i] = acc;
          row += i + 1;
        }
        for (int n = 0; n < layout_.n_blocks; ++n) {
          const int o = layout_.local_offset(n);
          const double* border = buf_.data() + border_pos(n, 0, 0);
          const double* yy = buf_.data() + yy_base(n);
          for (int r = 0; r < dy; ++r) {
            double acc = 0.0;
            for (int j = 0; j < dz; ++j) acc += border[r * dz + j] * u[j];
            const double* yrow = yy + tri_pos(r, 0);
            for (int c = 0; c <= r; ++c) acc += yrow[c] * u[o + c];
            out[o + r] = acc;
          }
        }
        break;
      }
    }
  }

  Eigen::VectorXd matvec(const Eigen::VectorXd& u) const {
    detail::require(u.size() == d_, "matvec: dimension mismatch");
    Eigen::VectorXd out(d_);
    matvec(u.data(), out.data());
    return out;
  }

  /// V = C U for U, V stored row-major d x m (sample index fastest).
  void matvec_multi(const double* U, int m, double* V) const {
    switch (m) {
      case 1: matvec_multi_impl<1>(U, 1, V); break;
      case 4: matvec_multi_impl<4>(U, 4, V); break;
      case 8: matvec_multi_impl<8>(U, 8, V); break;
      case 16: matvec_multi_impl<16>(U, 16, V); break;
      default: matvec_multi_impl<-1>(U, m, V); break;
    }
  }

  /// acc += w * g u^T restricted to stored positions.
  void add_outer(const double* g, const double* u, double w = 1.0) {
    switch (structure_) {
      case ScaleStructure::Diagonal:
        for (int i = 0; i < d_; ++i) buf_[i] += w * g[i] * u[i];
        break;
      case ScaleStructure::DenseLowerTriangular: {
        double* row = buf_.data();
        for (int i = 0; i < d_; ++i) {
          const double gi = w * g[i];
          for (int j = 0; j <= i; ++j) row[j] += gi * u[j];
          row += i + 1;
        }
        break;
      }
      case ScaleStructure::BorderedBlockDiagonal: {
        const int dz = layout_.dz, dy = layout_.dy;
        double* row = buf_.data();
        for (int i = 0; i < dz; ++i) {
          const double gi = w * g[i];
          for (int j = 0; j <= i; ++j) row[j] += gi * u[j];
          row += i + 1;
        }
        for (int n = 0; n < layout_.n_blocks; ++n) {
          const int o = layout_.local_offset(n);
          double* border = buf_.data() + border_pos(n, 0, 0);
          double* yy = buf_.data() + yy_base(n);
          for (int r = 0; r < dy; ++r) {
            const double gi = w * g[o + r];
            for (int j = 0; j < dz; ++j) border[r * dz + j] += gi * u[j];
            double* yrow = yy + tri_pos(r, 0);
            for (int c = 0; c <= r; ++c) yrow[c] += gi * u[o + c];
          }
        }
        break;
      }
    }
  }

  void add_outer(const Eigen::VectorXd& g, const Eigen::VectorXd& u, double w = 1.0) {
    detail::require(g.size() == d_ && u.size() == d_, "add_outer: dimension mismatch");
    add_outer(g.data(), u.data(), w);
  }

  /// acc += w * sum_m G[:,m] U[:,m]^T restricted to stored positions,
  /// with G, U row-major d x m.
  void add_outer_multi(const double* G, const double* U, int m, double w) {
    switch (m) {
      case 1: add_outer_multi_impl<1>(G, U, 1, w); break;
      case 4: add_outer_multi_impl<4>(G, U, 4, w); break;
      case 8: add_outer_multi_impl<8>(G, U, 8, w); break;
      case 16: add_outer_multi_impl<16>(G, U, 16, w); break;
      default: add_outer_multi_impl<-1>(G, U, m, w); break;
    }
  }

  Eigen::MatrixXd to_dense() const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d_, d_);
    for_each_entry([&](int i, int j, size_t p) { out(i, j) = buf_[p]; });
    return out;
  }

  /// sum_i log C_ii; throws on a non-positive diagonal (outside the domain).
  double log_det_diag() const {
    double acc = 0.0;
    bool ok = true;
    for_each_diagonal([&](int, size_t p) {
      ok = ok && buf_[p] > 0.0;
      acc += std::log(buf_[p]);
    });
    detail::require_domain(ok, "log_det_diag: non-positive diagonal entry");
    return acc;
  }

  double frobenius_norm_sq() const {
    double acc = 0.0;
    for (double v : buf_) acc += v * v;
    return acc;
  }

  /// Frobenius norm over entries whose row index is in a component's set.
  double frobenius_norm_sq_rows(std::span<const int> rows) const {
    std::vector<char> mask(static_cast<size_t>(d_), 0);
    for (int r : rows) mask[r] = 1;
    double acc = 0.0;
    for_each_entry([&](int i, int, size_t p) {
      if (mask[i]) acc += buf_[p] * buf_[p];
    });
    return acc;
  }

  /// Entropic proximal map: each diagonal entry c is replaced by
  /// (c + sqrt(c^2 + 4 gamma)) / 2, the positive root of c'(c' - c) = gamma.
  /// Defined for any real c, so plain-SGD overshoots are recoverable; the
  /// conjugate form for c <= 0 avoids the cancellation that would otherwise
  /// round the result to zero for large negative diagonals.
  void prox_diagonal_inplace(double gamma) {
    detail::require(gamma > 0.0, "prox_diagonal: gamma must be positive");
    for_each_diagonal([&](int, size_t p) {
      const double c = buf_[p];
      const double root = std::sqrt(c * c + 4.0 * gamma);
      buf_[p] = c > 0.0 ? 0.5 * (c + root) : 2.0 * gamma / (root - c);
    });
  }

  ScaleMatrix prox_diagonal(double gamma) const {
    ScaleMatrix out = *this;
    out.prox_diagonal_inplace(gamma);
    return out;
  }

  /// Flat decimal-text row: structure tag, shape, then packed entries.
  std::string to_csv_row() const {
    std::ostringstream os;
    os << to_string(structure_);
    if (structure_ == ScaleStructure::BorderedBlockDiagonal)
      os << ',' << layout_.dz << ',' << layout_.dy << ',' << layout_.n_blocks;
    else
      os << ',' << d_;
    char tmp[32];
    for (double v : buf_) {
      auto [end, ec] = std::to_chars(tmp, tmp + sizeof(tmp), v);
      os << ',' << std::string_view(tmp, end - tmp);
    }
    return os.str();
  }

  static ScaleMatrix from_csv_row(const std::string& row) {
    std::istringstream is(row);
    std::string tok;
    auto next = [&]() {
      detail::require(static_cast<bool>(std::getline(is, tok, ',')),
                      "ScaleMatrix csv: truncated row");
      return tok;
    };
    const std::string tag = next();
    ScaleMatrix c;
    if (tag == "diagonal") {
      c = diagonal(std::stoi(next()));
    } else if (tag == "dense") {
      c = dense_lower(std::stoi(next()));
    } else if (tag == "bordered") {
      const int dz = std::stoi(next());
      const int dy = std::stoi(next());
      const int nb = std::stoi(next());
      c = bordered(BlockLayout(dz, dy, nb));
    } else {
      throw std::invalid_argument("ScaleMatrix csv: unknown tag " + tag);
    }
    for (double& v : c.buf_) v = std::stod(next());
    return c;
  }

  // Buffer positions of the bordered pieces; exposed for kernels that walk
  // the pattern directly.
  static size_t tri_pos(int i, int j) {
    return static_cast<size_t>(i) * (i + 1) / 2 + j;
  }
  size_t dense_pos(int i, int j) const { return tri_pos(i, j); }
  static size_t block_stride(const BlockLayout& l) {
    return static_cast<size_t>(l.dy) * l.dz + static_cast<size_t>(l.dy) * (l.dy + 1) / 2;
  }
  size_t border_pos(int n, int r, int j) const {
    return zz_size() + n * block_stride(layout_) + static_cast<size_t>(r) * layout_.dz + j;
  }
  size_t yy_base(int n) const {
    return zz_size() + n * block_stride(layout_) + static_cast<size_t>(layout_.dy) * layout_.dz;
  }
  size_t yy_pos(int n, int r, int c) const { return yy_base(n) + tri_pos(r, c); }
  size_t zz_size() const { return static_cast<size_t>(layout_.dz) * (layout_.dz + 1) / 2; }

 private:
  template <int MF>
  void matvec_multi_impl(const double* U, int m_run, double* V) const {
    const int m = MF > 0 ? MF : m_run;
    switch (structure_) {
      case ScaleStructure::Diagonal:
        for (int i = 0; i < d_; ++i) {
          const double c = buf_[i];
          for (int t = 0; t < m; ++t) V[i * m + t] = c * U[i * m + t];
        }
        break;
      case ScaleStructure::DenseLowerTriangular: {
        const double* row = buf_.data();
        for (int i = 0; i < d_; ++i) {
          tri_row_matvec<MF>(row, i + 1, U, m, V + static_cast<size_t>(i) * m);
          row += i + 1;
        }
        break;
      }
      case ScaleStructure::BorderedBlockDiagonal: {
        const int dz = layout_.dz, dy = layout_.dy;
        const double* row = buf_.data();
        for (int i = 0; i < dz; ++i) {
          tri_row_matvec<MF>(row, i + 1, U, m, V + static_cast<size_t>(i) * m);
          row += i + 1;
        }
        for (int n = 0; n < layout_.n_blocks; ++n) {
          const int o = layout_.local_offset(n);
          const double* border = buf_.data() + border_pos(n, 0, 0);
          const double* yy = buf_.data() + yy_base(n);
          for (int r = 0; r < dy; ++r) {
            double* vrow = V + static_cast<size_t>(o + r) * m;
            tri_row_matvec<MF>(border + static_cast<size_t>(r) * dz, dz, U, m, vrow);
            const double* yrow = yy + tri_pos(r, 0);
            for (int c0 = 0; c0 <= r; ++c0) {
              const double c = yrow[c0];
              const double* urow = U + static_cast<size_t>(o + c0) * m;
              for (int t = 0; t < m; ++t) vrow[t] += c * urow[t];
            }
          }
        }
        break;
      }
    }
  }

  // Register accumulators, four independent lanes over the row index: one
  // fused-multiply-add chain per row would otherwise serialize on latency.
  template <int MF>
  static void tri_row_matvec(const double* row, int len, const double* U, int m_run,
                             double* out) {
    if constexpr (MF > 0) {
      double a0[MF] = {}, a1[MF] = {}, a2[MF] = {}, a3[MF] = {};
      int j = 0;
      for (; j + 4 <= len; j += 4) {
        const double c0 = row[j], c1 = row[j + 1], c2 = row[j + 2], c3 = row[j + 3];
        const double* u = U + static_cast<size_t>(j) * MF;
        for (int t = 0; t < MF; ++t) a0[t] += c0 * u[t];
        for (int t = 0; t < MF; ++t) a1[t] += c1 * u[MF + t];
        for (int t = 0; t < MF; ++t) a2[t] += c2 * u[2 * MF + t];
        for (int t = 0; t < MF; ++t) a3[t] += c3 * u[3 * MF + t];
      }
      for (; j < len; ++j) {
        const double c = row[j];
        const double* u = U + static_cast<size_t>(j) * MF;
        for (int t = 0; t < MF; ++t) a0[t] += c * u[t];
      }
      for (int t = 0; t < MF; ++t) out[t] = (a0[t] + a1[t]) + (a2[t] + a3[t]);
    } else {
      for (int t = 0; t < m_run; ++t) out[t] = 0.0;
      for (int j = 0; j < len; ++j) {
        const double c = row[j];
        const double* urow = U + static_cast<size_t>(j) * m_run;
        for (int t = 0; t < m_run; ++t) out[t] += c * urow[t];
      }
    }
  }

  template <int MF>
  void add_outer_multi_impl(const double* G, const double* U, int m_run, double w) {
    const int m = MF > 0 ? MF : m_run;
    switch (structure_) {
      case ScaleStructure::Diagonal:
        for (int i = 0; i < d_; ++i) {
          double acc = 0.0;
          for (int t = 0; t < m; ++t) acc += G[i * m + t] * U[i * m + t];
          buf_[i] += w * acc;
        }
        break;
      case ScaleStructure::DenseLowerTriangular: {
        double* row = buf_.data();
        for (int i = 0; i < d_; ++i) {
          tri_row_outer<MF>(row, i + 1, G + static_cast<size_t>(i) * m, U, m, w);
          row += i + 1;
        }
        break;
      }
      case ScaleStructure::BorderedBlockDiagonal: {
        const int dz = layout_.dz, dy = layout_.dy;
        double* row = buf_.data();
        for (int i = 0; i < dz; ++i) {
          tri_row_outer<MF>(row, i + 1, G + static_cast<size_t>(i) * m, U, m, w);
          row += i + 1;
        }
        for (int n = 0; n < layout_.n_blocks; ++n) {
          const int o = layout_.local_offset(n);
          double* border = buf_.data() + border_pos(n, 0, 0);
          double* yy = buf_.data() + yy_base(n);
          for (int r = 0; r < dy; ++r) {
            const double* grow = G + static_cast<size_t>(o + r) * m;
            tri_row_outer<MF>(border + static_cast<size_t>(r) * dz, dz, grow, U, m, w);
            tri_row_outer<MF>(yy + tri_pos(r, 0), r + 1, grow,
                              U + static_cast<size_t>(o) * m, m, w);
          }
        }
        break;
      }
    }
  }

  template <int MF>
  static void tri_row_outer(double* row, int len, const double* grow, const double* U,
                            int m_run, double w) {
    if constexpr (MF > 0) {
      double g[MF];
      for (int t = 0; t < MF; ++t) g[t] = w * grow[t];
      for (int j = 0; j < len; ++j) {
        double acc = 0.0;
        const double* urow = U + static_cast<size_t>(j) * MF;
        for (int t = 0; t < MF; ++t) acc += g[t] * urow[t];
        row[j] += acc;
      }
    } else {
      for (int j = 0; j < len; ++j) {
        double acc = 0.0;
        const double* urow = U + static_cast<size_t>(j) * m_run;
        for (int t = 0; t < m_run; ++t) acc += grow[t] * urow[t];
        row[j] += w * acc;
      }
    }
  }

  ScaleStructure structure_ = ScaleStructure::Diagonal;
  int d_ = 0;
  BlockLayout layout_;
  std::vector<double> buf_;
};

}  // namespace bbvi
