#pragma once

#include <atomic>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "splineflow/errors.hpp"
#include "splineflow/flow.hpp"
#include "splineflow/spline.hpp"

namespace splineflow {

// Global floating-point-operation counter. Kernels bump it in bulk
// (one atomic add per product) with the exact count they perform, so the
// totals are reproducible to the last operation even under threading.
namespace flops {

inline std::atomic<std::uint64_t>& counter() {
  static std::atomic<std::uint64_t> c{0};
  return c;
}

inline void add(std::uint64_t n) { counter().fetch_add(n, std::memory_order_relaxed); }
inline void reset() { counter().store(0, std::memory_order_relaxed); }
inline std::uint64_t count() { return counter().load(std::memory_order_relaxed); }

}  // namespace flops

enum class GStorage { constant_block, csr, dense };

inline const char* storage_name(GStorage s) {
  switch (s) {
    case GStorage::constant_block: return "constant-block";
    case GStorage::csr: return "csr";
    default: return "dense";
  }
}

// The 4M x 5M block-diagonal operator: M copies of T along the diagonal.
// Three interchangeable representations of the same operator:
//   constant_block - T stored once, applied blockwise (the execution path);
//   csr            - compressed sparse rows, 11 nonzeros per block;
//   dense          - the full matrix, zeros included (oracle/testing only).
class BlockSparseG {
public:
  static constexpr std::uint64_t kNnzPerBlock = TMatrix::kNnz;

  static BlockSparseG assemble(std::size_t M, GStorage storage) {
    if (M == 0) throw std::invalid_argument("block count M must be at least 1");
    BlockSparseG g;
    g.block_count_ = M;
    g.storage_ = storage;
    g.t_ = t_matrix();
    switch (storage) {
      case GStorage::constant_block:
        break;  // nothing beyond T itself
      case GStorage::csr:
        g.build_csr();
        break;
      case GStorage::dense:
        if (20 * M * M * sizeof(double) > (std::size_t{1} << 31))
          throw std::invalid_argument("dense storage refused for M = " + std::to_string(M) +
                                      " (would exceed 2 GiB); use csr or constant-block");
        g.build_dense();
        break;
    }
    return g;
  }

  std::size_t block_count() const { return block_count_; }
  std::size_t rows() const { return 4 * block_count_; }
  std::size_t cols() const { return 5 * block_count_; }
  GStorage storage() const { return storage_; }
  std::uint64_t nnz() const { return kNnzPerBlock * block_count_; }
  double density() const {
    return static_cast<double>(nnz()) / (static_cast<double>(rows()) * static_cast<double>(cols()));
  }

  // y = G x. Counts 2*nnz flops for the sparse representations and
  // 2*(4M)*(5M) for the dense one.
  std::vector<double> apply(std::span<const double> x) const {
    if (x.size() != cols())
      throw ShapeError("operand length " + std::to_string(x.size()) + " does not match 5M = " +
                       std::to_string(cols()));
    std::vector<double> y(rows());
    switch (storage_) {
      case GStorage::constant_block: apply_constant_block(x, y); break;
      case GStorage::csr: apply_csr(x, y); break;
      case GStorage::dense: apply_dense(x, y); break;
    }
    return y;
  }

  // Applies only block rows [block_begin, block_end), writing y rows in place.
  // Blocks are independent, so shards can run concurrently.
  void apply_blocks(std::span<const double> x, std::span<double> y, std::size_t block_begin,
                    std::size_t block_end) const {
    for (std::size_t blk = block_begin; blk < block_end; ++blk) {
      const double* xb = x.data() + 5 * blk;
      double* yb = y.data() + 4 * blk;
      yb[0] = detail::t_row_apply(0, xb[0], xb[1], xb[2], xb[3], xb[4]);
      yb[1] = detail::t_row_apply(1, xb[0], xb[1], xb[2], xb[3], xb[4]);
      yb[2] = detail::t_row_apply(2, xb[0], xb[1], xb[2], xb[3], xb[4]);
      yb[3] = detail::t_row_apply(3, xb[0], xb[1], xb[2], xb[3], xb[4]);
    }
    flops::add(2 * kNnzPerBlock * (block_end - block_begin));
  }

private:
  void apply_constant_block(std::span<const double> x, std::vector<double>& y) const {
    apply_blocks(x, y, 0, block_count_);
  }

  void apply_csr(std::span<const double> x, std::vector<double>& y) const {
    for (std::size_t r = 0; r < rows(); ++r) {
      double acc = 0.0;
      for (std::uint64_t i = row_offsets_[r]; i < row_offsets_[r + 1]; ++i)
        acc += values_[i] * x[col_indices_[i]];
      y[r] = acc;
    }
    flops::add(2 * nnz());
  }

  void apply_dense(std::span<const double> x, std::vector<double>& y) const {
    const std::size_t c = cols();
    for (std::size_t r = 0; r < rows(); ++r) {
      double acc = 0.0;
      const double* row = dense_.data() + r * c;
      for (std::size_t j = 0; j < c; ++j) acc += row[j] * x[j];
      y[r] = acc;
    }
    flops::add(2 * static_cast<std::uint64_t>(rows()) * cols());
  }

  void build_csr() {
    row_offsets_.assign(rows() + 1, 0);
    values_.reserve(nnz());
    col_indices_.reserve(nnz());
    std::uint64_t at = 0;
    for (std::size_t blk = 0; blk < block_count_; ++blk) {
      for (int r = 0; r < 4; ++r) {
        row_offsets_[4 * blk + r] = at;
        for (int c = 0; c < 5; ++c) {
          const double v = t_.entries[r][c];
          if (v != 0.0) {
            values_.push_back(v);
            col_indices_.push_back(static_cast<std::uint32_t>(5 * blk + c));
            ++at;
          }
        }
      }
    }
    row_offsets_[rows()] = at;
  }

  void build_dense() {
    dense_.assign(rows() * cols(), 0.0);
    for (std::size_t blk = 0; blk < block_count_; ++blk)
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 5; ++c)
          dense_[(4 * blk + r) * cols() + (5 * blk + c)] = t_.entries[r][c];
  }

  std::size_t block_count_ = 0;
  GStorage storage_ = GStorage::constant_block;
  TMatrix t_{};
  // csr arrays: 64-bit row offsets, 32-bit column indices
  std::vector<std::uint64_t> row_offsets_;
  std::vector<std::uint32_t> col_indices_;
  std::vector<double> values_;
  // dense matrix, row-major
  std::vector<double> dense_;
};

inline BlockSparseG assemble_g(std::size_t M, GStorage storage = GStorage::constant_block) {
  return BlockSparseG::assemble(M, storage);
}

// The stacked right-hand side for one (group, segment, dimension): M
// consecutive 5-tuples (P_{k+1}, P_k, B_i, C_i, e_i) in trajectory order.
struct StackedInput {
  std::vector<double> values;  // length 5M
  std::size_t M = 0;
  std::size_t group_index = 0;
  int segment_k = 1;
  int dim = 0;
  Convention convention = Convention::bezier_A;
};

using FlowGroups = std::vector<std::vector<GroupOfFour>>;  // [trajectory][group]

// Stack the per-trajectory input tuples for one product. Trajectories must
// all carry the requested group.
inline StackedInput assemble_b(const FlowGroups& groups, std::size_t group_index, int k,
                               Convention conv, int dim) {
  if (k < 1 || k > 3) throw std::invalid_argument("segment index must be 1, 2 or 3");
  if (groups.empty()) throw ShapeError("flow has no trajectories");
  StackedInput b;
  b.M = groups.size();
  b.group_index = group_index;
  b.segment_k = k;
  b.dim = dim;
  b.convention = conv;
  b.values.reserve(5 * b.M);
  const std::size_t n = groups[0].size();
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (groups[i].size() != n || group_index >= n)
      throw ShapeError("trajectory " + std::to_string(i) + " has no group " +
                       std::to_string(group_index));
    const GroupOfFour& g = groups[i][group_index];
    b.values.push_back(g.points[k][dim]);
    b.values.push_back(g.points[k - 1][dim]);
    b.values.push_back(g.bezier.B[dim]);
    b.values.push_back(g.bezier.C[dim]);
    b.values.push_back(detail::fifth_element(g, conv, dim));
  }
  return b;
}

// M x 4 coefficient rows (a_i, b_i, c_i, d_i) for one segment index and one
// dimension, one row per trajectory.
struct CoeffPlane {
  std::size_t M = 0;
  std::vector<std::array<double, 4>> rows;
  std::size_t group_index = 0;
  int segment_k = 1;
  int dim = 0;
};

// coeff = G b, reshaped to M x 4.
inline CoeffPlane batched_coeffs(const BlockSparseG& g, const StackedInput& b) {
  if (g.block_count() != b.M)
    throw ShapeError("operator has " + std::to_string(g.block_count()) + " blocks but input has " +
                     std::to_string(b.M));
  const std::vector<double> y = g.apply(b.values);
  CoeffPlane plane;
  plane.M = b.M;
  plane.group_index = b.group_index;
  plane.segment_k = b.segment_k;
  plane.dim = b.dim;
  plane.rows.resize(b.M);
  for (std::size_t i = 0; i < b.M; ++i)
    plane.rows[i] = {y[4 * i], y[4 * i + 1], y[4 * i + 2], y[4 * i + 3]};
  return plane;
}

// Exact byte counts for each representation, with the widths actually used.
struct MemoryReport {
  std::uint64_t dense_bytes = 0;           // 20 M^2 values
  std::uint64_t csr_bytes = 0;             // values + column indices + row offsets
  std::uint64_t constant_block_bytes = 0;  // 11 values + block count
  int value_width = sizeof(double);
  int col_index_width = sizeof(std::uint32_t);
  int row_offset_width = sizeof(std::uint64_t);
};

inline MemoryReport memory_report(std::size_t M) {
  if (M == 0) throw std::invalid_argument("block count M must be at least 1");
  MemoryReport r;
  const std::uint64_t m = M;
  const std::uint64_t nnz = BlockSparseG::kNnzPerBlock * m;
  r.dense_bytes = 20 * m * m * r.value_width;
  r.csr_bytes = nnz * (r.value_width + r.col_index_width) + (4 * m + 1) * r.row_offset_width;
  r.constant_block_bytes = BlockSparseG::kNnzPerBlock * r.value_width + sizeof(std::uint64_t);
  return r;
}

}  // namespace splineflow
