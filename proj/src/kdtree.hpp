#pragma once

// Exact k-nearest-neighbour distances over a fixed row-major point set.
// Dim > 0 fixes the dimension at compile time; Dim = 0 reads it at run time.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

namespace infosense::detail {

template <std::size_t Dim>
class KdTree {
 public:
  KdTree(std::span<const double> points, std::size_t dim, std::size_t leaf_size = 32)
      : dim_(Dim > 0 ? Dim : dim), leaf_size_(leaf_size) {
    const std::size_t n = points.size() / dim_;
    std::vector<std::size_t> index(n);
    std::iota(index.begin(), index.end(), std::size_t{0});
    nodes_.reserve(4 * n / leaf_size + 1);
    build(points, index, 0, n);
    packed_.resize(points.size());
    original_ = std::move(index);
    for (std::size_t i = 0; i < n; ++i) {
      std::copy_n(points.data() + original_[i] * dim_, dim_, packed_.data() + i * dim_);
    }
  }

  /// Squared distance from every point to its k-th nearest other point, in
  /// the input order.
  std::vector<double> kth_neighbor_sq_distances(std::size_t k) const {
    const std::size_t n = original_.size();
    std::vector<double> out(n);
    Search s;
    s.k = k;
    s.best.resize(k);
    s.offset.assign(dim_, 0.0);
    // leaf order keeps successive searches cache-local
    for (std::size_t i = 0; i < n; ++i) {
      s.q = packed_.data() + i * dim_;
      s.self = i;
      std::fill(s.best.begin(), s.best.end(), std::numeric_limits<double>::infinity());
      search(0, s, 0.0);
      out[original_[i]] = s.best.back();
    }
    return out;
  }

 private:
  struct Node {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t split_dim = 0;
    double split = 0.0;
    std::size_t left = 0;
    std::size_t right = 0;
    bool leaf = true;
  };

  struct Search {
    const double* q = nullptr;
    std::size_t self = 0;
    std::size_t k = 0;
    std::vector<double> best;    // ascending, size k
    std::vector<double> offset;  // per-axis distance to the current cell
  };

  std::size_t dim() const {
    if constexpr (Dim > 0) return Dim;
    return dim_;
  }

  std::size_t build(std::span<const double> points, std::vector<std::size_t>& index,
                    std::size_t begin, std::size_t end) {
    const std::size_t id = nodes_.size();
    nodes_.push_back(Node{begin, end});
    if (end - begin <= leaf_size_) return id;
    auto coord = [&](std::size_t i, std::size_t d) { return points[i * dim() + d]; };

    std::size_t best_dim = 0;
    double best_spread = -1.0;
    for (std::size_t d = 0; d < dim(); ++d) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (std::size_t i = begin; i < end; ++i) {
        const double v = coord(index[i], d);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (hi - lo > best_spread) {
        best_spread = hi - lo;
        best_dim = d;
      }
    }
    if (best_spread <= 0.0) return id;

    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(index.begin() + static_cast<std::ptrdiff_t>(begin),
                     index.begin() + static_cast<std::ptrdiff_t>(mid),
                     index.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](std::size_t a, std::size_t b) { return coord(a, best_dim) < coord(b, best_dim); });
    const double split = coord(index[mid], best_dim);
    const std::size_t left = build(points, index, begin, mid);
    const std::size_t right = build(points, index, mid, end);
    Node& node = nodes_[id];
    node.leaf = false;
    node.split_dim = best_dim;
    node.split = split;
    node.left = left;
    node.right = right;
    return id;
  }

  // rd is the squared distance from the query to the node's cell.
  void search(std::size_t node_id, Search& s, double rd) const {
    const Node& node = nodes_[node_id];
    if (node.leaf) {
      for (std::size_t i = node.begin; i < node.end; ++i) {
        if (i == s.self) continue;
        const double* p = packed_.data() + i * dim();
        double dist2 = 0.0;
        for (std::size_t d = 0; d < dim(); ++d) {
          const double diff = p[d] - s.q[d];
          dist2 += diff * diff;
        }
        if (dist2 < s.best.back()) {
          std::size_t j = s.k - 1;
          while (j > 0 && s.best[j - 1] > dist2) {
            s.best[j] = s.best[j - 1];
            --j;
          }
          s.best[j] = dist2;
        }
      }
      return;
    }
    const double delta = s.q[node.split_dim] - node.split;
    const std::size_t near = delta < 0.0 ? node.left : node.right;
    const std::size_t far = delta < 0.0 ? node.right : node.left;
    search(near, s, rd);
    const double old = s.offset[node.split_dim];
    const double far_rd = rd - old * old + delta * delta;
    if (far_rd < s.best.back()) {
      s.offset[node.split_dim] = delta;
      search(far, s, far_rd);
      s.offset[node.split_dim] = old;
    }
  }

  std::size_t dim_;
  std::size_t leaf_size_;
  std::vector<Node> nodes_;
  std::vector<double> packed_;
  std::vector<std::size_t> original_;
};

}  // namespace infosense::detail
