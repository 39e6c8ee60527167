// Copyright 2026 The cornerescape Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// The 3x3 corner grid Q, its boundary L = A u B, the interior square S and
// the transpose symmetry. Small m x n grids are supported as well, because
// the oracle's own tests need a few of them.

#ifndef CORNERESCAPE_GRID_HPP
#define CORNERESCAPE_GRID_HPP

#include <algorithm>
#include <array>
#include <bit>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <set>
#include <string>
#include <vector>

#include "cornerescape/error.hpp"

namespace cornerescape {

struct Vertex {
  int row = 1;
  int col = 1;
  friend constexpr auto operator<=>(const Vertex&, const Vertex&) = default;
};

inline std::string to_string(Vertex v) {
  return "(" + std::to_string(v.row) + "," + std::to_string(v.col) + ")";
}

constexpr bool adjacent(Vertex a, Vertex b) {
  return std::abs(a.row - b.row) + std::abs(a.col - b.col) == 1;
}

/// Undirected edge, smaller endpoint first.
struct Edge {
  Vertex a;
  Vertex b;

  static constexpr Edge make(Vertex x, Vertex y) {
    return x < y ? Edge{x, y} : Edge{y, x};
  }
  friend constexpr auto operator<=>(const Edge&, const Edge&) = default;
};

inline std::string to_string(const Edge& e) {
  return to_string(e.a) + "-" + to_string(e.b);
}

/// A walk given by its vertex sequence. Zero-length = one vertex.
using Path = std::vector<Vertex>;

inline std::string to_string(const Path& p) {
  std::string s;
  for (size_t i = 0; i < p.size(); ++i) {
    if (i) s += "-";
    s += to_string(p[i]);
  }
  return s;
}

/// Edge sets are bitmasks over a graph's edge index.
using EdgeMask = std::uint64_t;

inline int popcount(EdgeMask m) { return std::popcount(m); }

/// A rows x cols grid with some vertices removed. Edges are indexed in
/// lexicographic order of the full (undeleted) grid, so masks of a graph and
/// of its vertex-deleted subgraphs are directly comparable.
class GridGraph {
 public:
  GridGraph() : GridGraph(3, 3, {}) {}

  GridGraph(int rows, int cols, const std::set<Vertex>& deleted)
      : rows_(rows), cols_(cols), deleted_(deleted) {
    if (rows < 1 || cols < 1 || rows * cols > 64)
      throw Error(ErrorCode::kInvalidArgument, "grid size out of range");
    for (const Vertex& v : deleted)
      if (!in_box(v))
        throw Error(ErrorCode::kInvalidArgument,
                    "deleted vertex outside grid: " + to_string(v));
    for (int r = 1; r <= rows; ++r)
      for (int c = 1; c <= cols; ++c) {
        Vertex v{r, c};
        if (c < cols) all_edges_.push_back(Edge::make(v, {r, c + 1}));
        if (r < rows) all_edges_.push_back(Edge::make(v, {r + 1, c}));
      }
    std::sort(all_edges_.begin(), all_edges_.end());
    if (all_edges_.size() > 64)
      throw Error(ErrorCode::kInvalidArgument, "too many edges for a mask");
    for (size_t i = 0; i < all_edges_.size(); ++i) {
      const Edge& e = all_edges_[i];
      if (!deleted_.count(e.a) && !deleted_.count(e.b)) mask_ |= bit(i);
    }
    for (int r = 1; r <= rows; ++r)
      for (int c = 1; c <= cols; ++c)
        if (!deleted_.count({r, c})) vertices_.push_back({r, c});
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const std::set<Vertex>& deleted_vertices() const { return deleted_; }
  const std::vector<Vertex>& vertices() const { return vertices_; }

  bool in_box(Vertex v) const {
    return v.row >= 1 && v.row <= rows_ && v.col >= 1 && v.col <= cols_;
  }
  bool has_vertex(Vertex v) const { return in_box(v) && !deleted_.count(v); }

  int vertex_id(Vertex v) const { return (v.row - 1) * cols_ + (v.col - 1); }
  Vertex vertex_at(int id) const { return {id / cols_ + 1, id % cols_ + 1}; }
  int vertex_slots() const { return rows_ * cols_; }

  /// Index of an edge of the full grid, or -1.
  int edge_index(const Edge& e) const {
    auto it = std::lower_bound(all_edges_.begin(), all_edges_.end(), e);
    if (it == all_edges_.end() || *it != e) return -1;
    return static_cast<int>(it - all_edges_.begin());
  }
  int edge_index(Vertex x, Vertex y) const {
    return edge_index(Edge::make(x, y));
  }
  const Edge& edge_at(int i) const { return all_edges_[i]; }
  int edge_slots() const { return static_cast<int>(all_edges_.size()); }

  bool has_edge(Vertex x, Vertex y) const {
    int i = edge_index(x, y);
    return i >= 0 && (mask_ & bit(i));
  }

  /// Present edges.
  EdgeMask edge_mask() const { return mask_; }
  std::vector<Edge> edges() const { return edges_of(mask_); }
  std::vector<Edge> edges_of(EdgeMask m) const {
    std::vector<Edge> out;
    for (int i = 0; i < edge_slots(); ++i)
      if (m & bit(i)) out.push_back(all_edges_[i]);
    return out;
  }

  /// Neighbours in the graph, lexicographic.
  std::vector<Vertex> neighbors(Vertex v) const {
    std::vector<Vertex> out;
    const Vertex cand[] = {{v.row - 1, v.col}, {v.row, v.col - 1},
                           {v.row, v.col + 1}, {v.row + 1, v.col}};
    for (Vertex w : cand)
      if (has_vertex(w) && has_vertex(v)) out.push_back(w);
    return out;
  }

  /// Mask of edges with both ends in `vs`.
  EdgeMask induced(const std::vector<Vertex>& vs) const {
    EdgeMask m = 0;
    for (int i = 0; i < edge_slots(); ++i) {
      const Edge& e = all_edges_[i];
      if (std::find(vs.begin(), vs.end(), e.a) != vs.end() &&
          std::find(vs.begin(), vs.end(), e.b) != vs.end())
        m |= bit(i);
    }
    return m & mask_;
  }

  /// Mask of the edges walked by `p`; throws if p steps off the grid.
  EdgeMask mask_of(const Path& p) const {
    EdgeMask m = 0;
    for (size_t i = 1; i < p.size(); ++i) {
      int k = edge_index(p[i - 1], p[i]);
      if (k < 0)
        throw Error(ErrorCode::kInvalidArgument, "not a grid walk: " +
                                                     to_string(p));
      m |= bit(k);
    }
    return m;
  }

  EdgeMask mask_of_edges(const std::vector<Edge>& es) const {
    EdgeMask m = 0;
    for (const Edge& e : es) {
      int k = edge_index(e);
      if (k < 0)
        throw Error(ErrorCode::kInvalidArgument,
                    "not a grid edge: " + to_string(e));
      m |= bit(k);
    }
    return m;
  }

  static constexpr EdgeMask bit(size_t i) { return EdgeMask{1} << i; }

 private:
  int rows_;
  int cols_;
  std::set<Vertex> deleted_;
  std::vector<Edge> all_edges_;
  std::vector<Vertex> vertices_;
  EdgeMask mask_ = 0;
};

inline GridGraph build_corner_grid(const std::set<Vertex>& deleted = {}) {
  return GridGraph(3, 3, deleted);
}

/// The full corner grid, shared.
inline const GridGraph& corner_grid() {
  static const GridGraph q = build_corner_grid();
  return q;
}

// ---- boundary structure of Q ----------------------------------------------

inline constexpr Vertex kCorner{3, 3};

inline constexpr bool in_A(Vertex v) { return v.row == 3; }
inline constexpr bool in_B(Vertex v) { return v.col == 3; }
inline constexpr bool in_L(Vertex v) { return in_A(v) || in_B(v); }
inline constexpr bool in_S(Vertex v) {
  return v.row >= 1 && v.row <= 2 && v.col >= 1 && v.col <= 2;
}
inline constexpr bool in_B_minus_A(Vertex v) { return in_B(v) && !in_A(v); }
inline constexpr bool in_A_minus_B(Vertex v) { return in_A(v) && !in_B(v); }

/// L as the path graph it induces, from (1,3) round to (3,1).
inline constexpr std::array<Vertex, 5> kLOrder{
    Vertex{1, 3}, Vertex{2, 3}, Vertex{3, 3}, Vertex{3, 2}, Vertex{3, 1}};

struct BoundaryPartition {
  std::vector<Vertex> A;
  std::vector<Vertex> B;
  std::vector<Vertex> L;
  std::vector<Vertex> S;
  Vertex corner_c = kCorner;
};

inline BoundaryPartition boundary_partition(const GridGraph& g) {
  if (g.rows() != 3 || g.cols() != 3 || !g.deleted_vertices().empty())
    throw Error(ErrorCode::kInvalidArgument,
                "boundary partition needs the undeleted corner grid");
  BoundaryPartition p;
  for (Vertex v : g.vertices()) {
    if (in_A(v)) p.A.push_back(v);
    if (in_B(v)) p.B.push_back(v);
    if (in_L(v)) p.L.push_back(v);
    if (in_S(v)) p.S.push_back(v);
  }
  return p;
}

inline int l_position(Vertex v) {
  for (int i = 0; i < 5; ++i)
    if (kLOrder[i] == v) return i;
  return -1;
}

/// The u,v-path inside L.
inline Path unique_L_path(Vertex u, Vertex v) {
  int i = l_position(u), j = l_position(v);
  if (i < 0 || j < 0)
    throw Error(ErrorCode::kNotOnL,
                "not on L: " + to_string(i < 0 ? u : v));
  Path p;
  int step = i <= j ? 1 : -1;
  for (int k = i;; k += step) {
    p.push_back(kLOrder[k]);
    if (k == j) break;
  }
  return p;
}

// ---- transpose -------------------------------------------------------------

constexpr Vertex diagonal_reflect(Vertex v) { return {v.col, v.row}; }
constexpr Edge diagonal_reflect(const Edge& e) {
  return Edge::make(diagonal_reflect(e.a), diagonal_reflect(e.b));
}
inline Path diagonal_reflect(const Path& p) {
  Path out;
  out.reserve(p.size());
  for (Vertex v : p) out.push_back(diagonal_reflect(v));
  return out;
}

// ---- small path utilities --------------------------------------------------

inline Path reversed(Path p) {
  std::reverse(p.begin(), p.end());
  return p;
}

/// a followed by b; b must start where a ends.
inline Path concat(const Path& a, const Path& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  if (a.back() != b.front())
    throw Error(ErrorCode::kInvalidArgument,
                "cannot join " + to_string(a) + " and " + to_string(b));
  Path out = a;
  out.insert(out.end(), b.begin() + 1, b.end());
  return out;
}

}  // namespace cornerescape

#endif  // CORNERESCAPE_GRID_HPP
