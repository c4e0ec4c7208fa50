#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace fraclab {

using Index = std::int64_t;
using Point = Eigen::Vector2d;  // 1D domains use the x component only

// Canonical shapes carry closed-form distances to the complement.
struct IntervalShape {
  double a = 0.0;
  double b = 1.0;
};
struct DiskShape {
  Point center = Point::Zero();
  double radius = 1.0;
};
struct RectangleShape {
  Point lo = Point::Zero();
  Point hi = Point::Ones();
};
using ShapeTag = std::variant<std::monostate, IntervalShape, DiskShape, RectangleShape>;

/// Axis-aligned bounding box; for dim == 1 only the x component is used.
struct Box {
  Point lo = Point::Zero();
  Point hi = Point::Zero();
};

/// A rectangular lattice with nodes at integer multiples of h and a mask
/// selecting the open set Omega. Copies share the immutable node data.
class GridDomain {
 public:
  GridDomain(int dim, double h, Eigen::Vector2i first_index, Eigen::Vector2i extent,
             std::vector<std::uint8_t> inside, ShapeTag shape = {});

  int dim() const { return data_->dim; }
  double h() const { return data_->h; }
  /// Number of lattice nodes per axis (extent.y() == 1 in 1D).
  const Eigen::Vector2i& extent() const { return data_->extent; }
  /// Integer lattice coordinates of node 0.
  const Eigen::Vector2i& first_index() const { return data_->first; }
  Index num_nodes() const { return static_cast<Index>(data_->inside.size()); }

  /// Corners of the lattice (first and last node coordinates).
  Box box() const;
  /// Region covered by the lattice cells, i.e. box() grown by h/2.
  Box cell_box() const;

  Eigen::Vector2i lattice(Index node) const;
  Point coord(Index node) const;
  Index node_at(const Eigen::Vector2i& local) const;
  bool inside(Index node) const { return data_->inside[static_cast<std::size_t>(node)] != 0; }
  const std::vector<std::uint8_t>& mask() const { return data_->inside; }
  const std::vector<Index>& inside_nodes() const { return data_->inside_nodes; }
  const ShapeTag& shape() const { return data_->shape; }

  /// Euclidean distance between two nodes, computed from integer offsets.
  double distance(Index a, Index b) const;
  /// Distance from a node to the complement of cell_box().
  double distance_to_cell_box_boundary(Index node) const;
  /// Distance from a node to the farthest corner of cell_box().
  double farthest_cell_box_distance(Index node) const;

  /// True when both domains are built on the same lattice (h, box, dim).
  bool same_lattice(const GridDomain& other) const;

 private:
  struct Data {
    int dim;
    double h;
    Eigen::Vector2i first;
    Eigen::Vector2i extent;
    std::vector<std::uint8_t> inside;
    std::vector<Index> inside_nodes;
    ShapeTag shape;
  };
  std::shared_ptr<const Data> data_;
};

/// Values on every lattice node. Eigenfunction-type data is zero outside
/// Omega; `exterior` is the value assumed beyond the lattice box (0 for
/// zero-extended functions, the truncation level for cone functions).
struct GridFunction {
  GridDomain domain;
  Eigen::VectorXd values;
  double exterior = 0.0;

  GridFunction(GridDomain dom, Eigen::VectorXd v, double ext = 0.0);
  static GridFunction zeros(const GridDomain& dom);

  double operator[](Index node) const { return values[node]; }
  bool zero_extended() const;
};

struct NodeSet {
  GridDomain domain;
  std::vector<Index> nodes;
};

// ---- construction --------------------------------------------------------

/// Interval (a, b) on the lattice hZ, covering [a - m(b-a), b + m(b-a)].
GridDomain build_interval(double a, double b, double h, double margin = 2.0);

/// 2D lattice over `omega_box` grown by margin * diam(omega_box); a node is
/// inside iff `inside_predicate` holds there.
GridDomain build_mask2d(const Box& omega_box, double h,
                        const std::function<bool(const Point&)>& inside_predicate,
                        double margin = 2.0, ShapeTag shape = {});

GridDomain build_disk(const Point& center, double radius, double h, double margin = 2.0);
GridDomain build_rectangle(const Point& lo, const Point& hi, double h, double margin = 2.0);

/// Same lattice as `lattice`, with a new inside mask.
GridDomain restrict_mask(const GridDomain& lattice,
                         const std::function<bool(const Point&)>& inside_predicate,
                         ShapeTag shape = {});

// ---- metric quantities -----------------------------------------------------

/// delta(x) = dist(x, R^n \ Omega) on inside nodes, 0 elsewhere. Uses the
/// closed form when the domain has a canonical shape tag.
GridFunction distance_to_complement(const GridDomain& dom);
/// Same, always by lattice search over outside nodes.
GridFunction lattice_distance_to_complement(const GridDomain& dom);

/// R = max delta.
double inscribed_radius(const GridFunction& delta);

/// Gamma: inside nodes with delta >= R - tol. Default tol = h / 2.
NodeSet high_ridge(const GridFunction& delta, std::optional<double> tol = std::nullopt);

/// Euclidean distance from every lattice node to the nearest node of `s`.
GridFunction distance_to_set(const GridDomain& dom, const NodeSet& s);

/// Nearest node (excluding `node` itself) with u == 0, found by ring search.
/// Returns the node and its distance; nullopt if no such node exists.
std::optional<std::pair<Index, double>> nearest_zero_node(const GridFunction& u, Index node);

}  // namespace fraclab
