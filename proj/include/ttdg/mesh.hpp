#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ttdg/error.hpp"

namespace ttdg {

enum class BoundaryMarker { Dirichlet, Neumann };

const char* to_string(BoundaryMarker m);
BoundaryMarker parse_marker(const std::string& name);

struct BoundaryFacet {
  std::vector<int> vertices;
  BoundaryMarker marker = BoundaryMarker::Dirichlet;
};

/// Simplicial mesh of intervals (n = 1) or triangles (n = 2). Construction
/// validates orientation, conformity and boundary coverage, and builds the
/// facet adjacency.
class SpatialMesh {
 public:
  SpatialMesh(int dim, std::vector<double> coords, std::vector<int> elements,
              std::vector<int> material, std::vector<BoundaryFacet> boundary);

  int dim() const { return dim_; }
  int num_vertices() const { return static_cast<int>(coords_.size()) / dim_; }
  int num_elements() const { return static_cast<int>(material_.size()); }

  std::span<const double> vertex(int v) const { return {coords_.data() + v * dim_, static_cast<std::size_t>(dim_)}; }
  std::span<const int> element(int k) const {
    return {elements_.data() + k * (dim_ + 1), static_cast<std::size_t>(dim_ + 1)};
  }
  int material(int k) const { return material_[k]; }
  const std::vector<double>& coords() const { return coords_; }
  const std::vector<int>& elements() const { return elements_; }
  const std::vector<int>& materials() const { return material_; }
  const std::vector<BoundaryFacet>& boundary() const { return boundary_; }

  /// Vertex coordinates of element k, (n+1) * n values.
  std::vector<double> element_coords(int k) const;
  double volume(int k) const;
  double diameter(int k) const;
  std::array<double, 3> centroid(int k) const;
  double total_volume() const;
  double max_diameter() const;

  /// Element across the facet opposite local vertex `local`, or -1.
  int neighbor(int k, int local) const { return neighbors_[k * (dim_ + 1) + local]; }
  /// Marker of the facet opposite local vertex `local` if it is on the boundary.
  std::optional<BoundaryMarker> boundary_marker(int k, int local) const;

  /// Elements containing vertex v, ascending.
  const std::vector<int>& star(int v) const { return stars_[v]; }
  /// Vertices sharing an edge with v, ascending.
  const std::vector<int>& vertex_neighbors(int v) const { return vertex_neighbors_[v]; }

  /// Index of the element containing x, or -1.
  int locate(std::span<const double> x, double tol = 1e-12) const;

 private:
  void build_topology();

  int dim_;
  std::vector<double> coords_;
  std::vector<int> elements_;
  std::vector<int> material_;
  std::vector<BoundaryFacet> boundary_;
  std::vector<int> neighbors_;
  std::vector<signed char> facet_marker_;  // -1 interior, else marker
  std::vector<std::vector<int>> stars_;
  std::vector<std::vector<int>> vertex_neighbors_;
};

/// Material id -> wavespeed.
class WavespeedMap {
 public:
  WavespeedMap() = default;
  explicit WavespeedMap(std::map<int, double> speeds);
  static WavespeedMap uniform(double c) { return WavespeedMap({{0, c}}); }

  double speed(int material) const;
  bool contains(int material) const { return speeds_.contains(material); }
  const std::map<int, double>& speeds() const { return speeds_; }
  /// Wavespeed per element; throws if a material is missing.
  std::vector<double> element_speeds(const SpatialMesh& mesh) const;

 private:
  std::map<int, double> speeds_;
};

SpatialMesh make_interval_mesh(double a, double b, int n_elements,
                               BoundaryMarker left = BoundaryMarker::Dirichlet,
                               BoundaryMarker right = BoundaryMarker::Dirichlet);

/// Structured triangulation of [x0,x1] x [y0,y1] with nx * ny cells, each
/// split along its (x0,y0)-(x1,y1) diagonal. All boundary facets get `marker`.
SpatialMesh make_rectangle_mesh(double x0, double x1, double y0, double y1, int nx, int ny,
                                BoundaryMarker marker = BoundaryMarker::Dirichlet);

/// Unit square with ceil(1/h)^2 cells, two triangles each.
SpatialMesh make_square_mesh(double h, BoundaryMarker marker = BoundaryMarker::Dirichlet);

/// L-shaped domain [-1,1]^2 minus [0,1]x[-1,0], structured with element
/// diameter <= h_max, then bisected towards the reentrant corner until every
/// element satisfies diam <= max(h_max r^(1-mu), h_max^(1/mu)), r being the
/// centroid distance to the origin. mu = 1 leaves the mesh uniform.
SpatialMesh make_lshape_graded(double h_max, double mu);

/// Sizing bound used by make_lshape_graded for an element with centroid
/// distance r.
double lshape_size_bound(double h_max, double mu, double r);

/// Refines marked triangles by newest-vertex bisection with conforming
/// closure. Element vertex order encodes the refinement edge (opposite the
/// first vertex).
SpatialMesh bisect_triangles(const SpatialMesh& mesh, const std::vector<bool>& marked);

SpatialMesh read_mesh(const std::string& text);
std::string write_mesh(const SpatialMesh& mesh);

}  // namespace ttdg
