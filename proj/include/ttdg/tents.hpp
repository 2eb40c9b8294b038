#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ttdg/mesh.hpp"

namespace ttdg {

struct Tent {
  int id = 0;
  int vertex = 0;
  std::vector<int> star;  // elements containing the pitch vertex, ascending
  double t_bottom = 0.0;
  double t_top = 0.0;
  /// Front times of the neighbor vertices when the tent was created.
  std::vector<std::pair<int, double>> rim_times;
  std::vector<int> deps;
  /// (element, local facet) for star facets through the pitch vertex that
  /// separate two materials, listed from the side with the smaller material.
  std::vector<std::pair<int, int>> interface_facets;

  double rim_time(int u) const;
  /// Vertex times of element k (local vertex order) below / above the tent.
  std::vector<double> bottom_times(const SpatialMesh& mesh, int k) const;
  std::vector<double> top_times(const SpatialMesh& mesh, int k) const;
};

struct TentSlab {
  double T = 0.0;
  double gamma = 0.5;
  std::vector<Tent> tents;
  std::vector<std::vector<int>> layers;

  std::size_t size() const { return tents.size(); }
};

/// Advancing-front pitching of mesh x (0, T). Works in rounds: local minima
/// of the front are visited by (time, id) and each one not adjacent to a
/// vertex already pitched in the round is advanced to
/// min(T, min over star elements K and their vertices u of tau(u) + D_K),
/// where D_K is the largest edge time difference that keeps every graph
/// over K within c_K |grad phi| <= gamma.
TentSlab pitch(const SpatialMesh& mesh, const WavespeedMap& speeds, double T, double gamma = 0.5);

struct SlabViolation {
  enum class Kind { Causality, Ordering, Front, Tiling };
  Kind kind;
  int tent = -1;
  int element = -1;
  std::string message;
};

const char* to_string(SlabViolation::Kind kind);

/// Checks strict space-likeness of every non-flat facet, dependency order,
/// front continuity, the flat final front and the volume tiling.
std::vector<SlabViolation> validate(const TentSlab& slab, const SpatialMesh& mesh, const WavespeedMap& speeds);

/// Topological layers of the dependency DAG. Throws on a dependency that
/// does not point to an earlier tent.
std::vector<std::vector<int>> layers(const TentSlab& slab);

/// Gradient of the affine graph through the element's vertex times.
std::array<double, 3> graph_gradient(const SpatialMesh& mesh, int k, std::span<const double> times);

/// Space-time volume between the tent's bottom and top graphs.
double tent_volume(const SpatialMesh& mesh, const Tent& tent);

/// One line per tent: id vertex t_bottom t_top deps...
std::string dump_slab(const TentSlab& slab);

}  // namespace ttdg
