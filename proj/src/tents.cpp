#include "ttdg/tents.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ttdg/quad.hpp"

namespace ttdg {

double Tent::rim_time(int u) const {
  for (const auto& [w, t] : rim_times) {
    if (w == u) return t;
  }
  throw Error(ErrorKind::Scheduling, "vertex " + std::to_string(u) + " is not on the rim of tent " + std::to_string(id));
}

std::vector<double> Tent::bottom_times(const SpatialMesh& mesh, int k) const {
  std::vector<double> t;
  for (int u : mesh.element(k)) t.push_back(u == vertex ? t_bottom : rim_time(u));
  return t;
}

std::vector<double> Tent::top_times(const SpatialMesh& mesh, int k) const {
  std::vector<double> t;
  for (int u : mesh.element(k)) t.push_back(u == vertex ? t_top : rim_time(u));
  return t;
}

std::array<double, 3> graph_gradient(const SpatialMesh& mesh, int k, std::span<const double> times) {
  const int n = mesh.dim();
  const auto grad = barycentric_gradients(n, mesh.element_coords(k));
  std::array<double, 3> g{};
  for (int d = 0; d < n; ++d) {
    for (int i = 1; i <= n; ++i) g[d] += (times[i] - times[0]) * grad[i * n + d];
  }
  return g;
}

double tent_volume(const SpatialMesh& mesh, const Tent& tent) {
  double v = 0.0;
  for (int k : tent.star) v += mesh.volume(k);
  return v * (tent.t_top - tent.t_bottom) / (mesh.dim() + 1);
}

TentSlab pitch(const SpatialMesh& mesh, const WavespeedMap& speeds, double T, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw Error(ErrorKind::InvalidArgument, "gamma must lie in (0, 1)");
  if (!(T > 0.0) || !std::isfinite(T)) throw Error(ErrorKind::InvalidArgument, "final time must be positive");
  const int n = mesh.dim();
  const int nv = mesh.num_vertices();
  const int ne = mesh.num_elements();
  const auto c = speeds.element_speeds(mesh);
  std::vector<std::vector<double>> grads(ne);
  for (int k = 0; k < ne; ++k) grads[k] = barycentric_gradients(n, mesh.element_coords(k));
  for (int v = 0; v < nv; ++v) {
    if (mesh.star(v).empty()) throw Error(ErrorKind::MeshInvariant, "vertex " + std::to_string(v) + " belongs to no element");
  }

  // Largest vertex-time range D_K on K such that every affine graph over K
  // stays causal. Graphs with range <= D are, up to a shift, images of the
  // cube [0, D]^{n+1}, so the steepest one is D max_S |sum_{i in S} grad lambda_i|
  // over vertex subsets S.
  std::vector<double> dmax(ne);
  for (int k = 0; k < ne; ++k) {
    double worst = 0.0;
    for (int subset = 1; subset < (1 << (n + 1)) - 1; ++subset) {
      std::array<double, 3> s{};
      for (int i = 0; i <= n; ++i) {
        if (!((subset >> i) & 1)) continue;
        for (int d = 0; d < n; ++d) s[d] += grads[k][i * n + d];
      }
      worst = std::max(worst, std::sqrt(s[0] * s[0] + s[1] * s[1] + s[2] * s[2]));
    }
    if (!(worst > 0.0) || !std::isfinite(worst)) {
      throw Error(ErrorKind::MeshInvariant, "degenerate element " + std::to_string(k));
    }
    dmax[k] = gamma / (c[k] * worst);
  }

  std::vector<double> tau(nv, 0.0);
  std::vector<int> last(ne, -1);
  std::vector<char> finished(nv, 0);
  std::vector<int> picked_round(nv, -1);
  int remaining = nv;

  TentSlab slab;
  slab.T = T;
  slab.gamma = gamma;

  // Rounds: visit unfinished local minima of the front by (time, id) and
  // pitch each one unless a neighbor was already pitched in this round, so
  // tents of a round never share an element. A local minimum always rises
  // by at least min_K D_K, and the edge differences never exceed D_K.
  for (int round = 0; remaining > 0; ++round) {
    std::vector<std::pair<double, int>> candidates;
    for (int v = 0; v < nv; ++v) {
      if (finished[v]) continue;
      bool local_min = true;
      for (int u : mesh.vertex_neighbors(v)) local_min = local_min && tau[v] <= tau[u];
      if (local_min) candidates.emplace_back(tau[v], v);
    }
    std::sort(candidates.begin(), candidates.end());
    const std::size_t before = slab.tents.size();
    for (const auto& [tv, v] : candidates) {
      bool blocked = false;
      for (int u : mesh.vertex_neighbors(v)) blocked = blocked || picked_round[u] == round;
      if (blocked) continue;
      double cap = T;
      for (int k : mesh.star(v)) {
        for (int u : mesh.element(k)) {
          if (u != v) cap = std::min(cap, tau[u] + dmax[k]);
        }
      }
      if (!(cap > tv)) {
        throw Error(ErrorKind::Causality, "vertex " + std::to_string(v) + " cannot advance causally");
      }
      picked_round[v] = round;

      Tent t;
      t.id = static_cast<int>(slab.tents.size());
      t.vertex = v;
      t.star = mesh.star(v);
      t.t_bottom = tv;
      t.t_top = cap;
      for (int u : mesh.vertex_neighbors(v)) t.rim_times.emplace_back(u, tau[u]);
      for (int k : t.star) {
        if (last[k] >= 0) t.deps.push_back(last[k]);
        const auto e = mesh.element(k);
        for (int l = 0; l <= n; ++l) {
          if (e[l] == v) continue;  // the facet opposite v does not contain v
          const int nb = mesh.neighbor(k, l);
          if (nb >= 0 && mesh.material(k) < mesh.material(nb)) t.interface_facets.emplace_back(k, l);
        }
        last[k] = t.id;
      }
      std::sort(t.deps.begin(), t.deps.end());
      t.deps.erase(std::unique(t.deps.begin(), t.deps.end()), t.deps.end());
      slab.tents.push_back(std::move(t));

      tau[v] = cap;
      if (cap >= T) {
        finished[v] = 1;
        --remaining;
      }
    }
    if (slab.tents.size() == before) {
      throw Error(ErrorKind::Causality, "tent pitching stalled: no vertex can advance causally");
    }
  }
  slab.layers = layers(slab);
  return slab;
}

const char* to_string(SlabViolation::Kind kind) {
  switch (kind) {
    case SlabViolation::Kind::Causality: return "causality";
    case SlabViolation::Kind::Ordering: return "ordering";
    case SlabViolation::Kind::Front: return "front";
    case SlabViolation::Kind::Tiling: return "tiling";
  }
  return "unknown";
}

std::vector<SlabViolation> validate(const TentSlab& slab, const SpatialMesh& mesh, const WavespeedMap& speeds) {
  std::vector<SlabViolation> out;
  const auto c = speeds.element_speeds(mesh);
  std::vector<double> front(mesh.num_vertices(), 0.0);
  std::vector<int> last(mesh.num_elements(), -1);
  double volume = 0.0;
  for (std::size_t i = 0; i < slab.tents.size(); ++i) {
    const Tent& t = slab.tents[i];
    const int id = static_cast<int>(i);
    auto report = [&](SlabViolation::Kind kind, int element, const std::string& msg) {
      out.push_back({kind, id, element, "tent " + std::to_string(id) + ": " + msg});
    };
    if (t.id != id) report(SlabViolation::Kind::Ordering, -1, "id does not match position");
    for (int d : t.deps) {
      if (d < 0 || d >= id) report(SlabViolation::Kind::Ordering, -1, "dependency " + std::to_string(d) + " is not earlier");
    }
    if (!(t.t_top > t.t_bottom)) report(SlabViolation::Kind::Causality, -1, "t_top does not exceed t_bottom");
    if (front[t.vertex] != t.t_bottom) {
      report(SlabViolation::Kind::Front, -1, "bottom time differs from the front at vertex " + std::to_string(t.vertex));
    }
    for (const auto& [u, tu] : t.rim_times) {
      if (front[u] != tu) report(SlabViolation::Kind::Front, -1, "rim time differs from the front at vertex " + std::to_string(u));
    }
    for (int k : t.star) {
      if (last[k] >= 0 && !std::binary_search(t.deps.begin(), t.deps.end(), last[k])) {
        report(SlabViolation::Kind::Ordering, k, "missing dependency on tent " + std::to_string(last[k]));
      }
      last[k] = id;
      try {
        for (bool top : {true, false}) {
          const auto times = top ? t.top_times(mesh, k) : t.bottom_times(mesh, k);
          const auto g = graph_gradient(mesh, k, times);
          double s = 0.0;
          for (int d = 0; d < mesh.dim(); ++d) s += g[d] * g[d];
          const double slope = c[k] * std::sqrt(s);
          if (!(slope < 1.0)) {
            std::ostringstream msg;
            msg << (top ? "top" : "bottom") << " facet over element " << k << " is not space-like (c|grad phi| = "
                << slope << ")";
            report(SlabViolation::Kind::Causality, k, msg.str());
          }
        }
      } catch (const Error& e) {
        report(SlabViolation::Kind::Front, k, e.what());
      }
    }
    front[t.vertex] = t.t_top;
    volume += tent_volume(mesh, t);
  }
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (front[v] != slab.T) {
      out.push_back({SlabViolation::Kind::Front, -1, -1, "final front at vertex " + std::to_string(v) + " is not T"});
    }
  }
  const double expected = mesh.total_volume() * slab.T;
  if (std::abs(volume - expected) > 1e-10 * expected) {
    std::ostringstream msg;
    msg << "tent volumes sum to " << volume << ", expected " << expected;
    out.push_back({SlabViolation::Kind::Tiling, -1, -1, msg.str()});
  }
  return out;
}

std::vector<std::vector<int>> layers(const TentSlab& slab) {
  std::vector<int> level(slab.tents.size(), 0);
  std::vector<std::vector<int>> out;
  for (std::size_t i = 0; i < slab.tents.size(); ++i) {
    int l = 0;
    for (int d : slab.tents[i].deps) {
      if (d < 0 || d >= static_cast<int>(i)) {
        throw Error(ErrorKind::Scheduling, "dependency cycle through tent " + std::to_string(i));
      }
      l = std::max(l, level[d] + 1);
    }
    level[i] = l;
    if (static_cast<int>(out.size()) <= l) out.resize(l + 1);
    out[l].push_back(static_cast<int>(i));
  }
  return out;
}

std::string dump_slab(const TentSlab& slab) {
  std::ostringstream out;
  out.precision(17);
  for (const Tent& t : slab.tents) {
    out << t.id << ' ' << t.vertex << ' ' << t.t_bottom << ' ' << t.t_top;
    for (int d : t.deps) out << ' ' << d;
    out << '\n';
  }
  return out.str();
}

}  // namespace ttdg
