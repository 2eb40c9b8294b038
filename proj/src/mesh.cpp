#include "ttdg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "ttdg/quad.hpp"

namespace ttdg {

const char* to_string(BoundaryMarker m) {
  return m == BoundaryMarker::Dirichlet ? "dirichlet" : "neumann";
}

BoundaryMarker parse_marker(const std::string& name) {
  if (name == "dirichlet" || name == "D") return BoundaryMarker::Dirichlet;
  if (name == "neumann" || name == "N") return BoundaryMarker::Neumann;
  throw Error(ErrorKind::Parse, "unknown boundary marker '" + name + "'");
}

namespace {

using FacetKey = std::array<int, 2>;

FacetKey facet_key(std::span<const int> ids) {
  FacetKey k{ids[0], ids.size() > 1 ? ids[1] : -1};
  if (k[1] >= 0 && k[1] < k[0]) std::swap(k[0], k[1]);
  return k;
}

std::string key_string(const FacetKey& k) {
  return k[1] < 0 ? "(" + std::to_string(k[0]) + ")"
                  : "(" + std::to_string(k[0]) + "," + std::to_string(k[1]) + ")";
}

// Vertex ids of the facet opposite local vertex `local`.
std::vector<int> facet_of(std::span<const int> elem, int local) {
  std::vector<int> f;
  for (int i = 0; i < static_cast<int>(elem.size()); ++i) {
    if (i != local) f.push_back(elem[i]);
  }
  return f;
}

}  // namespace

SpatialMesh::SpatialMesh(int dim, std::vector<double> coords, std::vector<int> elements,
                         std::vector<int> material, std::vector<BoundaryFacet> boundary)
    : dim_(dim),
      coords_(std::move(coords)),
      elements_(std::move(elements)),
      material_(std::move(material)),
      boundary_(std::move(boundary)) {
  if (dim_ != 1 && dim_ != 2) {
    throw Error(ErrorKind::InvalidArgument, "mesh dimension must be 1 or 2, got " + std::to_string(dim_));
  }
  if (coords_.size() % dim_ != 0) throw Error(ErrorKind::DimensionMismatch, "coordinate array length");
  if (elements_.size() != material_.size() * (dim_ + 1)) {
    throw Error(ErrorKind::DimensionMismatch, "element and material arrays disagree");
  }
  if (material_.empty()) throw Error(ErrorKind::MeshInvariant, "mesh has no elements");
  for (double x : coords_) {
    if (!std::isfinite(x)) throw Error(ErrorKind::MeshInvariant, "non-finite vertex coordinate");
  }
  const int nv = num_vertices();
  for (int k = 0; k < num_elements(); ++k) {
    for (int v : element(k)) {
      if (v < 0 || v >= nv) {
        throw Error(ErrorKind::MeshInvariant,
                    "element " + std::to_string(k) + " references missing vertex " + std::to_string(v));
      }
    }
    const auto s = element_coords(k);
    if (!(simplex_signed_volume(dim_, s) > 0.0)) {
      throw Error(ErrorKind::MeshInvariant,
                  "element " + std::to_string(k) + " has non-positive signed volume");
    }
  }
  for (std::size_t b = 0; b < boundary_.size(); ++b) {
    if (static_cast<int>(boundary_[b].vertices.size()) != dim_) {
      throw Error(ErrorKind::MeshInvariant, "boundary facet " + std::to_string(b) + " has wrong vertex count");
    }
  }
  build_topology();
}

void SpatialMesh::build_topology() {
  const int ne = num_elements();
  const int nl = dim_ + 1;
  std::map<FacetKey, std::vector<std::pair<int, int>>> owners;
  for (int k = 0; k < ne; ++k) {
    for (int l = 0; l < nl; ++l) owners[facet_key(facet_of(element(k), l))].emplace_back(k, l);
  }
  neighbors_.assign(ne * nl, -1);
  facet_marker_.assign(ne * nl, -1);
  for (const auto& [key, list] : owners) {
    if (list.size() > 2) {
      throw Error(ErrorKind::MeshInvariant, "facet " + key_string(key) + " is shared by " +
                                                std::to_string(list.size()) + " elements");
    }
    if (list.size() == 2) {
      neighbors_[list[0].first * nl + list[0].second] = list[1].first;
      neighbors_[list[1].first * nl + list[1].second] = list[0].first;
    }
  }
  for (std::size_t b = 0; b < boundary_.size(); ++b) {
    const FacetKey key = facet_key(boundary_[b].vertices);
    auto it = owners.find(key);
    if (it == owners.end()) {
      throw Error(ErrorKind::MeshInvariant,
                  "boundary facet " + std::to_string(b) + " " + key_string(key) + " is not an element facet");
    }
    if (it->second.size() != 1) {
      throw Error(ErrorKind::MeshInvariant,
                  "boundary facet " + std::to_string(b) + " " + key_string(key) + " is interior");
    }
    auto& slot = facet_marker_[it->second[0].first * nl + it->second[0].second];
    if (slot != -1) {
      throw Error(ErrorKind::MeshInvariant, "boundary facet " + key_string(key) + " listed twice");
    }
    slot = static_cast<signed char>(boundary_[b].marker);
  }
  for (int k = 0; k < ne; ++k) {
    for (int l = 0; l < nl; ++l) {
      if (neighbors_[k * nl + l] < 0 && facet_marker_[k * nl + l] < 0) {
        throw Error(ErrorKind::MeshInvariant,
                    "boundary facet " + key_string(facet_key(facet_of(element(k), l))) + " of element " +
                        std::to_string(k) + " has no marker");
      }
    }
  }

  const int nv = num_vertices();
  stars_.assign(nv, {});
  vertex_neighbors_.assign(nv, {});
  for (int k = 0; k < ne; ++k) {
    for (int v : element(k)) {
      stars_[v].push_back(k);
      for (int u : element(k)) {
        if (u != v) vertex_neighbors_[v].push_back(u);
      }
    }
  }
  for (auto& nb : vertex_neighbors_) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
}

std::vector<double> SpatialMesh::element_coords(int k) const {
  std::vector<double> s;
  s.reserve((dim_ + 1) * dim_);
  for (int v : element(k)) {
    for (double x : vertex(v)) s.push_back(x);
  }
  return s;
}

double SpatialMesh::volume(int k) const { return simplex_signed_volume(dim_, element_coords(k)); }

double SpatialMesh::diameter(int k) const {
  double d = 0.0;
  const auto e = element(k);
  for (std::size_t i = 0; i < e.size(); ++i) {
    for (std::size_t j = i + 1; j < e.size(); ++j) {
      double s = 0.0;
      for (int c = 0; c < dim_; ++c) {
        const double dx = vertex(e[i])[c] - vertex(e[j])[c];
        s += dx * dx;
      }
      d = std::max(d, std::sqrt(s));
    }
  }
  return d;
}

std::array<double, 3> SpatialMesh::centroid(int k) const {
  std::array<double, 3> c{};
  for (int v : element(k)) {
    for (int d = 0; d < dim_; ++d) c[d] += vertex(v)[d];
  }
  for (int d = 0; d < dim_; ++d) c[d] /= dim_ + 1;
  return c;
}

double SpatialMesh::total_volume() const {
  double s = 0.0;
  for (int k = 0; k < num_elements(); ++k) s += volume(k);
  return s;
}

double SpatialMesh::max_diameter() const {
  double d = 0.0;
  for (int k = 0; k < num_elements(); ++k) d = std::max(d, diameter(k));
  return d;
}

std::optional<BoundaryMarker> SpatialMesh::boundary_marker(int k, int local) const {
  const signed char m = facet_marker_[k * (dim_ + 1) + local];
  if (m < 0) return std::nullopt;
  return static_cast<BoundaryMarker>(m);
}

int SpatialMesh::locate(std::span<const double> x, double tol) const {
  if (static_cast<int>(x.size()) != dim_) throw Error(ErrorKind::DimensionMismatch, "locate: point dimension");
  for (int k = 0; k < num_elements(); ++k) {
    const auto s = element_coords(k);
    const auto g = barycentric_gradients(dim_, s);
    bool inside = true;
    for (int i = 0; i <= dim_ && inside; ++i) {
      // lambda_i(x) = lambda_i(vertex j) + grad . (x - vertex j), with j != i
      const int j = (i + 1) % (dim_ + 1);
      double lam = 0.0;
      for (int d = 0; d < dim_; ++d) lam += g[i * dim_ + d] * (x[d] - s[j * dim_ + d]);
      inside = lam >= -tol;
    }
    if (inside) return k;
  }
  return -1;
}

WavespeedMap::WavespeedMap(std::map<int, double> speeds) : speeds_(std::move(speeds)) {
  for (const auto& [m, c] : speeds_) {
    if (!(c > 0.0) || !std::isfinite(c)) {
      throw Error(ErrorKind::InvalidArgument,
                  "wavespeed of material " + std::to_string(m) + " must be positive");
    }
  }
}

double WavespeedMap::speed(int material) const {
  auto it = speeds_.find(material);
  if (it == speeds_.end()) {
    throw Error(ErrorKind::InvalidArgument, "no wavespeed for material " + std::to_string(material));
  }
  return it->second;
}

std::vector<double> WavespeedMap::element_speeds(const SpatialMesh& mesh) const {
  std::vector<double> c(mesh.num_elements());
  for (int k = 0; k < mesh.num_elements(); ++k) c[k] = speed(mesh.material(k));
  return c;
}

SpatialMesh make_interval_mesh(double a, double b, int n_elements, BoundaryMarker left,
                               BoundaryMarker right) {
  if (!(a < b)) throw Error(ErrorKind::InvalidArgument, "interval mesh needs a < b");
  if (n_elements < 1) throw Error(ErrorKind::InvalidArgument, "interval mesh needs at least one element");
  std::vector<double> x(n_elements + 1);
  for (int i = 0; i <= n_elements; ++i) x[i] = a + (b - a) * i / n_elements;
  x.back() = b;
  std::vector<int> elems;
  for (int i = 0; i < n_elements; ++i) {
    elems.push_back(i);
    elems.push_back(i + 1);
  }
  std::vector<BoundaryFacet> bnd{{{0}, left}, {{n_elements}, right}};
  return SpatialMesh(1, std::move(x), std::move(elems), std::vector<int>(n_elements, 0), std::move(bnd));
}

namespace {

// Boundary facets of a triangle list: edges owned by one element, each
// marked by `marker_of(a, b)`.
template <class F>
std::vector<BoundaryFacet> triangle_boundary(const std::vector<int>& elems, F marker_of) {
  std::map<FacetKey, int> count;
  std::vector<FacetKey> order;
  for (std::size_t k = 0; k < elems.size() / 3; ++k) {
    for (int l = 0; l < 3; ++l) {
      const int a = elems[3 * k + (l + 1) % 3];
      const int b = elems[3 * k + (l + 2) % 3];
      const FacetKey key = facet_key(std::array<int, 2>{a, b});
      if (count[key]++ == 0) order.push_back(key);
    }
  }
  std::vector<BoundaryFacet> out;
  for (const auto& key : order) {
    if (count[key] == 1) out.push_back({{key[0], key[1]}, marker_of(key[0], key[1])});
  }
  return out;
}

}  // namespace

SpatialMesh make_rectangle_mesh(double x0, double x1, double y0, double y1, int nx, int ny,
                                BoundaryMarker marker) {
  if (!(x0 < x1) || !(y0 < y1) || nx < 1 || ny < 1) {
    throw Error(ErrorKind::InvalidArgument, "rectangle mesh needs a non-empty box and positive cell counts");
  }
  std::vector<double> xy;
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      xy.push_back(i == nx ? x1 : x0 + (x1 - x0) * i / nx);
      xy.push_back(j == ny ? y1 : y0 + (y1 - y0) * j / ny);
    }
  }
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  std::vector<int> elems;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      // right-angle vertex first, so the diagonal is the refinement edge
      for (int v : {id(i + 1, j), id(i + 1, j + 1), id(i, j)}) elems.push_back(v);
      for (int v : {id(i, j + 1), id(i, j), id(i + 1, j + 1)}) elems.push_back(v);
    }
  }
  auto bnd = triangle_boundary(elems, [marker](int, int) { return marker; });
  const int ne = static_cast<int>(elems.size()) / 3;
  return SpatialMesh(2, std::move(xy), std::move(elems), std::vector<int>(ne, 0), std::move(bnd));
}

SpatialMesh make_square_mesh(double h, BoundaryMarker marker) {
  if (!(h > 0.0) || h > 1.0) throw Error(ErrorKind::InvalidArgument, "square mesh needs 0 < h <= 1");
  const int n = static_cast<int>(std::ceil(1.0 / h - 1e-9));
  return make_rectangle_mesh(0.0, 1.0, 0.0, 1.0, n, n, marker);
}

double lshape_size_bound(double h_max, double mu, double r) {
  return std::max(h_max * std::pow(r, 1.0 - mu), std::pow(h_max, 1.0 / mu));
}

SpatialMesh bisect_triangles(const SpatialMesh& mesh, const std::vector<bool>& marked) {
  if (mesh.dim() != 2) throw Error(ErrorKind::InvalidArgument, "bisection needs a triangle mesh");
  if (static_cast<int>(marked.size()) != mesh.num_elements()) {
    throw Error(ErrorKind::DimensionMismatch, "one mark per element expected");
  }
  std::vector<double> xy = mesh.coords();
  std::vector<std::array<int, 3>> tris;
  std::vector<int> mat = mesh.materials();
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const auto e = mesh.element(k);
    tris.push_back({e[0], e[1], e[2]});
  }
  std::map<FacetKey, BoundaryMarker> bmark;
  for (const auto& f : mesh.boundary()) bmark[facet_key(f.vertices)] = f.marker;

  std::map<FacetKey, int> midpoint;
  auto midpoint_of = [&](int a, int b) {
    const FacetKey key = facet_key(std::array<int, 2>{a, b});
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const int m = static_cast<int>(xy.size()) / 2;
    xy.push_back(0.5 * (xy[2 * a] + xy[2 * b]));
    xy.push_back(0.5 * (xy[2 * a + 1] + xy[2 * b + 1]));
    midpoint[key] = m;
    auto bm = bmark.find(key);
    if (bm != bmark.end()) {
      bmark[facet_key(std::array<int, 2>{a, m})] = bm->second;
      bmark[facet_key(std::array<int, 2>{m, b})] = bm->second;
    }
    return m;
  };
  auto has_hanging = [&](const std::array<int, 3>& t) {
    for (int l = 0; l < 3; ++l) {
      if (midpoint.contains(facet_key(std::array<int, 2>{t[(l + 1) % 3], t[(l + 2) % 3]}))) return true;
    }
    return false;
  };

  std::vector<bool> todo = marked;
  while (true) {
    bool any = false;
    std::vector<std::array<int, 3>> next;
    std::vector<int> next_mat;
    next.reserve(tris.size() * 2);
    for (std::size_t k = 0; k < tris.size(); ++k) {
      const auto& t = tris[k];
      if (todo[k] || has_hanging(t)) {
        any = true;
        const int m = midpoint_of(t[1], t[2]);
        next.push_back({m, t[0], t[1]});
        next.push_back({m, t[2], t[0]});
        next_mat.push_back(mat[k]);
        next_mat.push_back(mat[k]);
      } else {
        next.push_back(t);
        next_mat.push_back(mat[k]);
      }
    }
    tris = std::move(next);
    mat = std::move(next_mat);
    todo.assign(tris.size(), false);
    if (!any) break;
  }

  std::vector<int> elems;
  elems.reserve(tris.size() * 3);
  for (const auto& t : tris) elems.insert(elems.end(), t.begin(), t.end());
  auto bnd = triangle_boundary(elems, [&](int a, int b) {
    auto it = bmark.find(facet_key(std::array<int, 2>{a, b}));
    if (it == bmark.end()) throw Error(ErrorKind::MeshInvariant, "refined boundary edge lost its marker");
    return it->second;
  });
  return SpatialMesh(2, std::move(xy), std::move(elems), std::move(mat), std::move(bnd));
}

SpatialMesh make_lshape_graded(double h_max, double mu) {
  if (!(h_max > 0.0)) throw Error(ErrorKind::InvalidArgument, "L-shape mesh needs h_max > 0");
  if (!(mu > 0.0) || mu > 1.0) throw Error(ErrorKind::InvalidArgument, "L-shape grading needs 0 < mu <= 1");
  // Legs of length a give diameter a sqrt(2) <= h_max.
  const int m = std::max(1, static_cast<int>(std::ceil(std::sqrt(2.0) / h_max - 1e-9)));
  const int n = 2 * m;
  std::vector<int> vid((n + 1) * (n + 1), -1);
  std::vector<double> xy;
  std::vector<int> elems;
  auto coord = [&](int i) { return i == m ? 0.0 : -1.0 + static_cast<double>(i) / m; };
  auto id = [&](int i, int j) {
    int& v = vid[j * (n + 1) + i];
    if (v < 0) {
      v = static_cast<int>(xy.size()) / 2;
      xy.push_back(coord(i));
      xy.push_back(coord(j));
    }
    return v;
  };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (i >= m && j < m) continue;  // removed quadrant [0,1] x [-1,0]
      for (int v : {id(i + 1, j), id(i + 1, j + 1), id(i, j)}) elems.push_back(v);
      for (int v : {id(i, j + 1), id(i, j), id(i + 1, j + 1)}) elems.push_back(v);
    }
  }
  auto bnd = triangle_boundary(elems, [](int, int) { return BoundaryMarker::Dirichlet; });
  const int ne = static_cast<int>(elems.size()) / 3;
  SpatialMesh mesh(2, std::move(xy), std::move(elems), std::vector<int>(ne, 0), std::move(bnd));
  if (mu == 1.0) return mesh;

  const double h_min = std::pow(h_max, 1.0 / mu);
  for (int round = 0; round < 200; ++round) {
    std::vector<bool> marked(mesh.num_elements(), false);
    bool any = false;
    for (int k = 0; k < mesh.num_elements(); ++k) {
      const auto c = mesh.centroid(k);
      const double r = std::hypot(c[0], c[1]);
      if (mesh.diameter(k) > lshape_size_bound(h_max, mu, r) * (1.0 + 1e-12)) {
        marked[k] = true;
        any = true;
      }
    }
    if (!any) return mesh;
    mesh = bisect_triangles(mesh, marked);
  }
  throw Error(ErrorKind::MeshInvariant,
              "graded refinement did not terminate (h_min = " + std::to_string(h_min) + ")");
}

namespace {

struct LineReader {
  std::vector<std::pair<int, std::vector<std::string>>> lines;
  std::size_t pos = 0;

  explicit LineReader(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int no = 0;
    while (std::getline(in, line)) {
      ++no;
      if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
      std::istringstream ls(line);
      std::vector<std::string> tok;
      for (std::string t; ls >> t;) tok.push_back(t);
      if (!tok.empty()) lines.emplace_back(no, std::move(tok));
    }
  }
  [[noreturn]] void fail(const std::string& msg, int line) const {
    throw Error(ErrorKind::Parse, "line " + std::to_string(line) + ": " + msg);
  }
  const std::pair<int, std::vector<std::string>>& next(const char* what) {
    if (pos >= lines.size()) {
      fail(std::string("unexpected end of file, expected ") + what,
           lines.empty() ? 1 : lines.back().first + 1);
    }
    return lines[pos++];
  }
  int header(const char* name) {
    const auto& [no, tok] = next(name);
    if (tok.size() != 2 || tok[0] != name) fail(std::string("expected '") + name + " <count>'", no);
    return to_int(tok[1], no);
  }
  int to_int(const std::string& s, int no) const {
    try {
      std::size_t used = 0;
      const long v = std::stol(s, &used);
      if (used != s.size() || v < 0 || v > 1'000'000'000) throw std::invalid_argument(s);
      return static_cast<int>(v);
    } catch (const std::exception&) {
      fail("invalid integer '" + s + "'", no);
    }
  }
  double to_double(const std::string& s, int no) const {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      fail("invalid number '" + s + "'", no);
    }
  }
};

}  // namespace

SpatialMesh read_mesh(const std::string& text) {
  LineReader r(text);
  const int dim = r.header("dim");
  if (dim != 1 && dim != 2) r.fail("dimension must be 1 or 2", r.lines[r.pos - 1].first);

  const int nv = r.header("vertices");
  std::vector<double> xy;
  xy.reserve(nv * dim);
  for (int i = 0; i < nv; ++i) {
    const auto& [no, tok] = r.next("vertex");
    if (static_cast<int>(tok.size()) != dim) r.fail("vertex needs " + std::to_string(dim) + " coordinates", no);
    for (const auto& t : tok) xy.push_back(r.to_double(t, no));
  }

  const int ne = r.header("elements");
  std::vector<int> elems;
  std::vector<int> mat;
  for (int k = 0; k < ne; ++k) {
    const auto& [no, tok] = r.next("element");
    if (static_cast<int>(tok.size()) != dim + 2) {
      r.fail("element needs " + std::to_string(dim + 1) + " vertex ids and a material id", no);
    }
    for (int i = 0; i <= dim; ++i) {
      const int v = r.to_int(tok[i], no);
      if (v >= nv) r.fail("vertex id " + std::to_string(v) + " out of range", no);
      elems.push_back(v);
    }
    mat.push_back(r.to_int(tok[dim + 1], no));
  }

  const int nb = r.header("boundary");
  std::vector<BoundaryFacet> bnd;
  for (int b = 0; b < nb; ++b) {
    const auto& [no, tok] = r.next("boundary facet");
    if (static_cast<int>(tok.size()) != dim + 1) r.fail("boundary facet needs vertex ids and a marker", no);
    BoundaryFacet f;
    for (int i = 0; i < dim; ++i) f.vertices.push_back(r.to_int(tok[i], no));
    try {
      f.marker = parse_marker(tok[dim]);
    } catch (const Error& e) {
      r.fail(e.what(), no);
    }
    bnd.push_back(std::move(f));
  }
  if (r.pos != r.lines.size()) r.fail("trailing content", r.lines[r.pos].first);
  return SpatialMesh(dim, std::move(xy), std::move(elems), std::move(mat), std::move(bnd));
}

std::string write_mesh(const SpatialMesh& mesh) {
  std::string out;
  char buf[64];
  const int n = mesh.dim();
  out += "dim " + std::to_string(n) + "\n";
  out += "vertices " + std::to_string(mesh.num_vertices()) + "\n";
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    for (int d = 0; d < n; ++d) {
      std::snprintf(buf, sizeof buf, "%.17g", mesh.vertex(v)[d]);
      out += buf;
      out += d + 1 < n ? ' ' : '\n';
    }
  }
  out += "elements " + std::to_string(mesh.num_elements()) + "\n";
  for (int k = 0; k < mesh.num_elements(); ++k) {
    for (int v : mesh.element(k)) out += std::to_string(v) + " ";
    out += std::to_string(mesh.material(k)) + "\n";
  }
  out += "boundary " + std::to_string(mesh.boundary().size()) + "\n";
  for (const auto& f : mesh.boundary()) {
    for (int v : f.vertices) out += std::to_string(v) + " ";
    out += std::string(to_string(f.marker)) + "\n";
  }
  return out;
}

}  // namespace ttdg
