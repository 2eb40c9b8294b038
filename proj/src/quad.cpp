#include "ttdg/quad.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace ttdg {

QuadRule gauss01(int m) {
  if (m < 1 || m > 24) {
    throw Error(ErrorKind::InvalidArgument, "gauss01: point count must be in 1..24, got " + std::to_string(m));
  }
  QuadRule r;
  r.n = 1;
  r.points.assign(m, 0.0);
  r.weights.assign(m, 0.0);
  r.exactness = 2 * m - 1;
  // Newton iteration for the roots of P_m on [-1, 1]; only the upper half is
  // computed and mirrored so the rule is exactly symmetric about 1/2.
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = z;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (m == 1) p0 = 1.0;
      // P_m'(z) = m (z P_m - P_{m-1}) / (z^2 - 1)
      dp = m * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    {
      double p0 = 1.0;
      double p1 = z;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (m == 1) p0 = 1.0;
      dp = m * (z * p1 - p0) / (z * z - 1.0);
    }
    const double w = 1.0 / ((1.0 - z * z) * dp * dp);  // 2 / (...) halved for [0,1]
    const int lo = i;
    const int hi = m - 1 - i;
    r.points[lo] = 0.5 * (1.0 - z);
    r.points[hi] = 0.5 * (1.0 + z);
    r.weights[lo] = w;
    r.weights[hi] = w;
    if (lo == hi) r.points[lo] = 0.5;
  }
  return r;
}

QuadRule simplex_rule(int n, int exactness) {
  if (exactness < 0 || exactness > 40) {
    throw Error(ErrorKind::InvalidArgument, "simplex_rule: exactness must be in 0..40");
  }
  if (n == 1) return gauss01(std::max(1, (exactness + 2) / 2));
  if (n != 2) throw Error(ErrorKind::InvalidArgument, "simplex_rule: unsupported dimension " + std::to_string(n));
  // Collapsed coordinates x = u, y = w (1 - u), Jacobian (1 - u): the
  // u-direction carries one extra degree.
  const QuadRule ru = gauss01(std::max(1, (exactness + 3) / 2));
  const QuadRule rw = gauss01(std::max(1, (exactness + 2) / 2));
  QuadRule r;
  r.n = 2;
  r.exactness = exactness;
  for (int i = 0; i < ru.size(); ++i) {
    const double u = ru.points[i];
    for (int j = 0; j < rw.size(); ++j) {
      const double w = rw.points[j];
      r.points.push_back(u);
      r.points.push_back(w * (1.0 - u));
      r.weights.push_back(ru.weights[i] * rw.weights[j] * (1.0 - u));
    }
  }
  return r;
}

double simplex_signed_volume(int n, std::span<const double> s) {
  if (n == 1) return s[1] - s[0];
  if (n == 2) {
    return 0.5 * ((s[2] - s[0]) * (s[5] - s[1]) - (s[4] - s[0]) * (s[3] - s[1]));
  }
  throw Error(ErrorKind::InvalidArgument, "simplex_signed_volume: unsupported dimension");
}

std::vector<double> barycentric_gradients(int n, std::span<const double> s) {
  const double vol = simplex_signed_volume(n, s);
  if (std::abs(vol) <= 0.0) throw Error(ErrorKind::InvalidArgument, "degenerate simplex");
  std::vector<double> g((n + 1) * n);
  if (n == 1) {
    g[0] = -1.0 / vol;
    g[1] = 1.0 / vol;
    return g;
  }
  // grad lambda_i is the inward normal of the opposite edge scaled by 1/(2 vol)
  const double inv = 1.0 / (2.0 * vol);
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3;
    const int k = (i + 2) % 3;
    g[i * 2 + 0] = (s[j * 2 + 1] - s[k * 2 + 1]) * inv;
    g[i * 2 + 1] = (s[k * 2 + 0] - s[j * 2 + 0]) * inv;
  }
  return g;
}

FaceQuadrature map_to_facet(std::span<const double> simplex, std::span<const double> vertex_times,
                            const QuadRule& rule) {
  const int n = rule.n;
  if (static_cast<int>(simplex.size()) != (n + 1) * n || static_cast<int>(vertex_times.size()) != n + 1) {
    throw Error(ErrorKind::DimensionMismatch, "map_to_facet: simplex does not match rule dimension");
  }
  const double vol = simplex_signed_volume(n, simplex);
  if (!(std::abs(vol) > 0.0)) throw Error(ErrorKind::InvalidArgument, "map_to_facet: degenerate simplex");
  const double jac = std::abs(vol) * (n == 2 ? 2.0 : 1.0);
  const auto grad = barycentric_gradients(n, simplex);

  FaceQuadrature f;
  f.n = n;
  for (int d = 0; d < n; ++d) {
    double g = 0.0;
    // gradients sum to zero, so differences keep flat graphs exactly flat
    for (int i = 1; i <= n; ++i) g += (vertex_times[i] - vertex_times[0]) * grad[i * n + d];
    f.grad_phi[d] = g;
  }
  const int npts = rule.size();
  f.x.resize(npts * n);
  f.t.resize(npts);
  f.w.resize(npts);
  for (int q = 0; q < npts; ++q) {
    double lambda0 = 1.0;
    double time = 0.0;
    for (int d = 0; d < n; ++d) {
      const double xi = rule.point(q, d);
      lambda0 -= xi;
      time += vertex_times[d + 1] * xi;
    }
    time += vertex_times[0] * lambda0;
    for (int d = 0; d < n; ++d) {
      double x = simplex[d];
      for (int k = 0; k < n; ++k) x += (simplex[(k + 1) * n + d] - simplex[d]) * rule.point(q, k);
      f.x[q * n + d] = x;
    }
    f.t[q] = time;
    f.w[q] = rule.weights[q] * jac;
  }
  return f;
}

FaceQuadrature map_to_timelike_facet(std::span<const double> facet, std::span<const double> bottom,
                                     std::span<const double> top, const QuadRule& rule_space,
                                     const QuadRule& rule_time) {
  const int nv = static_cast<int>(bottom.size());
  const int n = nv;  // a facet of an n-simplex has n vertices
  if (static_cast<int>(top.size()) != nv || static_cast<int>(facet.size()) != nv * n) {
    throw Error(ErrorKind::DimensionMismatch, "map_to_timelike_facet: inconsistent facet data");
  }
  for (int i = 0; i < nv; ++i) {
    if (top[i] < bottom[i]) {
      throw Error(ErrorKind::InvalidArgument, "map_to_timelike_facet: inverted time bounds");
    }
  }
  FaceQuadrature f;
  f.n = n;
  if (n == 1) {
    const double height = top[0] - bottom[0];
    for (int j = 0; j < rule_time.size(); ++j) {
      f.x.push_back(facet[0]);
      f.t.push_back(bottom[0] + rule_time.points[j] * height);
      f.w.push_back(rule_time.weights[j] * height);
    }
    return f;
  }
  if (n != 2) throw Error(ErrorKind::InvalidArgument, "map_to_timelike_facet: unsupported dimension");
  const double dx = facet[2] - facet[0];
  const double dy = facet[3] - facet[1];
  const double len = std::hypot(dx, dy);
  for (int i = 0; i < rule_space.size(); ++i) {
    const double s = rule_space.points[i];
    const double bot = (1.0 - s) * bottom[0] + s * bottom[1];
    const double height = (1.0 - s) * (top[0] - bottom[0]) + s * (top[1] - bottom[1]);
    for (int j = 0; j < rule_time.size(); ++j) {
      f.x.push_back(facet[0] + s * dx);
      f.x.push_back(facet[1] + s * dy);
      f.t.push_back(bot + rule_time.points[j] * height);
      f.w.push_back(len * rule_space.weights[i] * rule_time.weights[j] * height);
    }
  }
  return f;
}

}  // namespace ttdg
