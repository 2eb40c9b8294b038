#pragma once

#include <array>
#include <span>
#include <vector>

#include "ttdg/error.hpp"

namespace ttdg {

/// Quadrature rule on the unit n-simplex ([0,1] for n = 1, the triangle
/// with vertices (0,0), (1,0), (0,1) for n = 2).
struct QuadRule {
  int n = 1;
  std::vector<double> points;  // npts * n
  std::vector<double> weights;
  int exactness = 0;

  int size() const { return static_cast<int>(weights.size()); }
  double point(int q, int d) const { return points[q * n + d]; }
};

/// m-point Gauss-Legendre rule on [0, 1].
QuadRule gauss01(int m);

/// Rule on the unit n-simplex exact for polynomials of degree <= exactness.
QuadRule simplex_rule(int n, int exactness);

/// Quadrature over the graph t = phi(x) of an affine function over a
/// spatial simplex. Integrals against the space-time normal reduce to
/// spatial ones: n^t dS = dx and n^x dS = -grad(phi) dx for the upward
/// normal.
struct FaceQuadrature {
  int n = 1;
  std::vector<double> x;  // npts * n
  std::vector<double> t;
  std::vector<double> w;  // rule weight times spatial Jacobian
  std::array<double, 3> grad_phi{};

  int size() const { return static_cast<int>(w.size()); }
  /// Factor such that sum_q f_q nt_factor(q) = int f n^t dS.
  double nt_factor(int q) const { return w[q]; }
  /// Factor such that sum_q f_q nx_factor(q, d) = int f n^x_d dS.
  double nx_factor(int q, int d) const { return -grad_phi[d] * w[q]; }
};

/// `simplex` holds (n+1) vertices of n coordinates each; `vertex_times` the
/// graph values at those vertices.
FaceQuadrature map_to_facet(std::span<const double> simplex, std::span<const double> vertex_times,
                            const QuadRule& rule);

/// Quadrature on a time-like facet {x in F, phi_bot(x) <= t <= phi_top(x)}.
/// `facet` holds n vertices of n coordinates (a point for n = 1, a segment
/// for n = 2); bottom/top give the graph values at those vertices.
/// `rule_space` is ignored for n = 1. Weights include the spatial measure
/// and the local height, so the normal is purely spatial and supplied by
/// the caller.
FaceQuadrature map_to_timelike_facet(std::span<const double> facet, std::span<const double> bottom,
                                     std::span<const double> top, const QuadRule& rule_space,
                                     const QuadRule& rule_time);

/// Signed measure of an n-simplex given by (n+1) vertices.
double simplex_signed_volume(int n, std::span<const double> simplex);

/// Gradients of the barycentric coordinates, (n+1) * n values.
std::vector<double> barycentric_gradients(int n, std::span<const double> simplex);

}  // namespace ttdg
