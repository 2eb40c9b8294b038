#include "ttdg/poly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ttdg {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid_argument";
    case ErrorKind::DimensionMismatch: return "dimension_mismatch";
    case ErrorKind::Parse: return "parse_error";
    case ErrorKind::MeshInvariant: return "mesh_invariant";
    case ErrorKind::Causality: return "causality";
    case ErrorKind::Scheduling: return "scheduling";
    case ErrorKind::SingularMatrix: return "singular_matrix";
    case ErrorKind::NotConverged: return "not_converged";
    case ErrorKind::Io: return "io_error";
  }
  return "unknown";
}

namespace {

// True zeros only; no tolerance-based pruning.
constexpr double kZeroCutoff = 1e-300;

double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

void check_dim(int dim) {
  if (dim < 1 || dim > kMaxSpaceDim) {
    throw Error(ErrorKind::InvalidArgument,
                "space dimension must be in 1.." + std::to_string(kMaxSpaceDim) +
                    ", got " + std::to_string(dim));
  }
}

}  // namespace

MultiIndex::MultiIndex(std::span<const int> space, int time)
    : time_(time), dim_(static_cast<int>(space.size())) {
  check_dim(dim_);
  if (time < 0) throw Error(ErrorKind::InvalidArgument, "negative time exponent");
  for (int m = 0; m < dim_; ++m) {
    if (space[m] < 0) throw Error(ErrorKind::InvalidArgument, "negative space exponent");
    space_[m] = space[m];
  }
}

MultiIndex MultiIndex::zero(int dim) {
  std::array<int, kMaxSpaceDim> z{};
  return MultiIndex(std::span<const int>(z.data(), dim), 0);
}

int MultiIndex::space_degree() const {
  int s = 0;
  for (int m = 0; m < dim_; ++m) s += space_[m];
  return s;
}

MultiIndex MultiIndex::with_space(int m, int exponent) const {
  MultiIndex r = *this;
  r.space_[m] = exponent;
  return r;
}

MultiIndex MultiIndex::with_time(int exponent) const {
  MultiIndex r = *this;
  r.time_ = exponent;
  return r;
}

bool GradedOrder::operator()(const MultiIndex& a, const MultiIndex& b) const {
  const int da = a.total_degree();
  const int db = b.total_degree();
  if (da != db) return da < db;
  if (a.dim() != b.dim()) return a.dim() < b.dim();
  // Within a degree: higher leading exponents first (graded lex).
  for (int m = 0; m < a.dim(); ++m) {
    if (a.space(m) != b.space(m)) return a.space(m) > b.space(m);
  }
  return a.time() > b.time();
}

SpaceTimePolynomial::SpaceTimePolynomial(int dim, int degree_bound)
    : dim_(dim), degree_bound_(degree_bound) {
  check_dim(dim);
  if (degree_bound < 0) throw Error(ErrorKind::InvalidArgument, "negative degree bound");
}

SpaceTimePolynomial SpaceTimePolynomial::constant(int dim, double value) {
  SpaceTimePolynomial p(dim, 0);
  p.add_term(MultiIndex::zero(dim), value);
  return p;
}

SpaceTimePolynomial SpaceTimePolynomial::monomial(const MultiIndex& index, double coeff) {
  SpaceTimePolynomial p(index.dim(), index.total_degree());
  p.add_term(index, coeff);
  return p;
}

double SpaceTimePolynomial::coeff(const MultiIndex& index) const {
  auto it = coeffs_.find(index);
  return it == coeffs_.end() ? 0.0 : it->second;
}

double SpaceTimePolynomial::max_abs_coeff() const {
  double m = 0.0;
  for (const auto& [idx, a] : coeffs_) m = std::max(m, std::abs(a));
  return m;
}

int SpaceTimePolynomial::actual_degree() const {
  int d = 0;
  for (const auto& [idx, a] : coeffs_) d = std::max(d, idx.total_degree());
  return d;
}

void SpaceTimePolynomial::add_term(const MultiIndex& index, double value) {
  if (index.dim() != dim_) {
    throw Error(ErrorKind::DimensionMismatch, "monomial dimension does not match polynomial");
  }
  degree_bound_ = std::max(degree_bound_, index.total_degree());
  auto [it, inserted] = coeffs_.try_emplace(index, value);
  if (!inserted) it->second += value;
  if (std::abs(it->second) < kZeroCutoff) coeffs_.erase(it);
}

void SpaceTimePolynomial::normalize() {
  std::erase_if(coeffs_, [](const auto& kv) { return std::abs(kv.second) < kZeroCutoff; });
}

double SpaceTimePolynomial::eval(std::span<const double> x, double t) const {
  if (static_cast<int>(x.size()) != dim_) {
    throw Error(ErrorKind::DimensionMismatch,
                "point has " + std::to_string(x.size()) + " space coordinates, polynomial has " +
                    std::to_string(dim_));
  }
  double sum = 0.0;
  for (const auto& [idx, a] : coeffs_) {
    double term = a * ipow(t, idx.time());
    for (int m = 0; m < dim_; ++m) term *= ipow(x[m], idx.space(m));
    sum += term;
  }
  return sum;
}

SpaceTimePolynomial SpaceTimePolynomial::operator+(const SpaceTimePolynomial& other) const {
  if (other.dim_ != dim_) throw Error(ErrorKind::DimensionMismatch, "polynomial dimensions differ");
  SpaceTimePolynomial r = *this;
  r.degree_bound_ = std::max(degree_bound_, other.degree_bound_);
  for (const auto& [idx, a] : other.coeffs_) r.add_term(idx, a);
  return r;
}

SpaceTimePolynomial SpaceTimePolynomial::operator-() const {
  SpaceTimePolynomial r = *this;
  for (auto& [idx, a] : r.coeffs_) a = -a;
  return r;
}

SpaceTimePolynomial SpaceTimePolynomial::operator-(const SpaceTimePolynomial& other) const {
  return *this + (-other);
}

SpaceTimePolynomial SpaceTimePolynomial::operator*(const SpaceTimePolynomial& other) const {
  if (other.dim_ != dim_) throw Error(ErrorKind::DimensionMismatch, "polynomial dimensions differ");
  SpaceTimePolynomial r(dim_, degree_bound_ + other.degree_bound_);
  for (const auto& [ia, a] : coeffs_) {
    for (const auto& [ib, b] : other.coeffs_) {
      std::array<int, kMaxSpaceDim> e{};
      for (int m = 0; m < dim_; ++m) e[m] = ia.space(m) + ib.space(m);
      r.add_term(MultiIndex(std::span<const int>(e.data(), dim_), ia.time() + ib.time()), a * b);
    }
  }
  return r;
}

SpaceTimePolynomial operator*(double a, const SpaceTimePolynomial& p) {
  SpaceTimePolynomial r = p;
  for (auto& [idx, c] : r.coeffs_) c *= a;
  r.normalize();
  return r;
}

std::string SpaceTimePolynomial::to_string() const {
  if (coeffs_.empty()) return "0";
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (const auto& [idx, a] : coeffs_) {
    if (!first) os << " + ";
    first = false;
    os << a;
    for (int m = 0; m < dim_; ++m) {
      if (idx.space(m) > 0) os << "*x" << m + 1 << "^" << idx.space(m);
    }
    if (idx.time() > 0) os << "*t^" << idx.time();
  }
  return os.str();
}

SpaceTimePolynomial derive(const SpaceTimePolynomial& p, Axis axis) {
  if (!axis.is_time() && (axis.index < 0 || axis.index >= p.dim())) {
    throw Error(ErrorKind::InvalidArgument,
                "axis " + std::to_string(axis.index) + " out of range for dimension " +
                    std::to_string(p.dim()));
  }
  SpaceTimePolynomial r(p.dim(), std::max(0, p.degree_bound() - 1));
  for (const auto& [idx, a] : p.coeffs()) {
    const int e = axis.is_time() ? idx.time() : idx.space(axis.index);
    if (e == 0) continue;
    const MultiIndex lowered =
        axis.is_time() ? idx.with_time(e - 1) : idx.with_space(axis.index, e - 1);
    r.add_term(lowered, a * e);
  }
  return r;
}

SpaceTimePolynomial wave_residual(const SpaceTimePolynomial& p, double c) {
  if (!(c > 0.0)) throw Error(ErrorKind::InvalidArgument, "wavespeed must be positive");
  SpaceTimePolynomial r = (1.0 / (c * c)) * derive(derive(p, Axis::time()), Axis::time());
  for (int m = 0; m < p.dim(); ++m) {
    r = r - derive(derive(p, Axis::space(m)), Axis::space(m));
  }
  return r;
}

SpaceTimePolynomial affine_map(const SpaceTimePolynomial& p, std::span<const double> center_x,
                               double center_t, double h, double c) {
  if (!(h > 0.0) || !(c > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "affine_map needs h > 0 and c > 0");
  }
  const int n = p.dim();
  if (static_cast<int>(center_x.size()) != n) {
    throw Error(ErrorKind::DimensionMismatch, "center dimension does not match polynomial");
  }
  const int deg = p.actual_degree();
  // powers[m][k] = ((x_m - x0_m)/h)^k, powers[n][k] = (c (t - t0)/h)^k
  std::vector<std::vector<SpaceTimePolynomial>> powers(n + 1);
  for (int m = 0; m <= n; ++m) {
    SpaceTimePolynomial lin(n, 1);
    std::array<int, kMaxSpaceDim> e{};
    if (m < n) {
      e[m] = 1;
      lin.add_term(MultiIndex(std::span<const int>(e.data(), n), 0), 1.0 / h);
      lin.add_term(MultiIndex::zero(n), -center_x[m] / h);
    } else {
      lin.add_term(MultiIndex(std::span<const int>(e.data(), n), 1), c / h);
      lin.add_term(MultiIndex::zero(n), -c * center_t / h);
    }
    powers[m].push_back(SpaceTimePolynomial::constant(n, 1.0));
    for (int k = 1; k <= deg; ++k) powers[m].push_back(powers[m].back() * lin);
  }
  SpaceTimePolynomial q(n, p.degree_bound());
  for (const auto& [idx, a] : p.coeffs()) {
    SpaceTimePolynomial term = a * powers[n][idx.time()];
    for (int m = 0; m < n; ++m) term = term * powers[m][idx.space(m)];
    q = q + term;
  }
  return q;
}

std::size_t count_monomials(int vars, int degree) {
  if (degree < 0) return 0;
  // C(degree + vars, vars)
  std::size_t r = 1;
  for (int i = 1; i <= vars; ++i) r = r * static_cast<std::size_t>(degree + i) / static_cast<std::size_t>(i);
  return r;
}

namespace {

void enumerate(int dim, int remaining, int pos, std::array<int, kMaxSpaceDim>& cur,
               std::vector<std::array<int, kMaxSpaceDim>>& out) {
  if (pos == dim - 1) {
    cur[pos] = remaining;
    out.push_back(cur);
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    cur[pos] = e;
    enumerate(dim, remaining - e, pos + 1, cur, out);
  }
}

}  // namespace

std::vector<MultiIndex> space_indices(int dim, int degree) {
  check_dim(dim);
  std::vector<MultiIndex> out;
  for (int d = 0; d <= degree; ++d) {
    std::vector<std::array<int, kMaxSpaceDim>> exps;
    std::array<int, kMaxSpaceDim> cur{};
    enumerate(dim, d, 0, cur, exps);
    for (const auto& e : exps) out.emplace_back(std::span<const int>(e.data(), dim), 0);
  }
  return out;
}

std::vector<MultiIndex> spacetime_indices(int dim, int degree) {
  check_dim(dim);
  std::vector<MultiIndex> out;
  for (int d = 0; d <= degree; ++d) {
    // space part of degree d - k, time exponent k, ordered as GradedOrder does
    for (int k = 0; k <= d; ++k) {
      std::vector<std::array<int, kMaxSpaceDim>> exps;
      std::array<int, kMaxSpaceDim> cur{};
      enumerate(dim, d - k, 0, cur, exps);
      for (const auto& e : exps) out.emplace_back(std::span<const int>(e.data(), dim), k);
    }
  }
  std::sort(out.begin(), out.end(), GradedOrder{});
  return out;
}

}  // namespace ttdg
