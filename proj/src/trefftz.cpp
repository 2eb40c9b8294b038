#include "ttdg/trefftz.hpp"

#include <map>

namespace ttdg {

const char* to_string(SeedKind kind) {
  switch (kind) {
    case SeedKind::Monomial: return "monomial";
    case SeedKind::Legendre: return "legendre";
    case SeedKind::Chebyshev: return "chebyshev";
  }
  return "unknown";
}

SeedKind parse_seed_kind(const std::string& name) {
  if (name == "monomial") return SeedKind::Monomial;
  if (name == "legendre") return SeedKind::Legendre;
  if (name == "chebyshev") return SeedKind::Chebyshev;
  throw Error(ErrorKind::InvalidArgument, "unknown seed kind '" + name + "'");
}

std::size_t scalar_trefftz_dim(int p, int n) {
  if (p < 0) return 0;
  return count_monomials(n, p) + count_monomials(n, p - 1);
}

std::size_t first_order_trefftz_dim(int p, int n) { return scalar_trefftz_dim(p + 1, n) - 1; }

namespace {

// Monomial coefficients of the 1-D family members of degree 0..degree.
std::vector<std::vector<double>> family_1d(SeedKind kind, int degree) {
  std::vector<std::vector<double>> f;
  for (int k = 0; k <= degree; ++k) {
    std::vector<double> c(k + 1, 0.0);
    if (kind == SeedKind::Monomial || k == 0) {
      c[k] = 1.0;
    } else if (k == 1) {
      c[1] = 1.0;
    } else if (kind == SeedKind::Legendre) {
      // k P_k = (2k - 1) x P_{k-1} - (k - 1) P_{k-2}
      for (int i = 0; i < k; ++i) c[i + 1] += (2.0 * k - 1.0) / k * f[k - 1][i];
      for (int i = 0; i <= k - 2; ++i) c[i] -= (k - 1.0) / k * f[k - 2][i];
    } else {
      // T_k = 2 x T_{k-1} - T_{k-2}
      for (int i = 0; i < k; ++i) c[i + 1] += 2.0 * f[k - 1][i];
      for (int i = 0; i <= k - 2; ++i) c[i] -= f[k - 2][i];
    }
    f.push_back(std::move(c));
  }
  return f;
}

}  // namespace

std::vector<SpaceTimePolynomial> seed_space_basis(SeedKind kind, int degree, int n) {
  if (degree < 0) throw Error(ErrorKind::InvalidArgument, "seed degree must be >= 0");
  if (n < 1 || n > kMaxSpaceDim) throw Error(ErrorKind::InvalidArgument, "space dimension must be 1..3");
  if (kind != SeedKind::Monomial && kind != SeedKind::Legendre && kind != SeedKind::Chebyshev) {
    throw Error(ErrorKind::InvalidArgument, "unknown seed kind");
  }
  const auto family = family_1d(kind, degree);
  std::vector<SpaceTimePolynomial> out;
  for (const MultiIndex& alpha : space_indices(n, degree)) {
    SpaceTimePolynomial prod = SpaceTimePolynomial::constant(n, 1.0);
    for (int m = 0; m < n; ++m) {
      SpaceTimePolynomial factor(n, alpha.space(m));
      const auto& c = family[alpha.space(m)];
      for (int i = 0; i < static_cast<int>(c.size()); ++i) {
        if (c[i] != 0.0) factor.add_term(MultiIndex::zero(n).with_space(m, i), c[i]);
      }
      prod = prod * factor;
    }
    out.push_back(std::move(prod));
  }
  return out;
}

SpaceTimePolynomial trefftz_extend(const SpaceTimePolynomial& seed0,
                                   const std::optional<SpaceTimePolynomial>& seed1, int p,
                                   double c) {
  if (p < 0) throw Error(ErrorKind::InvalidArgument, "degree must be >= 0");
  if (!(c > 0.0)) throw Error(ErrorKind::InvalidArgument, "wavespeed must be positive");
  const int n = seed0.dim();
  auto check_seed = [&](const SpaceTimePolynomial& s, int max_degree, const char* name) {
    if (s.dim() != n) throw Error(ErrorKind::DimensionMismatch, "seed dimensions differ");
    for (const auto& [idx, a] : s.coeffs()) {
      if (idx.time() != 0) {
        throw Error(ErrorKind::InvalidArgument, std::string(name) + " depends on time");
      }
      if (idx.space_degree() > max_degree) {
        throw Error(ErrorKind::InvalidArgument,
                    std::string(name) + " has degree " + std::to_string(idx.space_degree()) +
                        " above the allowed " + std::to_string(max_degree));
      }
    }
  };
  check_seed(seed0, p, "seed0");
  if (seed1) check_seed(*seed1, p - 1, "seed1");

  SpaceTimePolynomial u(n, p);
  for (const auto& [idx, a] : seed0.coeffs()) u.add_term(idx, a);
  if (seed1) {
    for (const auto& [idx, a] : seed1->coeffs()) u.add_term(idx.with_time(1), a);
  }
  const double c2 = c * c;
  for (int k = 2; k <= p; ++k) {
    for (const MultiIndex& alpha : space_indices(n, p - k)) {
      double sum = 0.0;
      for (int m = 0; m < n; ++m) {
        const int am = alpha.space(m);
        sum += (am + 1.0) * (am + 2.0) * u.coeff(alpha.with_space(m, am + 2).with_time(k - 2));
      }
      if (sum != 0.0) u.add_term(alpha.with_time(k), c2 / (k * (k - 1.0)) * sum);
    }
  }
  return u;
}

ScalarTrefftzBasis build_scalar_basis(int p, int n, SeedKind kind) {
  if (p < 0) throw Error(ErrorKind::InvalidArgument, "degree must be >= 0");
  ScalarTrefftzBasis b;
  b.p = p;
  b.n = n;
  b.seed = kind;
  for (const auto& s : seed_space_basis(kind, p, n)) {
    b.members.push_back(trefftz_extend(s, std::nullopt, p, 1.0));
  }
  if (p >= 1) {
    const SpaceTimePolynomial zero(n, 0);
    for (const auto& s : seed_space_basis(kind, p - 1, n)) {
      b.members.push_back(trefftz_extend(zero, s, p, 1.0));
    }
  }
  // The first seed in graded order is the constant for every kind.
  b.constant_member = 0;
  return b;
}

FirstOrderTrefftzBasis build_first_order_basis(int p, int n, SeedKind kind) {
  const ScalarTrefftzBasis scalar = build_scalar_basis(p + 1, n, kind);
  FirstOrderTrefftzBasis b;
  b.p = p;
  b.n = n;
  b.seed = kind;
  for (std::size_t j = 0; j < scalar.members.size(); ++j) {
    if (j == scalar.constant_member) continue;
    const auto& u = scalar.members[j];
    FirstOrderMember m;
    m.v = derive(u, Axis::time());
    for (int d = 0; d < n; ++d) m.sigma.push_back(-derive(u, Axis::space(d)));
    m.potential = u;
    b.members.push_back(std::move(m));
  }
  return b;
}

namespace {

void check_localization(const Localization& w) {
  if (!(w.h > 0.0) || !(w.c > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "localization needs h > 0 and c > 0");
  }
}

}  // namespace

LocalScalarBasis localize(const ScalarTrefftzBasis& basis, const Localization& where) {
  check_localization(where);
  LocalScalarBasis out{where, {}};
  const std::span<const double> x0(where.center_x.data(), basis.n);
  for (const auto& m : basis.members) {
    out.members.push_back(affine_map(m, x0, where.center_t, where.h, where.c));
  }
  return out;
}

LocalFirstOrderBasis localize(const FirstOrderTrefftzBasis& basis, const Localization& where) {
  check_localization(where);
  LocalFirstOrderBasis out{where, {}};
  const std::span<const double> x0(where.center_x.data(), basis.n);
  for (const auto& m : basis.members) {
    FirstOrderMember lm;
    lm.v = where.c * affine_map(m.v, x0, where.center_t, where.h, where.c);
    for (const auto& s : m.sigma) lm.sigma.push_back(affine_map(s, x0, where.center_t, where.h, where.c));
    lm.potential = where.h * affine_map(m.potential, x0, where.center_t, where.h, where.c);
    out.members.push_back(std::move(lm));
  }
  return out;
}

TrefftzEvaluator::TrefftzEvaluator(const FirstOrderTrefftzBasis& basis, bool include_constant)
    : n_(basis.n), p_(basis.p), include_constant_(include_constant), max_degree_(basis.p + 1) {
  if (max_degree_ > 15) throw Error(ErrorKind::InvalidArgument, "evaluator supports p <= 14");
  monomials_ = spacetime_indices(n_, max_degree_);
  std::map<MultiIndex, int, GradedOrder> column;
  for (int i = 0; i < static_cast<int>(monomials_.size()); ++i) column[monomials_[i]] = i;

  const int rows = static_cast<int>(basis.members.size()) + (include_constant ? 1 : 0);
  const int cols = static_cast<int>(monomials_.size());
  cv_ = Eigen::MatrixXd::Zero(rows, cols);
  cu_ = Eigen::MatrixXd::Zero(rows, cols);
  for (int d = 0; d < n_; ++d) cs_[d] = Eigen::MatrixXd::Zero(rows, cols);

  auto fill = [&](Eigen::MatrixXd& mat, int row, const SpaceTimePolynomial& poly) {
    for (const auto& [idx, a] : poly.coeffs()) mat(row, column.at(idx)) = a;
  };
  for (int j = 0; j < static_cast<int>(basis.members.size()); ++j) {
    const auto& m = basis.members[j];
    fill(cv_, j, m.v);
    for (int d = 0; d < n_; ++d) fill(cs_[d], j, m.sigma[d]);
    fill(cu_, j, m.potential);
  }
  if (include_constant) cu_(rows - 1, column.at(MultiIndex::zero(n_))) = 1.0;
  row_start_.assign(1, 0);
  auto compress = [&](const Eigen::MatrixXd& mat) {
    for (int r = 0; r < rows; ++r) {
      for (int j = 0; j < cols; ++j) {
        if (mat(r, j) == 0.0) continue;
        nz_col_.push_back(j);
        nz_val_.push_back(mat(r, j));
      }
      row_start_.push_back(static_cast<int>(nz_col_.size()));
    }
  };
  compress(cv_);
  for (int d = 0; d < n_; ++d) compress(cs_[d]);
  compress(cu_);
}

void TrefftzEvaluator::eval(const Localization& where, std::span<const double> x,
                            std::span<const double> t, BasisValues& out,
                            bool with_potential) const {
  const int npts = static_cast<int>(t.size());
  if (static_cast<int>(x.size()) != npts * n_) {
    throw Error(ErrorKind::DimensionMismatch, "point coordinates do not match point count");
  }
  const int nm = static_cast<int>(monomials_.size());
  Eigen::MatrixXd mono(nm, npts);
  const double inv_h = 1.0 / where.h;
  std::array<std::array<double, 16>, kMaxSpaceDim + 1> pw{};
  for (int q = 0; q < npts; ++q) {
    for (int d = 0; d <= n_; ++d) {
      const double s = d < n_ ? (x[q * n_ + d] - where.center_x[d]) * inv_h
                              : where.c * (t[q] - where.center_t) * inv_h;
      pw[d][0] = 1.0;
      for (int k = 1; k <= max_degree_; ++k) pw[d][k] = pw[d][k - 1] * s;
    }
    for (int i = 0; i < nm; ++i) {
      const MultiIndex& idx = monomials_[i];
      double val = pw[n_][idx.time()];
      for (int d = 0; d < n_; ++d) val *= pw[d][idx.space(d)];
      mono(i, q) = val;
    }
  }
  const int rows = size();
  auto apply = [&](int block, double scale, Eigen::MatrixXd& dst) {
    dst.resize(rows, npts);
    for (int q = 0; q < npts; ++q) {
      const double* mq = mono.data() + static_cast<std::ptrdiff_t>(q) * nm;
      for (int r = 0; r < rows; ++r) {
        const int row = block * rows + r;
        double acc = 0.0;
        for (int z = row_start_[row]; z < row_start_[row + 1]; ++z) acc += nz_val_[z] * mq[nz_col_[z]];
        dst(r, q) = scale * acc;
      }
    }
  };
  apply(0, where.c, out.v);
  for (int d = 0; d < n_; ++d) apply(d + 1, 1.0, out.sigma[d]);
  if (with_potential) apply(n_ + 1, where.h, out.potential);
}

}  // namespace ttdg
