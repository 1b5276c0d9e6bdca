#include "chainzono/zonotope.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <ostream>

#include "chainzono/error.hpp"

namespace chainzono {

namespace {

void require(bool condition, const char* message) {
  if (!condition) throw InvalidArgument(message);
}

// Stacks [G; A] xi = [x - c; b] for membership tests.
lp::Problem membership_problem(const Zonotope& Z, const Eigen::VectorXd& x) {
  const Eigen::Index n = Z.dim();
  const Eigen::Index nc = Z.num_constraints();
  lp::Problem p;
  p.A.resize(n + nc, Z.num_generators());
  p.A << Z.G(), Z.A();
  p.b.resize(n + nc);
  p.b << x - Z.c(), Z.b();
  p.lower = Z.xi_lo();
  p.upper = Z.xi_hi();
  return p;
}

lp::Problem constraint_problem(const Zonotope& Z) {
  return lp::Problem{Z.A(), Z.b(), Z.xi_lo(), Z.xi_hi(), {}};
}

}  // namespace

bool IntervalHull::contains(const Eigen::VectorXd& x, double tol) const {
  if (x.size() != lo.size()) throw InvalidArgument("IntervalHull::contains: dimension mismatch");
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double slack = tol * std::max(1.0, std::abs(x[i]));
    if (x[i] < lo[i] - slack || x[i] > hi[i] + slack) return false;
  }
  return true;
}

ExtConstrainedZonotope::ExtConstrainedZonotope(Eigen::MatrixXd G, Eigen::VectorXd c,
                                               Eigen::MatrixXd A, Eigen::VectorXd b,
                                               Eigen::VectorXd xi_lo, Eigen::VectorXd xi_hi)
    : G_(std::move(G)),
      c_(std::move(c)),
      A_(std::move(A)),
      b_(std::move(b)),
      xi_lo_(std::move(xi_lo)),
      xi_hi_(std::move(xi_hi)) {
  // An empty A may arrive as 0x0; give it the generator column count.
  if (A_.rows() == 0 && A_.cols() != G_.cols()) A_.resize(0, G_.cols());
  require(G_.rows() == c_.size(), "zonotope: G rows must equal dim(c)");
  require(A_.cols() == G_.cols(), "zonotope: A and G column counts differ");
  require(A_.rows() == b_.size(), "zonotope: A rows must equal dim(b)");
  require(xi_lo_.size() == G_.cols() && xi_hi_.size() == G_.cols(),
          "zonotope: generator bounds must match the generator count");
  require(G_.allFinite() && c_.allFinite() && A_.allFinite() && b_.allFinite(),
          "zonotope: non-finite entry");
  for (Eigen::Index j = 0; j < G_.cols(); ++j) {
    require(std::isfinite(xi_lo_[j]) && std::isfinite(xi_hi_[j]),
            "zonotope: generator bounds must be finite");
    require(xi_lo_[j] <= xi_hi_[j], "zonotope: generator bound lo > hi");
  }
}

ExtConstrainedZonotope ExtConstrainedZonotope::from_generators(Eigen::MatrixXd G,
                                                               Eigen::VectorXd c) {
  const Eigen::Index ng = G.cols();
  return {std::move(G), std::move(c), Eigen::MatrixXd(0, ng), Eigen::VectorXd(0),
          Eigen::VectorXd::Constant(ng, -1.0), Eigen::VectorXd::Ones(ng)};
}

ExtConstrainedZonotope ExtConstrainedZonotope::from_hull(const IntervalHull& hull) {
  require(hull.lo.size() == hull.hi.size(), "from_hull: lo/hi dimension mismatch");
  return from_generators(hull.half_widths().asDiagonal(), hull.center());
}

ExtConstrainedZonotope ExtConstrainedZonotope::point(Eigen::VectorXd p) {
  const Eigen::Index n = p.size();
  return from_generators(Eigen::MatrixXd(n, 0), std::move(p));
}

Zonotope make_zonotope(Eigen::MatrixXd G, Eigen::VectorXd c, Eigen::MatrixXd A,
                       Eigen::VectorXd b, Eigen::VectorXd xi_lo, Eigen::VectorXd xi_hi) {
  return {std::move(G), std::move(c), std::move(A), std::move(b), std::move(xi_lo),
          std::move(xi_hi)};
}

Zonotope to_symmetric_box(const Zonotope& Z) {
  const Eigen::VectorXd mid = 0.5 * (Z.xi_lo() + Z.xi_hi());
  const Eigen::VectorXd half = 0.5 * (Z.xi_hi() - Z.xi_lo());
  return {Z.G(), Z.c() + Z.G() * mid, Z.A(), Z.b() - Z.A() * mid, -half, half};
}

Zonotope linear_map(const Eigen::MatrixXd& T, const Zonotope& Z) {
  require(T.cols() == Z.dim(), "linear_map: T column count must equal set dimension");
  return {T * Z.G(), T * Z.c(), Z.A(), Z.b(), Z.xi_lo(), Z.xi_hi()};
}

Zonotope translate(const Zonotope& Z, const Eigen::VectorXd& v) {
  require(v.size() == Z.dim(), "translate: dimension mismatch");
  return {Z.G(), Z.c() + v, Z.A(), Z.b(), Z.xi_lo(), Z.xi_hi()};
}

Zonotope minkowski_sum(const Zonotope& Z, const Zonotope& W) {
  require(Z.dim() == W.dim(), "minkowski_sum: dimension mismatch");
  const Eigen::Index gz = Z.num_generators();
  const Eigen::Index gw = W.num_generators();
  const Eigen::Index cz = Z.num_constraints();
  const Eigen::Index cw = W.num_constraints();

  Eigen::MatrixXd G(Z.dim(), gz + gw);
  G << Z.G(), W.G();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(cz + cw, gz + gw);
  A.topLeftCorner(cz, gz) = Z.A();
  A.bottomRightCorner(cw, gw) = W.A();
  Eigen::VectorXd b(cz + cw);
  b << Z.b(), W.b();
  Eigen::VectorXd lo(gz + gw), hi(gz + gw);
  lo << Z.xi_lo(), W.xi_lo();
  hi << Z.xi_hi(), W.xi_hi();
  return {std::move(G), Z.c() + W.c(), std::move(A), std::move(b), std::move(lo), std::move(hi)};
}

Zonotope generalized_intersect(const Zonotope& Z, const Zonotope& Y, const Eigen::MatrixXd& T) {
  require(T.cols() == Z.dim(), "generalized_intersect: T columns must equal dim(Z)");
  require(T.rows() == Y.dim(), "generalized_intersect: T rows must equal dim(Y)");
  const Eigen::Index gz = Z.num_generators();
  const Eigen::Index gy = Y.num_generators();
  const Eigen::Index cz = Z.num_constraints();
  const Eigen::Index cy = Y.num_constraints();
  const Eigen::Index k = Y.dim();

  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(Z.dim(), gz + gy);
  G.leftCols(gz) = Z.G();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(cz + cy + k, gz + gy);
  A.topLeftCorner(cz, gz) = Z.A();
  A.block(cz, gz, cy, gy) = Y.A();
  A.block(cz + cy, 0, k, gz) = T * Z.G();
  A.block(cz + cy, gz, k, gy) = -Y.G();
  Eigen::VectorXd b(cz + cy + k);
  b << Z.b(), Y.b(), Y.c() - T * Z.c();
  Eigen::VectorXd lo(gz + gy), hi(gz + gy);
  lo << Z.xi_lo(), Y.xi_lo();
  hi << Z.xi_hi(), Y.xi_hi();
  return {std::move(G), Z.c(), std::move(A), std::move(b), std::move(lo), std::move(hi)};
}

bool is_empty(const Zonotope& Z, double tol) {
  if (Z.num_constraints() == 0) return false;
  const lp::Result r = lp::solve(constraint_problem(Z), {.feasibility_tol = tol});
  if (r.status == lp::Status::iteration_limit) {
    spdlog::warn("is_empty: LP iteration limit reached ({} generators, {} constraints); "
                 "treating set as nonempty",
                 Z.num_generators(), Z.num_constraints());
    return false;
  }
  return r.status == lp::Status::infeasible;
}

std::optional<Eigen::VectorXd> support_point(const Zonotope& Z, const Eigen::VectorXd& d,
                                             double tol) {
  if (d.size() != Z.dim()) throw InvalidArgument("support: direction dimension mismatch");
  lp::Problem p = constraint_problem(Z);
  p.cost = -(Z.G().transpose() * d);
  const lp::Result r = lp::solve(p, {.feasibility_tol = tol});
  if (r.status == lp::Status::infeasible) return std::nullopt;
  if (r.status == lp::Status::iteration_limit) {
    throw std::runtime_error("support: LP iteration limit reached");
  }
  return Eigen::VectorXd(Z.G() * r.x + Z.c());
}

double support_value(const Zonotope& Z, const Eigen::VectorXd& d, double tol) {
  const auto z = support_point(Z, d, tol);
  if (!z) throw EmptySetError("support_value: empty set");
  return d.dot(*z);
}

IntervalHull interval_hull(const Zonotope& Z, double tol) {
  const Eigen::Index n = Z.dim();
  IntervalHull hull{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  if (Z.num_constraints() == 0) {
    for (Eigen::Index i = 0; i < n; ++i) {
      double lo = Z.c()[i];
      double hi = Z.c()[i];
      for (Eigen::Index j = 0; j < Z.num_generators(); ++j) {
        const double a = Z.G()(i, j) * Z.xi_lo()[j];
        const double b = Z.G()(i, j) * Z.xi_hi()[j];
        lo += std::min(a, b);
        hi += std::max(a, b);
      }
      hull.lo[i] = lo;
      hull.hi[i] = hi;
    }
    return hull;
  }
  if (is_empty(Z, tol)) throw EmptySetError("interval_hull: empty set");
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd e = Eigen::VectorXd::Unit(n, i);
    hull.hi[i] = support_value(Z, e, tol);
    hull.lo[i] = -support_value(Z, -e, tol);
    if (hull.lo[i] > hull.hi[i]) hull.lo[i] = hull.hi[i] = 0.5 * (hull.lo[i] + hull.hi[i]);
  }
  return hull;
}

double radius_bound(const Zonotope& Z) {
  const Eigen::VectorXd reach = Z.xi_lo().cwiseAbs().cwiseMax(Z.xi_hi().cwiseAbs());
  return (Z.G().cwiseAbs() * reach).norm();
}

bool contains_point(const Zonotope& Z, const Eigen::VectorXd& x, double tol) {
  if (x.size() != Z.dim()) throw InvalidArgument("contains_point: dimension mismatch");
  const lp::Result r = lp::solve(membership_problem(Z, x), {.feasibility_tol = tol});
  return r.status == lp::Status::optimal;
}

std::ostream& operator<<(std::ostream& os, const Zonotope& Z) {
  const Eigen::IOFormat fmt(Eigen::StreamPrecision, 0, ", ", "; ", "", "", "[", "]");
  os << "Zonotope(n=" << Z.dim() << ", n_g=" << Z.num_generators()
     << ", n_c=" << Z.num_constraints() << ", G=" << Z.G().format(fmt)
     << ", c=" << Z.c().transpose().format(fmt) << ", A=" << Z.A().format(fmt)
     << ", b=" << Z.b().transpose().format(fmt) << ", lo=" << Z.xi_lo().transpose().format(fmt)
     << ", hi=" << Z.xi_hi().transpose().format(fmt) << ")";
  return os;
}

}  // namespace chainzono
