#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <optional>
#include <string>

#include "chainzono/lp.hpp"

namespace chainzono {

/// Axis-aligned box [lo, hi] in state coordinates.
struct IntervalHull {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  Eigen::Index dim() const { return lo.size(); }
  Eigen::VectorXd center() const { return 0.5 * (lo + hi); }
  Eigen::VectorXd half_widths() const { return 0.5 * (hi - lo); }
  bool contains(const Eigen::VectorXd& x, double tol = lp::kFeasibilityTolerance) const;
};

/// Extended constrained zonotope
///
///   { G xi + c : A xi = b, lo_j <= xi_j <= hi_j }
///
/// Generator bounds are general finite intervals, so both the classical
/// symmetric box [-h, h] and one-sided ranges such as [0, u] are stored
/// without re-centering. Instances are immutable once constructed.
class ExtConstrainedZonotope {
 public:
  /// Validates dimensions and bounds; throws InvalidArgument on mismatch,
  /// non-finite bounds, or lo_j > hi_j.
  ExtConstrainedZonotope(Eigen::MatrixXd G, Eigen::VectorXd c, Eigen::MatrixXd A,
                         Eigen::VectorXd b, Eigen::VectorXd xi_lo, Eigen::VectorXd xi_hi);

  /// Unconstrained zonotope with the symmetric unit box.
  static ExtConstrainedZonotope from_generators(Eigen::MatrixXd G, Eigen::VectorXd c);
  /// Box [lo, hi] represented with diagonal generators and the unit box.
  static ExtConstrainedZonotope from_hull(const IntervalHull& hull);
  /// Singleton {p} (no generators).
  static ExtConstrainedZonotope point(Eigen::VectorXd p);

  const Eigen::MatrixXd& G() const { return G_; }
  const Eigen::VectorXd& c() const { return c_; }
  const Eigen::MatrixXd& A() const { return A_; }
  const Eigen::VectorXd& b() const { return b_; }
  const Eigen::VectorXd& xi_lo() const { return xi_lo_; }
  const Eigen::VectorXd& xi_hi() const { return xi_hi_; }

  Eigen::Index dim() const { return c_.size(); }
  Eigen::Index num_generators() const { return G_.cols(); }
  Eigen::Index num_constraints() const { return A_.rows(); }

 private:
  Eigen::MatrixXd G_;
  Eigen::VectorXd c_;
  Eigen::MatrixXd A_;
  Eigen::VectorXd b_;
  Eigen::VectorXd xi_lo_;
  Eigen::VectorXd xi_hi_;
};

using Zonotope = ExtConstrainedZonotope;

Zonotope make_zonotope(Eigen::MatrixXd G, Eigen::VectorXd c, Eigen::MatrixXd A,
                       Eigen::VectorXd b, Eigen::VectorXd xi_lo, Eigen::VectorXd xi_hi);

/// Same set with every generator box re-centered to [-h_j, h_j].
Zonotope to_symmetric_box(const Zonotope& Z);

/// { T z : z in Z }.
Zonotope linear_map(const Eigen::MatrixXd& T, const Zonotope& Z);

/// { z + v : z in Z }.
Zonotope translate(const Zonotope& Z, const Eigen::VectorXd& v);

/// { z + w : z in Z, w in W } by generator and constraint block concatenation.
Zonotope minkowski_sum(const Zonotope& Z, const Zonotope& W);

/// { z in Z : T z in Y }. Appends the rows T G_z xi_z - G_y xi_y = c_y - T c_z.
Zonotope generalized_intersect(const Zonotope& Z, const Zonotope& Y, const Eigen::MatrixXd& T);

/// LP feasibility of the constraints within the generator box. An LP
/// iteration-limit failure is logged and reported as nonempty.
bool is_empty(const Zonotope& Z, double tol = lp::kFeasibilityTolerance);

/// max over Z of <d, z>. Throws EmptySetError when Z is empty.
double support_value(const Zonotope& Z, const Eigen::VectorXd& d,
                     double tol = lp::kFeasibilityTolerance);

/// Maximizer of <d, z> over Z, or nullopt when Z is empty.
std::optional<Eigen::VectorXd> support_point(const Zonotope& Z, const Eigen::VectorXd& d,
                                             double tol = lp::kFeasibilityTolerance);

/// Tightest axis-aligned box around Z (2n support LPs; closed form when
/// unconstrained). Throws EmptySetError when Z is empty.
IntervalHull interval_hull(const Zonotope& Z, double tol = lp::kFeasibilityTolerance);

/// Upper bound on max_{z in Z} ||z - c||_2 from the generator magnitudes.
/// Constraints are ignored, so the bound is conservative.
double radius_bound(const Zonotope& Z);

/// exists xi in the box with G xi + c = x and A xi = b.
bool contains_point(const Zonotope& Z, const Eigen::VectorXd& x,
                    double tol = lp::kFeasibilityTolerance);

std::ostream& operator<<(std::ostream& os, const Zonotope& Z);

}  // namespace chainzono
