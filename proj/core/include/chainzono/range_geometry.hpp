#pragma once

#include <Eigen/Dense>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "chainzono/zonotope.hpp"

namespace chainzono {

inline constexpr int kDefaultSectorCount = 64;
inline constexpr int kMinSectorCount = 8;

/// Annulus { s : r_lo <= ||s - center||_2 <= r_hi } in the plane.
struct RangeRing {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double r_lo = 0.0;
  double r_hi = 0.0;

  bool contains(const Eigen::Vector2d& p, double tol = lp::kFeasibilityTolerance) const;
};

/// Bearing range [theta_lo, theta_hi] in radians; the span must stay below
/// pi/2 for the trapezoid bound to exist.
struct BearingInterval {
  double theta_lo = 0.0;
  double theta_hi = 0.0;

  double span() const { return theta_hi - theta_lo; }
};

/// Run of sectors [q_lo, q_hi] (indices modulo M). When `wrap` is set the
/// run crosses the seam between sector M-1 and sector 0.
struct SectorWindow {
  int q_lo = 0;
  int q_hi = 0;
  int M = kDefaultSectorCount;
  bool wrap = false;

  int count() const { return (q_hi - q_lo + M) % M + 1; }
  double angular_span() const { return 2.0 * std::numbers::pi * count() / M; }
  BearingInterval bearings() const;
};

/// Ring of distances consistent with a range reading y_r and range noise
/// in [r_lo, r_hi]: radii [max(0, y_r - r_hi), y_r - r_lo].
RangeRing ring_from_range(double y_r, double r_lo, double r_hi, const Eigen::Vector2d& anchor);

/// Widens a ring by `radius` on both sides (inner radius clamped at 0).
RangeRing inflate_ring(const RangeRing& ring, double radius);

/// Trapezoid outer bound of the annulus sector {anchor + rho (cos t, sin t) :
/// rho in [r_lo, r_hi], t in theta} as an extended constrained zonotope with
/// generators along both bounding rays, a radial slab constraint along the
/// bisector, and generator box [0, r_hi / cos(span/2)]^2 x [0, 1].
Zonotope sector_zonotope(const Eigen::Vector2d& anchor, double r_lo, double r_hi,
                         const BearingInterval& theta);

/// Ring cut into M equal sectors, sector q spanning [2 pi q / M, 2 pi (q+1) / M].
struct SegmentedRing {
  RangeRing ring;
  int M = kDefaultSectorCount;
  std::vector<Zonotope> sectors;
  std::vector<IntervalHull> sector_boxes;  ///< exact bounding boxes of the trapezoids
};

SegmentedRing segment_ring(const RangeRing& ring, int M = kDefaultSectorCount);

struct ActiveSectors {
  SectorWindow window;
  std::vector<bool> active;  ///< per sector: trapezoid meets the prior
  bool contiguous = true;    ///< every sector inside the window is active
  bool full_circle = false;  ///< all M sectors active; no proper window exists
};

/// Tests each sector against `prior` (through `selector`, which maps the
/// prior's state to the ring plane) and returns the smallest circular window
/// covering the active sectors. Throws NoActiveSectorError if none is active.
ActiveSectors select_active_window(const SegmentedRing& segments, const Zonotope& prior,
                                   const Eigen::MatrixXd& selector);

/// Single wedge covering all sectors of `window`.
Zonotope merged_wedge(const Eigen::Vector2d& anchor, double r_lo, double r_hi,
                      const SectorWindow& window);

/// Diagnostics for the two geometric preconditions of the relative update.
struct AssumptionCheck {
  bool prior_small = false;     ///< diam(prior) < inner radius < dist(center, prior)
  bool neighbor_small = false;  ///< neighbor diameter well below the range reading
  double prior_diameter = 0.0;  ///< upper bound (hull diagonal)
  double prior_distance = 0.0;  ///< lower bound (distance to hull)
};

inline constexpr double kNeighborSmallRatio = 0.1;

struct RelativeMeasurement {
  /// Wedge bound; empty when the active window spans pi/2 or more.
  std::optional<Zonotope> set;
  RangeRing ring;  ///< inflated ring around the neighbor center
  ActiveSectors sectors;
  double neighbor_radius = 0.0;
  AssumptionCheck assumptions;
};

/// Outer bound of (neighbor (+) ring) intersected with the prior: the ring
/// around the neighbor's center is inflated by the neighbor's radius bound,
/// segmented, filtered against the prior, and merged into one wedge.
RelativeMeasurement relative_measurement_set(const Zonotope& neighbor_posterior, double y_r,
                                             double r_lo, double r_hi, const Zonotope& prior,
                                             const Eigen::MatrixXd& selector,
                                             int M = kDefaultSectorCount);

}  // namespace chainzono
