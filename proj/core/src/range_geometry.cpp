#include "chainzono/range_geometry.hpp"

#include <algorithm>
#include <cmath>

#include "chainzono/error.hpp"

namespace chainzono {

namespace {

constexpr double kPi = std::numbers::pi;

double sector_angle(int q, int M) { return 2.0 * kPi * q / M; }

Eigen::Vector2d unit(double angle) { return {std::cos(angle), std::sin(angle)}; }

IntervalHull trapezoid_box(const Eigen::Vector2d& anchor, double r_lo, double r_hi,
                           const BearingInterval& theta) {
  const double reach = r_hi / std::cos(0.5 * theta.span());
  const Eigen::Vector2d corners[] = {
      anchor + r_lo * unit(theta.theta_lo), anchor + r_lo * unit(theta.theta_hi),
      anchor + reach * unit(theta.theta_lo), anchor + reach * unit(theta.theta_hi)};
  IntervalHull box{corners[0], corners[0]};
  for (const auto& p : corners) {
    box.lo = box.lo.cwiseMin(p);
    box.hi = box.hi.cwiseMax(p);
  }
  return box;
}

bool boxes_overlap(const IntervalHull& a, const IntervalHull& b, double tol) {
  for (Eigen::Index i = 0; i < a.dim(); ++i) {
    const double slack = tol * std::max({1.0, std::abs(a.lo[i]), std::abs(a.hi[i])});
    if (a.hi[i] + slack < b.lo[i] || b.hi[i] + slack < a.lo[i]) return false;
  }
  return true;
}

double distance_to_box(const Eigen::Vector2d& p, const IntervalHull& box) {
  const Eigen::Vector2d below = box.lo - p;
  const Eigen::Vector2d above = p - box.hi;
  return below.cwiseMax(above).cwiseMax(0.0).norm();
}

}  // namespace

bool RangeRing::contains(const Eigen::Vector2d& p, double tol) const {
  const double d = (p - center).norm();
  const double slack = tol * std::max(1.0, r_hi);
  return d >= r_lo - slack && d <= r_hi + slack;
}

BearingInterval SectorWindow::bearings() const {
  return {sector_angle(q_lo, M), sector_angle(q_lo + count(), M)};
}

RangeRing ring_from_range(double y_r, double r_lo, double r_hi, const Eigen::Vector2d& anchor) {
  if (!(r_lo <= r_hi)) throw InvalidArgument("ring_from_range: noise bounds out of order");
  if (y_r - r_lo < 0.0) {
    throw InconsistentMeasurementError("ring_from_range: range reading below the noise floor");
  }
  return {anchor, std::max(0.0, y_r - r_hi), y_r - r_lo};
}

RangeRing inflate_ring(const RangeRing& ring, double radius) {
  if (radius < 0.0) throw InvalidArgument("inflate_ring: negative radius");
  return {ring.center, std::max(0.0, ring.r_lo - radius), ring.r_hi + radius};
}

Zonotope sector_zonotope(const Eigen::Vector2d& anchor, double r_lo, double r_hi,
                         const BearingInterval& theta) {
  const double span = theta.span();
  if (!(span >= 0.0 && span < 0.5 * kPi)) {
    throw InvalidArgument("sector_zonotope: bearing span must lie in [0, pi/2)");
  }
  if (!(r_lo >= 0.0 && r_lo <= r_hi)) {
    throw InvalidArgument("sector_zonotope: radii must satisfy 0 <= r_lo <= r_hi");
  }
  const double half_cos = std::cos(0.5 * span);
  const Eigen::Vector2d upper_ray = unit(theta.theta_hi);
  const Eigen::Vector2d lower_ray = unit(theta.theta_lo);
  const Eigen::Vector2d bisector = unit(0.5 * (theta.theta_lo + theta.theta_hi));

  // Slab offsets relative to the anchor: inner chord through the inner arc
  // end points, outer tangent to the outer arc at the bisector.
  const double inner = r_lo * half_cos;
  const double outer = r_hi;

  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(2, 3);
  G.col(0) = upper_ray;
  G.col(1) = lower_ray;
  Eigen::MatrixXd A(1, 3);
  A << bisector.dot(upper_ray), bisector.dot(lower_ray), inner - outer;
  Eigen::VectorXd b(1);
  b << inner;
  const double reach = r_hi / half_cos;
  Eigen::VectorXd lo = Eigen::VectorXd::Zero(3);
  Eigen::VectorXd hi(3);
  hi << reach, reach, 1.0;
  return make_zonotope(std::move(G), anchor, std::move(A), std::move(b), std::move(lo),
                       std::move(hi));
}

SegmentedRing segment_ring(const RangeRing& ring, int M) {
  if (M < kMinSectorCount) throw InvalidArgument("segment_ring: need at least 8 sectors");
  SegmentedRing out{ring, M, {}, {}};
  out.sectors.reserve(static_cast<std::size_t>(M));
  out.sector_boxes.reserve(static_cast<std::size_t>(M));
  for (int q = 0; q < M; ++q) {
    const BearingInterval theta{sector_angle(q, M), sector_angle(q + 1, M)};
    out.sectors.push_back(sector_zonotope(ring.center, ring.r_lo, ring.r_hi, theta));
    out.sector_boxes.push_back(trapezoid_box(ring.center, ring.r_lo, ring.r_hi, theta));
  }
  return out;
}

ActiveSectors select_active_window(const SegmentedRing& segments, const Zonotope& prior,
                                   const Eigen::MatrixXd& selector) {
  const int M = segments.M;
  const IntervalHull prior_box = interval_hull(linear_map(selector, prior));

  ActiveSectors result;
  result.active.assign(static_cast<std::size_t>(M), false);
  int active_count = 0;
  for (int q = 0; q < M; ++q) {
    const auto idx = static_cast<std::size_t>(q);
    if (!boxes_overlap(prior_box, segments.sector_boxes[idx], 1e-9)) continue;
    if (!is_empty(generalized_intersect(prior, segments.sectors[idx], selector))) {
      result.active[idx] = true;
      ++active_count;
    }
  }
  if (active_count == 0) throw NoActiveSectorError("select_active_window: no sector meets the prior");

  result.window.M = M;
  if (active_count == M) {
    result.full_circle = true;
    result.window.q_lo = 0;
    result.window.q_hi = M - 1;
    return result;
  }

  // The window is the complement of the longest circular run of inactive
  // sectors, which keeps it contiguous across the 0 / M-1 seam.
  int best_start = 0;
  int best_len = 0;
  for (int start = 0; start < M; ++start) {
    if (result.active[static_cast<std::size_t>(start)]) continue;
    if (!result.active[static_cast<std::size_t>((start - 1 + M) % M)]) continue;
    int len = 0;
    while (!result.active[static_cast<std::size_t>((start + len) % M)]) ++len;
    if (len > best_len) {
      best_len = len;
      best_start = start;
    }
  }
  result.window.q_lo = (best_start + best_len) % M;
  result.window.q_hi = (best_start - 1 + M) % M;
  result.window.wrap = result.window.q_hi < result.window.q_lo;
  result.contiguous = result.window.count() == active_count;
  return result;
}

Zonotope merged_wedge(const Eigen::Vector2d& anchor, double r_lo, double r_hi,
                      const SectorWindow& window) {
  return sector_zonotope(anchor, r_lo, r_hi, window.bearings());
}

RelativeMeasurement relative_measurement_set(const Zonotope& neighbor_posterior, double y_r,
                                             double r_lo, double r_hi, const Zonotope& prior,
                                             const Eigen::MatrixXd& selector, int M) {
  if (selector.rows() != 2) throw InvalidArgument("relative_measurement_set: selector must map to the plane");
  if (is_empty(neighbor_posterior)) throw EmptySetError("relative_measurement_set: empty neighbor set");

  const Zonotope neighbor_plane = linear_map(selector, neighbor_posterior);
  const Eigen::Vector2d center = neighbor_plane.c();
  const double radius = radius_bound(neighbor_plane);
  const RangeRing ring = inflate_ring(ring_from_range(y_r, r_lo, r_hi, center), radius);

  const SegmentedRing segments = segment_ring(ring, M);
  ActiveSectors active = select_active_window(segments, prior, selector);

  AssumptionCheck check;
  const IntervalHull prior_box = interval_hull(linear_map(selector, prior));
  check.prior_diameter = (prior_box.hi - prior_box.lo).norm();
  check.prior_distance = distance_to_box(center, prior_box);
  check.prior_small = check.prior_diameter < ring.r_lo && ring.r_lo < check.prior_distance;
  check.neighbor_small = 2.0 * radius <= kNeighborSmallRatio * y_r;

  std::optional<Zonotope> wedge;
  if (!active.full_circle && active.window.angular_span() < 0.5 * kPi) {
    wedge = merged_wedge(center, ring.r_lo, ring.r_hi, active.window);
  }
  return {std::move(wedge), ring, std::move(active), radius, check};
}

}  // namespace chainzono
