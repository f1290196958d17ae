#include "ktv/core.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace ktv {

namespace {

struct Ball
{
  Point center = Point::Zero();
  double radius2 = -1.0; // negative: empty ball
};

bool covers(Ball const &b, Point const &p)
{
  return b.radius2 >= 0.0 && (p - b.center).squaredNorm() <= b.radius2 * (1.0 + 1e-12) + 1e-24;
}

// Smallest sphere through all points of `support`, centred in their affine hull.
Ball circumball(std::vector<Point> const &support)
{
  Ball b;
  if (support.empty()) return b;
  Point const &p0 = support.front();
  auto const m = static_cast<Index>(support.size()) - 1;
  if (m == 0) {
    b.center = p0;
    b.radius2 = 0.0;
    return b;
  }
  Eigen::MatrixXd A(m, m);
  Eigen::VectorXd rhs(m);
  for (Index i = 0; i < m; ++i) {
    Point const di = support[i + 1] - p0;
    rhs[i] = di.squaredNorm();
    for (Index j = 0; j < m; ++j) A(i, j) = 2.0 * di.dot(support[j + 1] - p0);
  }
  Eigen::VectorXd const lambda = A.fullPivLu().solve(rhs);
  b.center = p0;
  for (Index j = 0; j < m; ++j) b.center += lambda[j] * (support[j + 1] - p0);
  b.radius2 = 0.0;
  for (auto const &p : support) b.radius2 = std::max(b.radius2, (p - b.center).squaredNorm());
  return b;
}

// Randomised incremental minimum enclosing ball (Welzl), recursion depth <= dim+1.
Ball min_ball(std::vector<Point> const &pts, std::size_t n, std::vector<Point> &support, int dim)
{
  Ball b = circumball(support);
  if (static_cast<int>(support.size()) == dim + 1) return b;
  for (std::size_t i = 0; i < n; ++i) {
    if (covers(b, pts[i])) continue;
    support.push_back(pts[i]);
    b = min_ball(pts, i, support, dim);
    support.pop_back();
  }
  return b;
}

} // namespace

GridDomain::GridDomain(int dim, double spacing, std::array<Index, 3> extent,
                       Eigen::Array<bool, Eigen::Dynamic, 1> mask)
  : dim_(dim), h_(spacing), extent_(extent), mask_(std::move(mask))
{
  if (dim < 1 || dim > 3) throw std::invalid_argument("GridDomain: dimension must be 1, 2 or 3");
  if (!(spacing > 0.0) || !std::isfinite(spacing))
    throw std::invalid_argument("GridDomain: spacing must be positive");
  for (int a = 0; a < 3; ++a) {
    if (a >= dim && extent_[a] != 1)
      throw std::invalid_argument("GridDomain: unused axes must have extent 1");
    if (a < dim && extent_[a] < 3)
      throw std::invalid_argument("GridDomain: each axis needs at least 3 cells");
  }
  stride_ = {extent_[1] * extent_[2], extent_[2], 1};
  if (mask_.size() != extent_[0] * extent_[1] * extent_[2])
    throw std::invalid_argument("GridDomain: mask size does not match extent");
  cell_volume_ = std::pow(h_, dim_);

  std::vector<Point> corners;
  for (Index c = 0; c < mask_.size(); ++c) {
    if (!mask_[c]) continue;
    ++interior_;
    auto const idx = multi_index(c);
    bool boundary = false;
    for (int a = 0; a < dim_; ++a) {
      if (idx[a] == 0 || idx[a] == extent_[a] - 1)
        throw std::invalid_argument("GridDomain: mask touches the outer halo layer");
      boundary = boundary || !mask_[c - stride_[a]] || !mask_[c + stride_[a]];
    }
    if (!boundary) continue;
    Point const x = center(c);
    for (int corner = 0; corner < (1 << dim_); ++corner) {
      Point p = x;
      for (int a = 0; a < dim_; ++a) p[a] += ((corner >> a) & 1 ? 0.5 : -0.5) * h_;
      corners.push_back(p);
    }
  }
  if (interior_ == 0) throw std::invalid_argument("GridDomain: mask is empty");

  std::mt19937 rng(20240531u);
  std::shuffle(corners.begin(), corners.end(), rng);
  std::vector<Point> support;
  Ball const b = min_ball(corners, corners.size(), support, dim_);
  enclosing_center_ = b.center;
  enclosing_radius_ = std::sqrt(b.radius2);
}

std::array<Index, 3> GridDomain::multi_index(Index cell) const noexcept
{
  return {cell / stride_[0], (cell / stride_[1]) % extent_[1], cell % extent_[2]};
}

Index GridDomain::linear_index(std::array<Index, 3> const &idx) const noexcept
{
  return idx[0] * stride_[0] + idx[1] * stride_[1] + idx[2];
}

Point GridDomain::center(Index cell) const noexcept
{
  auto const idx = multi_index(cell);
  Point x = Point::Zero();
  for (int a = 0; a < dim_; ++a) x[a] = coordinate(a, idx[a]);
  return x;
}

namespace {

DomainPtr make_masked(int dim, double h, std::array<Index, 3> extent,
                      auto const &inside)
{
  Eigen::Array<bool, Eigen::Dynamic, 1> mask(extent[0] * extent[1] * extent[2]);
  auto coord = [&](int a, Index i) {
    return (static_cast<double>(i) - 0.5 * static_cast<double>(extent[a]) + 0.5) * h;
  };
  Index c = 0;
  for (Index i = 0; i < extent[0]; ++i)
    for (Index j = 0; j < extent[1]; ++j)
      for (Index k = 0; k < extent[2]; ++k, ++c) {
        Point x = Point::Zero();
        x[0] = coord(0, i);
        if (dim > 1) x[1] = coord(1, j);
        if (dim > 2) x[2] = coord(2, k);
        mask[c] = inside(x);
      }
  return std::make_shared<GridDomain const>(dim, h, extent, std::move(mask));
}

} // namespace

DomainPtr make_ball_domain(int dim, double radius, double h)
{
  if (dim < 1 || dim > 3) throw std::invalid_argument("make_ball_domain: dimension must be 1, 2 or 3");
  if (!(radius > 0.0) || !(h > 0.0)) throw std::invalid_argument("make_ball_domain: radius and h must be positive");
  if (radius / h < 8.0)
    throw std::invalid_argument("make_ball_domain: grid too coarse, need radius/h >= 8");
  auto const half = static_cast<Index>(std::ceil(radius / h - 1e-9));
  std::array<Index, 3> extent{1, 1, 1};
  for (int a = 0; a < dim; ++a) extent[a] = 2 * half + 2;
  double const r2 = radius * radius;
  return make_masked(dim, h, extent, [r2](Point const &x) { return x.squaredNorm() < r2; });
}

DomainPtr make_box_domain(int dim, std::array<double, 3> half_widths, double h)
{
  if (dim < 1 || dim > 3) throw std::invalid_argument("make_box_domain: dimension must be 1, 2 or 3");
  if (!(h > 0.0)) throw std::invalid_argument("make_box_domain: h must be positive");
  std::array<Index, 3> extent{1, 1, 1};
  for (int a = 0; a < dim; ++a) {
    if (!(half_widths[a] > 0.0)) throw std::invalid_argument("make_box_domain: half widths must be positive");
    if (half_widths[a] / h < 4.0)
      throw std::invalid_argument("make_box_domain: grid too coarse, need half width/h >= 4");
    extent[a] = 2 * static_cast<Index>(std::ceil(half_widths[a] / h - 1e-9)) + 2;
  }
  return make_masked(dim, h, extent, [dim, half_widths](Point const &x) {
    for (int a = 0; a < dim; ++a)
      if (std::abs(x[a]) >= half_widths[a]) return false;
    return true;
  });
}

ScalarField::ScalarField(DomainPtr domain)
  : domain_(std::move(domain)), values_(Eigen::ArrayXd::Zero(domain_->size()))
{
}

ScalarField::ScalarField(DomainPtr domain, Eigen::ArrayXd values)
  : domain_(std::move(domain)), values_(std::move(values))
{
  if (values_.size() != domain_->size()) throw std::invalid_argument("ScalarField: size does not match domain");
  if (!values_.allFinite()) throw std::invalid_argument("ScalarField: values must be finite");
  values_ = domain_->mask().select(values_, 0.0);
}

ScalarField indicator_field(DomainPtr domain, double r, double k)
{
  if (!(r > 0.0)) throw std::invalid_argument("indicator_field: radius must be positive");
  if (r >= domain->enclosing_radius())
    throw std::invalid_argument("indicator_field: ball must lie compactly inside the domain");
  Eigen::ArrayXd v = Eigen::ArrayXd::Zero(domain->size());
  double const r2 = r * r;
  for (Index c = 0; c < domain->size(); ++c) {
    if (!domain->inside(c) || domain->center(c).squaredNorm() >= r2) continue;
    for (int a = 0; a < domain->dim(); ++a)
      if (!domain->inside(c - domain->stride(a)) || !domain->inside(c + domain->stride(a)))
        throw std::invalid_argument("indicator_field: ball must lie compactly inside the domain");
    v[c] = k;
  }
  return ScalarField(std::move(domain), std::move(v));
}

double support_radius(ScalarField const &u, double level)
{
  double r2 = 0.0;
  auto const &d = u.domain();
  for (Index c = 0; c < d.size(); ++c)
    if (std::abs(u[c]) > level) r2 = std::max(r2, d.center(c).squaredNorm());
  return std::sqrt(r2);
}

} // namespace ktv
