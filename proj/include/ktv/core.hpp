#pragma once

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>

namespace ktv {

using Index = Eigen::Index;
using Point = Eigen::Vector3d; // unused trailing coordinates are zero

/// Raised when a numerical routine fails to reach its requested accuracy.
class NumericalError : public std::runtime_error
{
public:
  NumericalError(std::string const &what, double residual)
    : std::runtime_error(what), residual_(residual)
  {
  }
  double residual() const noexcept { return residual_; }

private:
  double residual_;
};

/// Uniform cell-centred grid in N <= 3 dimensions with a boolean mask marking
/// the cells of the domain. The array always carries at least one layer of
/// outside cells, so the zero extension of a field is stored explicitly.
class GridDomain
{
public:
  GridDomain(int dim, double spacing, std::array<Index, 3> extent,
             Eigen::Array<bool, Eigen::Dynamic, 1> mask);

  int dim() const noexcept { return dim_; }
  double spacing() const noexcept { return h_; }
  std::array<Index, 3> const &extent() const noexcept { return extent_; }
  Index size() const noexcept { return mask_.size(); }
  Index interior_count() const noexcept { return interior_; }
  double cell_volume() const noexcept { return cell_volume_; }
  /// Radius of the smallest ball containing the union of masked cells.
  double enclosing_radius() const noexcept { return enclosing_radius_; }
  Point const &enclosing_center() const noexcept { return enclosing_center_; }

  Eigen::Array<bool, Eigen::Dynamic, 1> const &mask() const noexcept { return mask_; }
  bool inside(Index cell) const { return mask_[cell]; }

  /// Linear stride of axis a (row-major, last axis fastest).
  Index stride(int axis) const noexcept { return stride_[axis]; }
  std::array<Index, 3> multi_index(Index cell) const noexcept;
  Index linear_index(std::array<Index, 3> const &idx) const noexcept;
  /// Cell centre in physical coordinates; the grid is centred on the origin.
  Point center(Index cell) const noexcept;
  double coordinate(int axis, Index i) const noexcept
  {
    return (static_cast<double>(i) - 0.5 * static_cast<double>(extent_[axis]) + 0.5) * h_;
  }

private:
  int dim_;
  double h_;
  std::array<Index, 3> extent_;
  std::array<Index, 3> stride_;
  Eigen::Array<bool, Eigen::Dynamic, 1> mask_;
  Index interior_ = 0;
  double cell_volume_;
  double enclosing_radius_ = 0.0;
  Point enclosing_center_ = Point::Zero();
};

using DomainPtr = std::shared_ptr<GridDomain const>;

/// Ball {|x| < R} sampled at cell centres. Requires N in {1,2,3} and R/h >= 8.
DomainPtr make_ball_domain(int dim, double radius, double h);

/// Axis-aligned box with the given half widths (only the first `dim` are used).
DomainPtr make_box_domain(int dim, std::array<double, 3> half_widths, double h);

/// Grid function with implicit zero extension: cells outside the mask are 0.
class ScalarField
{
public:
  explicit ScalarField(DomainPtr domain);
  /// Takes ownership of `values`; outside cells are zeroed, non-finite values rejected.
  ScalarField(DomainPtr domain, Eigen::ArrayXd values);

  DomainPtr const &domain_ptr() const noexcept { return domain_; }
  GridDomain const &domain() const noexcept { return *domain_; }
  Eigen::ArrayXd const &values() const noexcept { return values_; }
  double operator[](Index cell) const { return values_[cell]; }

  ScalarField scaled(double c) const { return ScalarField(domain_, c * values_); }

private:
  DomainPtr domain_;
  Eigen::ArrayXd values_;
};

/// k on cells with |x| < r, zero elsewhere. Requires r < enclosing radius.
ScalarField indicator_field(DomainPtr domain, double r, double k);

struct FieldNorms
{
  double linf = 0.0;
  double lN = 0.0; // L^N with N the spatial dimension
  double l2 = 0.0;
};

template <typename Derived>
FieldNorms field_norms(Eigen::ArrayBase<Derived> const &values, GridDomain const &domain)
{
  FieldNorms out;
  if (values.size() == 0) return out;
  auto const a = values.abs();
  out.linf = a.maxCoeff();
  double const dv = domain.cell_volume();
  out.l2 = std::sqrt(dv * a.square().sum());
  int const n = domain.dim();
  if (n == 1)
    out.lN = dv * a.sum();
  else if (n == 2)
    out.lN = out.l2;
  else
    out.lN = std::cbrt(dv * (a * a * a).sum());
  return out;
}

inline FieldNorms field_norms(ScalarField const &u) { return field_norms(u.values(), u.domain()); }

/// Largest distance from the origin of a cell whose |value| exceeds `level`
/// (measured at cell centres); 0 for a field with no such cell.
double support_radius(ScalarField const &u, double level = 1e-10);

} // namespace ktv
