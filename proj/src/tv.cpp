#include "ktv/tv.hpp"

#include <cmath>
#include <stdexcept>

namespace ktv {

void forward_gradient(Eigen::Ref<Eigen::ArrayXd const> const &u, GridDomain const &domain,
                      Eigen::Ref<Eigen::ArrayXXd> grad)
{
  Index const n = domain.size();
  double const inv_h = 1.0 / domain.spacing();
  for (int a = 0; a < domain.dim(); ++a) {
    Index const s = domain.stride(a);
    grad.col(a).head(n - s) = (u.segment(s, n - s) - u.head(n - s)) * inv_h;
    grad.col(a).tail(s).setZero();
  }
}

void gradient_adjoint(Eigen::Ref<Eigen::ArrayXXd const> const &p, GridDomain const &domain,
                      Eigen::Ref<Eigen::ArrayXd> out)
{
  Index const n = domain.size();
  double const inv_h = 1.0 / domain.spacing();
  out.setZero();
  for (int a = 0; a < domain.dim(); ++a) {
    Index const s = domain.stride(a);
    out.head(n - s) -= p.col(a).head(n - s) * inv_h;
    out.segment(s, n - s) += p.col(a).head(n - s) * inv_h;
  }
}

double discrete_tv(Eigen::Ref<Eigen::ArrayXd const> const &values, GridDomain const &domain)
{
  Eigen::ArrayXXd g(domain.size(), domain.dim());
  forward_gradient(values, domain, g);
  return domain.cell_volume() * g.square().rowwise().sum().sqrt().sum();
}

double discrete_tv(ScalarField const &u) { return discrete_tv(u.values(), u.domain()); }

TvProx::TvProx(DomainPtr domain)
  : domain_(std::move(domain)),
    p_(Eigen::ArrayXXd::Zero(domain_->size(), domain_->dim())),
    y_(p_), p_next_(p_), grad_(p_),
    u_(domain_->size()), adj_(domain_->size())
{
}

ProxResult TvProx::solve(ScalarField const &f, double lambda, double tol, int max_iters)
{
  if (f.domain_ptr() != domain_ && f.domain().size() != domain_->size())
    throw std::invalid_argument("TvProx: field lives on a different domain");
  if (!(lambda > 0.0)) throw std::invalid_argument("tv_prox: lambda must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("tv_prox: tolerance must be positive");

  GridDomain const &dom = *domain_;
  auto const &mask = dom.mask();
  Eigen::ArrayXd const &fv = f.values();
  double const h = dom.spacing();
  double const step = h * h / (4.0 * dom.dim() * lambda);

  auto primal = [&](Eigen::ArrayXXd const &q) {
    gradient_adjoint(q, dom, adj_);
    u_ = mask.select(fv - lambda * adj_, 0.0);
  };

  ProxResult res{ScalarField(domain_), 0, 0.0, false};
  y_ = p_;
  double t = 1.0;
  for (int it = 1; it <= max_iters; ++it) {
    primal(y_);
    forward_gradient(u_, dom, grad_);
    p_next_ = y_ + step * grad_;
    Eigen::ArrayXd const norm = p_next_.square().rowwise().sum().sqrt().max(1.0);
    p_next_.colwise() /= norm;

    double const residual = (p_next_ - y_).square().rowwise().sum().sqrt().maxCoeff();
    // restart momentum when it points uphill
    bool const restart = ((y_ - p_next_) * (p_next_ - p_)).sum() > 0.0;
    double const t_next = restart ? 1.0 : 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    double const beta = restart ? 0.0 : (t - 1.0) / t_next;
    y_ = p_next_ + beta * (p_next_ - p_);
    p_.swap(p_next_);
    t = t_next;

    res.iterations = it;
    res.residual = residual;
    if (residual <= tol) {
      res.converged = true;
      break;
    }
  }

  primal(p_);
  // The exact minimiser lies in [min(f,0), max(f,0)]; truncating the
  // approximate one moves it closer and never raises Φ.
  double const hi = std::max(0.0, fv.maxCoeff());
  double const lo = std::min(0.0, fv.minCoeff());
  res.field = ScalarField(domain_, u_.max(lo).min(hi));
  return res;
}

ProxResult tv_prox(ScalarField const &f, double lambda, double tol, int max_iters)
{
  TvProx prox(f.domain_ptr());
  return prox.solve(f, lambda, tol, max_iters);
}

} // namespace ktv
