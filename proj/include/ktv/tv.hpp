#pragma once

#include "ktv/core.hpp"

#include <Eigen/Core>

namespace ktv {

/// Discrete Φ: h^N Σ_cells |∇⁺u|, isotropic forward differences over the whole
/// array. Jumps across the edge of the mask into the zero halo supply the
/// boundary term ∫_{∂Ω}|u|.
double discrete_tv(ScalarField const &u);
double discrete_tv(Eigen::Ref<Eigen::ArrayXd const> const &values, GridDomain const &domain);

/// Forward-difference gradient, one column per axis. Differences that would
/// wrap across array rows connect two halo cells and are therefore zero.
void forward_gradient(Eigen::Ref<Eigen::ArrayXd const> const &u, GridDomain const &domain,
                      Eigen::Ref<Eigen::ArrayXXd> grad);

/// Adjoint of forward_gradient (so that -gradient_adjoint is the discrete divergence).
void gradient_adjoint(Eigen::Ref<Eigen::ArrayXXd const> const &p, GridDomain const &domain,
                      Eigen::Ref<Eigen::ArrayXd> out);

struct ProxResult
{
  ScalarField field;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

/// argmin_u ½‖u - f‖² + λ Φ(u) over fields vanishing outside the mask.
///
/// Solved on the dual side: u = f - λ ∇ᵀp with |p| <= 1 cellwise, the dual
/// being minimised by accelerated projected gradient with adaptive restart.
/// The dual variable persists between calls so consecutive time steps start
/// from the previous solution.
class TvProx
{
public:
  explicit TvProx(DomainPtr domain);

  ProxResult solve(ScalarField const &f, double lambda, double tol, int max_iters);
  void reset() { p_.setZero(); }

private:
  DomainPtr domain_;
  Eigen::ArrayXXd p_, y_, p_next_, grad_;
  Eigen::ArrayXd u_, adj_;
};

/// One-shot prox starting from a zero dual variable.
ProxResult tv_prox(ScalarField const &f, double lambda, double tol, int max_iters);

} // namespace ktv
