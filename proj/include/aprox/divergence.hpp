#pragma once

#include "aprox/numeric.hpp"
#include "aprox/reference.hpp"

namespace aprox {

/// Value of a Bregman distance; +inf is an explicit tag.
using BregmanValue = ExtendedReal;

/// D_{phi*}(x, y) = phi*(x) - phi*(y) - <grad phi*(y), x - y> for x in dom phi*
/// and y in int dom phi*, +inf otherwise. For the exponential reference this
/// is the KL divergence sum x ln(x / y) - x + y.
BregmanValue bregman_dual(const ReferenceFunction& phi, const Vector& x, const Vector& y);

/// D_phi(u, v) = phi(u) - phi(v) - <grad phi(v), u - v>; always finite.
BregmanValue bregman_primal(const ReferenceFunction& phi, const Vector& u, const Vector& v);

/// |D_{phi*}(x, y) - D_phi(grad phi*(y), grad phi*(x))| for x, y interior.
/// Throws DomainError if either argument is not interior.
double dual_identity_residual(const ReferenceFunction& phi, const Vector& x, const Vector& y);

}  // namespace aprox
