// SPDX-License-Identifier: Apache-2.0
#include "shearlab/rates.hpp"

#include "shearlab/errors.hpp"

#include <cmath>

namespace shear {

Regime classify_regime(double nu, double k)
{
    return nu <= std::abs(k) ? Regime::Enhanced : Regime::Taylor;
}

double rate_target(double nu, double k, int m)
{
    require(nu > 0.0 && k != 0.0 && m >= 1, ErrorCode::InvalidArgument, "rate target needs nu>0, k!=0, m>=1");
    const double ak = std::abs(k);
    if (nu <= ak) return std::pow(nu, double(m) / (m + 2)) * std::pow(ak, 2.0 / (m + 2));
    return k * k / nu;
}

double full_scalar_rate(double nu, double k, double g_rate)
{
    require(g_rate >= 0.0, ErrorCode::InvalidArgument, "decay rate must be nonnegative");
    return nu * k * k + g_rate;
}

} // namespace shear
