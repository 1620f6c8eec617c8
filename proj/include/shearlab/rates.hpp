// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace shear {

enum class Regime { Enhanced, Taylor };

/// Enhanced when nu <= |k| (the seam nu = |k| belongs to Enhanced).
Regime classify_regime(double nu, double k);

/// nu^{m/(m+2)} |k|^{2/(m+2)} if nu <= |k|, k^2/nu otherwise. Both branches
/// equal nu on the seam.
double rate_target(double nu, double k, int m);

/// Decay rate of the full scalar mode once the factor exp(-nu k^2 t) is restored.
double full_scalar_rate(double nu, double k, double g_rate);

} // namespace shear
