#ifndef RANDFIX_QUASI_METRICS_HPP
#define RANDFIX_QUASI_METRICS_HPP

// Operator-adapted distance surrogates. For a self map f and sections x, y,
// three atom-wise quantities are built from the four distances
//   ||x-y||, ||x-f(y)||, ||f(x)-y||, ||f(x)-f(y)||:
// the lower envelope (their minimum), a switched variant that falls back to
// ||f(x)-f(y)|| wherever the envelope degenerates to zero, and the upper
// envelope max{||x-y||, ||f(x)-x||, ||f(y)-y||, ||f(x)-f(y)||}.

#include <utility>
#include <vector>

#include "randfix/operators.hpp"
#include "randfix/report.hpp"

namespace randfix {

// Entries of the lower envelope at or below this are treated as exact zeros
// when deciding the switch.
inline constexpr double kSwitchZeroTol = 1e-12;

L0Value p_metric(const RandomOperator& f, const FibrePoint& x, const FibrePoint& y);
L0Value l_metric(const RandomOperator& f, const FibrePoint& x, const FibrePoint& y);
L0Value u_metric(const RandomOperator& f, const FibrePoint& x, const FibrePoint& y);

using PointPair = std::pair<FibrePoint, FibrePoint>;

// Sanity relations that hold for any self map, checked entrywise over the
// given pairs: the switched envelope never exceeds ||f(x)-f(y)||, the plain
// distance never exceeds the upper envelope, and the lower envelope never
// exceeds the upper one.
StageResult basic_comparisons(const RandomOperator& f, const std::vector<PointPair>& pairs,
                              double tol = 1e-9);

// Independent check of the estimate
//   ||f(u)-f(v)|| <= P + ||f(u)-u|| + ||f(v)-v||
// at every atom where the lower envelope P is strictly positive; atoms where
// it vanishes are skipped and counted.
StageResult safe_estimate_oracle(const RandomOperator& f, const std::vector<PointPair>& pairs,
                                 double tol = 1e-9);

}  // namespace randfix

#endif
