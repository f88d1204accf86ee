#include "randfix/quasi_metrics.hpp"

namespace randfix {

namespace {

struct FourDistances {
    L0Value plain;    // ||x - y||
    L0Value mixed_a;  // ||x - f(y)||
    L0Value mixed_b;  // ||f(x) - y||
    L0Value images;   // ||f(x) - f(y)||
    L0Value drift_x;  // ||f(x) - x||
    L0Value drift_y;  // ||f(y) - y||
};

FourDistances distances(const RandomOperator& f, const FibrePoint& x, const FibrePoint& y) {
    const FibrePoint fx = apply(f, x);
    const FibrePoint fy = apply(f, y);
    return FourDistances{block_distance(x, y),  block_distance(x, fy),
                         block_distance(fx, y), block_distance(fx, fy),
                         block_distance(fx, x), block_distance(fy, y)};
}

}  // namespace

L0Value p_metric(const RandomOperator& f, const FibrePoint& x, const FibrePoint& y) {
    const FourDistances d = distances(f, x, y);
    return value_min(value_min(d.plain, d.mixed_a), value_min(d.mixed_b, d.images));
}

L0Value l_metric(const RandomOperator& f, const FibrePoint& x, const FibrePoint& y) {
    const FourDistances d = distances(f, x, y);
    const L0Value lower =
        value_min(value_min(d.plain, d.mixed_a), value_min(d.mixed_b, d.images));
    Eigen::VectorXd out(lower.atoms());
    for (int atom = 0; atom < lower.atoms(); ++atom)
        out[atom] = lower[atom] > kSwitchZeroTol ? lower[atom] : d.images[atom];
    return L0Value(std::move(out));
}

L0Value u_metric(const RandomOperator& f, const FibrePoint& x, const FibrePoint& y) {
    const FourDistances d = distances(f, x, y);
    return value_max(value_max(d.plain, d.drift_x), value_max(d.drift_y, d.images));
}

StageResult basic_comparisons(const RandomOperator& f, const std::vector<PointPair>& pairs,
                              double tol) {
    StageResult stage;
    stage.id = "basic_comparisons";
    long checks = 0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& [x, y] = pairs[i];
        const FourDistances d = distances(f, x, y);
        const L0Value lower =
            value_min(value_min(d.plain, d.mixed_a), value_min(d.mixed_b, d.images));
        const L0Value upper = value_max(value_max(d.plain, d.drift_x),
                                        value_max(d.drift_y, d.images));
        for (int atom = 0; atom < lower.atoms(); ++atom) {
            const double switched =
                lower[atom] > kSwitchZeroTol ? lower[atom] : d.images[atom];
            if (switched > d.images[atom] + tol)
                stage.fail_with({"switched_le_images", atom, static_cast<std::int64_t>(i), -1,
                                 switched, d.images[atom], tol});
            if (d.plain[atom] > upper[atom] + tol)
                stage.fail_with({"plain_le_upper", atom, static_cast<std::int64_t>(i), -1,
                                 d.plain[atom], upper[atom], tol});
            if (lower[atom] > upper[atom] + tol)
                stage.fail_with({"lower_le_upper", atom, static_cast<std::int64_t>(i), -1,
                                 lower[atom], upper[atom], tol});
            checks += 3;
        }
    }
    stage.details = {{"pairs", pairs.size()}, {"checks", checks}};
    return stage;
}

StageResult safe_estimate_oracle(const RandomOperator& f, const std::vector<PointPair>& pairs,
                                 double tol) {
    StageResult stage;
    stage.id = "safe_estimate_oracle";
    long checked = 0, skipped = 0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& [u, v] = pairs[i];
        const FourDistances d = distances(f, u, v);
        const L0Value lower =
            value_min(value_min(d.plain, d.mixed_a), value_min(d.mixed_b, d.images));
        for (int atom = 0; atom < lower.atoms(); ++atom) {
            if (lower[atom] <= kSwitchZeroTol) {
                ++skipped;
                continue;
            }
            const double bound = lower[atom] + d.drift_x[atom] + d.drift_y[atom];
            if (d.images[atom] > bound + tol)
                stage.fail_with({"safe_estimate", atom, static_cast<std::int64_t>(i), -1,
                                 d.images[atom], bound, tol});
            ++checked;
        }
    }
    stage.details = {{"pairs", pairs.size()}, {"checked", checked}, {"skipped", skipped}};
    return stage;
}

}  // namespace randfix
