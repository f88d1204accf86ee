#include "randfix/operators.hpp"

#include <cmath>

namespace randfix {

namespace {

const FiniteRegion& finite_region_or_throw(const FibreSet& set, int atom, const char* family) {
    const auto* r = std::get_if<FiniteRegion>(&set.region(atom));
    if (!r)
        throw DomainError(std::string(family) + " operators need a finite region at every atom");
    return *r;
}

int locate_point(const FiniteRegion& region, const Eigen::VectorXd& v, double tol) {
    for (std::size_t i = 0; i < region.points.size(); ++i)
        if ((v - region.points[i]).norm() <= tol) return static_cast<int>(i);
    return -1;
}

}  // namespace

RandomOperator::RandomOperator(std::shared_ptr<const FibreSet> domain, Params params)
    : domain_(std::move(domain)), params_(std::move(params)) {
    if (!domain_) throw PreconditionError("operator needs a domain");
    spot_check_self_map();
}

RandomOperator RandomOperator::scale(std::shared_ptr<const FibreSet> domain,
                                     Eigen::VectorXd alpha) {
    if (alpha.size() != domain->atoms())
        throw ShapeError("scale needs one factor per atom");
    for (Eigen::Index a = 0; a < alpha.size(); ++a)
        if (!(alpha[a] >= 0.0 && alpha[a] < 1.0))
            throw DomainError("scale factor at atom " + std::to_string(a) +
                              " must lie in [0, 1)");
    return RandomOperator(std::move(domain), ScaleParams{std::move(alpha)});
}

RandomOperator RandomOperator::shifted_scale(std::shared_ptr<const FibreSet> domain,
                                             Eigen::VectorXd alpha, Eigen::MatrixXd targets) {
    if (alpha.size() != domain->atoms())
        throw ShapeError("shifted_scale needs one factor per atom");
    if (targets.rows() != domain->atoms() || targets.cols() != domain->dim())
        throw ShapeError("shifted_scale target shape does not match the domain");
    for (Eigen::Index a = 0; a < alpha.size(); ++a)
        if (!(alpha[a] >= 0.0 && alpha[a] < 1.0))
            throw DomainError("shifted_scale factor at atom " + std::to_string(a) +
                              " must lie in [0, 1)");
    return RandomOperator(std::move(domain),
                          ShiftedScaleParams{std::move(alpha), std::move(targets)});
}

RandomOperator RandomOperator::affine(std::shared_ptr<const FibreSet> domain,
                                      std::vector<Eigen::MatrixXd> maps,
                                      Eigen::MatrixXd offsets) {
    if (static_cast<int>(maps.size()) != domain->atoms())
        throw ShapeError("affine needs one matrix per atom");
    for (const Eigen::MatrixXd& m : maps)
        if (m.rows() != domain->dim() || m.cols() != domain->dim())
            throw ShapeError("affine matrix must be square of the block dimension");
    if (offsets.rows() != domain->atoms() || offsets.cols() != domain->dim())
        throw ShapeError("affine offset shape does not match the domain");
    return RandomOperator(std::move(domain), AffineParams{std::move(maps), std::move(offsets)});
}

RandomOperator RandomOperator::antipode(std::shared_ptr<const FibreSet> domain) {
    for (int atom = 0; atom < domain->atoms(); ++atom) {
        const FiniteRegion& r = finite_region_or_throw(*domain, atom, "antipode");
        for (const Eigen::VectorXd& p : r.points)
            if (locate_point(r, -p, kMembershipTol) < 0)
                throw SelfMapError("antipode region at atom " + std::to_string(atom) +
                                       " is not closed under negation",
                                   atom);
    }
    return RandomOperator(std::move(domain), AntipodeParams{});
}

RandomOperator RandomOperator::table(std::shared_ptr<const FibreSet> domain,
                                     std::vector<std::vector<int>> image_index) {
    if (static_cast<int>(image_index.size()) != domain->atoms())
        throw ShapeError("table needs one image list per atom");
    for (int atom = 0; atom < domain->atoms(); ++atom) {
        const FiniteRegion& r = finite_region_or_throw(*domain, atom, "table");
        if (image_index[atom].size() != r.points.size())
            throw ShapeError("table at atom " + std::to_string(atom) +
                             " must map every region point");
        for (int idx : image_index[atom])
            if (idx < 0 || idx >= static_cast<int>(r.points.size()))
                throw SelfMapError("table image index out of range at atom " +
                                       std::to_string(atom),
                                   atom);
    }
    return RandomOperator(std::move(domain), TableParams{std::move(image_index)});
}

const char* RandomOperator::family() const {
    struct Namer {
        const char* operator()(const ScaleParams&) const { return "scale"; }
        const char* operator()(const ShiftedScaleParams&) const { return "shifted_scale"; }
        const char* operator()(const AffineParams&) const { return "affine"; }
        const char* operator()(const AntipodeParams&) const { return "antipode"; }
        const char* operator()(const TableParams&) const { return "table"; }
    };
    return std::visit(Namer{}, params_);
}

Eigen::VectorXd RandomOperator::fibre_apply(int atom, const Eigen::VectorXd& v) const {
    if (atom < 0 || atom >= domain_->atoms())
        throw ShapeError("atom index out of range");
    if (v.size() != domain_->dim())
        throw ShapeError("block has the wrong dimension");
    return std::visit(
        [&](const auto& p) -> Eigen::VectorXd {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, ScaleParams>) {
                return p.alpha[atom] * v;
            } else if constexpr (std::is_same_v<T, ShiftedScaleParams>) {
                return p.alpha[atom] * v +
                       (1.0 - p.alpha[atom]) * p.targets.row(atom).transpose();
            } else if constexpr (std::is_same_v<T, AffineParams>) {
                Eigen::VectorXd moved = p.maps[atom] * v + p.offsets.row(atom).transpose();
                return region_project(domain_->region(atom), moved);
            } else if constexpr (std::is_same_v<T, AntipodeParams>) {
                return -v;
            } else {
                const FiniteRegion& r = std::get<FiniteRegion>(domain_->region(atom));
                const int idx = locate_point(r, v, kMembershipTol);
                if (idx < 0)
                    throw MembershipError("table input at atom " + std::to_string(atom) +
                                              " is not a region point",
                                          atom);
                return r.points[p.image_index[atom][idx]];
            }
        },
        params_);
}

void RandomOperator::spot_check_self_map() const {
    // A handful of deterministic samples per construction; apply() keeps
    // re-checking every image afterwards.
    Rng rng(derive_subseed(0x5e1f'c4ecull, family()));
    for (int trial = 0; trial < 8; ++trial) {
        const FibrePoint x = sample_point(*domain_, rng);
        for (int atom = 0; atom < domain_->atoms(); ++atom) {
            const Eigen::VectorXd image = fibre_apply(atom, x.block(atom));
            if (!region_contains(domain_->region(atom), image))
                throw SelfMapError(std::string(family()) + " leaves its region at atom " +
                                       std::to_string(atom),
                                   atom);
        }
    }
}

FibrePoint apply(const RandomOperator& f, const FibrePoint& x) {
    require_member(f.domain(), x);
    FibrePoint out(x.atoms(), x.dim());
    for (int atom = 0; atom < x.atoms(); ++atom) {
        out.block(atom) = f.fibre_apply(atom, x.block(atom));
        if (!region_contains(f.domain().region(atom), out.block(atom)))
            throw SelfMapError(std::string(f.family()) + " maps atom " + std::to_string(atom) +
                                   " outside its region",
                               atom);
    }
    return out;
}

FibrePoint iterate(const RandomOperator& f, const FibrePoint& x, int n) {
    if (n < 0) throw DomainError("iteration count must be nonnegative");
    FibrePoint cur = x;
    for (int k = 0; k < n; ++k) cur = apply(f, cur);
    return cur;
}

StageResult check_local_property(const RandomOperator& f,
                                 const std::vector<FibrePoint>& samples,
                                 const std::vector<AtomEvent>& events,
                                 double tol) {
    StageResult stage;
    stage.id = "check_local_property";
    const FibreSet& G = f.domain();

    if (!G.theta_declared()) {
        stage.note("masking disabled: zero section not declared inside the domain");
        stage.details = {{"samples", 0}, {"mode", "skipped"}};
        return stage;
    }
    if (samples.size() != events.size())
        throw ShapeError("need one event per sample");

    const FibrePoint theta = FibrePoint::zero(G.atoms(), G.dim());
    const FibrePoint f_theta = apply(f, theta);
    const bool theta_fixed = random_norm(f_theta).max() <= tol;
    const char* mode = theta_fixed ? "unmasked" : "masked-both-sides";
    if (!theta_fixed)
        stage.note("operator moves the zero section; both sides are masked before comparing");

    long checks = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const AtomEvent& A = events[i];
        const FibrePoint masked_in = mask_point(samples[i], A);
        const FibrePoint lhs = mask_point(apply(f, samples[i]), A);
        FibrePoint rhs = apply(f, masked_in);
        if (!theta_fixed) rhs = mask_point(rhs, A);
        for (int atom = 0; atom < G.atoms(); ++atom) {
            const double gap = (lhs.block(atom) - rhs.block(atom)).norm();
            if (gap > tol)
                stage.fail_with({"local_property", atom, static_cast<std::int64_t>(i), -1,
                                 gap, 0.0, tol});
            ++checks;
        }
    }
    stage.details = {{"samples", samples.size()}, {"mode", mode}, {"checks", checks}};
    return stage;
}

StageResult check_sigma_compat(const RandomOperator& f, const ProbSpace& space,
                               const std::vector<std::vector<AtomEvent>>& partitions,
                               const std::vector<std::vector<FibrePoint>>& point_lists,
                               double tol) {
    StageResult stage;
    stage.id = "check_sigma_compat";
    if (partitions.size() != point_lists.size())
        throw ShapeError("need one point list per partition");
    const FibreSet& G = f.domain();

    long checks = 0;
    for (std::size_t i = 0; i < partitions.size(); ++i) {
        const auto& partition = partitions[i];
        const auto& points = point_lists[i];
        const FibrePoint mixed = sigma_mix_points(G, space, partition, points);
        const FibrePoint lhs = apply(f, mixed);

        std::vector<FibrePoint> images;
        images.reserve(points.size());
        for (const FibrePoint& p : points) images.push_back(apply(f, p));
        const FibrePoint rhs = sigma_mix_points(G, space, partition, images);

        for (int atom = 0; atom < G.atoms(); ++atom) {
            const double gap = (lhs.block(atom) - rhs.block(atom)).norm();
            if (gap > tol)
                stage.fail_with({"sigma_compat", atom, static_cast<std::int64_t>(i), -1,
                                 gap, 0.0, tol});
            ++checks;
        }
    }
    stage.details = {{"partitions", partitions.size()}, {"checks", checks}};
    return stage;
}

StageResult fibre_continuity_probe(const RandomOperator& f, const FibrePoint& base,
                                   const std::vector<double>& radii, Rng& rng,
                                   int directions) {
    StageResult stage;
    stage.id = "fibre_continuity_probe";
    if (radii.empty()) throw PreconditionError("continuity probe needs at least one radius");
    for (std::size_t k = 0; k < radii.size(); ++k) {
        if (!(radii[k] > 0.0)) throw DomainError("probe radii must be positive");
        if (k > 0 && !(radii[k] < radii[k - 1]))
            throw DomainError("probe radii must decrease strictly");
    }
    const FibreSet& G = f.domain();
    require_member(G, base);

    nlohmann::json atoms_json = nlohmann::json::array();
    for (int atom = 0; atom < G.atoms(); ++atom) {
        std::vector<double> modulus(radii.size(), 0.0);
        double worst_ratio = 0.0;
        bool any_perturbation = false;
        for (std::size_t k = 0; k < radii.size(); ++k) {
            for (int trial = 0; trial < directions; ++trial) {
                Eigen::VectorXd dir(G.dim());
                double len = 0.0;
                do {
                    for (int c = 0; c < G.dim(); ++c) dir[c] = rng.normal01();
                    len = dir.norm();
                } while (len < 1e-300);
                const Eigen::VectorXd moved =
                    region_project(G.region(atom),
                                   base.block(atom).transpose() + radii[k] * dir / len);
                const double step_in = (moved - base.block(atom).transpose()).norm();
                if (step_in <= 0.0) continue;
                any_perturbation = true;
                const double step_out =
                    (f.fibre_apply(atom, moved) - f.fibre_apply(atom, base.block(atom))).norm();
                modulus[k] = std::max(modulus[k], step_out);
                worst_ratio = std::max(worst_ratio, step_out / step_in);
            }
        }

        nlohmann::json aj;
        aj["atom"] = atom;
        aj["modulus"] = modulus;
        aj["ratio"] = worst_ratio;
        aj["perturbed"] = any_perturbation;
        atoms_json.push_back(aj);

        if (!any_perturbation) continue;  // isolated blocks: nothing to probe
        const double m_small = modulus.back();
        const double m_large = modulus.front();
        // The displacement at the finest radius must have collapsed, either
        // in absolute terms or relative to the coarsest radius.
        if (m_small > 1e-9 && m_small > 0.5 * m_large) {
            stage.fail_with({"continuity", atom, -1, -1, m_small, 0.5 * m_large, 1e-9});
        }
    }

    if (stage.verdict == Verdict::pass) stage.verdict = Verdict::probe_pass;
    stage.note("sampling probe: evidence of continuity, not a proof");
    stage.details = {{"radii", radii}, {"directions", directions}, {"atoms", atoms_json}};
    return stage;
}

}  // namespace randfix
