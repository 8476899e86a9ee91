#include "fairsample/polytope.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "fairsample/error.hpp"
#include "fairsample/simplex.hpp"

namespace fairsample {

std::size_t local_vertex_count(const Dims& dims) {
    std::size_t total = 1;
    for (const auto& p : dims.all())
        for (int x = 0; x < p.settings; ++x) {
            if (total > kMaxStrategies / static_cast<std::size_t>(p.outcomes))
                throw Error(ErrorCode::StrategyBlowup, "more than 10^6 deterministic strategies");
            total *= static_cast<std::size_t>(p.outcomes);
        }
    return total;
}

std::vector<BehaviorTable> enumerate_local_vertices(const Dims& dims) {
    const auto total = local_vertex_count(dims);
    const std::size_t n = dims.parties();
    std::vector<std::size_t> per_party(n);
    for (std::size_t p = 0; p < n; ++p) {
        per_party[p] = 1;
        for (int x = 0; x < dims[p].settings; ++x) per_party[p] *= dims[p].outcomes;
    }

    std::vector<BehaviorTable> out;
    out.reserve(total);
    std::vector<std::vector<int>> f(n);
    std::vector<int> a(n);
    for (std::size_t v = 0; v < total; ++v) {
        std::size_t code = v;
        for (std::size_t p = n; p-- > 0;) {
            f[p] = deterministic_strategy(dims[p].settings, dims[p].outcomes, code % per_party[p]);
            code /= per_party[p];
        }
        BehaviorTable b{dims};
        for (std::size_t s = 0; s < dims.setting_count(); ++s) {
            const auto x = dims.settings_of(s);
            for (std::size_t p = 0; p < n; ++p) a[p] = f[p][x[p]];
            b.at(s, dims.encode_outcomes(a)) = 1.0;
        }
        out.push_back(std::move(b));
    }
    return out;
}

namespace {

// Normalization and no-signalling equalities for a bipartite behavior.
Eigen::MatrixXd bipartite_equalities(const Dims& dims) {
    const int sa = dims[0].settings, sb = dims[1].settings;
    const int oa = dims[0].outcomes, ob = dims[1].outcomes;
    const auto n = static_cast<Eigen::Index>(dims.size());
    std::vector<Eigen::VectorXd> rows;
    auto idx = [&](int x, int y, int a, int b) {
        std::vector<int> xs{x, y}, as{a, b};
        return static_cast<Eigen::Index>(dims.encode_settings(xs) * dims.outcome_count() + dims.encode_outcomes(as));
    };
    for (int x = 0; x < sa; ++x)
        for (int y = 0; y < sb; ++y) {
            Eigen::VectorXd r = Eigen::VectorXd::Zero(n + 1);
            for (int a = 0; a < oa; ++a)
                for (int b = 0; b < ob; ++b) r[idx(x, y, a, b)] = 1;
            r[n] = 1;
            rows.push_back(r);
        }
    // Alice's marginal does not depend on y, Bob's does not depend on x.
    for (int x = 0; x < sa; ++x)
        for (int a = 0; a < oa; ++a)
            for (int y = 1; y < sb; ++y) {
                Eigen::VectorXd r = Eigen::VectorXd::Zero(n + 1);
                for (int b = 0; b < ob; ++b) {
                    r[idx(x, y, a, b)] += 1;
                    r[idx(x, 0, a, b)] -= 1;
                }
                rows.push_back(r);
            }
    for (int y = 0; y < sb; ++y)
        for (int b = 0; b < ob; ++b)
            for (int x = 1; x < sa; ++x) {
                Eigen::VectorXd r = Eigen::VectorXd::Zero(n + 1);
                for (int a = 0; a < oa; ++a) {
                    r[idx(x, y, a, b)] += 1;
                    r[idx(0, y, a, b)] -= 1;
                }
                rows.push_back(r);
            }
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), n + 1);
    for (std::size_t i = 0; i < rows.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    return m;
}

}  // namespace

std::vector<BehaviorTable> enumerate_ns_vertices(const Dims& dims) {
    if (dims.parties() != 2) throw Error(ErrorCode::DimensionMismatch, "no-signalling vertices need two parties");
    const auto eq = bipartite_equalities(dims);
    const auto n = static_cast<Eigen::Index>(dims.size());
    const Eigen::MatrixXd lhs = eq.leftCols(n);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(lhs);
    const auto rank = lu.rank();
    const auto tight = n - rank;  // positivity constraints needed to pin a vertex

    // Guard the subset enumeration.
    double subsets = 1;
    for (Eigen::Index i = 0; i < tight; ++i) subsets = subsets * static_cast<double>(n - i) / static_cast<double>(i + 1);
    if (subsets > static_cast<double>(kMaxStrategies))
        throw Error(ErrorCode::StrategyBlowup, "too many candidate bases for vertex enumeration");

    std::vector<Eigen::Index> pick(static_cast<std::size_t>(tight));
    for (Eigen::Index i = 0; i < tight; ++i) pick[static_cast<std::size_t>(i)] = i;

    std::vector<std::vector<double>> found;
    const auto eq_rows = eq.rows();
    Eigen::MatrixXd sys(eq_rows + tight, n);
    Eigen::VectorXd rhs(eq_rows + tight);
    sys.topRows(eq_rows) = lhs;
    rhs.head(eq_rows) = eq.col(n);
    rhs.tail(tight).setZero();

    for (;;) {
        sys.bottomRows(tight).setZero();
        for (Eigen::Index i = 0; i < tight; ++i) sys(eq_rows + i, pick[static_cast<std::size_t>(i)]) = 1.0;
        Eigen::FullPivLU<Eigen::MatrixXd> solver(sys);
        if (solver.rank() == n) {
            Eigen::VectorXd p = solver.solve(rhs);
            if ((sys * p - rhs).cwiseAbs().maxCoeff() < 1e-9 && p.minCoeff() > -1e-9) {
                std::vector<double> v(static_cast<std::size_t>(n));
                for (Eigen::Index i = 0; i < n; ++i) {
                    double x = p[i];
                    if (std::abs(x) < 1e-12) x = 0.0;
                    v[static_cast<std::size_t>(i)] = x;
                }
                const bool dup = std::any_of(found.begin(), found.end(), [&](const std::vector<double>& w) {
                    for (std::size_t i = 0; i < w.size(); ++i)
                        if (std::abs(w[i] - v[i]) > 1e-9) return false;
                    return true;
                });
                if (!dup) found.push_back(std::move(v));
            }
        }
        // Next combination.
        Eigen::Index i = tight - 1;
        while (i >= 0 && pick[static_cast<std::size_t>(i)] == n - tight + i) --i;
        if (i < 0) break;
        ++pick[static_cast<std::size_t>(i)];
        for (Eigen::Index j = i + 1; j < tight; ++j)
            pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
    }

    std::sort(found.begin(), found.end());
    std::vector<BehaviorTable> out;
    for (auto& v : found) {
        BehaviorTable b{dims};
        b.p = std::move(v);
        out.push_back(std::move(b));
    }
    return out;
}

LocalityResult is_local(const BehaviorTable& b, double tol) {
    const auto vertices = enumerate_local_vertices(b.dims);
    const std::size_t d = b.dims.size();
    const std::size_t nv = vertices.size();

    std::vector<std::vector<double>> a(d + 1, std::vector<double>(nv, 0.0));
    std::vector<double> rhs(d + 1);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t v = 0; v < nv; ++v) a[i][v] = vertices[v].p[i];
        rhs[i] = b.p[i];
    }
    for (std::size_t v = 0; v < nv; ++v) a[d][v] = 1.0;
    rhs[d] = 1.0;

    const auto lp = solve_feasibility(a, rhs);
    LocalityResult out;
    out.residual = lp.infeasibility;
    out.local = lp.infeasibility <= tol;
    if (out.local) {
        for (std::size_t v = 0; v < nv; ++v)
            if (lp.x[v] > 1e-12) out.weights.emplace_back(v, lp.x[v]);
        return out;
    }
    SeparatingFunctional f;
    f.coefficients.assign(lp.y.begin(), lp.y.begin() + static_cast<std::ptrdiff_t>(d));
    for (std::size_t i = 0; i < d; ++i) f.value += f.coefficients[i] * b.p[i];
    f.local_bound = -std::numeric_limits<double>::infinity();
    for (const auto& v : vertices) {
        double s = 0;
        for (std::size_t i = 0; i < d; ++i) s += f.coefficients[i] * v.p[i];
        f.local_bound = std::max(f.local_bound, s);
    }
    out.certificate = std::move(f);
    return out;
}

}  // namespace fairsample
