#include "wealthpde/hjb.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "wealthpde/errors.hpp"

namespace wealthpde {

namespace {

void require_policy_shape(const GridFunction& c, const Grid& grid) {
    if (static_cast<int>(c.size()) != grid.n_a)
        throw std::invalid_argument("c: length must equal grid n_a");
    for (int i = 0; i < grid.n_a; ++i) {
        if (!(c[i] > 0.0) || !std::isfinite(c[i]))
            throw std::domain_error("c: must be positive and finite at node " +
                                    std::to_string(i));
    }
}

Tridiagonal shifted_system(const UpwindOperator& op, double rho) {
    // B = rho I - A
    const std::size_t n = op.a.size();
    Tridiagonal b;
    b.lower.resize(n);
    b.diag.resize(n);
    b.upper.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        b.lower[i] = -op.a.lower[i];
        b.diag[i] = rho - op.a.diag[i];
        b.upper[i] = -op.a.upper[i];
    }
    return b;
}

GridFunction utility_of(const GridFunction& c, double gamma) {
    GridFunction u(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) u[i] = crra_utility(c[i], gamma);
    return u;
}

double sup_norm(const GridFunction& x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

GridFunction evaluate_with_operator(const UpwindOperator& op, const GridFunction& u,
                                    double rho) {
    const Tridiagonal b = shifted_system(op, rho);
    GridFunction v = thomas_solve(b, u);

    const GridFunction bv = tridiagonal_apply(b, v);
    double resid = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        resid = std::max(resid, std::abs(bv[i] - u[i]));
    const double bound = 1e-10 * std::max(sup_norm(u), 1.0);
    if (!(resid <= bound))
        throw SolverError("policy evaluation: solve residual " + std::to_string(resid) +
                          " exceeds bound " + std::to_string(bound));
    return v;
}

double residual_sup(const UpwindOperator& op, const GridFunction& v,
                    const GridFunction& u_next, double rho) {
    // || rho V - u(c') - A(c') V ||_inf
    const GridFunction av = tridiagonal_apply(op.a, v);
    double r = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        r = std::max(r, std::abs(rho * v[i] - u_next[i] - av[i]));
    return r;
}

} // namespace

void SolverSettings::validate() const {
    if (!(tol_foc > 0.0)) throw std::invalid_argument("tol_foc: must be > 0");
    if (!(tol_hjb > 0.0)) throw std::invalid_argument("tol_hjb: must be > 0");
    if (max_iter < 1) throw std::invalid_argument("max_iter: must be >= 1");
    if (!(relaxation > 0.0) || !(relaxation <= 1.0))
        throw std::invalid_argument("relaxation: must be in (0, 1]");
    if (!(init_fraction > 0.0))
        throw std::invalid_argument("init_fraction: must be > 0");
}

UpwindOperator build_upwind_operator(const GridFunction& c, const Grid& grid,
                                     const ModelParams& params) {
    require_policy_shape(c, grid);

    const int n = grid.n_a;
    const double da = grid.da;
    const double diff = params.sigma * params.sigma / (2.0 * da * da);

    UpwindOperator op;
    op.a.lower.assign(n, 0.0);
    op.a.diag.assign(n, 0.0);
    op.a.upper.assign(n, 0.0);
    op.drift_sign.assign(n, 0);

    for (int i = 0; i < n; ++i) {
        const double mu = drift(grid.nodes[i], c[i], params);
        double lo = 0.0, up = 0.0;
        // Advection rides the drift: rate mu/da toward the neighbor the
        // process moves to. A one-sided term pointing out of the domain is
        // dropped (reflecting wall), so off-diagonals stay >= 0 for any c.
        if (mu > 0.0 && i + 1 < n) {
            up += mu / da;
            op.drift_sign[i] = 1;
        } else if (mu < 0.0 && i > 0) {
            lo += -mu / da;
            op.drift_sign[i] = -1;
        }
        if (i > 0) lo += diff;
        if (i + 1 < n) up += diff;
        // One-sided reflected stencil at the boundaries keeps every row
        // sum at zero: no probability leaves [0, a_max].
        op.a.lower[i] = lo;
        op.a.upper[i] = up;
        op.a.diag[i] = -(lo + up);
    }
    return op;
}

MMatrixReport check_m_matrix(const UpwindOperator& op, double rho) {
    MMatrixReport rep;
    const int n = static_cast<int>(op.a.size());
    for (int i = 0; i < n; ++i) {
        const double lo = i > 0 ? op.a.lower[i] : 0.0;
        const double up = i + 1 < n ? op.a.upper[i] : 0.0;
        const double bdiag = rho - op.a.diag[i];
        const double brow = rho - (lo + op.a.diag[i] + up);
        if (!std::isfinite(bdiag) || !std::isfinite(lo) || !std::isfinite(up)) {
            rep = {false, i, "non-finite entry"};
            return rep;
        }
        if (!(bdiag > 0.0)) {
            rep = {false, i, "diagonal of rho I - A not strictly positive"};
            return rep;
        }
        if (lo < 0.0 || up < 0.0) {
            rep = {false, i, "positive off-diagonal in rho I - A"};
            return rep;
        }
        if (!(brow >= rho - 1e-12)) {
            rep = {false, i, "row sum of rho I - A below rho - 1e-12"};
            return rep;
        }
    }
    return rep;
}

GridFunction policy_evaluation(const GridFunction& c, const Grid& grid,
                               const ModelParams& params) {
    params.validate();
    const UpwindOperator op = build_upwind_operator(c, grid, params);
    const MMatrixReport rep = check_m_matrix(op, params.rho);
    if (!rep.ok)
        throw SolverError("policy evaluation: row " + std::to_string(rep.bad_row) +
                          ": " + rep.reason);
    return evaluate_with_operator(op, utility_of(c, params.gamma), params.rho);
}

GridFunction policy_improvement(const GridFunction& v, const Grid& grid,
                                const ModelParams& params) {
    if (static_cast<int>(v.size()) != grid.n_a)
        throw std::invalid_argument("v: length must equal grid n_a");
    for (double x : v)
        if (!std::isfinite(x)) throw std::invalid_argument("v: must be finite");

    const int n = grid.n_a;
    const double da = grid.da;
    const double c_cap = std::max(100.0 * (params.r * grid.a_max + params.y),
                                  kConsumptionFloor);
    const double vp_floor = crra_marginal(c_cap, params.gamma);

    GridFunction c(n);
    for (int i = 0; i < n; ++i) {
        const double resources = params.r * grid.nodes[i] + params.y;
        double chosen = std::max(resources, kConsumptionFloor); // drift-zero branch

        if (i + 1 < n) {
            const double vpf = std::max((v[i + 1] - v[i]) / da, vp_floor);
            const double cf =
                std::max(inverse_marginal(vpf, params.gamma), kConsumptionFloor);
            if (resources - cf > 0.0) {
                c[i] = cf;
                continue;
            }
        }
        if (i > 0) {
            const double vpb = std::max((v[i] - v[i - 1]) / da, vp_floor);
            const double cb =
                std::max(inverse_marginal(vpb, params.gamma), kConsumptionFloor);
            if (resources - cb < 0.0) chosen = cb;
        }
        c[i] = chosen;
    }
    return c;
}

PolicySolution solve_hjb(const Grid& grid, const ModelParams& params,
                         const SolverSettings& settings,
                         const std::function<GridFunction(const GridFunction&)>& postprocessor) {
    params.validate();
    settings.validate();

    const int n = grid.n_a;
    const bool cap_drift = settings.enforce_mu_nonneg_sigma0 && params.sigma == 0.0;

    GridFunction c(n);
    for (int i = 0; i < n; ++i)
        c[i] = std::max(settings.init_fraction * (params.r * grid.nodes[i] + params.y),
                        kConsumptionFloor);

    PolicySolution sol;
    sol.trace.reserve(64);
    GridFunction v;

    for (int iter = 1; iter <= settings.max_iter; ++iter) {
        const UpwindOperator op = build_upwind_operator(c, grid, params);
        const MMatrixReport rep = check_m_matrix(op, params.rho);
        if (!rep.ok)
            throw SolverError("iteration " + std::to_string(iter) + ": row " +
                              std::to_string(rep.bad_row) + ": " + rep.reason);

        v = evaluate_with_operator(op, utility_of(c, params.gamma), params.rho);

        const GridFunction c_raw = policy_improvement(v, grid, params);
        GridFunction c_post = postprocessor(c_raw);
        if (static_cast<int>(c_post.size()) != n)
            throw std::invalid_argument("postprocessor: changed the policy length");
        // The bottom node has no backward stencil, so outward drift there
        // would silently vanish from the operator and over-consumption at
        // the borrowing constraint would look free. Keep the node
        // admissible no matter what the smoother did to it.
        c_post[0] = std::max(std::min(c_post[0], params.r * grid.nodes[0] + params.y),
                             kConsumptionFloor);
        if (cap_drift) {
            for (int i = 0; i < n; ++i) {
                const double resources =
                    std::max(params.r * grid.nodes[i] + params.y, kConsumptionFloor);
                c_post[i] = std::max(std::min(c_post[i], resources), kConsumptionFloor);
            }
        }

        GridFunction c_next(n);
        double foc_error = 0.0;
        double foc_gap = 0.0;
        for (int i = 0; i < n; ++i) {
            c_next[i] = settings.relaxation * c_post[i] +
                        (1.0 - settings.relaxation) * c[i];
            foc_error = std::max(foc_error, std::abs(c_next[i] - c[i]));
            // u'(c_raw) equals the clamped upwind V' estimate exactly.
            foc_gap = std::max(foc_gap, std::abs(crra_marginal(c[i], params.gamma) -
                                                 crra_marginal(c_raw[i], params.gamma)));
        }

        const UpwindOperator op_next = build_upwind_operator(c_next, grid, params);
        const double hjb_residual =
            residual_sup(op_next, v, utility_of(c_next, params.gamma), params.rho);

        sol.trace.push_back({iter, hjb_residual, foc_error, rep.ok, foc_gap});
        sol.iterations = iter;
        c = std::move(c_next);

        if (foc_error <= settings.tol_foc && hjb_residual <= settings.tol_hjb) {
            sol.converged = true;
            break;
        }
    }

    sol.c = c;
    sol.v = policy_evaluation(c, grid, params);
    sol.mu.resize(n);
    for (int i = 0; i < n; ++i) sol.mu[i] = drift(grid.nodes[i], c[i], params);
    return sol;
}

PolicySolution solve_hjb(const Grid& grid, const ModelParams& params,
                         const SolverSettings& settings,
                         const PostprocessSettings& post) {
    return solve_hjb(grid, params, settings, [&](const GridFunction& raw) {
        return postprocess(raw, grid, post);
    });
}

} // namespace wealthpde
