#include "pflow/metric_props.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "pflow/linalg.hpp"
#include "pflow/parallel.hpp"

namespace pflow {

namespace {

double inv_or_zero(double p) { return std::isinf(p) ? 0.0 : 1.0 / p; }

}  // namespace

DistanceMatrix all_pairs(const WeightedGraph& g, const PNormParam& p, const SolveOptions& opts) {
    const int n = g.n();
    DistanceMatrix m{n, p, Eigen::MatrixXd::Zero(n, n), 0.0};
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    std::vector<double> gaps(pairs.size(), 0.0);
    parallel_for(static_cast<int>(pairs.size()), [&](int k) {
        auto [i, j] = pairs[k];
        auto r = d_p(g, DemandPair(i, j), p, opts);
        m.values(i, j) = m.values(j, i) = r.value();
        gaps[k] = r.rel_gap;
    });
    for (double gp : gaps) m.gap_bound = std::max(m.gap_bound, gp);
    return m;
}

FosterReport foster_sum(const WeightedGraph& g, const PNormParam& p, const SolveOptions& opts, double tol) {
    FosterReport rep;
    rep.p = p;
    std::map<std::pair<int, int>, double> dist;
    for (const auto& e : g.edges()) dist[{std::min(e.tail, e.head), std::max(e.tail, e.head)}] = 0.0;
    std::vector<std::pair<int, int>> keys;
    for (const auto& kv : dist) keys.push_back(kv.first);
    std::vector<double> vals(keys.size());
    parallel_for(static_cast<int>(keys.size()), [&](int k) {
        vals[k] = d_p(g, DemandPair(keys[k].first, keys[k].second), p, opts).value();
    });
    for (std::size_t k = 0; k < keys.size(); ++k) dist[keys[k]] = vals[k];
    auto term = [&](const Edge& e) { return e.weight * dist[{std::min(e.tail, e.head), std::max(e.tail, e.head)}]; };

    const double n = g.n();
    if (p.is_one()) {
        // The sum degenerates as q -> inf; the limiting statement is max_e w d_1 = 1.
        rep.form = "max";
        for (const auto& e : g.edges()) rep.sum = std::max(rep.sum, term(e));
        rep.lower_bound = rep.upper_bound = 1.0;
        rep.max_edge_term = rep.sum;
        rep.edge_bound_ok = rep.sum <= 1.0 + tol;
        rep.verdict = std::abs(rep.sum - 1.0) <= tol;
        return rep;
    }
    rep.form = "sum";
    for (const auto& e : g.edges()) {
        double t = std::pow(term(e), p.q);
        rep.sum += t;
        rep.max_edge_term = std::max(rep.max_edge_term, t);
    }
    if (p.p >= 2.0) {
        rep.lower_bound = n / 2.0;
        rep.upper_bound = n - 1.0;
    } else {
        rep.lower_bound = n - 1.0;
        rep.upper_bound = g.m();
    }
    double slack = tol * std::max(1.0, rep.upper_bound);
    rep.edge_bound_ok = rep.max_edge_term <= 1.0 + tol;
    rep.verdict = rep.edge_bound_ok && rep.sum >= rep.lower_bound - slack && rep.sum <= rep.upper_bound + slack;
    return rep;
}

PStrongReport check_p_strong(const DistanceMatrix& m, double tol, std::optional<double> exponent, std::uint64_t seed) {
    PStrongReport rep;
    const double r = exponent ? *exponent : m.p.p;
    rep.exponent = r;
    const int n = m.n;
    double scale = m.values.size() ? m.values.maxCoeff() : 0.0;
    if (n < 3 || scale <= 0.0) return rep;
    // Powers of d / max d stay in range for large exponents.
    auto pw = [&](double d) { return std::pow(d / scale, r); };
    auto test = [&](int x, int y, int z) {
        double lhs, rhs;
        if (std::isinf(r)) {
            lhs = m(x, y);
            rhs = std::max(m(x, z), m(z, y));
        } else {
            lhs = pw(m(x, y));
            rhs = pw(m(x, z)) + pw(m(z, y));
        }
        ++rep.triples_checked;
        double big = std::max(lhs, rhs);
        double excess = big > 0.0 ? (lhs - rhs) / big : 0.0;
        rep.worst_excess = std::max(rep.worst_excess, excess);
        if (excess > tol) {
            ++rep.violation_count;
            if (rep.violations.size() < 1000) rep.violations.push_back({x, y, z, lhs, rhs});
        }
    };
    if (n <= 60) {
        for (int x = 0; x < n; ++x)
            for (int y = x + 1; y < n; ++y)
                for (int z = 0; z < n; ++z)
                    if (z != x && z != y) test(x, y, z);
    } else {
        rep.exhaustive = false;
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<int> pick(0, n - 1);
        for (int k = 0; k < 100000; ++k) {
            int x = pick(rng), y = pick(rng), z = pick(rng);
            if (x == y || z == x || z == y) {
                --k;
                continue;
            }
            test(x, y, z);
        }
    }
    return rep;
}

MonotonicityReport check_monotonicity(const WeightedGraph& g, const DemandPair& d, const std::vector<PNormParam>& ps,
                                      double tol, const SolveOptions& opts) {
    MonotonicityReport rep;
    for (const auto& p : ps) {
        rep.ps.push_back(p.p);
        rep.values.push_back(d_p(g, d, p, opts).value());
    }
    const double m = g.m();
    auto fail = [&](bool& flag, const std::string& msg) {
        flag = false;
        rep.failures.push_back(msg);
    };
    for (std::size_t i = 0; i < ps.size(); ++i) {
        for (std::size_t j = i + 1; j < ps.size(); ++j) {
            const auto& p = ps[i];
            const auto& pp = ps[j];
            double di = rep.values[i], dj = rep.values[j];
            std::string tag = "p=" + std::to_string(p.p) + " p'=" + std::to_string(pp.p);
            if (dj > di * (1.0 + tol)) fail(rep.nonincreasing, "increase " + tag);
            double factor = std::pow(m, inv_or_zero(p.p) - inv_or_zero(pp.p));
            if (di > factor * dj * (1.0 + tol)) fail(rep.edge_count_sandwich, "sandwich " + tag);
            if (!p.is_one()) {
                // d_{p,G}^q >= d_{p',G'}^{q'} with G' carrying weights w^{q/q'}.
                std::vector<Edge> es = g.edges();
                for (auto& e : es) e.weight = std::pow(e.weight, p.q / pp.q);
                WeightedGraph gp(g.n(), std::move(es));
                double dpp = d_p(gp, d, pp, opts).value();
                double lhs = p.q * std::log(di);
                double rhs = pp.q * std::log(dpp);
                if (lhs < rhs - std::log1p(tol)) fail(rep.q_powered, "q-powered " + tag);
            }
        }
        // Homogeneity: doubling every weight halves d_p.
        double half = d_p(g.scaled(2.0), d, ps[i], opts).value();
        if (std::abs(half - rep.values[i] / 2.0) > tol * rep.values[i]) fail(rep.weight_scaling, "scaling p=" + std::to_string(ps[i].p));
    }
    return rep;
}

Eigen::VectorXd q_laplacian_apply(const WeightedGraph& g, const Eigen::VectorXd& phi, double q) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(g.n());
    for (const auto& e : g.edges()) {
        double dlt = phi(e.tail) - phi(e.head);
        double v = dlt == 0.0 ? 0.0 : std::pow(e.weight, q) * std::copysign(std::pow(std::abs(dlt), q - 1.0), dlt);
        out(e.tail) += v;
        out(e.head) -= v;
    }
    return out;
}

LambdaBoundReport lambda_bound_report(const WeightedGraph& g, const PNormParam& p, int samples, std::uint64_t seed) {
    if (p.is_one() || p.is_infinite()) throw std::invalid_argument("lambda bound needs finite p > 1");
    LambdaBoundReport rep;
    rep.p = p;
    const int n = g.n();
    const double q = p.q;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;

    // Sample directions: random phi orthogonal to 1, plus every centred chi_s - chi_t.
    std::vector<Eigen::VectorXd> dirs;
    for (int k = 0; k < samples; ++k) {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v(i) = gauss(rng);
        dirs.push_back(v);
    }
    for (int s = 0; s < n; ++s)
        for (int t = s + 1; t < n; ++t) {
            Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
            v(s) = 1.0;
            v(t) = -1.0;
            dirs.push_back(v);
        }
    double best = std::numeric_limits<double>::infinity();
    for (auto& v : dirs) {
        v.array() -= v.mean();
        v /= v.norm();
        double form = v.dot(q_laplacian_apply(g, v, q));
        std::vector<double> phi(v.data(), v.data() + n);
        double cost = std::pow(dual_cost(g, phi, p), q);
        rep.identity_error = std::max(rep.identity_error, std::abs(form - cost) / std::max(1.0, std::abs(cost)));
        best = std::min(best, form);
    }
    rep.samples = static_cast<int>(dirs.size());

    if (q == 2.0) {
        Eigen::MatrixXd L = linalg::dense_laplacian(n, linalg::conductances(g, 2.0));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(L, Eigen::EigenvaluesOnly);
        rep.exact = true;
        rep.lambda = eig.eigenvalues()(1);
        rep.bound = std::sqrt(2.0 / rep.lambda);
        Eigen::MatrixXd R = linalg::resistance_matrix(n, linalg::conductances(g, 2.0));
        rep.max_distance = std::sqrt(std::max(0.0, R.maxCoeff()));
        rep.bound_holds = rep.max_distance <= rep.bound * (1.0 + 1e-9);
    } else {
        rep.lambda = best;
        rep.bound = std::pow(2.0 / best, 1.0 / q);
    }
    return rep;
}

CommuteReport commute_check(const WeightedGraph& g, double tol) {
    const int n = g.n();
    CommuteReport rep;
    rep.total_weight = g.total_weight();
    rep.hitting = Eigen::MatrixXd::Zero(n, n);
    auto cond = linalg::conductances(g, 1.0);
    auto deg = g.weighted_degrees();
    Eigen::VectorXd rhs(n);
    for (int i = 0; i < n; ++i) rhs(i) = deg[i];
    // deg(u) h(u) - sum_x w(ux) h(x) = deg(u) for u != v, h(v) = 0.
    for (int v = 0; v < n && n > 1; ++v) {
        linalg::LaplacianSolver lap(n, cond, v);
        rep.hitting.col(v) = lap.solve(rhs);
    }
    rep.commute = rep.hitting + rep.hitting.transpose();
    rep.resistance = Eigen::MatrixXd::Zero(n, n);
    for (int t = 0; n > 1 && t < n; ++t) {
        linalg::LaplacianSolver lap(n, cond, t);
        for (int s = 0; s < n; ++s)
            if (s != t) rep.resistance(s, t) = lap.resistance(s, t);
    }
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v) {
            if (u == v) continue;
            double expect = 2.0 * rep.total_weight * rep.resistance(u, v);
            rep.max_mismatch = std::max(rep.max_mismatch, std::abs(rep.commute(u, v) - expect) / expect);
        }
    rep.ok = rep.max_mismatch <= tol;
    return rep;
}

SymmetricHitting symmetric_family_hitting(int n, double alpha, double beta) {
    double gm = beta / alpha;
    double a = 4.0 + (n - 3) * gm;
    double b = 2.0 + (n - 2) * gm;
    return {a, 3.0 + (n - 3) * gm, 1.0 + (n - 3) * a / b, (n - 2) * a / b};
}

}  // namespace pflow
