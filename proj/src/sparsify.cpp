#include "pflow/sparsify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

#include "pflow/generators.hpp"
#include "pflow/linalg.hpp"
#include "pflow/maxflow.hpp"
#include "pflow/parallel.hpp"

namespace pflow {

namespace {

constexpr int kMaxRetries = 20;
constexpr int kLewisMaxIter = 100;
constexpr double kLewisTol = 1e-4;
constexpr double kMaxSamples = 2e8;

// R_c(tail, head) for every edge under the given conductances.
std::vector<double> edge_resistances(const WeightedGraph& g, const std::vector<linalg::Conductance>& c) {
    const int n = g.n();
    std::vector<double> r(static_cast<std::size_t>(g.m()));
    if (n <= 1500) {
        Eigen::MatrixXd R = linalg::resistance_matrix(n, c);
        for (int e = 0; e < g.m(); ++e) r[e] = R(g.edge(e).tail, g.edge(e).head);
        return r;
    }
    linalg::LaplacianSolver solver(n, c);
    parallel_for(g.m(), [&](int e) { r[e] = solver.resistance(g.edge(e).tail, g.edge(e).head); });
    return r;
}

// Distinct-neighbour structure: merged pair weights.
std::map<std::pair<int, int>, double> pair_weights(const WeightedGraph& g) {
    std::map<std::pair<int, int>, double> w;
    for (const auto& e : g.edges()) w[{std::min(e.tail, e.head), std::max(e.tail, e.head)}] += e.weight;
    return w;
}

bool is_complete(const WeightedGraph& g) {
    long long n = g.n();
    return static_cast<long long>(pair_weights(g).size()) == n * (n - 1) / 2;
}

std::vector<std::pair<int, int>> all_pairs_list(int n) {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) out.emplace_back(i, j);
    return out;
}

std::vector<std::pair<int, int>> choose_pairs(int n, const PairSampling& sampling, bool& exhaustive) {
    long long total = static_cast<long long>(n) * (n - 1) / 2;
    exhaustive = sampling.all || n <= 30 || total <= sampling.count;
    if (exhaustive) return all_pairs_list(n);
    std::mt19937_64 rng(sampling.seed);
    std::uniform_int_distribution<int> pick(0, n - 1);
    std::vector<std::pair<int, int>> out;
    std::map<std::pair<int, int>, bool> seen;
    while (static_cast<int>(out.size()) < sampling.count) {
        int a = pick(rng), b = pick(rng);
        if (a == b) continue;
        std::pair<int, int> key{std::min(a, b), std::max(a, b)};
        if (seen.emplace(key, true).second) out.push_back(key);
    }
    return out;
}

}  // namespace

ScoreMode parse_score_mode(const std::string& s) {
    if (s == "exact-q2") return ScoreMode::ExactQ2;
    if (s == "lewis-iterative") return ScoreMode::LewisIterative;
    throw std::invalid_argument("unknown score mode '" + s + "' (exact-q2 | lewis-iterative)");
}

std::string to_string(ScoreMode m) { return m == ScoreMode::ExactQ2 ? "exact-q2" : "lewis-iterative"; }

ScoreMode default_score_mode(const PNormParam& p) {
    return p.is_two() ? ScoreMode::ExactQ2 : ScoreMode::LewisIterative;
}

SamplingScores sampling_scores(const WeightedGraph& g, const PNormParam& p, ScoreMode mode) {
    if (p.is_one() || p.is_infinite()) throw std::invalid_argument("sampling scores need 1 < p < inf");
    const double q = p.q;
    if (mode == ScoreMode::ExactQ2 && !p.is_two())
        throw std::invalid_argument("exact-q2 scores require q = 2, got q = " + std::to_string(q));

    SamplingScores out;
    out.mode = mode;
    const int m = g.m();
    auto c = linalg::conductances(g, 2.0);
    auto lev = [&](const std::vector<linalg::Conductance>& cc) {
        auto r = edge_resistances(g, cc);
        std::vector<double> t(static_cast<std::size_t>(m));
        for (int e = 0; e < m; ++e) t[e] = g.edge(e).weight * g.edge(e).weight * r[e];
        return t;
    };
    out.tau = lev(c);
    out.iterations = 1;
    if (mode == ScoreMode::LewisIterative && !p.is_two()) {
        for (int it = 0; it < kLewisMaxIter; ++it) {
            for (int e = 0; e < m; ++e) {
                double w = g.edge(e).weight;
                c[e].c = w * w * std::pow(out.tau[e], 1.0 - 2.0 / q);
            }
            auto l = lev(c);
            double change = 0.0;
            for (int e = 0; e < m; ++e) {
                double t = std::pow(std::clamp(l[e], 0.0, 1.0), q / 2.0);
                change = std::max(change, std::abs(t - out.tau[e]) / std::max(out.tau[e], 1e-300));
                out.tau[e] = t;
            }
            out.iterations = it + 2;
            out.last_change = change;
            if (change <= kLewisTol) break;
        }
    }
    out.sum = std::accumulate(out.tau.begin(), out.tau.end(), 0.0);
    return out;
}

double oversample_factor(int n, double eps, double q) {
    auto clog = [](double x) { return std::max(1.0, std::log(x)); };
    const double nn = std::max(2, n);
    if (q <= 1.0) return clog(nn) / (eps * eps);
    if (q <= 2.0) {
        double l = clog(nn / eps);
        double ll = clog(l);
        return l * ll * ll / (eps * eps);
    }
    return std::pow(nn, q / 2.0 - 1.0) * clog(nn) * clog(1.0 / eps) / std::pow(eps, 5);
}

WeightedGraph gomory_hu(const WeightedGraph& g) {
    const int n = g.n();
    std::vector<int> parent(static_cast<std::size_t>(n), 0);
    std::vector<double> cut(static_cast<std::size_t>(n), 0.0);
    for (int s = 1; s < n; ++s) {
        int t = parent[s];
        MaxFlowResult mf = max_flow(g, s, t);
        cut[s] = mf.value;
        for (int i = 0; i < n; ++i)
            if (i != s && mf.source_side[i] && parent[i] == t) parent[i] = s;
        if (mf.source_side[parent[t]]) {
            parent[s] = parent[t];
            parent[t] = s;
            cut[s] = cut[t];
            cut[t] = mf.value;
        }
    }
    std::vector<Edge> edges;
    for (int s = 1; s < n; ++s) edges.push_back({s, parent[s], cut[s]});
    return WeightedGraph(n, std::move(edges));
}

SparsifierResult build_sparsifier(const WeightedGraph& g, const PNormParam& p, double eps, std::uint64_t seed,
                                  double multiplier) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
    if (!(p.p > 4.0 / 3.0)) throw std::invalid_argument("sparsification needs p > 4/3");
    if (!(multiplier > 0.0)) throw std::invalid_argument("oversample multiplier must be positive");

    SparsifierResult res;
    res.seed = seed;
    res.used_seed = seed;
    res.eps = eps;
    res.p = p;
    res.multiplier = multiplier;
    const int n = g.n();
    if (n < 2) throw GraphError("sparsifier needs at least two vertices");

    if (p.is_infinite() || p.p >= 4.0 * std::log(static_cast<double>(n)) / eps) {
        res.graph_after = gomory_hu(g);
        res.edge_count = res.graph_after.m();
        res.gomory_hu = true;
        res.attempts = 1;
        return res;
    }

    const double q = p.q;
    SamplingScores sc = sampling_scores(g, p, default_score_mode(p));
    res.score_sum = sc.sum;
    res.oversample = oversample_factor(n, eps, q);

    const int m = g.m();
    std::vector<int> sampled_ids;
    std::vector<double> sigma;
    std::vector<char> bridge(static_cast<std::size_t>(m), 0);
    for (int e = 0; e < m; ++e) {
        if (sc.tau[e] >= 1.0 - 1e-9) {
            bridge[e] = 1;
            ++res.kept_bridges;
        } else {
            sampled_ids.push_back(e);
            sigma.push_back(sc.tau[e] * res.oversample * multiplier);
        }
    }
    const double total = std::accumulate(sigma.begin(), sigma.end(), 0.0);
    if (total > kMaxSamples) throw std::invalid_argument("sample count too large; lower the oversample multiplier");
    res.samples = sampled_ids.empty() ? 0 : static_cast<long long>(std::ceil(total));

    for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
        std::uint64_t s = seed + static_cast<std::uint64_t>(attempt);
        std::vector<long long> count(sampled_ids.size(), 0);
        if (res.samples > 0) {
            std::mt19937_64 rng(s);
            std::discrete_distribution<int> draw(sigma.begin(), sigma.end());
            for (long long k = 0; k < res.samples; ++k) ++count[draw(rng)];
        }
        std::vector<Edge> edges;
        std::size_t k = 0;
        for (int e = 0; e < m; ++e) {
            const Edge& ed = g.edge(e);
            if (bridge[e]) {
                edges.push_back(ed);
                continue;
            }
            long long c = count[k];
            double pe = sigma[k] / total;
            ++k;
            if (c == 0) continue;
            // ||S W B phi||_q^q is unbiased for ||W B phi||_q^q with rows scaled by (N p_e)^(-1/q)
            double scale = std::pow(static_cast<double>(c) / (static_cast<double>(res.samples) * pe), 1.0 / q);
            edges.push_back({ed.tail, ed.head, ed.weight * scale});
        }
        if (!is_connected(n, edges)) continue;
        res.graph_after = WeightedGraph(n, std::move(edges));
        res.edge_count = res.graph_after.m();
        res.used_seed = s;
        res.attempts = attempt + 1;
        return res;
    }
    throw std::runtime_error("sparsifier stayed disconnected after " + std::to_string(kMaxRetries) + " draws");
}

VerifyReport verify_sparsifier(const WeightedGraph& g, const WeightedGraph& h, const PNormParam& p,
                               const PairSampling& sampling, const SolveOptions& opts) {
    if (g.n() != h.n()) throw GraphError("graphs have different vertex counts");
    VerifyReport rep;
    auto pairs = choose_pairs(g.n(), sampling, rep.exhaustive);
    std::vector<double> err(pairs.size());
    parallel_for(static_cast<int>(pairs.size()), [&](int k) {
        DemandPair d(pairs[k].first, pairs[k].second);
        double a = d_p(g, d, p, opts).value();
        double b = d_p(h, d, p, opts).value();
        err[k] = std::abs(b - a) / a;
    });
    rep.pairs = static_cast<int>(pairs.size());
    for (std::size_t k = 0; k < pairs.size(); ++k)
        if (err[k] > rep.max_rel_error || rep.worst_s < 0) {
            rep.max_rel_error = err[k];
            rep.worst_s = pairs[k].first;
            rep.worst_t = pairs[k].second;
        }
    return rep;
}

VerifyReport verify_sparsifier(const DistanceMatrix& reference, const WeightedGraph& h, const PairSampling& sampling,
                               const SolveOptions& opts) {
    if (reference.n != h.n()) throw GraphError("graphs have different vertex counts");
    VerifyReport rep;
    auto pairs = choose_pairs(h.n(), sampling, rep.exhaustive);
    std::vector<double> err(pairs.size());
    parallel_for(static_cast<int>(pairs.size()), [&](int k) {
        auto [s, t] = pairs[k];
        double a = reference(s, t);
        double b = d_p(h, DemandPair(s, t), reference.p, opts).value();
        err[k] = std::abs(b - a) / a;
    });
    rep.pairs = static_cast<int>(pairs.size());
    for (std::size_t k = 0; k < pairs.size(); ++k)
        if (err[k] > rep.max_rel_error || rep.worst_s < 0) {
            rep.max_rel_error = err[k];
            rep.worst_s = pairs[k].first;
            rep.worst_t = pairs[k].second;
        }
    return rep;
}

Eigen::MatrixXd plain_resistances(const WeightedGraph& g) {
    return linalg::resistance_matrix(g.n(), linalg::conductances(g, 1.0));
}

RatioReport resistance_ratio(const WeightedGraph& g) {
    const int n = g.n();
    if (n < 3) throw GraphError("resistance ratio needs n >= 3");
    Eigen::MatrixXd R = plain_resistances(g);
    RatioReport rep;
    rep.max_r = 0.0;
    rep.min_r = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            rep.max_r = std::max(rep.max_r, R(i, j));
            rep.min_r = std::min(rep.min_r, R(i, j));
        }
    rep.ratio = rep.max_r / rep.min_r;
    if (is_complete(g)) {
        rep.bound = 1.0;
        rep.bound_name = "1 (complete graph)";
    } else if (n == 3) {
        rep.bound = 1.0;
        rep.bound_name = "1 (n = 3)";
    } else {
        double nn = n;
        rep.bound = 1.0 + 1.0 / (nn * nn - 4.0 * nn + 3.0);
        rep.bound_name = "1+1/(n^2-4n+3)";
    }
    rep.verdict = rep.ratio >= rep.bound * (1.0 - 1e-12);
    return rep;
}

SymmetricFamilyReport symmetric_family(int n, double alpha, double beta) {
    if (n < 5) throw std::invalid_argument("symmetric family needs n >= 5");
    if (!(alpha > 0.0) || !(beta > 0.0)) throw std::invalid_argument("alpha and beta must be positive");
    SymmetricFamilyReport rep;
    rep.n = n;
    rep.alpha = alpha;
    rep.beta = beta;
    const double nn = n;
    rep.r_st = 2.0 / ((nn - 2.0) * alpha);
    rep.r_b = 1.0 / (alpha + (nn - 2.0) * beta / 2.0);
    rep.r_a = (1.0 / (2.0 * alpha)) *
              (1.0 + 1.0 / (nn - 2.0) - (nn - 3.0) * beta / (2.0 * alpha + (nn - 2.0) * beta));

    WeightedGraph g = gen::clique_minus_edge(n, alpha, beta);
    auto c = linalg::conductances(g, 1.0);
    linalg::LaplacianSolver solver(n, c);
    rep.solved_st = solver.resistance(0, 1);
    rep.solved_a = solver.resistance(0, 2);
    rep.solved_b = solver.resistance(2, 3);
    rep.max_mismatch = std::max({std::abs(rep.solved_st - rep.r_st) / rep.r_st,
                                 std::abs(rep.solved_a - rep.r_a) / rep.r_a,
                                 std::abs(rep.solved_b - rep.r_b) / rep.r_b});
    rep.foster = 2.0 * (nn - 2.0) * alpha * rep.r_a + (nn - 2.0) * (nn - 3.0) / 2.0 * beta * rep.r_b;
    double hi = std::max({rep.r_st, rep.r_a, rep.r_b});
    double lo = std::min({rep.r_st, rep.r_a, rep.r_b});
    rep.ratio = hi / lo;
    rep.ok = rep.max_mismatch <= 1e-9 && std::abs(rep.foster - (nn - 1.0)) <= 1e-9 * (nn - 1.0);
    return rep;
}

DegreeConditionReport degree_condition_check(const WeightedGraph& g, double tol) {
    const int n = g.n();
    if (n < 3) throw GraphError("degree conditions need n >= 3");
    DegreeConditionReport rep;
    rep.n = n;
    auto pw = pair_weights(g);
    const long long pairs = static_cast<long long>(n) * (n - 1) / 2;
    const long long msimple = static_cast<long long>(pw.size());
    rep.complete = msimple == pairs;

    const double W = g.total_weight();
    const double nn = n;
    rep.avg_degree = 2.0 * W / nn;
    auto deg = g.weighted_degrees();
    std::vector<int> nbrs(static_cast<std::size_t>(n), 0);
    for (const auto& [key, w] : pw) {
        ++nbrs[key.first];
        ++nbrs[key.second];
    }
    const double rel = 1e-12;
    const double slack = 1.0 + 1.0 / (2.0 * nn);

    double dmin = *std::min_element(deg.begin(), deg.end());
    double dmax = *std::max_element(deg.begin(), deg.end());
    rep.min_degree = dmin <= rep.avg_degree / 2.0 * slack * (1.0 + rel);

    double best_pair = std::numeric_limits<double>::infinity();
    for (int s = 0; s < n; ++s)
        for (int t = s + 1; t < n; ++t) {
            auto it = pw.find({s, t});
            double wst = it == pw.end() ? 0.0 : it->second;
            best_pair = std::min(best_pair, deg[s] + deg[t] + 2.0 * wst);
        }
    rep.pair_sum = best_pair <= 2.0 * rep.avg_degree * slack * (1.0 + rel);

    if (!rep.complete) {
        rep.regular = std::all_of(nbrs.begin(), nbrs.end(), [&](int k) { return k == nbrs[0]; });
        rep.equal_weighted_degrees = dmax - dmin <= rel * dmax;
        if (msimple == g.m()) {
            double wlo = std::numeric_limits<double>::infinity(), whi = 0.0;
            for (const auto& e : g.edges()) {
                wlo = std::min(wlo, e.weight);
                whi = std::max(whi, e.weight);
            }
            rep.equal_weights = whi - wlo <= rel * whi;
        }
        double s = 0.0;
        for (int x = 0; x < n; ++x) s += deg[x] * nbrs[x];
        double mw = 4.0 * static_cast<double>(msimple) * W / nn;
        rep.covariance = s >= mw * (1.0 - rel);
        rep.e_form = s <= (mw - 2.0 * W) * (1.0 + rel);
    } else {
        double s = 0.0;
        for (int x = 0; x < n; ++x) s += deg[x] * nbrs[x];
        rep.e_form = s <= (4.0 * static_cast<double>(msimple) * W / nn - 2.0 * W) * (1.0 + rel);
    }

    rep.applicable = rep.min_degree || rep.pair_sum || rep.regular || rep.equal_weighted_degrees ||
                     rep.equal_weights || rep.covariance || rep.e_form;
    RatioReport rr = resistance_ratio(g);
    rep.ratio = rr.ratio;
    rep.bound = 1.0 + 1.0 / (2.0 * (nn - 1.0));
    rep.verdict = !rep.applicable || rep.ratio >= rep.bound - tol;
    return rep;
}

ExpanderReport expander_clique_sparsifier(int n, double eps, std::uint64_t seed, double c) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
    if (1.0 / eps > n / 4.0) throw std::invalid_argument("need 1/eps <= n/4");
    if (n % 2 != 0) throw std::invalid_argument("perfect-matching union needs even n");
    const int d = static_cast<int>(std::ceil(c / eps - 1e-12));
    if (d > n - 1) throw std::invalid_argument("degree ceil(c/eps) = " + std::to_string(d) + " exceeds n - 1");

    ExpanderReport rep;
    rep.n = n;
    rep.eps = eps;
    rep.degree = d;
    rep.weight = static_cast<double>(n) / d;

    constexpr int kSeedRetries = 50;
    for (int attempt = 0; attempt < kSeedRetries; ++attempt) {
        std::mt19937_64 rng(seed + static_cast<std::uint64_t>(attempt));
        std::vector<std::vector<char>> adj(static_cast<std::size_t>(n), std::vector<char>(static_cast<std::size_t>(n), 0));
        std::vector<Edge> edges;
        bool failed = false;
        for (int round = 0; round < d && !failed; ++round) {
            // random greedy perfect matching avoiding existing edges, restarted when stuck
            bool done = false;
            for (int tries = 0; tries < 200 && !done; ++tries) {
                std::vector<int> order(static_cast<std::size_t>(n));
                std::iota(order.begin(), order.end(), 0);
                std::shuffle(order.begin(), order.end(), rng);
                std::vector<char> used(static_cast<std::size_t>(n), 0);
                std::vector<std::pair<int, int>> match;
                bool stuck = false;
                for (int u : order) {
                    if (used[u]) continue;
                    std::vector<int> cand;
                    for (int v = 0; v < n; ++v)
                        if (v != u && !used[v] && !adj[u][v]) cand.push_back(v);
                    if (cand.empty()) {
                        stuck = true;
                        break;
                    }
                    int v = cand[std::uniform_int_distribution<std::size_t>(0, cand.size() - 1)(rng)];
                    used[u] = used[v] = 1;
                    match.emplace_back(u, v);
                }
                if (stuck) continue;
                for (auto [u, v] : match) {
                    adj[u][v] = adj[v][u] = 1;
                    edges.push_back({std::min(u, v), std::max(u, v), rep.weight});
                }
                done = true;
            }
            failed = !done;
        }
        if (failed || !is_connected(n, edges)) continue;
        rep.graph = WeightedGraph(n, std::move(edges));
        rep.used_seed = seed + static_cast<std::uint64_t>(attempt);
        break;
    }
    if (rep.graph.n() == 0) throw std::runtime_error("expander generation failed");
    rep.edge_count = rep.graph.m();

    Eigen::MatrixXd R = plain_resistances(rep.graph);
    const double target = 2.0 / n;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            rep.max_rel_error = std::max(rep.max_rel_error, std::abs(R(i, j) - target) / target);
    rep.ratio = resistance_ratio(rep.graph);
    rep.verdict = rep.max_rel_error <= eps;
    return rep;
}

UnionLowerBoundReport lower_bound_union(int n, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
    if (n < 2) throw std::invalid_argument("n must be at least 2");
    UnionLowerBoundReport rep;
    rep.n = n;
    rep.eps = eps;
    rep.clique_size = static_cast<int>(std::ceil(1.0 / std::sqrt(eps) - 1e-12));
    rep.cliques = static_cast<int>(std::ceil(std::sqrt(eps) * n - 1e-12));
    const int k = rep.clique_size;
    const int N = rep.cliques * k;
    rep.vertices = N;

    std::vector<Edge> edges;
    std::vector<int> intra;
    for (int c = 0; c < rep.cliques; ++c) {
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j) {
                intra.push_back(static_cast<int>(edges.size()));
                edges.push_back({c * k + i, c * k + j, 1.0});
            }
        if (c + 1 < rep.cliques) edges.push_back({c * k + k - 1, (c + 1) * k, 1e-9});
    }
    rep.intra_edges = static_cast<int>(intra.size());
    WeightedGraph g(N, edges);
    Eigen::MatrixXd R0 = plain_resistances(g);

    // every clique is identical; beyond 80 vertices test the first, middle and last clique only
    rep.exhaustive = N <= 80;
    std::vector<int> tested;
    const int per = k * (k - 1) / 2;
    if (rep.exhaustive) {
        tested = intra;
    } else {
        for (int c : {0, rep.cliques / 2, rep.cliques - 1})
            for (int i = 0; i < per; ++i) tested.push_back(intra[static_cast<std::size_t>(c * per + i)]);
        std::sort(tested.begin(), tested.end());
        tested.erase(std::unique(tested.begin(), tested.end()), tested.end());
    }

    std::vector<double> change(tested.size(), 0.0);
    parallel_for(static_cast<int>(tested.size()), [&](int idx) {
        std::vector<Edge> rest;
        for (int e = 0; e < static_cast<int>(edges.size()); ++e)
            if (e != tested[idx]) rest.push_back(edges[e]);
        if (!is_connected(N, rest)) {
            change[idx] = std::numeric_limits<double>::infinity();
            return;
        }
        Eigen::MatrixXd R1 = plain_resistances(WeightedGraph(N, rest));
        double worst = 0.0;
        for (int i = 0; i < N; ++i)
            for (int j = i + 1; j < N; ++j) worst = std::max(worst, std::abs(R1(i, j) - R0(i, j)) / R0(i, j));
        change[idx] = worst;
    });
    rep.edges_tested = static_cast<int>(tested.size());
    rep.min_change = std::numeric_limits<double>::infinity();
    for (double ch : change) {
        if (std::isinf(ch)) ++rep.disconnecting;
        if (ch > eps / 4.0) ++rep.sensitive;
        rep.min_change = std::min(rep.min_change, ch);
    }
    rep.verdict = rep.edges_tested > 0 && rep.sensitive == rep.edges_tested;
    return rep;
}

}  // namespace pflow
