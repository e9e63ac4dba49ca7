#include "fwgraph/statcheck.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include "json.hpp"

#include "fwgraph/exit_time.hpp"
#include "fwgraph/parallel.hpp"

namespace fwg {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

Estimate binomial(std::size_t k, std::size_t n) {
    const double f = n ? static_cast<double>(k) / static_cast<double>(n) : 0.0;
    return {f, n ? std::sqrt(f * (1.0 - f) / static_cast<double>(n)) : 0.0};
}

bool inside_ball(const MetricGraph& g, VertexId v, double radius, const GraphPoint& p) {
    if (p.is_vertex()) return p.vertex() == v;
    if (!p.is_edge()) return false;
    const Edge& e = g.edge(p.edge());
    if (e.from == v) return p.coordinate() < radius;
    if (e.to == v) return e.length - p.coordinate() < radius;
    return false;
}

struct Moments {
    double mean = 0.0;
    double var = 0.0;
};

Moments moments(const std::vector<double>& x) {
    Moments m;
    if (x.empty()) return m;
    m.mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    if (x.size() > 1) {
        double s = 0.0;
        for (double v : x) s += (v - m.mean) * (v - m.mean);
        m.var = s / static_cast<double>(x.size() - 1);
    }
    return m;
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

}  // namespace

std::vector<Barrier> ball_barriers(const MetricGraph& g, VertexId v, double radius) {
    std::vector<Barrier> out;
    for (const Incidence& inc : g.incident(v)) {
        const Edge& e = g.edge(inc.edge);
        if (!(radius < e.length)) throw std::invalid_argument("ball radius exceeds an incident edge");
        if (inc.at_start) {
            out.push_back({inc.edge, radius, true});
        } else {
            out.push_back({inc.edge, e.length - radius, false});
        }
    }
    return out;
}

ExitRecord first_exit(const ProcessGenerator& p, VertexId v, double radius, double horizon, RandomStream& stream) {
    const MetricGraph& g = *p.graph;
    const auto barriers = ball_barriers(g, v, radius);
    const Trajectory tr = p.run(GraphPoint::at_vertex(v), horizon, stream, barriers);
    ExitRecord r;
    for (const Event& e : tr.events) {
        r.time = e.t;
        r.target = e.position;
        switch (e.kind) {
        case EventKind::Jump:
        case EventKind::Revival:
            if (!inside_ball(g, v, radius, e.position)) {
                r.category = ExitRecord::Category::Jump;
                return r;
            }
            break;
        case EventKind::Kill:
            r.category = ExitRecord::Category::Kill;
            return r;
        case EventKind::Barrier:
            r.category = ExitRecord::Category::Edge;
            r.edge = e.position.edge();
            return r;
        case EventKind::Horizon:
            r.category = ExitRecord::Category::Horizon;
            return r;
        default:
            break;
        }
    }
    r.category = ExitRecord::Category::Horizon;
    return r;
}

std::vector<ExitRecord> sample_first_exits(const ProcessGenerator& p, VertexId v, double radius, double horizon,
                                           std::size_t n, const RandomStream& root, int workers) {
    return parallel_map<ExitRecord>(
        n,
        [&](std::size_t i) {
            RandomStream s = root.child(i);
            return first_exit(p, v, radius, horizon, s);
        },
        workers);
}

std::string category_key(const MetricGraph& g, const ExitRecord& r) {
    switch (r.category) {
    case ExitRecord::Category::Edge: return "edge:" + g.edge(r.edge).name;
    case ExitRecord::Category::Kill: return "kill";
    case ExitRecord::Category::Jump: return "jump:" + g.describe(r.target);
    case ExitRecord::Category::Horizon: return "horizon";
    }
    return "unknown";
}

ExitLawEstimate empirical_exit_law(const ProcessGenerator& p, VertexId v, double epsilon, std::size_t n,
                                   const RandomStream& root, int workers, double horizon) {
    if (n == 0) throw std::invalid_argument("need at least one path");
    const MetricGraph& g = *p.graph;
    const auto records = sample_first_exits(p, v, epsilon, horizon, n, root, workers);

    ExitLawEstimate out;
    out.vertex = v;
    out.epsilon = epsilon;
    out.paths = n;
    std::map<EdgeId, std::size_t> edges;
    std::map<GraphPoint, std::size_t> jumps;
    std::size_t kills = 0;
    std::vector<double> times;
    for (const Incidence& inc : g.incident(v)) edges[inc.edge] = 0;
    for (const auto& r : records) {
        switch (r.category) {
        case ExitRecord::Category::Edge: ++edges[r.edge]; break;
        case ExitRecord::Category::Kill: ++kills; break;
        case ExitRecord::Category::Jump: ++jumps[r.target]; break;
        case ExitRecord::Category::Horizon: ++out.censored; break;
        }
        if (r.category != ExitRecord::Category::Horizon) times.push_back(r.time);
    }
    out.trap = out.censored == n;
    const Moments mt = moments(times);
    out.mean_time = {mt.mean, times.empty() ? 0.0 : std::sqrt(mt.var / static_cast<double>(times.size()))};

    double reflection = 0.0;
    for (const auto& [e, k] : edges) {
        out.edge_freq[e] = binomial(k, n);
        out.recovered_raw.p2[e] = out.edge_freq[e].value;
        reflection += out.edge_freq[e].value;
    }
    out.kill_freq = binomial(kills, n);
    out.recovered_raw.p1 = out.kill_freq.value / epsilon;
    for (const auto& [target, k] : jumps) {
        out.jump_freq[target] = binomial(k, n);
        out.recovered_raw.p4.add(target, out.jump_freq[target].value / epsilon);
    }
    if (!out.trap) out.recovered_raw.p3 = (out.mean_time.value - epsilon * epsilon) / epsilon * reflection;

    out.recovered = out.recovered_raw;
    const double s = normalization_sum(g, v, out.recovered_raw);
    if (s > 0.0 && std::isfinite(s) && !out.trap) {
        out.recovered.p1 /= s;
        for (auto& [e, w] : out.recovered.p2) w /= s;
        out.recovered.p3 /= s;
        out.recovered.p4 = out.recovered_raw.p4.scaled(1.0 / s);
    }
    return out;
}

std::string TestReport::to_json() const {
    nlohmann::json j;
    j["name"] = name;
    j["statistic"] = statistic;
    j["p_value"] = p_value ? nlohmann::json(*p_value) : nlohmann::json(nullptr);
    j["pass"] = pass;
    j["n_a"] = n_a;
    j["n_b"] = n_b;
    j["detail"] = detail;
    return j.dump();
}

TestReport laplace_exit_check(const ProcessGenerator& p, EdgeId edge, double a, double b, double x, double alpha,
                              std::size_t n, const RandomStream& root, int workers) {
    const auto started = Clock::now();
    const MetricGraph& g = *p.graph;
    if (!(a > 0.0 && a < x && x < b && b < g.edge(edge).length)) {
        throw std::invalid_argument("laplace check needs 0 < a < x < b < edge length");
    }
    const std::vector<Barrier> barriers{{edge, a, false}, {edge, b, true}};
    struct Sample {
        double lower = 0.0, upper = 0.0;
    };
    const auto samples = parallel_map<Sample>(
        n,
        [&](std::size_t i) {
            RandomStream s = root.child(i);
            const Trajectory tr = p.run(GraphPoint::on_edge(edge, x), 1e3, s, barriers);
            Sample out;
            if (tr.stopped()) {
                const double w = std::exp(-alpha * tr.end_time());
                (tr.last().position.coordinate() <= a ? out.lower : out.upper) = w;
            }
            return out;
        },
        workers);
    std::vector<double> lower(n), upper(n);
    for (std::size_t i = 0; i < n; ++i) {
        lower[i] = samples[i].lower;
        upper[i] = samples[i].upper;
    }
    const Moments ml = moments(lower), mu = moments(upper);
    const double se_l = std::sqrt(ml.var / static_cast<double>(n));
    const double se_u = std::sqrt(mu.var / static_cast<double>(n));
    const double tl = laplace_exit_lower(alpha, x - a, b - a);
    const double tu = laplace_exit_upper(alpha, x - a, b - a);
    const double zl = se_l > 0 ? std::abs(ml.mean - tl) / se_l : (ml.mean == tl ? 0.0 : kInfinity);
    const double zu = se_u > 0 ? std::abs(mu.mean - tu) / se_u : (mu.mean == tu ? 0.0 : kInfinity);

    TestReport r;
    r.name = "laplace_exit:" + g.edge(edge).name + ":alpha=" + fmt(alpha);
    r.statistic = std::max(zl, zu);
    r.pass = zl <= 3.0 && zu <= 3.0;
    r.n_a = n;
    r.detail = "lower " + fmt(ml.mean) + " vs " + fmt(tl) + ", upper " + fmt(mu.mean) + " vs " + fmt(tu) +
               " (max |z| " + fmt(r.statistic) + ")";
    r.runtime_s = seconds_since(started);
    return r;
}

double kolmogorov_q(double lambda) {
    if (lambda < 1e-3) return 1.0;
    double sum = 0.0, sign = 1.0;
    for (int j = 1; j <= 200; ++j) {
        const double term = sign * std::exp(-2.0 * j * j * lambda * lambda);
        sum += term;
        if (std::abs(term) < 1e-16 * std::abs(sum)) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

TestReport ks_two_sample(std::vector<double> a, std::vector<double> b, double level) {
    const auto started = Clock::now();
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample needs two non-empty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double ne = std::sqrt(na * nb / (na + nb));
    TestReport r;
    r.name = "ks_two_sample";
    r.statistic = d;
    r.p_value = kolmogorov_q((ne + 0.12 + 0.11 / ne) * d);
    r.pass = *r.p_value >= level;
    r.n_a = a.size();
    r.n_b = b.size();
    r.detail = "D = " + fmt(d) + ", p = " + fmt(*r.p_value);
    r.runtime_s = seconds_since(started);
    return r;
}

TestReport chi_square_homogeneity(const std::map<std::string, std::size_t>& a,
                                  const std::map<std::string, std::size_t>& b, double level) {
    const auto started = Clock::now();
    std::map<std::string, std::pair<double, double>> table;
    double na = 0.0, nb = 0.0;
    for (const auto& [k, c] : a) {
        table[k].first += static_cast<double>(c);
        na += static_cast<double>(c);
    }
    for (const auto& [k, c] : b) {
        table[k].second += static_cast<double>(c);
        nb += static_cast<double>(c);
    }
    if (na == 0.0 || nb == 0.0) throw std::invalid_argument("chi-square test needs two non-empty samples");
    double stat = 0.0;
    int cells = 0;
    for (const auto& [k, c] : table) {
        const double total = c.first + c.second;
        if (total == 0.0) continue;
        ++cells;
        const double ea = total * na / (na + nb), eb = total * nb / (na + nb);
        stat += (c.first - ea) * (c.first - ea) / ea + (c.second - eb) * (c.second - eb) / eb;
    }
    TestReport r;
    r.name = "chi_square_homogeneity";
    r.statistic = stat;
    r.n_a = static_cast<std::size_t>(na);
    r.n_b = static_cast<std::size_t>(nb);
    if (cells <= 1) {
        r.p_value = 1.0;
    } else {
        const boost::math::chi_squared dist(cells - 1);
        r.p_value = boost::math::cdf(boost::math::complement(dist, stat));
    }
    r.pass = *r.p_value >= level;
    r.detail = "chi2 = " + fmt(stat) + " on " + std::to_string(std::max(cells - 1, 0)) + " df, p = " + fmt(*r.p_value);
    r.runtime_s = seconds_since(started);
    return r;
}

TestReport chi_square_goodness_of_fit(const std::map<std::string, std::size_t>& observed,
                                     const std::map<std::string, double>& expected, double level) {
    const auto started = Clock::now();
    double n = 0.0, total_p = 0.0;
    for (const auto& [k, c] : observed) n += static_cast<double>(c);
    for (const auto& [k, p] : expected) {
        if (p < 0.0) throw std::invalid_argument("negative expected probability for '" + k + "'");
        total_p += p;
    }
    if (n == 0.0) throw std::invalid_argument("chi-square test needs a non-empty sample");
    if (std::abs(total_p - 1.0) > 1e-9) throw std::invalid_argument("expected probabilities must sum to one");
    TestReport r;
    r.name = "chi_square_goodness_of_fit";
    r.n_a = static_cast<std::size_t>(n);
    double stat = 0.0;
    int cells = 0;
    std::string impossible;
    for (const auto& [k, c] : observed) {
        auto it = expected.find(k);
        if ((it == expected.end() || it->second == 0.0) && c > 0) impossible = k;
    }
    for (const auto& [k, p] : expected) {
        if (p == 0.0) continue;
        ++cells;
        auto it = observed.find(k);
        const double o = it == observed.end() ? 0.0 : static_cast<double>(it->second);
        stat += (o - n * p) * (o - n * p) / (n * p);
    }
    if (!impossible.empty()) {
        r.statistic = kInfinity;
        r.p_value = 0.0;
        r.pass = false;
        r.detail = "observed category '" + impossible + "' has probability zero";
    } else {
        r.statistic = stat;
        r.p_value = cells <= 1 ? 1.0
                               : boost::math::cdf(boost::math::complement(boost::math::chi_squared(cells - 1), stat));
        r.pass = *r.p_value >= level;
        r.detail = "chi2 = " + fmt(stat) + " on " + std::to_string(std::max(cells - 1, 0)) + " df, p = " + fmt(*r.p_value);
    }
    r.runtime_s = seconds_since(started);
    return r;
}

double TestFunction::at(const MetricGraph& g, VertexId v, const GraphPoint& p) const {
    if (p.is_vertex() && p.vertex() == v) {
        return branches.empty() ? far_value : branches.begin()->second.value;
    }
    if (p.is_edge()) {
        auto it = branches.find(p.edge());
        const Edge& e = g.edge(p.edge());
        if (it != branches.end() && (e.from == v || e.to == v)) {
            const double r = g.offset_from(v, p.edge(), p.coordinate());
            return it->second.value + it->second.slope * r + 0.5 * it->second.curvature * r * r;
        }
    }
    return far_value;
}

ResidualReport generator_residual(const std::function<ProcessGenerator(double)>& make, const MetricGraph& g,
                                  const FWData& data, const TestFunction& f, VertexId v,
                                  const std::vector<double>& epsilons, std::size_t n, const RandomStream& root,
                                  int workers, bool bias_band, double horizon) {
    const auto started = Clock::now();
    if (epsilons.size() < 2) throw std::invalid_argument("residual needs at least two epsilon values");
    for (const auto& [e, br] : f.branches) {
        if (br.value != f.branches.begin()->second.value) {
            throw std::invalid_argument("test function is discontinuous at the vertex");
        }
    }
    const double fv = f.at(g, v, GraphPoint::at_vertex(v));

    ResidualReport out;
    std::vector<double> schedule = epsilons;
    std::sort(schedule.begin(), schedule.end(), std::greater<>());
    std::size_t censored = 0;
    for (std::size_t k = 0; k < schedule.size(); ++k) {
        const double eps = schedule[k];
        const ProcessGenerator p = make(eps);
        const auto records = sample_first_exits(p, v, eps, horizon, n, root.child(k), workers);
        std::vector<double> df, tau;
        for (const auto& r : records) {
            if (r.category == ExitRecord::Category::Horizon) {
                ++censored;
                continue;
            }
            const double value = r.category == ExitRecord::Category::Kill ? 0.0 : f.at(g, v, r.target);
            df.push_back(value - fv);
            tau.push_back(r.time);
        }
        if (df.empty()) throw std::runtime_error("every path was censored at the horizon");
        const Moments md = moments(df), mt = moments(tau);
        double cov = 0.0;
        for (std::size_t i = 0; i < df.size(); ++i) cov += (df[i] - md.mean) * (tau[i] - mt.mean);
        if (df.size() > 1) cov /= static_cast<double>(df.size() - 1);
        const double ratio = md.mean / mt.mean;
        const double var = (md.var - 2.0 * ratio * cov + ratio * ratio * mt.var) /
                           (static_cast<double>(df.size()) * mt.mean * mt.mean);
        out.points.push_back({eps, {ratio, std::sqrt(std::max(var, 0.0))}});
    }

    const auto& p1 = out.points[out.points.size() - 2];
    const auto& p2 = out.points.back();
    const double e1 = p1.epsilon, e2 = p2.epsilon;
    out.extrapolated.value = (e1 * p2.residual.value - e2 * p1.residual.value) / (e1 - e2);
    out.extrapolated.se = std::sqrt(e1 * e1 * p2.residual.se * p2.residual.se +
                                    e2 * e2 * p1.residual.se * p1.residual.se) /
                          std::abs(e1 - e2);

    double first = -data.p1 * fv;
    double second = 0.0;
    const double reflection = data.reflection();
    for (const auto& [e, w] : data.p2) {
        auto it = f.branches.find(e);
        if (it == f.branches.end()) continue;
        first += w * it->second.slope;
        second += w * it->second.curvature;
    }
    for (const auto& a : data.p4) first += a.weight * (f.at(g, v, a.target) - fv);
    if (data.p3 > 0.0) {
        out.prediction = first / data.p3;
    } else if (std::abs(first) <= 1e-12 && reflection > 0.0) {
        out.prediction = second / (2.0 * reflection);
    }

    TestReport& r = out.report;
    r.name = "generator_residual:" + g.vertex_name(v);
    r.n_a = n;
    if (out.prediction) {
        const double diff = std::abs(out.extrapolated.value - *out.prediction);
        const double band = bias_band ? 1.5 * e2 * std::max(1.0, std::abs(*out.prediction)) : 0.0;
        const double se = out.extrapolated.se;
        r.statistic = se > 0.0 ? diff / se : (diff == 0.0 ? 0.0 : kInfinity);
        r.pass = diff <= 3.0 * se + band;
        r.detail = "extrapolated " + fmt(out.extrapolated.value) + " +- " + fmt(se) + " vs predicted " +
                   fmt(*out.prediction);
    } else {
        const double grow = std::abs(p2.residual.value) / std::max(std::abs(p1.residual.value), 1e-300);
        r.statistic = grow;
        r.pass = grow > 1.5;
        r.detail = "first-order term nonzero without stickiness; residual grows by " + fmt(grow) +
                   " when epsilon shrinks from " + fmt(e1) + " to " + fmt(e2);
    }
    if (censored) r.detail += "; " + std::to_string(censored) + " censored paths";
    r.runtime_s = seconds_since(started);
    return out;
}

}  // namespace fwg
