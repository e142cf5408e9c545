#include "oamem/pulse_opt.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "oamem/errors.hpp"
#include "oamem/parallel.hpp"
#include "oamem/rng.hpp"

namespace oamem {

namespace {

constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;

struct BudgetExhausted {};

using Point = std::vector<double>;

// Simplex bookkeeping in box-normalized coordinates u in [0,1]^n.
class BoundedSimplex {
public:
    BoundedSimplex(const OptimizationSpec& spec, const Objective& objective, OptimizationResult& result)
        : spec_(spec), objective_(objective), result_(result) {}

    Point to_params(const Point& u) const {
        Point x(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) {
            const auto& b = spec_.parameters[i];
            x[i] = b.lower + u[i] * (b.upper - b.lower);
        }
        return x;
    }

    static Point clip(Point u) {
        for (auto& v : u) v = std::clamp(v, 0.0, 1.0);
        return u;
    }

    // Objective to minimize (negated), evaluating at most once per parameter tuple.
    double cost(const Point& u_raw) {
        const Point x = to_params(clip(u_raw));
        if (auto it = memo_.find(x); it != memo_.end()) return -it->second;
        if (static_cast<int>(result_.trace.size()) >= spec_.budget) throw BudgetExhausted{};
        std::string error;
        double f = -std::numeric_limits<double>::infinity();
        try {
            f = objective_(x);
            if (std::isnan(f)) {
                error = "objective returned NaN";
                f = -std::numeric_limits<double>::infinity();
            }
        } catch (const std::exception& e) {
            error = e.what();
        }
        record(x, f, std::move(error));
        return -f;
    }

    // Evaluates fresh points concurrently, then records them in order.
    std::vector<double> cost_batch(const std::vector<Point>& us, unsigned threads) {
        std::vector<Point> xs;
        for (const auto& u : us) xs.push_back(to_params(clip(u)));
        std::vector<std::size_t> todo;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const bool dup = std::find(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(i), xs[i]) !=
                             xs.begin() + static_cast<std::ptrdiff_t>(i);
            if (!memo_.count(xs[i]) && !dup) todo.push_back(i);
        }
        const auto room = static_cast<std::size_t>(std::max(0, spec_.budget - static_cast<int>(result_.trace.size())));
        if (todo.size() > room) todo.resize(room);

        std::vector<double> values(todo.size());
        std::vector<std::string> errors(todo.size());
        parallel_for(todo.size(), threads, [&](std::size_t k) {
            try {
                values[k] = objective_(xs[todo[k]]);
                if (std::isnan(values[k])) {
                    errors[k] = "objective returned NaN";
                    values[k] = -std::numeric_limits<double>::infinity();
                }
            } catch (const std::exception& e) {
                values[k] = -std::numeric_limits<double>::infinity();
                errors[k] = e.what();
            }
        });
        for (std::size_t k = 0; k < todo.size(); ++k) record(xs[todo[k]], values[k], std::move(errors[k]));

        std::vector<double> out;
        for (const auto& x : xs) {
            auto it = memo_.find(x);
            if (it == memo_.end()) throw BudgetExhausted{};
            out.push_back(-it->second);
        }
        return out;
    }

private:
    void record(const Point& x, double f, std::string error) {
        memo_[x] = f;
        if (f > result_.best_value || result_.best_params.empty()) {
            if (f > result_.best_value) result_.best_value = f;
            result_.best_params = x;
        }
        result_.trace.push_back({static_cast<int>(result_.trace.size()), x, f, result_.best_value, std::move(error)});
    }

    const OptimizationSpec& spec_;
    const Objective& objective_;
    OptimizationResult& result_;
    std::map<Point, double> memo_;
};

}  // namespace

void OptimizationSpec::validate() const {
    if (parameters.empty()) throw std::invalid_argument("optimization: no parameters");
    for (const auto& p : parameters) {
        if (!std::isfinite(p.lower) || !std::isfinite(p.upper) || !(p.lower < p.upper)) {
            throw std::invalid_argument("optimization: bounds for '" + p.name + "' must be finite with lower < upper");
        }
    }
    if (!initial.empty()) {
        if (initial.size() != parameters.size()) {
            throw std::invalid_argument("optimization: initial point has the wrong dimension");
        }
        for (std::size_t i = 0; i < initial.size(); ++i) {
            if (initial[i] < parameters[i].lower || initial[i] > parameters[i].upper) {
                throw std::invalid_argument("optimization: initial value for '" + parameters[i].name +
                                            "' lies outside its bounds");
            }
        }
    }
    if (budget < 20) throw std::invalid_argument("optimization: budget must be >= 20");
    if (!(tolerance > 0.0)) throw std::invalid_argument("optimization: tolerance must be > 0");
    if (!(initial_step > 0.0) || initial_step > 1.0) {
        throw std::invalid_argument("optimization: initial step must be in (0, 1]");
    }
}

OptimizationResult optimize(const OptimizationSpec& spec, const Objective& objective, std::uint64_t seed,
                            unsigned threads) {
    spec.validate();
    const std::size_t n = spec.parameters.size();
    OptimizationResult result;
    BoundedSimplex simplex(spec, objective, result);

    Point start(n, 0.5);
    if (!spec.initial.empty()) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto& b = spec.parameters[i];
            start[i] = (spec.initial[i] - b.lower) / (b.upper - b.lower);
        }
    }
    Engine eng = make_engine(seed);
    std::vector<Point> vertices{start};
    for (std::size_t i = 0; i < n; ++i) {
        Point v = start;
        double step = (eng() & 1u) ? spec.initial_step : -spec.initial_step;
        if (v[i] + step > 1.0 || v[i] + step < 0.0) step = -step;
        v[i] = std::clamp(v[i] + step, 0.0, 1.0);
        vertices.push_back(v);
    }

    try {
        std::vector<double> costs = simplex.cost_batch(vertices, threads);
        std::vector<std::size_t> order(n + 1);
        const int max_iterations = 50 * spec.budget;
        for (; result.iterations < max_iterations; ++result.iterations) {
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return costs[a] < costs[b]; });
            std::vector<Point> sv;
            std::vector<double> sc;
            for (auto k : order) {
                sv.push_back(vertices[k]);
                sc.push_back(costs[k]);
            }
            vertices.swap(sv);
            costs.swap(sc);

            double diameter = 0.0;
            for (std::size_t k = 1; k <= n; ++k) {
                for (std::size_t i = 0; i < n; ++i) diameter = std::max(diameter, std::abs(vertices[k][i] - vertices[0][i]));
            }
            if (diameter < spec.tolerance) {
                result.converged = true;
                break;
            }

            Point centroid(n, 0.0);
            for (std::size_t k = 0; k < n; ++k) {
                for (std::size_t i = 0; i < n; ++i) centroid[i] += vertices[k][i] / static_cast<double>(n);
            }
            auto along = [&](double coeff, const Point& from) {
                Point p(n);
                for (std::size_t i = 0; i < n; ++i) p[i] = centroid[i] + coeff * (centroid[i] - from[i]);
                return BoundedSimplex::clip(p);
            };

            const Point& worst = vertices[n];
            const Point reflected = along(kReflect, worst);
            const double fr = simplex.cost(reflected);

            if (fr < costs[0]) {
                const Point expanded = along(kExpand, worst);
                const double fe = simplex.cost(expanded);
                if (fe < fr) {
                    vertices[n] = expanded;
                    costs[n] = fe;
                } else {
                    vertices[n] = reflected;
                    costs[n] = fr;
                }
                continue;
            }
            if (fr < costs[n - 1]) {
                vertices[n] = reflected;
                costs[n] = fr;
                continue;
            }
            const bool outside = fr < costs[n];
            const Point contracted = outside ? along(kContract, worst) : along(-kContract, worst);
            const double fc = simplex.cost(contracted);
            if ((outside && fc <= fr) || (!outside && fc < costs[n])) {
                vertices[n] = contracted;
                costs[n] = fc;
                continue;
            }
            std::vector<Point> shrunk;
            for (std::size_t k = 1; k <= n; ++k) {
                Point p(n);
                for (std::size_t i = 0; i < n; ++i) p[i] = vertices[0][i] + kShrink * (vertices[k][i] - vertices[0][i]);
                shrunk.push_back(p);
            }
            const std::vector<double> sc_new = simplex.cost_batch(shrunk, threads);
            for (std::size_t k = 1; k <= n; ++k) {
                vertices[k] = shrunk[k - 1];
                costs[k] = sc_new[k - 1];
            }
        }
    } catch (const BudgetExhausted&) {
    }
    return result;
}

std::vector<ScanRow> scan(const StorageScenario& base, const std::string& param, const std::vector<double>& values,
                          unsigned threads) {
    for (double v : values) {
        if (!std::isfinite(v)) throw std::invalid_argument("scan: values must be finite");
    }
    (void)get_parameter(base, param);  // rejects unknown names up front
    std::vector<ScanRow> rows(values.size());
    parallel_for(values.size(), threads, [&](std::size_t i) {
        ScanRow& row = rows[i];
        row.value = values[i];
        row.od = std::numeric_limits<double>::quiet_NaN();
        row.se = std::numeric_limits<double>::quiet_NaN();
        try {
            StorageScenario s = base;
            set_parameter(s, param, values[i]);
            row.od = s.od();
            row.se = run_scenario(s).se;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    });
    return rows;
}

PulseOptimization optimize_pulse(const StorageScenario& base, const OptimizationSpec& spec, std::uint64_t seed,
                                 bool coarse_search, unsigned threads) {
    spec.validate();
    for (const auto& p : spec.parameters) (void)get_parameter(base, p.name);
    const StorageScenario search_base = coarse_search ? base.coarse() : base;
    auto apply = [&spec](StorageScenario s, std::span<const double> x) {
        for (std::size_t i = 0; i < x.size(); ++i) set_parameter(s, spec.parameters[i].name, x[i]);
        return s;
    };
    const Objective objective = [&](std::span<const double> x) { return run_scenario(apply(search_base, x)).se; };

    PulseOptimization out;
    out.search = optimize(spec, objective, seed, threads);
    if (out.search.best_params.empty() || !std::isfinite(out.search.best_value)) {
        throw numeric_error("optimize_pulse: no successful objective evaluation");
    }
    out.best = apply(base, out.search.best_params);
    out.best_se_full = run_scenario(out.best).se;
    return out;
}

GaussianBaseline full_gaussian_baseline(const StorageScenario& base, std::uint64_t seed, unsigned threads) {
    StorageScenario gauss = base;
    gauss.probe.full_gaussian = true;
    // Offsets are relative to the end of the 6 FWHM window; the peak sits 3 FWHM before it.
    const double offset_lower = -4.0 * base.probe.fwhm_ns;
    const double offset_upper = 100.0;
    const int sweep = 41;
    std::vector<double> offsets(sweep);
    for (int i = 0; i < sweep; ++i) offsets[i] = offset_lower + (offset_upper - offset_lower) * i / (sweep - 1);
    const auto rows = scan(gauss, "switch_off_offset", offsets, threads);
    std::size_t best = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].se > rows[best].se || std::isnan(rows[best].se)) best = i;
    }

    OptimizationSpec spec;
    spec.parameters = {{"switch_off_offset", offset_lower, offset_upper}};
    spec.initial = {offsets[best]};
    spec.initial_step = 1.0 / (sweep - 1);
    spec.budget = 40;
    spec.tolerance = 1e-3;
    const PulseOptimization opt = optimize_pulse(gauss, spec, seed, false, threads);
    GaussianBaseline out{opt.best, opt.best_se_full};
    if (!std::isnan(rows[best].se) && rows[best].se > out.se) {
        set_parameter(out.scenario, "switch_off_offset", offsets[best]);
        out.se = rows[best].se;
    }
    return out;
}

CalibrationResult calibrate(const StorageScenario& base, const CalibrationTargets& targets, std::uint64_t seed,
                            unsigned threads, int budget) {
    if (targets.low_l < 0 || targets.high_l <= targets.low_l) {
        throw std::invalid_argument("calibrate: target modes must satisfy 0 <= low_l < high_l");
    }
    // Squared target misses plus a penalty on any l -> l+1 step (l = 0..high_l)
    // that fails to lower the efficiency by at least kMonotoneMargin.
    constexpr double kMonotoneMargin = 0.01;
    auto residual_of = [&](const StorageScenario& s) {
        std::vector<double> se;
        for (int l = 0; l <= targets.high_l; ++l) {
            StorageScenario m = s;
            m.mode.l = l;
            m.od_override.reset();
            se.push_back(run_scenario(m).se);
        }
        const double a = se[static_cast<std::size_t>(targets.low_l)] - targets.low_se;
        const double b = se[static_cast<std::size_t>(targets.high_l)] - targets.high_se;
        double penalty = 0.0;
        for (std::size_t l = 0; l + 1 < se.size(); ++l) {
            const double rise = se[l + 1] - se[l] + kMonotoneMargin;
            if (rise > 0.0) penalty += rise * rise;
        }
        return a * a + b * b + penalty;
    };

    // Stage 1: coarse grid over control strength and cloud radius.
    const std::vector<double> controls{3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 10.0};
    std::vector<double> radii;
    for (double r = 40.0; r <= 200.0 + 1e-9; r += 10.0) radii.push_back(r);
    const StorageScenario coarse_base = base.coarse();
    std::vector<double> grid_residual(controls.size() * radii.size(), std::numeric_limits<double>::infinity());
    parallel_for(grid_residual.size(), threads, [&](std::size_t k) {
        StorageScenario s = coarse_base;
        set_parameter(s, "control_rel", controls[k / radii.size()]);
        set_parameter(s, "sigma_t", radii[k % radii.size()]);
        try {
            grid_residual[k] = residual_of(s);
        } catch (const std::exception&) {
        }
    });
    const auto best_k = static_cast<std::size_t>(
        std::min_element(grid_residual.begin(), grid_residual.end()) - grid_residual.begin());

    // Stage 2: simplex over all four knobs on the full grid.
    OptimizationSpec spec;
    spec.parameters = {{"control_rel", 1.5, 14.0},
                       {"sigma_t", 20.0, 400.0},
                       {"gamma_12_rel", 0.0, 0.05},
                       {"truncation_fraction", 0.05, 1.0}};
    spec.initial = {controls[best_k / radii.size()], radii[best_k % radii.size()],
                    std::clamp(base.ensemble.gamma_12 / base.ensemble.gamma_e, 0.0, 0.05),
                    std::clamp(base.probe.truncation_fraction, 0.05, 1.0)};
    spec.budget = budget;
    spec.tolerance = 1e-4;
    spec.initial_step = 0.05;
    auto apply = [&spec](StorageScenario s, std::span<const double> x) {
        for (std::size_t i = 0; i < x.size(); ++i) set_parameter(s, spec.parameters[i].name, x[i]);
        return s;
    };

    CalibrationResult out;
    out.search = optimize(spec, [&](std::span<const double> x) { return -residual_of(apply(base, x)); }, seed,
                          threads);
    if (out.search.best_params.empty() || !std::isfinite(out.search.best_value)) {
        throw numeric_error("calibrate: no successful objective evaluation");
    }
    out.scenario = apply(base, out.search.best_params);
    out.scenario.od_override.reset();
    out.residual = std::sqrt(-out.search.best_value);

    std::vector<double> ls;
    for (int l = 0; l <= targets.high_l; ++l) ls.push_back(l);
    for (const auto& row : scan(out.scenario, "l", ls, threads)) {
        if (!row.error.empty()) throw numeric_error("calibrate: final scan failed: " + row.error);
        out.se_by_l.push_back(row.se);
        out.od_by_l.push_back(row.od);
    }
    return out;
}

}  // namespace oamem
