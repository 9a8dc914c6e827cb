#include "rnpm/optimizer.h"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "rnpm/parallel.h"

namespace rnpm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGoldenRatio = 0.6180339887498949;  // (sqrt5 - 1)/2

struct Evaluation {
    double time_s = kInf;
    double fidelity = 0.0;
};

class ChainModel {
  public:
    ChainModel(double length_km, int nesting, const Hardware &hardware, StationGeometry geometry) {
        config_.length_km = length_km;
        config_.nesting = nesting;
        config_.hardware = hardware;
        config_.geometry = geometry;
    }

    Evaluation evaluate(double beta_g_sq, double beta_s_sq) {
        config_.generation = InteractionParams::from_beta_sq(beta_g_sq);
        config_.swapping = InteractionParams::from_beta_sq(beta_s_sq);
        ChainResult r = chain_closed_form(config_);
        return Evaluation{r.total_time_s, r.fidelity};
    }

    int nesting() const { return config_.nesting; }

  private:
    ChainConfig config_;
};

// Largest x in [lo, hi] (log-bisected) with feasible(x), assuming feasibility
// is monotone decreasing and feasible(lo) holds.
template <typename Fidelity>
double largest_feasible(double lo, double hi, double target, double tolerance, Fidelity fidelity) {
    if (fidelity(hi) >= target) {
        return hi;
    }
    double f_lo = fidelity(lo);
    double f_hi = fidelity(hi);
    for (int it = 0; it < 200; it++) {
        if (f_lo - f_hi <= tolerance || std::log(hi / lo) < 1e-15) {
            break;
        }
        double mid = std::sqrt(lo * hi);
        double f_mid = fidelity(mid);
        if (f_mid >= target) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }
    return lo;
}

OptimumRecord infeasible(double length_km, double target, const Hardware &hw, StationGeometry geometry,
                         const std::string &why) {
    OptimumRecord r;
    r.length_km = length_km;
    r.target_fidelity = target;
    r.detector = hw.detector.kind;
    r.geometry = geometry;
    r.feasible = false;
    r.time_s = kInf;
    r.fidelity = std::numeric_limits<double>::quiet_NaN();
    r.beta_g_sq = std::numeric_limits<double>::quiet_NaN();
    r.beta_s_sq = std::numeric_limits<double>::quiet_NaN();
    r.direct_time_s =
        direct_transmission_time(length_km, hw.source_rate_hz, hw.detector.efficiency, hw.attenuation_length_km);
    r.error = why;
    return r;
}

void check_target(double target) {
    if (!(target > 0.5 && target < 1.0)) {
        throw std::domain_error("target fidelity must lie in (1/2, 1)");
    }
}

}  // namespace

void OptimizerSettings::validate() const {
    if (max_nesting < 0 || max_nesting > 40) {
        throw std::domain_error("max_nesting must lie in [0, 40]");
    }
    if (!(beta_sq_min > 0.0 && beta_sq_min < beta_sq_max)) {
        throw std::domain_error("beta^2 bracket must satisfy 0 < min < max");
    }
    if (!(golden_tolerance > 0.0) || !(bisection_tolerance > 0.0) || scan_points < 3) {
        throw std::domain_error("optimizer tolerances must be positive and scan_points >= 3");
    }
}

double beta_sq_upper(const DetectorModel &detector, const OptimizerSettings &settings) {
    if (detector.kind == DetectorKind::SinglePhoton) {
        return std::min(settings.beta_sq_max, 1.0 / (2.0 * detector.efficiency));
    }
    return settings.beta_sq_max;
}

OptimumRecord optimize_fixed_nesting(
    double length_km, int nesting, double target_fidelity, const Hardware &hardware, StationGeometry geometry,
    const OptimizerSettings &settings) {
    check_target(target_fidelity);
    settings.validate();
    hardware.validate();
    ChainModel model(length_km, nesting, hardware, geometry);
    double lo = settings.beta_sq_min;
    double hi = beta_sq_upper(hardware.detector, settings);
    double tol = settings.bisection_tolerance;

    if (model.evaluate(lo, lo).fidelity < target_fidelity) {
        return infeasible(length_km, target_fidelity, hardware, geometry,
                          "target fidelity unreachable at n = " + std::to_string(nesting));
    }

    auto best_generation = [&](double beta_s_sq) {
        return largest_feasible(lo, hi, target_fidelity, tol,
                                [&](double g) { return model.evaluate(g, beta_s_sq).fidelity; });
    };

    double best_g = 0.0;
    double best_s = 0.0;
    if (nesting == 0) {
        best_g = best_generation(lo);
    } else {
        double s_hi = largest_feasible(lo, hi, target_fidelity, tol,
                                       [&](double s) { return model.evaluate(lo, s).fidelity; });
        auto objective = [&](double u) {
            double s = std::exp(u);
            return model.evaluate(best_generation(s), s).time_s;
        };
        double u_lo = std::log(lo);
        double u_hi = std::log(s_hi);
        int points = settings.scan_points;
        double best_u = u_lo;
        double best_t = kInf;
        int best_k = 0;
        for (int k = 0; k < points; k++) {
            double u = u_lo + (u_hi - u_lo) * k / (points - 1);
            double t = objective(u);
            if (t < best_t) {
                best_t = t;
                best_u = u;
                best_k = k;
            }
        }
        double step = (u_hi - u_lo) / (points - 1);
        double a = u_lo + std::max(0, best_k - 1) * step;
        double b = u_lo + std::min(points - 1, best_k + 1) * step;
        double x1 = b - kGoldenRatio * (b - a);
        double x2 = a + kGoldenRatio * (b - a);
        double t1 = objective(x1);
        double t2 = objective(x2);
        while (b - a > settings.golden_tolerance) {
            if (t1 <= t2) {
                b = x2;
                x2 = x1;
                t2 = t1;
                x1 = b - kGoldenRatio * (b - a);
                t1 = objective(x1);
            } else {
                a = x1;
                x1 = x2;
                t1 = t2;
                x2 = a + kGoldenRatio * (b - a);
                t2 = objective(x2);
            }
        }
        if (t1 < best_t) {
            best_t = t1;
            best_u = x1;
        }
        if (t2 < best_t) {
            best_t = t2;
            best_u = x2;
        }
        best_s = std::exp(best_u);
        best_g = best_generation(best_s);
    }

    Evaluation e = model.evaluate(best_g, nesting == 0 ? lo : best_s);
    OptimumRecord r;
    r.length_km = length_km;
    r.target_fidelity = target_fidelity;
    r.detector = hardware.detector.kind;
    r.geometry = geometry;
    r.feasible = e.fidelity >= target_fidelity - 1e-9;
    r.nesting = nesting;
    r.beta_g_sq = best_g;
    r.beta_s_sq = best_s;
    r.time_s = e.time_s;
    r.fidelity = e.fidelity;
    r.direct_time_s = direct_transmission_time(
        length_km, hardware.source_rate_hz, hardware.detector.efficiency, hardware.attenuation_length_km);
    if (!r.feasible) {
        r.error = "optimum violates the fidelity constraint";
    }
    return r;
}

OptimumRecord optimize_chain(
    double length_km, double target_fidelity, const Hardware &hardware, StationGeometry geometry,
    DetectorKind detector, const OptimizerSettings &settings) {
    Hardware hw = hardware;
    hw.detector.kind = detector;
    OptimumRecord best;
    bool found = false;
    for (int n = 0; n <= settings.max_nesting; n++) {
        OptimumRecord r = optimize_fixed_nesting(length_km, n, target_fidelity, hw, geometry, settings);
        if (r.feasible && (!found || r.time_s < best.time_s)) {
            best = r;
            found = true;
        }
    }
    if (!found) {
        return infeasible(length_km, target_fidelity, hw, geometry,
                          "target fidelity unreachable for n <= " + std::to_string(settings.max_nesting));
    }
    return best;
}

OptimumRecord brute_force_grid(
    double length_km, double target_fidelity, const Hardware &hardware, StationGeometry geometry, int max_nesting,
    int grid, const OptimizerSettings &settings) {
    check_target(target_fidelity);
    if (grid < 2) {
        throw std::domain_error("grid needs at least two points");
    }
    double lo = settings.beta_sq_min;
    double hi = beta_sq_upper(hardware.detector, settings);
    std::vector<double> values(grid);
    for (int i = 0; i < grid; i++) {
        values[i] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (grid - 1));
    }
    OptimumRecord best = infeasible(length_km, target_fidelity, hardware, geometry, "no feasible grid point");
    for (int n = 0; n <= max_nesting; n++) {
        ChainModel model(length_km, n, hardware, geometry);
        for (double g : values) {
            for (double s : values) {
                Evaluation e = model.evaluate(g, s);
                if (e.fidelity >= target_fidelity && e.time_s < best.time_s) {
                    best.feasible = true;
                    best.error.clear();
                    best.nesting = n;
                    best.beta_g_sq = g;
                    best.beta_s_sq = n == 0 ? 0.0 : s;
                    best.time_s = e.time_s;
                    best.fidelity = e.fidelity;
                }
                if (n == 0) {
                    break;
                }
            }
        }
    }
    return best;
}

void SweepSpec::validate() const {
    hardware.validate();
    if (lengths_km.empty() || target_fidelities.empty() || detectors.empty()) {
        throw std::invalid_argument("sweep grids must be nonempty");
    }
    for (std::size_t i = 0; i < lengths_km.size(); i++) {
        if (!(lengths_km[i] > 0.0) || (i > 0 && !(lengths_km[i] > lengths_km[i - 1]))) {
            throw std::invalid_argument("lengths must be positive and strictly ascending");
        }
    }
    for (double f : target_fidelities) {
        check_target(f);
    }
}

std::vector<OptimumRecord> sweep(const SweepSpec &spec, const OptimizerSettings &settings, int threads) {
    spec.validate();
    settings.validate();
    struct Point {
        DetectorKind detector;
        double target;
        double length;
    };
    std::vector<Point> points;
    for (DetectorKind d : spec.detectors) {
        for (double f : spec.target_fidelities) {
            for (double l : spec.lengths_km) {
                points.push_back({d, f, l});
            }
        }
    }
    std::vector<OptimumRecord> out(points.size());
    parallel_for(points.size(), threads, [&](std::size_t i) {
        const Point &p = points[i];
        out[i] = optimize_chain(p.length, p.target, spec.hardware, spec.geometry, p.detector, settings);
    });
    return out;
}

}  // namespace rnpm
