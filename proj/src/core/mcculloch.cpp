#include "mcculloch.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "errors.hpp"
#include "parallel.hpp"

namespace stableq {

namespace {

constexpr double kGuardBandAlpha = 1.95;  // bilinear at and above
constexpr double kQuantileAbsTol = 1e-10;
constexpr double kQuantileRelTol = 1e-8;

bool is_mcculloch_levels(const QuantileSet& q) {
    auto ref = mcculloch_levels();
    if (q.size() != ref.size()) return false;
    for (std::size_t i = 0; i < ref.size(); ++i)
        if (std::abs(q.levels[i] - ref[i]) > 1e-12) return false;
    return true;
}

VStats v_stats_raw(const std::vector<double>& v) {
    double iqr = v[3] - v[1];
    double span = v[4] - v[0];
    if (!(iqr > 0.0) || !(span > 0.0))
        throw std::invalid_argument("v_stats: degenerate sample (zero quantile spread)");
    return {span / iqr, (v[4] + v[0] - 2.0 * v[2]) / span};
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

VStats v_stats(const QuantileSet& q) {
    q.validate();
    if (!is_mcculloch_levels(q))
        throw std::invalid_argument("v_stats: the five McCulloch levels are required");
    return v_stats_raw(q.values);
}

std::vector<double> LookupTables::default_alpha_grid() {
    std::vector<double> g;
    for (int i = 12; i <= 37; ++i) g.push_back(i * 0.05);          // 0.60 .. 1.85
    for (int i = 190; i <= 200; ++i) g.push_back(i * 0.01);        // 1.90 .. 2.00
    return g;
}

std::vector<double> LookupTables::default_beta_grid() {
    std::vector<double> g;
    for (int i = 0; i <= 20; ++i) g.push_back(i * 0.05);
    return g;
}

LookupTables LookupTables::build(std::vector<double> alpha_grid,
                                 std::vector<double> beta_grid,
                                 const BuildOptions& options) {
    if (alpha_grid.size() < 4 || beta_grid.size() < 4)
        throw std::invalid_argument("lookup build: grid too small");
    for (double a : alpha_grid)
        if (!(a > 0.5) || !(a <= 2.0))
            throw std::invalid_argument("lookup build: alpha grid must lie in (0.5, 2]");
    for (double b : beta_grid)
        if (!(b >= 0.0) || !(b > -1e-12 && b <= 1.0))
            throw std::invalid_argument("lookup build: beta grid must lie in [0, 1]");
    if (!std::is_sorted(alpha_grid.begin(), alpha_grid.end()) ||
        !std::is_sorted(beta_grid.begin(), beta_grid.end()))
        throw std::invalid_argument("lookup build: grids must be increasing");

    const std::size_t na = alpha_grid.size(), nb = beta_grid.size();
    std::vector<double> t1(na * nb), t2(na * nb);
    parallel_for(na * nb, [&](std::size_t idx) {
        std::size_t i = idx / nb, j = idx % nb;
        StableDist d(StableParams{alpha_grid[i], beta_grid[j], 1.0, 0.0});
        QuantileSet q = population_quantiles(d, mcculloch_levels());
        VStats v = v_stats_raw(q.values);
        t1[idx] = v.v_alpha;
        t2[idx] = v.v_beta;
    });

    // Monotonicity: failure indicates the quantile engine lost accuracy.
    for (std::size_t j = 0; j < nb; ++j)
        for (std::size_t i = 0; i + 1 < na; ++i)
            if (!(t1[i * nb + j] > t1[(i + 1) * nb + j]))
                throw NumericError(
                    "lookup build: phi1 not decreasing in alpha at node (" +
                        format_double(alpha_grid[i]) + ", " + format_double(beta_grid[j]) + ")",
                    t1[(i + 1) * nb + j] - t1[i * nb + j]);
    for (std::size_t i = 0; i < na; ++i) {
        if (alpha_grid[i] >= 2.0) continue;  // phi2 degenerates to 0 at alpha = 2
        for (std::size_t j = 0; j + 1 < nb; ++j)
            if (!(t2[i * nb + j] < t2[i * nb + j + 1]))
                throw NumericError(
                    "lookup build: phi2 not increasing in beta at node (" +
                        format_double(alpha_grid[i]) + ", " + format_double(beta_grid[j]) + ")",
                    t2[i * nb + j] - t2[i * nb + j + 1]);
    }

    LookupTables tables(GridSurface(alpha_grid, beta_grid, std::move(t1)),
                        GridSurface(alpha_grid, beta_grid, std::move(t2)));

    if (options.verify_interpolation) {
        // Round-trip error at a subset of cell midpoints.
        std::vector<std::pair<double, double>> probes;
        for (std::size_t i = 0; i + 1 < na; i += 2)
            for (std::size_t j = 0; j + 1 < nb; j += 2)
                probes.emplace_back(0.5 * (alpha_grid[i] + alpha_grid[i + 1]),
                                    0.5 * (beta_grid[j] + beta_grid[j + 1]));
        std::vector<double> errs(probes.size());
        parallel_for(probes.size(), [&](std::size_t p) {
            auto [a, b] = probes[p];
            StableDist d(StableParams{a, b, 1.0, 0.0});
            VStats v = v_stats_raw(population_quantiles(d, mcculloch_levels()).values);
            InversionResult inv = tables.invert(v.v_alpha, v.v_beta);
            errs[p] = std::max(std::abs(inv.alpha - a), std::abs(inv.beta - b));
        });
        for (std::size_t p = 0; p < probes.size(); ++p)
            if (errs[p] > 1e-3 && probes[p].first < kGuardBandAlpha)
                throw NumericError("lookup build: interpolation error above 1e-3 near (" +
                                       format_double(probes[p].first) + ", " +
                                       format_double(probes[p].second) + ")",
                                   errs[p]);
    }
    return tables;
}

LookupTables LookupTables::build_default(const BuildOptions& options) {
    return build(default_alpha_grid(), default_beta_grid(), options);
}

void LookupTables::save(const std::string& path) const {
    std::ostringstream out;
    const auto& ag = alpha_grid();
    const auto& bg = beta_grid();
    out << "stableq-lookup-v1\n";
    out << ag.size() << ',' << bg.size() << ',' << format_double(kQuantileAbsTol) << ','
        << format_double(kQuantileRelTol) << '\n';
    auto row = [&](const std::vector<double>& v, std::size_t off, std::size_t n) {
        for (std::size_t j = 0; j < n; ++j) out << (j ? "," : "") << format_double(v[off + j]);
        out << '\n';
    };
    row(ag, 0, ag.size());
    row(bg, 0, bg.size());
    for (std::size_t i = 0; i < ag.size(); ++i) row(phi1_values(), i * bg.size(), bg.size());
    for (std::size_t i = 0; i < ag.size(); ++i) row(phi2_values(), i * bg.size(), bg.size());
    std::string body = out.str();
    char hash[32];
    std::snprintf(hash, sizeof(hash), "hash,%016" PRIx64 "\n", fnv1a64(body));
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("lookup save: cannot open " + path);
    f << body << hash;
    if (!f) throw std::runtime_error("lookup save: write failed for " + path);
}

LookupTables LookupTables::load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("lookup load: cannot open " + path);
    std::string line;
    if (!std::getline(f, line) || line != "stableq-lookup-v1")
        throw std::runtime_error("lookup load: bad header in " + path);
    std::string body = line + "\n";
    auto next_row = [&]() {
        if (!std::getline(f, line)) throw std::runtime_error("lookup load: truncated file");
        body += line + "\n";
        std::vector<double> vals;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) vals.push_back(std::strtod(tok.c_str(), nullptr));
        return vals;
    };
    auto dims = next_row();
    if (dims.size() != 4) throw std::runtime_error("lookup load: bad dimension row");
    auto na = static_cast<std::size_t>(dims[0]);
    auto nb = static_cast<std::size_t>(dims[1]);
    auto ag = next_row();
    auto bg = next_row();
    if (ag.size() != na || bg.size() != nb)
        throw std::runtime_error("lookup load: grid size mismatch");
    std::vector<double> t1, t2;
    t1.reserve(na * nb);
    t2.reserve(na * nb);
    for (std::size_t i = 0; i < na; ++i) {
        auto r = next_row();
        if (r.size() != nb) throw std::runtime_error("lookup load: bad phi1 row");
        t1.insert(t1.end(), r.begin(), r.end());
    }
    for (std::size_t i = 0; i < na; ++i) {
        auto r = next_row();
        if (r.size() != nb) throw std::runtime_error("lookup load: bad phi2 row");
        t2.insert(t2.end(), r.begin(), r.end());
    }
    if (!std::getline(f, line) || line.rfind("hash,", 0) != 0)
        throw std::runtime_error("lookup load: missing hash line");
    char expect[32];
    std::snprintf(expect, sizeof(expect), "hash,%016" PRIx64, fnv1a64(body));
    if (line != expect) throw std::runtime_error("lookup load: hash mismatch in " + path);
    return LookupTables(GridSurface(ag, bg, std::move(t1)), GridSurface(ag, bg, std::move(t2)));
}

double LookupTables::eval(const GridSurface& s, double alpha, double beta, double* da,
                          double* db) const {
    if (alpha >= kGuardBandAlpha) {
        if (da || db) {
            // centered differences on the bilinear patch; adequate for the
            // fallback solver, Newton is not used in the guard band
            double h = 1e-6;
            if (da) *da = (s.bilinear(alpha + h, beta) - s.bilinear(alpha - h, beta)) / (2 * h);
            if (db) *db = (s.bilinear(alpha, beta + h) - s.bilinear(alpha, beta - h)) / (2 * h);
        }
        return s.bilinear(alpha, beta);
    }
    return s.spline(alpha, beta, da, db);
}

VStats LookupTables::phi(double alpha, double beta) const {
    double b = std::abs(beta);
    double v1 = eval(phi1_, alpha, b);
    double v2 = eval(phi2_, alpha, b);
    return {v1, beta >= 0.0 ? v2 : -v2};
}

InversionResult LookupTables::invert(double v_alpha, double v_beta) const {
    const auto& ag = alpha_grid();
    const double amin = ag.front(), amax = ag.back();
    const double sign = v_beta < 0.0 ? -1.0 : 1.0;
    const double vb = std::abs(v_beta);

    // alpha solving phi1(alpha, beta) = v_alpha at fixed beta (phi1 strictly
    // decreasing in alpha); +/-1 marks a boundary clamp.
    auto alpha_of = [&](double beta, int& clamp) {
        clamp = 0;
        if (eval(phi1_, amin, beta) <= v_alpha) {
            clamp = -1;
            return amin;
        }
        if (eval(phi1_, amax, beta) >= v_alpha) {
            clamp = 1;
            return amax;
        }
        double lo = amin, hi = amax;
        for (int it = 0; it < 64 && hi - lo > 1e-13; ++it) {
            double mid = 0.5 * (lo + hi);
            (eval(phi1_, mid, beta) > v_alpha ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };

    auto solve_beta_on_slice = [&](double alpha_fix, bool& bclamp) {
        if (eval(phi2_, alpha_fix, 1.0) <= vb) {
            bclamp = true;
            return 1.0;
        }
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 64 && hi - lo > 1e-13; ++it) {
            double mid = 0.5 * (lo + hi);
            (eval(phi2_, alpha_fix, mid) < vb ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };

    InversionResult out;
    // Newton on the spline surfaces away from the guard band.
    bool newton_done = false;
    {
        double a = std::clamp(1.5, amin, amax), b = 0.3;
        // coarse seed from the nearest grid node
        double best = 1e300;
        const auto& bg = beta_grid();
        for (std::size_t i = 0; i < ag.size(); ++i)
            for (std::size_t j = 0; j < bg.size(); ++j) {
                double r1 = phi1_.at(i, j) - v_alpha;
                double r2 = phi2_.at(i, j) - vb;
                double score = r1 * r1 + 25.0 * r2 * r2;
                if (score < best) {
                    best = score;
                    a = ag[i];
                    b = bg[j];
                }
            }
        for (int it = 0; it < 40 && a < kGuardBandAlpha; ++it) {
            double d1a, d1b, d2a, d2b;
            double r1 = eval(phi1_, a, b, &d1a, &d1b) - v_alpha;
            double r2 = eval(phi2_, a, b, &d2a, &d2b) - vb;
            double det = d1a * d2b - d1b * d2a;
            if (std::abs(det) < 1e-14) break;
            double da = (-r1 * d2b + r2 * d1b) / det;
            double db = (-r2 * d1a + r1 * d2a) / det;
            double an = std::clamp(a + da, amin, amax);
            double bn = std::clamp(b + db, 0.0, 1.0);
            bool small = std::abs(an - a) < 1e-12 && std::abs(bn - b) < 1e-12;
            a = an;
            b = bn;
            if (small || (std::abs(r1) < 1e-11 && std::abs(r2) < 1e-11)) {
                bool interior_a = a > amin + 1e-9 && a < amax - 1e-9;
                bool interior_b = b > 1e-9 && b < 1.0 - 1e-9;
                double c1 = eval(phi1_, a, b) - v_alpha;
                double c2 = eval(phi2_, a, b) - vb;
                if (interior_a && interior_b && std::abs(c1) < 1e-9 && std::abs(c2) < 1e-9) {
                    out.alpha = a;
                    out.beta = b;
                    newton_done = true;
                }
                break;
            }
        }
    }

    if (!newton_done) {
        // Nested bisection: outer solve in beta of phi2(alpha(beta), beta) = vb.
        int aclamp = 0;
        double lo = 0.0, hi = 1.0;
        double alo = alpha_of(lo, aclamp);
        double hlo = eval(phi2_, alo, lo) - vb;
        int aclamp_hi = 0;
        double ahi = alpha_of(hi, aclamp_hi);
        double hhi = eval(phi2_, ahi, hi) - vb;
        if (hlo >= 0.0) {
            // vb at or below the symmetric slice
            out.beta = 0.0;
            out.alpha = alo;
            out.alpha_clamped = aclamp != 0;
        } else if (hhi <= 0.0) {
            out.beta = 1.0;
            out.alpha = ahi;
            out.alpha_clamped = aclamp_hi != 0;
            out.beta_clamped = true;
        } else {
            int ac = 0;
            for (int it = 0; it < 64 && hi - lo > 1e-13; ++it) {
                double mid = 0.5 * (lo + hi);
                double am = alpha_of(mid, ac);
                ((eval(phi2_, am, mid) - vb) < 0.0 ? lo : hi) = mid;
            }
            out.beta = 0.5 * (lo + hi);
            out.alpha = alpha_of(out.beta, ac);
            out.alpha_clamped = ac != 0;
        }
        // At the alpha = 2 boundary phi2 degenerates; recover beta from the
        // nearest informative slice so the estimate stays continuous.
        if (out.alpha >= amax - 1e-12 && vb > 0.0) {
            double slice = std::min(1.99, amax - 0.01);
            bool bc = false;
            out.beta = solve_beta_on_slice(slice, bc);
            out.beta_clamped = bc;
        }
    }

    out.beta *= sign;
    return out;
}

EstimationResult estimate_params(const QuantileSet& q, const LookupTables& tables) {
    VStats v = v_stats(q);
    InversionResult inv = tables.invert(v.v_alpha, v.v_beta);
    StableDist standardized(StableParams{inv.alpha, inv.beta, 1.0, 0.0});
    double s25 = standardized.quantile(0.25);
    double s50 = standardized.quantile(0.50);
    double s75 = standardized.quantile(0.75);
    EstimationResult out;
    out.params.alpha = inv.alpha;
    out.params.beta = inv.beta;
    out.params.gamma = (q.values[3] - q.values[1]) / (s75 - s25);
    out.params.delta = q.values[2] - out.params.gamma * s50;
    out.quantiles_used = q;
    out.alpha_clamped = inv.alpha_clamped;
    out.beta_clamped = inv.beta_clamped;
    return out;
}

}  // namespace stableq
