#include "toricnn/montecarlo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <omp.h>

#include "toricnn/io.hpp"

namespace toricnn {

std::vector<SweepRow> run_noiseless_sweep(const Network& net, const SweepConfig& cfg, int workers) {
    std::vector<SweepRow> rows;
    int point = 0;
    for (int side : cfg.sides) {
        const LatticeGeometry geom(cfg.dim, side);
        for (double p : cfg.ps) {
            std::vector<uint8_t> failed(static_cast<size_t>(cfg.trials), 0);
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, workers))
            for (long t = 0; t < cfg.trials; ++t) {
                Rng rng = Rng::split(cfg.seed, (static_cast<uint64_t>(point) << 32) |
                                                   static_cast<uint64_t>(t));
                const ErrorConfig err = sample_error(geom, p, rng);
                const DecodeOutcome outcome = nn_decode(net, err, cfg.decoder);
                failed[static_cast<size_t>(t)] = outcome.status != DecodeStatus::corrected_trivial;
            }
            long failures = 0;
            for (uint8_t f : failed) failures += f;
            SweepRow row{side, p, cfg.trials, failures,
                         static_cast<double>(failures) / static_cast<double>(cfg.trials),
                         wilson_interval(failures, cfg.trials, 0.95)};
            rows.push_back(row);
            ++point;
        }
    }
    return rows;
}

std::vector<MemoryTimeRecord> run_memory_time(const Network& net_noisy, const Network& net_assess,
                                              const MemoryTimeConfig& cfg, int workers) {
    std::vector<MemoryTimeRecord> records;
    int point = 0;
    for (int side : cfg.sides) {
        const LatticeGeometry geom(cfg.dim, side);
        std::vector<MemoryTimeRecord> local(static_cast<size_t>(cfg.runs));
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, workers))
        for (long r = 0; r < cfg.runs; ++r) {
            Rng rng = Rng::split(cfg.seed, (static_cast<uint64_t>(point) << 32) |
                                               static_cast<uint64_t>(r));
            ErrorConfig err(geom);
            Syndrome s_true(geom);
            long rounds = cfg.round_cap;
            bool censored = true;
            for (long round = 1; round <= cfg.round_cap; ++round) {
                // New physical errors this round, then one decode pass on
                // the q-corrupted syndrome.
                const ErrorConfig fresh = sample_error(geom, cfg.p, rng);
                err.bits ^= fresh.bits;
                fresh.bits.for_each_set(
                    [&](size_t f) { xor_face_boundary(geom, static_cast<long>(f), s_true.bits); });
                noisy_round_decode(net_noisy, err, s_true, cfg.p, cfg.decoder, rng);

                // Assessment on a clone via the model-(a) pipeline; the
                // evolving state is never touched.
                const DecodeOutcome check = nn_decode(net_assess, err, cfg.assess_decoder);
                if (check.status != DecodeStatus::corrected_trivial) {
                    rounds = round;
                    censored = false;
                    break;
                }
            }
            local[static_cast<size_t>(r)] = {side, cfg.p, rounds, censored};
        }
        records.insert(records.end(), local.begin(), local.end());
        ++point;
    }
    return records;
}

CensoredMean memory_time_estimate(const std::vector<MemoryTimeRecord>& records, int side,
                                  double confidence) {
    std::vector<double> times;
    std::vector<uint8_t> censored;
    for (const auto& r : records) {
        if (r.side != side) continue;
        times.push_back(static_cast<double>(r.rounds));
        censored.push_back(r.censored ? 1 : 0);
    }
    if (times.empty()) throw std::invalid_argument("no memory-time records for requested side");
    return censored_exponential_mean(times, censored, confidence);
}

namespace {

struct FitWork {
    const std::vector<ScalingPoint>& pts;

    // residuals r_i = model - data and Jacobian rows for params
    // (A, B, C, p_c, nu).
    double sse(const double* q) const {
        double s = 0.0;
        for (const auto& pt : pts) {
            const double x = (pt.p - q[3]) * std::pow(static_cast<double>(pt.side), 1.0 / q[4]);
            const double r = q[0] + q[1] * x + q[2] * x * x - pt.p_bar;
            s += r * r;
        }
        return s;
    }

    void jacobian_row(const double* q, const ScalingPoint& pt, double* jrow, double& r) const {
        const double lpow = std::pow(static_cast<double>(pt.side), 1.0 / q[4]);
        const double x = (pt.p - q[3]) * lpow;
        r = q[0] + q[1] * x + q[2] * x * x - pt.p_bar;
        const double dPdx = q[1] + 2.0 * q[2] * x;
        jrow[0] = 1.0;
        jrow[1] = x;
        jrow[2] = x * x;
        jrow[3] = -dPdx * lpow;
        jrow[4] = -dPdx * (pt.p - q[3]) * lpow * std::log(static_cast<double>(pt.side)) /
                  (q[4] * q[4]);
    }
};

// Solve the symmetric 5x5 system M d = rhs by Gaussian elimination with
// partial pivoting; returns false when singular.
bool solve5(double m[5][5], double rhs[5], double out[5]) {
    int perm[5] = {0, 1, 2, 3, 4};
    for (int c = 0; c < 5; ++c) {
        int piv = c;
        for (int r = c + 1; r < 5; ++r)
            if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
        if (std::abs(m[piv][c]) < 1e-300) return false;
        std::swap(m[c], m[piv]);
        std::swap(rhs[c], rhs[piv]);
        std::swap(perm[c], perm[piv]);
        for (int r = c + 1; r < 5; ++r) {
            const double f = m[r][c] / m[c][c];
            for (int k = c; k < 5; ++k) m[r][k] -= f * m[c][k];
            rhs[r] -= f * rhs[c];
        }
    }
    for (int r = 4; r >= 0; --r) {
        double acc = rhs[r];
        for (int k = r + 1; k < 5; ++k) acc -= m[r][k] * out[k];
        out[r] = acc / m[r][r];
    }
    return true;
}

bool invert5(const double in[5][5], double out[5][5]) {
    double a[5][10];
    for (int r = 0; r < 5; ++r) {
        for (int c = 0; c < 5; ++c) a[r][c] = in[r][c];
        for (int c = 0; c < 5; ++c) a[r][5 + c] = (r == c) ? 1.0 : 0.0;
    }
    for (int c = 0; c < 5; ++c) {
        int piv = c;
        for (int r = c + 1; r < 5; ++r)
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        if (std::abs(a[piv][c]) < 1e-300) return false;
        std::swap(a[c], a[piv]);
        const double inv = 1.0 / a[c][c];
        for (int k = 0; k < 10; ++k) a[c][k] *= inv;
        for (int r = 0; r < 5; ++r) {
            if (r == c) continue;
            const double f = a[r][c];
            for (int k = 0; k < 10; ++k) a[r][k] -= f * a[c][k];
        }
    }
    for (int r = 0; r < 5; ++r)
        for (int c = 0; c < 5; ++c) out[r][c] = a[r][5 + c];
    return true;
}

// Profile the linear parameters (A,B,C) for fixed (p_c, nu) by ordinary
// least squares on the quadratic in x.
bool profile_linear(const std::vector<ScalingPoint>& pts, double p_c, double nu, double* abc) {
    double m[3][3] = {};
    double rhs[3] = {};
    for (const auto& pt : pts) {
        const double x = (pt.p - p_c) * std::pow(static_cast<double>(pt.side), 1.0 / nu);
        const double basis[3] = {1.0, x, x * x};
        for (int r = 0; r < 3; ++r) {
            rhs[r] += basis[r] * pt.p_bar;
            for (int c = 0; c < 3; ++c) m[r][c] += basis[r] * basis[c];
        }
    }
    // 3x3 elimination
    int idx[3] = {0, 1, 2};
    (void)idx;
    for (int c = 0; c < 3; ++c) {
        int piv = c;
        for (int r = c + 1; r < 3; ++r)
            if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
        if (std::abs(m[piv][c]) < 1e-300) return false;
        std::swap(m[c], m[piv]);
        std::swap(rhs[c], rhs[piv]);
        for (int r = c + 1; r < 3; ++r) {
            const double f = m[r][c] / m[c][c];
            for (int k = c; k < 3; ++k) m[r][k] -= f * m[c][k];
            rhs[r] -= f * rhs[c];
        }
    }
    for (int r = 2; r >= 0; --r) {
        double acc = rhs[r];
        for (int k = r + 1; k < 3; ++k) acc -= m[r][k] * abc[k];
        abc[r] = acc / m[r][r];
    }
    return true;
}

} // namespace

ScalingFit fit_scaling(const std::vector<ScalingPoint>& points) {
    std::vector<int> sides;
    std::vector<double> ps;
    for (const auto& pt : points) {
        if (std::find(sides.begin(), sides.end(), pt.side) == sides.end()) sides.push_back(pt.side);
        if (std::find(ps.begin(), ps.end(), pt.p) == ps.end()) ps.push_back(pt.p);
    }
    if (sides.size() < 2) throw std::invalid_argument("scaling fit needs at least two system sizes");
    if (ps.size() < 3) throw std::invalid_argument("scaling fit needs at least three p values");
    if (points.size() < 6) throw std::invalid_argument("scaling fit needs at least six points");

    const FitWork work{points};
    double p_lo = std::numeric_limits<double>::max(), p_hi = std::numeric_limits<double>::lowest();
    for (const auto& pt : points) {
        p_lo = std::min(p_lo, pt.p);
        p_hi = std::max(p_hi, pt.p);
    }

    // Multi-start over a (p_c, nu) grid with profiled linear parameters.
    double best[5] = {0, 0, 0, 0.5 * (p_lo + p_hi), 0.7};
    double best_sse = std::numeric_limits<double>::max();
    for (int ip = 0; ip <= 20; ++ip) {
        const double p_c = p_lo + (p_hi - p_lo) * ip / 20.0;
        for (double nu = 0.3; nu <= 1.51; nu += 0.1) {
            double q[5] = {0, 0, 0, p_c, nu};
            if (!profile_linear(points, p_c, nu, q)) continue;
            const double s = work.sse(q);
            if (s < best_sse) {
                best_sse = s;
                std::copy(q, q + 5, best);
            }
        }
    }

    // Levenberg-Marquardt refinement.
    double q[5];
    std::copy(best, best + 5, q);
    double lambda = 1e-3;
    double sse = work.sse(q);
    for (int iter = 0; iter < 400; ++iter) {
        double jtj[5][5] = {};
        double jtr[5] = {};
        for (const auto& pt : points) {
            double jrow[5], r;
            work.jacobian_row(q, pt, jrow, r);
            for (int a = 0; a < 5; ++a) {
                jtr[a] += jrow[a] * r;
                for (int b = 0; b < 5; ++b) jtj[a][b] += jrow[a] * jrow[b];
            }
        }
        double m[5][5];
        for (int a = 0; a < 5; ++a)
            for (int b = 0; b < 5; ++b) m[a][b] = jtj[a][b] + (a == b ? lambda * (jtj[a][a] + 1e-12) : 0.0);
        double rhs[5] = {-jtr[0], -jtr[1], -jtr[2], -jtr[3], -jtr[4]};
        double delta[5];
        if (!solve5(m, rhs, delta)) break;
        double cand[5];
        for (int a = 0; a < 5; ++a) cand[a] = q[a] + delta[a];
        if (cand[4] < 0.05) cand[4] = 0.05; // nu stays positive
        const double cand_sse = work.sse(cand);
        if (cand_sse < sse) {
            double step = 0.0;
            for (double d : delta) step += d * d;
            std::copy(cand, cand + 5, q);
            sse = cand_sse;
            lambda = std::max(lambda / 3.0, 1e-12);
            if (step < 1e-24) break;
        } else {
            lambda *= 3.0;
            if (lambda > 1e12) break;
        }
    }

    ScalingFit fit;
    fit.a = q[0];
    fit.b = q[1];
    fit.c = q[2];
    fit.p_c = q[3];
    fit.nu = q[4];
    fit.residual = sse;

    // Flat data leaves p_c unconstrained: flag instead of reporting noise.
    double scale = 0.0;
    for (const auto& pt : points) scale = std::max(scale, std::abs(pt.p_bar));
    const double slope_scale = std::abs(fit.b) + std::abs(fit.c);
    if (slope_scale < 1e-9 * std::max(scale, 1e-12) || slope_scale < 1e-12) fit.identifiable = false;

    double jtj[5][5] = {};
    for (const auto& pt : points) {
        double jrow[5], r;
        work.jacobian_row(q, pt, jrow, r);
        for (int a = 0; a < 5; ++a)
            for (int b = 0; b < 5; ++b) jtj[a][b] += jrow[a] * jrow[b];
    }
    double inv[5][5];
    const long dof = static_cast<long>(points.size()) - 5;
    if (dof > 0 && invert5(jtj, inv)) {
        const double s2 = sse / static_cast<double>(dof);
        for (int a = 0; a < 5; ++a)
            for (int b = 0; b < 5; ++b) fit.cov[a][b] = s2 * inv[a][b];
    } else {
        fit.identifiable = false;
    }
    return fit;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream ss;
    ss << "L,p,trials,failures,p_bar,ci_lo,ci_hi\n";
    for (const auto& r : rows)
        ss << r.side << ',' << format_double(r.p) << ',' << r.trials << ',' << r.failures << ','
           << format_double(r.p_bar) << ',' << format_double(r.ci95.lo) << ','
           << format_double(r.ci95.hi) << '\n';
    return ss.str();
}

std::string memory_csv(const std::vector<MemoryTimeRecord>& records) {
    std::ostringstream ss;
    ss << "L,p,rounds,censored\n";
    for (const auto& r : records)
        ss << r.side << ',' << format_double(r.p) << ',' << r.rounds << ',' << (r.censored ? 1 : 0)
           << '\n';
    return ss.str();
}

std::string fit_csv(const ScalingFit& fit) {
    std::ostringstream ss;
    ss << "parameter,value,stderr\n";
    const char* names[5] = {"A", "B", "C", "p_c", "nu"};
    const double vals[5] = {fit.a, fit.b, fit.c, fit.p_c, fit.nu};
    for (int i = 0; i < 5; ++i)
        ss << names[i] << ',' << format_double(vals[i]) << ','
           << format_double(std::sqrt(std::max(0.0, fit.cov[i][i]))) << '\n';
    ss << "residual," << format_double(fit.residual) << ",\n";
    ss << "identifiable," << (fit.identifiable ? 1 : 0) << ",\n";
    return ss.str();
}

std::vector<ScalingPoint> parse_sweep_csv(const std::string& body) {
    std::vector<ScalingPoint> out;
    std::istringstream ss(body);
    std::string line;
    if (!std::getline(ss, line)) throw std::runtime_error("empty sweep CSV");
    while (std::getline(ss, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        ScalingPoint pt{};
        std::getline(ls, cell, ',');
        pt.side = std::stoi(cell);
        std::getline(ls, cell, ',');
        pt.p = std::stod(cell);
        std::getline(ls, cell, ','); // trials
        std::getline(ls, cell, ','); // failures
        std::getline(ls, cell, ',');
        pt.p_bar = std::stod(cell);
        out.push_back(pt);
    }
    return out;
}

} // namespace toricnn
