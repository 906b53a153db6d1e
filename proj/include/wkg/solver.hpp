#ifndef WKG_SOLVER_HPP
#define WKG_SOLVER_HPP

#include "wkg/system_model.hpp"
#include "wkg/weights.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace wkg {

// ---------------------------------------------------------------------------
// Compilation of a system for numerical evaluation. Only first-order
// semilinear systems are integrable here: second-derivative factors and
// quasilinear coefficient tables are rejected.
// ---------------------------------------------------------------------------

struct UnsupportedSystem : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail_solver {

struct Factor {
    int comp = 1; // 1-based
    int d = -1;   // -1: value, 0: d_t, 1..3: d_k
};

struct Term {
    double coeff = 0;
    Factor f1, f2;
};

struct CompiledSystem {
    int N = 0, N1 = 0;
    std::vector<double> mass2;
    std::vector<std::vector<Term>> terms;                          // per equation
    std::vector<std::function<double(const PointSample&)>> tails;  // may be empty fns
};

inline Factor compile_factor(const VarRef& v) {
    if (v.kind == DerivKind::Second)
        throw UnsupportedSystem("solver supports semilinear first-order systems only "
                                "(second-derivative factor " + v.str() + ")");
    Factor f;
    f.comp = v.component;
    f.d = v.kind == DerivKind::None ? -1 : v.a;
    return f;
}

inline CompiledSystem compile(const SystemSpec& s) {
    if (!s.gamma.empty())
        throw UnsupportedSystem("solver does not integrate quasilinear coefficient tables");
    CompiledSystem c;
    c.N = s.N;
    c.N1 = s.N1;
    for (double m : s.masses) c.mass2.push_back(m * m);
    c.terms.resize(s.N);
    c.tails.resize(s.N);
    for (int i = 0; i < s.N; ++i) {
        for (const auto& [m, co] : s.F[i].terms())
            c.terms[i].push_back({to_double(co), compile_factor(m.x), compile_factor(m.y)});
        if (s.tails[i]) {
            if (!s.tails[i]->eval)
                throw UnsupportedSystem("equation " + std::to_string(i + 1) + " has tail '" +
                                        s.tails[i]->name + "' with no registered evaluator");
            c.tails[i] = s.tails[i]->eval;
        }
    }
    return c;
}

} // namespace detail_solver

// ---------------------------------------------------------------------------
// Configuration and results
// ---------------------------------------------------------------------------

struct SolverConfig {
    enum class Mode { Radial, Grid3D };
    Mode mode = Mode::Radial;

    // Radial mode
    double dr = 0.05;
    double domain = -1; // radius; < 0: sized so outflow never returns (t_end + margin)

    // 3d mode
    int grid_n = 96;     // cells per axis
    double grid_L = 6.0; // cube [-L, L]^3

    double cfl = 0.5;    // dt = cfl * min(h, 1/max mass)
    double t_end = 10.0;
    double blowup_threshold = 1e3;
    std::vector<double> output_times; // observation times (always includes t_end)
    bool keep_profiles = false;       // store radial profiles at observation times
};

/// Per-component initial data: value and time-derivative profiles as functions
/// of radius (radial mode samples them at r; 3d mode at |x|).
struct InitialData {
    std::function<double(int, double)> u0 = [](int, double) { return 0.0; };
    std::function<double(int, double)> v0 = [](int, double) { return 0.0; };
};

inline InitialData gaussian_data(const std::vector<double>& amplitudes, double width) {
    InitialData d;
    d.u0 = [amplitudes, width](int comp, double r) {
        return amplitudes.at(comp - 1) * std::exp(-r * r / (width * width));
    };
    return d;
}

struct Observation {
    double t = 0;
    std::vector<double> max_abs;    // per component
    std::vector<double> wnorm_kg;   // sup <t+r>^{3/2} |u_i|
    std::vector<double> wnorm_dw;   // sup <r> <t-r> (|d_t u_i| + |d_r u_i|), radial mode
    double energy = 0;              // quadratic (free-field) energy
    std::vector<std::vector<double>> profiles;   // u per component, radial mode only
    std::vector<std::vector<double>> vprofiles;  // d_t u per component, radial mode only
};

struct SimulationResult {
    bool blowup = false;
    double blowup_time = 0;
    long steps = 0;
    double dt = 0;
    std::vector<double> r_nodes;       // radial mode
    std::vector<Observation> observations;
};

// ---------------------------------------------------------------------------
// Radial integrator. Fields live on cell centers r_j = (j + 1/2) dr; the
// radial Laplacian is the conservative flux form (r^2 u_r)_r / r^2 with a
// zero-flux origin face. Spatial first derivatives use the on-axis
// convention: d_1 -> d_r, d_2 = d_3 = 0 (fields restricted to the positive
// x1-axis), which keeps Q0 exact and annihilates purely rotational forms.
// Time stepping is kick-drift-kick leapfrog; the velocity entering the
// nonlinearity at the new time is predicted with the stored acceleration.
// ---------------------------------------------------------------------------

namespace detail_solver {

struct RadialWorkspace {
    int n = 0;
    double dr = 0;
    std::vector<std::vector<double>> u, v, a, du; // per component arrays

    double lap(int i, int j) const {
        const auto& f = u[i];
        const double rj = (j + 0.5) * dr;
        const double rl = j * dr, rr = (j + 1) * dr;
        const double fr = (j + 1 < n) ? (f[j + 1] - f[j]) : (0.0 - f[j]); // Dirichlet outer
        const double fl = (j > 0) ? (f[j] - f[j - 1]) : 0.0;              // zero flux at origin
        return (rr * rr * fr - rl * rl * fl) / (rj * rj * dr * dr);
    }

    void compute_dr() {
        for (int i = 0; i < static_cast<int>(u.size()); ++i) {
            const auto& f = u[i];
            auto& g = du[i];
            for (int j = 0; j < n; ++j) {
                const double fp = (j + 1 < n) ? f[j + 1] : 0.0;
                const double fm = (j > 0) ? f[j - 1] : f[0]; // even reflection at origin
                g[j] = (fp - fm) / (2.0 * dr);
            }
        }
    }
};

inline double eval_factor(const RadialWorkspace& w, const Factor& f,
                          const std::vector<std::vector<double>>& vel, int j) {
    switch (f.d) {
        case -1: return w.u[f.comp - 1][j];
        case 0: return vel[f.comp - 1][j];
        case 1: return w.du[f.comp - 1][j];
        default: return 0.0;
    }
}

inline void radial_accel(const CompiledSystem& c, RadialWorkspace& w,
                         const std::vector<std::vector<double>>& vel) {
    w.compute_dr();
    PointSample sample;
    int jcur = 0;
    sample.val = [&](int comp) { return w.u[comp - 1][jcur]; };
    sample.dt = [&](int comp) { return vel[comp - 1][jcur]; };
    sample.dx = [&](int comp, int k) { return k == 1 ? w.du[comp - 1][jcur] : 0.0; };
    for (int i = 0; i < c.N; ++i) {
        auto& acc = w.a[i];
        for (int j = 0; j < w.n; ++j) {
            double s = w.lap(i, j) - c.mass2[i] * w.u[i][j];
            for (const auto& t : c.terms[i])
                s += t.coeff * eval_factor(w, t.f1, vel, j) * eval_factor(w, t.f2, vel, j);
            if (c.tails[i]) {
                jcur = j;
                s += c.tails[i](sample);
            }
            acc[j] = s;
        }
    }
}

} // namespace detail_solver

inline SimulationResult run_radial(const SystemSpec& s, const SolverConfig& cfg,
                                   const InitialData& data) {
    using namespace detail_solver;
    const CompiledSystem c = compile(s);
    SimulationResult res;

    const double R = cfg.domain > 0 ? cfg.domain : cfg.t_end + 8.0;
    const int n = std::max(8, static_cast<int>(std::ceil(R / cfg.dr)));
    double mmax = 0;
    for (double m2 : c.mass2) mmax = std::max(mmax, std::sqrt(m2));
    double dt = cfg.cfl * (mmax > 0 ? std::min(cfg.dr, 1.0 / mmax) : cfg.dr);
    const long steps = std::max(1L, static_cast<long>(std::ceil(cfg.t_end / dt)));
    dt = cfg.t_end / static_cast<double>(steps);
    res.dt = dt;

    RadialWorkspace w;
    w.n = n;
    w.dr = cfg.dr;
    w.u.assign(c.N, std::vector<double>(n, 0.0));
    w.v.assign(c.N, std::vector<double>(n, 0.0));
    w.a.assign(c.N, std::vector<double>(n, 0.0));
    w.du.assign(c.N, std::vector<double>(n, 0.0));
    res.r_nodes.resize(n);
    for (int j = 0; j < n; ++j) res.r_nodes[j] = (j + 0.5) * cfg.dr;
    for (int i = 0; i < c.N; ++i)
        for (int j = 0; j < n; ++j) {
            w.u[i][j] = data.u0(i + 1, res.r_nodes[j]);
            w.v[i][j] = data.v0(i + 1, res.r_nodes[j]);
        }

    auto energy = [&]() {
        w.compute_dr();
        double e = 0;
        for (int i = 0; i < c.N; ++i)
            for (int j = 0; j < n; ++j) {
                const double r = res.r_nodes[j];
                const double dens = 0.5 * (w.v[i][j] * w.v[i][j] + w.du[i][j] * w.du[i][j] +
                                           c.mass2[i] * w.u[i][j] * w.u[i][j]);
                e += 4.0 * M_PI * r * r * cfg.dr * dens;
            }
        return e;
    };

    std::vector<double> outs = cfg.output_times;
    outs.push_back(cfg.t_end);
    std::sort(outs.begin(), outs.end());
    outs.erase(std::unique(outs.begin(), outs.end()), outs.end());
    std::size_t next_out = 0;

    auto observe = [&](double t) {
        Observation o;
        o.t = t;
        w.compute_dr();
        for (int i = 0; i < c.N; ++i) {
            double m = 0, wk = 0, wd = 0;
            for (int j = 0; j < n; ++j) {
                const double r = res.r_nodes[j];
                const double au = std::abs(w.u[i][j]);
                m = std::max(m, au);
                wk = std::max(wk, std::pow(jb(t + r), 1.5) * au);
                wd = std::max(wd, jb(r) * jb(t - r) *
                                      (std::abs(w.v[i][j]) + std::abs(w.du[i][j])));
            }
            o.max_abs.push_back(m);
            o.wnorm_kg.push_back(wk);
            o.wnorm_dw.push_back(wd);
        }
        o.energy = energy();
        if (cfg.keep_profiles) {
            o.profiles = w.u;
            o.vprofiles = w.v;
        }
        res.observations.push_back(std::move(o));
    };

    auto check_blowup = [&](double t) {
        for (int i = 0; i < c.N; ++i)
            for (double x : w.u[i])
                if (!std::isfinite(x) || std::abs(x) > cfg.blowup_threshold) {
                    res.blowup = true;
                    res.blowup_time = t;
                    return true;
                }
        return false;
    };

    while (next_out < outs.size() && outs[next_out] <= 0.0) {
        observe(0.0);
        ++next_out;
    }

    radial_accel(c, w, w.v);
    std::vector<std::vector<double>> vhalf(c.N, std::vector<double>(n, 0.0)),
        vpred(c.N, std::vector<double>(n, 0.0));
    for (long step = 0; step < steps; ++step) {
        const double t1 = (step + 1) * dt;
        for (int i = 0; i < c.N; ++i)
            for (int j = 0; j < n; ++j) {
                vhalf[i][j] = w.v[i][j] + 0.5 * dt * w.a[i][j];
                w.u[i][j] += dt * vhalf[i][j];
                vpred[i][j] = vhalf[i][j] + 0.5 * dt * w.a[i][j];
            }
        radial_accel(c, w, vpred);
        for (int i = 0; i < c.N; ++i)
            for (int j = 0; j < n; ++j) w.v[i][j] = vhalf[i][j] + 0.5 * dt * w.a[i][j];
        res.steps = step + 1;
        if (check_blowup(t1)) break;
        while (next_out < outs.size() && outs[next_out] <= t1 + 0.5 * dt) {
            observe(t1);
            ++next_out;
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// Small 3d grid integrator: cell-centered cube, 7-point Laplacian, centered
// first differences, homogeneous Dirichlet boundary; same time stepping.
// ---------------------------------------------------------------------------

inline SimulationResult run_grid3(const SystemSpec& s, const SolverConfig& cfg,
                                  const InitialData& data) {
    using namespace detail_solver;
    const CompiledSystem c = compile(s);
    SimulationResult res;
    const int n = cfg.grid_n;
    const double h = 2.0 * cfg.grid_L / n;
    const long ncell = static_cast<long>(n) * n * n;
    double mmax = 0;
    for (double m2 : c.mass2) mmax = std::max(mmax, std::sqrt(m2));
    double dt = cfg.cfl * (mmax > 0 ? std::min(h / std::sqrt(3.0), 1.0 / mmax)
                                    : h / std::sqrt(3.0));
    const long steps = std::max(1L, static_cast<long>(std::ceil(cfg.t_end / dt)));
    dt = cfg.t_end / static_cast<double>(steps);
    res.dt = dt;

    auto idx = [n](int ix, int iy, int iz) {
        return (static_cast<long>(ix) * n + iy) * n + iz;
    };
    auto coord = [&](int i) { return -cfg.grid_L + (i + 0.5) * h; };

    std::vector<std::vector<double>> u(c.N, std::vector<double>(ncell, 0.0)), v = u, a = u;
    std::vector<std::array<std::vector<double>, 3>> du(c.N);
    for (auto& g : du)
        for (auto& gk : g) gk.assign(ncell, 0.0);

    for (int i = 0; i < c.N; ++i)
        for (int ix = 0; ix < n; ++ix)
            for (int iy = 0; iy < n; ++iy)
                for (int iz = 0; iz < n; ++iz) {
                    const double r = std::sqrt(coord(ix) * coord(ix) + coord(iy) * coord(iy) +
                                               coord(iz) * coord(iz));
                    u[i][idx(ix, iy, iz)] = data.u0(i + 1, r);
                    v[i][idx(ix, iy, iz)] = data.v0(i + 1, r);
                }

    auto compute_du = [&]() {
        for (int i = 0; i < c.N; ++i)
            for (int ix = 0; ix < n; ++ix)
                for (int iy = 0; iy < n; ++iy)
                    for (int iz = 0; iz < n; ++iz) {
                        const long j = idx(ix, iy, iz);
                        auto at = [&](int jx, int jy, int jz) {
                            if (jx < 0 || jy < 0 || jz < 0 || jx >= n || jy >= n || jz >= n)
                                return 0.0;
                            return u[i][idx(jx, jy, jz)];
                        };
                        du[i][0][j] = (at(ix + 1, iy, iz) - at(ix - 1, iy, iz)) / (2 * h);
                        du[i][1][j] = (at(ix, iy + 1, iz) - at(ix, iy - 1, iz)) / (2 * h);
                        du[i][2][j] = (at(ix, iy, iz + 1) - at(ix, iy, iz - 1)) / (2 * h);
                    }
    };

    auto accel = [&](const std::vector<std::vector<double>>& vel) {
        compute_du();
        PointSample sample;
        long jcur = 0;
        sample.val = [&](int comp) { return u[comp - 1][jcur]; };
        sample.dt = [&](int comp) { return vel[comp - 1][jcur]; };
        sample.dx = [&](int comp, int k) { return du[comp - 1][k - 1][jcur]; };
        auto fval = [&](const Factor& f, long j) {
            if (f.d == -1) return u[f.comp - 1][j];
            if (f.d == 0) return vel[f.comp - 1][j];
            return du[f.comp - 1][f.d - 1][j];
        };
        for (int i = 0; i < c.N; ++i)
            for (int ix = 0; ix < n; ++ix)
                for (int iy = 0; iy < n; ++iy)
                    for (int iz = 0; iz < n; ++iz) {
                        const long j = idx(ix, iy, iz);
                        auto at = [&](int jx, int jy, int jz) {
                            if (jx < 0 || jy < 0 || jz < 0 || jx >= n || jy >= n || jz >= n)
                                return 0.0;
                            return u[i][idx(jx, jy, jz)];
                        };
                        double lap = (at(ix + 1, iy, iz) + at(ix - 1, iy, iz) +
                                      at(ix, iy + 1, iz) + at(ix, iy - 1, iz) +
                                      at(ix, iy, iz + 1) + at(ix, iy, iz - 1) -
                                      6.0 * u[i][j]) / (h * h);
                        double sacc = lap - c.mass2[i] * u[i][j];
                        for (const auto& t : c.terms[i])
                            sacc += t.coeff * fval(t.f1, j) * fval(t.f2, j);
                        if (c.tails[i]) {
                            jcur = j;
                            sacc += c.tails[i](sample);
                        }
                        a[i][j] = sacc;
                    }
    };

    auto energy = [&]() {
        compute_du();
        double e = 0;
        for (int i = 0; i < c.N; ++i)
            for (long j = 0; j < ncell; ++j) {
                double g2 = 0;
                for (int k = 0; k < 3; ++k) g2 += du[i][k][j] * du[i][k][j];
                e += h * h * h * 0.5 * (v[i][j] * v[i][j] + g2 + c.mass2[i] * u[i][j] * u[i][j]);
            }
        return e;
    };

    std::vector<double> outs = cfg.output_times;
    outs.push_back(cfg.t_end);
    std::sort(outs.begin(), outs.end());
    outs.erase(std::unique(outs.begin(), outs.end()), outs.end());
    std::size_t next_out = 0;

    auto observe = [&](double t) {
        Observation o;
        o.t = t;
        compute_du();
        for (int i = 0; i < c.N; ++i) {
            double m = 0, wk = 0, wd = 0;
            for (int ix = 0; ix < n; ++ix)
                for (int iy = 0; iy < n; ++iy)
                    for (int iz = 0; iz < n; ++iz) {
                        const long j = idx(ix, iy, iz);
                        const double r = std::sqrt(coord(ix) * coord(ix) +
                                                   coord(iy) * coord(iy) +
                                                   coord(iz) * coord(iz));
                        const double au = std::abs(u[i][j]);
                        m = std::max(m, au);
                        wk = std::max(wk, std::pow(jb(t + r), 1.5) * au);
                        double g = std::abs(v[i][j]);
                        for (int k = 0; k < 3; ++k) g += std::abs(du[i][k][j]);
                        wd = std::max(wd, jb(r) * jb(t - r) * g);
                    }
            o.max_abs.push_back(m);
            o.wnorm_kg.push_back(wk);
            o.wnorm_dw.push_back(wd);
        }
        o.energy = energy();
        res.observations.push_back(std::move(o));
    };
    while (next_out < outs.size() && outs[next_out] <= 0.0) {
        observe(0.0);
        ++next_out;
    }

    accel(v);
    std::vector<std::vector<double>> vhalf = v, vpred = v;
    for (long step = 0; step < steps; ++step) {
        const double t1 = (step + 1) * dt;
        for (int i = 0; i < c.N; ++i)
            for (long j = 0; j < ncell; ++j) {
                vhalf[i][j] = v[i][j] + 0.5 * dt * a[i][j];
                u[i][j] += dt * vhalf[i][j];
                vpred[i][j] = vhalf[i][j] + 0.5 * dt * a[i][j];
            }
        accel(vpred);
        for (int i = 0; i < c.N; ++i)
            for (long j = 0; j < ncell; ++j) v[i][j] = vhalf[i][j] + 0.5 * dt * a[i][j];
        res.steps = step + 1;
        bool bad = false;
        for (int i = 0; i < c.N && !bad; ++i)
            for (long j = 0; j < ncell; ++j)
                if (!std::isfinite(u[i][j]) || std::abs(u[i][j]) > cfg.blowup_threshold) {
                    res.blowup = true;
                    res.blowup_time = t1;
                    bad = true;
                    break;
                }
        if (bad) break;
        while (next_out < outs.size() && outs[next_out] <= t1 + 0.5 * dt) {
            observe(t1);
            ++next_out;
        }
    }
    return res;
}

inline SimulationResult run_simulation(const SystemSpec& s, const SolverConfig& cfg,
                                       const InitialData& data) {
    return cfg.mode == SolverConfig::Mode::Radial ? run_radial(s, cfg, data)
                                                  : run_grid3(s, cfg, data);
}

} // namespace wkg

#endif
