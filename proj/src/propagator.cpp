#include "stirap/propagator.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <functional>
#include <mutex>
#include <thread>

namespace stirap {

namespace ode = boost::numeric::odeint;
using std::complex;

namespace {

const complex<double> I{0.0, 1.0};

double quad(const std::function<double(double)>& f, double a, double b) {
    if (a == b) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 12, 1e-13);
}

struct PhaseIntegrals {
    double int_omega;  // int Omega dt'
    double int_corr;   // int (Omega_+ - Omega) dt'
    double int_w0;     // int omega_0 dt'
    double int_wpm;    // int omega_+- dt'
};

PhaseIntegrals phase_integrals(const StirapStep& step, const AtomSpec& atom, double P,
                               double t) {
    double t0 = step.start;
    PhaseIntegrals pi{};
    auto omega = [&](double u) { return mixing_angle(step, u).omega; };
    auto corr = [&](double u) {
        AngleState a = mixing_angle(step, u);
        double adp = alpha_p_dot(step, atom, P, u);
        double ads = alpha_s_dot(step, atom, P, u);
        double s2 = std::sin(a.theta) * std::sin(a.theta);
        double c2 = 1.0 - s2;
        return (ads - 0.5 * adp) * s2 + (adp - 0.5 * ads) * c2;
    };
    auto w0 = [&](double u) {
        AngleState a = mixing_angle(step, u);
        double s2 = std::sin(a.theta) * std::sin(a.theta);
        return -s2 * (alpha_p_dot(step, atom, P, u) - alpha_s_dot(step, atom, P, u));
    };
    auto wpm = [&](double u) {
        AngleState a = mixing_angle(step, u);
        double c2 = std::cos(a.theta) * std::cos(a.theta);
        double adp = alpha_p_dot(step, atom, P, u);
        double ads = alpha_s_dot(step, atom, P, u);
        return -0.5 * adp - 0.5 * c2 * (adp - ads);
    };
    pi.int_omega = quad(omega, t0, t);
    pi.int_corr = quad(corr, t0, t);
    pi.int_w0 = quad(w0, t0, t);
    pi.int_wpm = quad(wpm, t0, t);
    return pi;
}

void check_span(const StirapStep& step, double t) {
    double slack = 1e-9 * step.duration;
    if (t < step.start - slack || t > step.end() + slack)
        throw Error(ErrorCode::missing_phase_data,
                    "phase data unavailable outside the step interval at t = " +
                        std::to_string(t));
}

Eigen::Matrix3cd adiabatic_columns(const StirapStep& step, const AtomSpec& atom, double P,
                                   double t, double int_omega) {
    AdiabaticEigensystem es = adiabatic_eigensystem(step, atom, P, t);
    Eigen::Matrix3cd V;
    V.col(0) = es.g0;
    V.col(1) = es.g_plus * std::exp(I * int_omega);
    V.col(2) = es.g_minus * std::exp(-I * int_omega);
    return V;
}

ThreeStateAmplitudes to_rotating(const ThreeStateAmplitudes& x, const StirapStep& step,
                                 const AtomSpec& atom) {
    ThreeStateAmplitudes y = x;
    switch (x.frame) {
    case Frame::rotating_Abar:
        return y;
    case Frame::bare_A: {
        Eigen::Vector3d e = bare_energies(step, atom, x.P);
        for (int i = 0; i < 3; ++i) y.v[i] = x.v[i] * std::exp(I * (e[i] / hbar) * x.t);
        y.frame = Frame::rotating_Abar;
        return y;
    }
    case Frame::adiabatic_a:
    case Frame::adiabatic_b: {
        check_span(step, x.t);
        PhaseIntegrals pi = phase_integrals(step, atom, x.P, x.t);
        Eigen::Vector3cd a(x.v[0], x.v[1], x.v[2]);
        if (x.frame == Frame::adiabatic_b) {
            a[0] *= std::exp(-I * pi.int_w0);
            a[1] *= std::exp(-I * pi.int_wpm);
            a[2] *= std::exp(-I * pi.int_wpm);
        }
        Eigen::Matrix3cd V = adiabatic_columns(step, atom, x.P, x.t, pi.int_omega);
        Eigen::Vector3cd abar = V * a;
        y.v = {abar[0], abar[1], abar[2]};
        y.frame = Frame::rotating_Abar;
        return y;
    }
    }
    return y;
}

ThreeStateAmplitudes from_rotating(const ThreeStateAmplitudes& x, Frame target,
                                   const StirapStep& step, const AtomSpec& atom) {
    ThreeStateAmplitudes y = x;
    switch (target) {
    case Frame::rotating_Abar:
        return y;
    case Frame::bare_A: {
        Eigen::Vector3d e = bare_energies(step, atom, x.P);
        for (int i = 0; i < 3; ++i) y.v[i] = x.v[i] * std::exp(-I * (e[i] / hbar) * x.t);
        y.frame = Frame::bare_A;
        return y;
    }
    case Frame::adiabatic_a:
    case Frame::adiabatic_b: {
        check_span(step, x.t);
        PhaseIntegrals pi = phase_integrals(step, atom, x.P, x.t);
        Eigen::Matrix3cd V = adiabatic_columns(step, atom, x.P, x.t, pi.int_omega);
        Eigen::Vector3cd abar(x.v[0], x.v[1], x.v[2]);
        Eigen::Vector3cd a = V.adjoint() * abar;
        if (target == Frame::adiabatic_b) {
            a[0] *= std::exp(I * pi.int_w0);
            a[1] *= std::exp(I * pi.int_wpm);
            a[2] *= std::exp(I * pi.int_wpm);
        }
        y.v = {a[0], a[1], a[2]};
        y.frame = target;
        return y;
    }
    }
    return y;
}

using BState = std::array<complex<double>, 5>; // b0, b+, b-, int Omega, int corr

struct BRhs {
    const StirapStep& step;
    const AtomSpec& atom;
    double P;

    void operator()(const BState& y, BState& dy, double t) const {
        CoefficientSet cs = coefficient_set_general(step, atom, P, t);
        double omega = 0.5 * (cs.omega_plus + cs.omega_minus);
        double corr = 0.5 * (cs.omega_plus - cs.omega_minus);
        double i_om = y[3].real(), i_co = y[4].real();
        complex<double> m12 = (I / std::sqrt(2.0)) * std::conj(cs.theta_c) *
                              std::exp(I * (i_om + i_co));
        complex<double> m13 = (I / std::sqrt(2.0)) * std::conj(cs.theta_c) *
                              std::exp(-I * (i_om - i_co));
        complex<double> m23 = 0.5 * cs.gamma_c * std::exp(-2.0 * I * i_om);
        dy[0] = -I * (m12 * y[1] + m13 * y[2]);
        dy[1] = -I * (std::conj(m12) * y[0] + m23 * y[2]);
        dy[2] = -I * (std::conj(m13) * y[0] + std::conj(m23) * y[1]);
        dy[3] = omega;
        dy[4] = corr;
    }
};

using AState = std::array<complex<double>, 3>;

struct RotRhs {
    const StirapStep& step;
    const AtomSpec& atom;
    double P;

    void operator()(const AState& y, AState& dy, double t) const {
        Eigen::Matrix3cd H = hamiltonian_matrix(step, atom, P, t);
        for (int i = 0; i < 3; ++i) {
            complex<double> s = 0.0;
            for (int j = 0; j < 3; ++j) s += H(i, j) * y[j];
            dy[i] = -I * s;
        }
    }
};

void check_tol(double tol) {
    if (!(tol >= 1e-14 && tol <= 1e-6))
        throw Error(ErrorCode::config_error, "integrator tolerance must lie in [1e-14, 1e-6]");
}

void check_field(const StirapStep& step) {
    for (int i = 1; i < 256; ++i) {
        double t = step.start + step.duration * i / 256.0;
        double op = step.pump.envelope.value(t);
        double os = step.stokes.envelope.value(t);
        if (op == 0.0 && os == 0.0)
            throw Error(ErrorCode::degenerate_field,
                        "Omega(t) vanishes inside the step span at t = " + std::to_string(t));
    }
}

template <class State, class Rhs, class Observer>
void integrate_dense(Rhs rhs, State& y, double t0, double t1, double tol, Observer&& obs) {
    auto stepper = ode::make_dense_output(tol, tol, ode::runge_kutta_dopri5<State>());
    stepper.initialize(y, t0, (t1 - t0) * 1e-3);
    obs(y, t0);
    while (stepper.current_time() < t1) {
        if (std::abs(stepper.current_time_step()) < (t1 - t0) * 1e-15)
            throw Error(ErrorCode::step_size_underflow,
                        "integrator step size underflow (pathological envelope?)");
        stepper.do_step(rhs);
        double tc = std::min(stepper.current_time(), t1);
        State yc;
        stepper.calc_state(tc, yc);
        obs(yc, tc);
    }
    stepper.calc_state(t1, y);
}

} // namespace

double slice_momentum(const StirapStep& step, double p_mean) {
    return p_mean - recoil_sign(step.role) * hbar * step.pump.wavenumber;
}

ThreeStateAmplitudes initial_amplitudes(const StirapStep& step, const AtomSpec& atom,
                                        double P, Frame frame) {
    ThreeStateAmplitudes x;
    x.frame = Frame::bare_A;
    x.v = {complex<double>(1.0, 0.0), 0.0, 0.0};
    x.P = P;
    x.t = step.start;
    return frame_transform(x, frame, step, atom);
}

ThreeStateAmplitudes frame_transform(const ThreeStateAmplitudes& x, Frame target,
                                     const StirapStep& step, const AtomSpec& atom) {
    if (x.frame == target) return x;
    return from_rotating(to_rotating(x, step, atom), target, step, atom);
}

std::vector<ThreeStateAmplitudes> integrate_rotating(const StirapStep& step,
                                                     const AtomSpec& atom, double P,
                                                     const ThreeStateAmplitudes& init,
                                                     double tol) {
    check_tol(tol);
    if (init.frame != Frame::rotating_Abar)
        throw Error(ErrorCode::config_error, "integrate_rotating expects rotating-frame input");
    AState y = {init.v[0], init.v[1], init.v[2]};
    std::vector<ThreeStateAmplitudes> traj;
    integrate_dense(RotRhs{step, atom, P}, y, init.t, step.end(), tol,
                    [&](const AState& s, double t) {
                        traj.push_back({Frame::rotating_Abar, {s[0], s[1], s[2]}, P, t});
                    });
    return traj;
}

std::vector<ThreeStateAmplitudes> integrate_adiabatic_frame(const StirapStep& step,
                                                            const AtomSpec& atom, double P,
                                                            const ThreeStateAmplitudes& init,
                                                            double tol) {
    check_tol(tol);
    if (init.frame != Frame::adiabatic_b)
        throw Error(ErrorCode::config_error,
                    "integrate_adiabatic_frame expects adiabatic-b input");
    check_field(step);
    BState y{};
    for (int i = 0; i < 3; ++i) y[i] = init.v[i];
    if (init.t != step.start) {
        PhaseIntegrals pi = phase_integrals(step, atom, P, init.t);
        y[3] = pi.int_omega;
        y[4] = pi.int_corr;
    }
    std::vector<ThreeStateAmplitudes> traj;
    integrate_dense(BRhs{step, atom, P}, y, init.t, step.end(), tol,
                    [&](const BState& s, double t) {
                        traj.push_back({Frame::adiabatic_b, {s[0], s[1], s[2]}, P, t});
                    });
    return traj;
}

namespace {

double golden_max(const std::function<double(double)>& f, double a, double b, double tol) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        } else {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        }
    }
    return 0.5 * (a + b);
}

} // namespace

SliceResult slice_run(const StirapStep& step, const AtomSpec& atom, double P, double tol) {
    check_tol(tol);
    check_field(step);
    SliceResult res;
    res.P = P;
    ThreeStateAmplitudes init = initial_amplitudes(step, atom, P, Frame::adiabatic_b);
    BState y{};
    for (int i = 0; i < 3; ++i) y[i] = init.v[i];
    const std::array<complex<double>, 3> b0 = init.v;
    auto deviation = [&](const BState& s) {
        double d = 0.0;
        for (int i = 0; i < 3; ++i) d += std::norm(s[i] - b0[i]);
        return std::sqrt(d);
    };

    double t0 = step.start, t1 = step.end(), T = step.duration;
    const int n_samples = 512;
    // accepted-step snapshots for local re-integration during refinement
    std::vector<std::pair<double, BState>> snaps;
    int next_sample = 0;

    auto stepper = ode::make_dense_output(tol, tol, ode::runge_kutta_dopri5<BState>());
    stepper.initialize(y, t0, T * 1e-3);
    snaps.push_back({t0, y});
    res.deviation_history.push_back({t0, 0.0});
    while (stepper.current_time() < t1) {
        if (std::abs(stepper.current_time_step()) < T * 1e-15)
            throw Error(ErrorCode::step_size_underflow,
                        "integrator step size underflow (pathological envelope?)");
        stepper.do_step(BRhs{step, atom, P});
        double tc = std::min(stepper.current_time(), t1);
        // uniform samples inside the newly covered interval
        while (next_sample < n_samples) {
            double ts = t0 + T * (next_sample + 1) / double(n_samples);
            if (ts > tc + 1e-300 || ts > stepper.current_time()) break;
            BState ys;
            stepper.calc_state(ts, ys);
            res.deviation_history.push_back({ts, deviation(ys)});
            ++next_sample;
        }
        BState yc;
        stepper.calc_state(tc, yc);
        snaps.push_back({tc, yc});
        res.deviation_history.push_back({tc, deviation(yc)});
        if (tc >= t1) break;
    }
    BState yf;
    stepper.calc_state(t1, yf);

    std::sort(res.deviation_history.begin(), res.deviation_history.end());
    auto mx = std::max_element(res.deviation_history.begin(), res.deviation_history.end(),
                               [](const auto& a, const auto& b) { return a.second < b.second; });
    double tm = mx->first;
    res.max_deviation = mx->second;
    res.max_deviation_time = tm;

    // Golden-section refinement of the sup around the best sample; probes are
    // served by short re-integrations from the nearest accepted snapshot.
    double h = T / double(n_samples);
    double a = std::max(t0, tm - h), b = std::min(t1, tm + h);
    if (b > a) {
        auto eval = [&](double t) {
            auto it = std::upper_bound(snaps.begin(), snaps.end(), t,
                                       [](double x, const auto& pr) { return x < pr.first; });
            if (it != snaps.begin()) --it;
            BState s = it->second;
            if (t > it->first) {
                ode::integrate_adaptive(
                    ode::make_controlled(tol, tol, ode::runge_kutta_dopri5<BState>()),
                    BRhs{step, atom, P}, s, it->first, t, (t - it->first) * 0.1);
            }
            return deviation(s);
        };
        double tbest = golden_max(eval, a, b, T * 1e-9);
        double dbest = eval(tbest);
        if (dbest > res.max_deviation) {
            res.max_deviation = dbest;
            res.max_deviation_time = tbest;
        }
    }

    ThreeStateAmplitudes bf{Frame::adiabatic_b, {yf[0], yf[1], yf[2]}, P, t1};
    res.final = frame_transform(bf, Frame::bare_A, step, atom);
    res.efficiency = std::norm(res.final.v[2]);
    return res;
}

namespace {

template <class Fn>
void parallel_over(int n, int threads, Fn&& fn) {
    threads = std::max(1, threads);
    if (threads == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            int i;
            while ((i = next.fetch_add(1)) < n) fn(i);
        });
    for (auto& th : pool) th.join();
}

} // namespace

double ensemble_efficiency(const StirapStep& step, const AtomSpec& atom,
                           const MomentumGrid& grid, double tol, int threads) {
    int n = int(grid.points.size());
    std::vector<double> eff(n, 0.0);
    std::exception_ptr err;
    std::mutex err_mx;
    parallel_over(n, threads, [&](int i) {
        try {
            eff[i] = slice_run(step, atom, slice_momentum(step, grid.points[i].p), tol)
                         .efficiency;
        } catch (...) {
            std::lock_guard<std::mutex> lk(err_mx);
            if (!err) err = std::current_exception();
        }
    });
    if (err) std::rethrow_exception(err);
    double s = 0.0; // deterministic grid-order reduction
    for (int i = 0; i < n; ++i) s += grid.points[i].weight * eff[i];
    return s;
}

double ensemble_efficiency(const SequencePlan& plan, const AtomSpec& atom,
                           const MomentumGrid& grid, double tol, int threads) {
    int n = int(grid.points.size());
    std::vector<double> eff(n, 1.0);
    std::exception_ptr err;
    std::mutex err_mx;
    parallel_over(n, threads, [&](int i) {
        try {
            double p = grid.points[i].p;
            double e = 1.0;
            for (const auto& step : plan.steps) {
                e *= slice_run(step, atom, slice_momentum(step, p), tol).efficiency;
                p += -recoil_sign(step.role) * hbar *
                     (step.pump.wavenumber + step.stokes.wavenumber);
            }
            eff[i] = e;
        } catch (...) {
            std::lock_guard<std::mutex> lk(err_mx);
            if (!err) err = std::current_exception();
        }
    });
    if (err) std::rethrow_exception(err);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += grid.points[i].weight * eff[i];
    return s;
}

} // namespace stirap
