#include "stirap/wavepacket.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "stirap/hamiltonian.hpp"
#include "stirap/scenario.hpp"

namespace stirap {

using std::complex;
namespace {
const complex<double> I{0.0, 1.0};
constexpr double pi = std::numbers::pi;
}

double cos2_theta_integral(const StirapStep& step) {
    auto f = [&](double t) {
        double c = std::cos(mixing_angle(step, t).theta);
        return c * c;
    };
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        f, step.start, step.end(), 12, 1e-12);
}

complex<double> momentum_amplitude(const GaussianPacket& packet, double p, double mass) {
    double q = (p - packet.momentum) / hbar;
    double mag = std::pow(2.0 * packet.dx2 / pi, 0.25) * std::exp(-packet.dx2 * q * q);
    double chirp = -(hbar * packet.age / (2.0 * mass)) * q * q;
    return mag * std::exp(I * (packet.phase + chirp - q * packet.center));
}

TruncationProbability truncation_probability(const GaussianPacket& packet, double dpm) {
    if (!(dpm > 0.0))
        throw Error(ErrorCode::config_error, "truncation_probability requires dpm > 0");
    double y = dpm * std::sqrt(packet.dx2) / (std::sqrt(2.0) * hbar);
    TruncationProbability tp;
    tp.exact = std::erfc(y);
    double g = (2.0 / std::sqrt(pi)) * std::exp(-y * y);
    tp.lower = g / (y + std::sqrt(y * y + 2.0));
    tp.upper = g / (y + std::sqrt(y * y + 4.0 / pi));
    return tp;
}

namespace {

// Phase-modulation residual varphi_l(t) = phase_mod_l(t) - c_l*t and the
// closed-form beta of the per-step global phase.
double beta_phase(const StirapStep& step) {
    auto vp = [&](double t) { return step.pump.phase_mod.value(t) - step.c0 * t; };
    auto vs = [&](double t) { return step.stokes.phase_mod.value(t) - step.c1 * t; };
    auto vpd = [&](double t) { return step.pump.phase_mod.derivative(t) - step.c0; };
    auto vsd = [&](double t) { return step.stokes.phase_mod.derivative(t) - step.c1; };
    double tf = step.end();
    double integral = 0.0;
    // skip the quadrature when the modulations are trivial
    bool trivial = step.pump.phase_mod.is_zero() && step.stokes.phase_mod.is_zero() &&
                   step.c0 == 0.0 && step.c1 == 0.0;
    if (!trivial) {
        auto f = [&](double t) {
            double s = std::sin(mixing_angle(step, t).theta);
            return s * s * (vpd(t) - vsd(t));
        };
        integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
            f, step.start, tf, 12, 1e-12);
    }
    return pi - (vp(tf) - vs(tf)) + integral;
}

} // namespace

std::pair<GaussianPacket, GroundState> ideal_step(const GaussianPacket& packet,
                                                  const StirapStep& step,
                                                  const AtomSpec& atom) {
    double sgn = recoil_sign(step.role);
    if (is_decelerating(step.role) && !(packet.momentum > 0.0))
        throw Error(ErrorCode::invalid_role,
                    "decelerating step applied to a packet that is not moving along +x");
    StepGeometry g = step_geometry(step, atom);
    double M = atom.mass;
    double recoil = hbar * (g.k0 + g.k1);
    double T = step.duration;
    double t0 = step.start, tf = step.end();

    GaussianPacket out = packet;
    out.momentum = packet.momentum - sgn * recoil;
    double c2i = recoil != 0.0 ? cos2_theta_integral(step) : 0.0;
    out.center = packet.center + (out.momentum / M) * T + sgn * (recoil / M) * c2i;
    out.age = packet.age + T;
    double beta = recoil != 0.0 ? beta_phase(step) : 0.0;
    out.phase = packet.phase + beta +
                (packet.momentum * packet.momentum / (2.0 * M) + g.e_init) * t0 / hbar -
                (out.momentum * out.momentum / (2.0 * M) + g.e_fin) * tf / hbar;
    return {out, final_state(step.role)};
}

GaussianPacket free_flight(const GaussianPacket& packet, double dt, double mass) {
    if (dt < 0.0) throw Error(ErrorCode::config_error, "free_flight requires dt >= 0");
    GaussianPacket out = packet;
    out.center += packet.momentum / mass * dt;
    out.age += dt;
    out.phase -= packet.momentum * packet.momentum * dt / (2.0 * hbar * mass);
    return out;
}

PacketTrajectory run_sequence(const GaussianPacket& packet, const SequencePlan& plan,
                              const AtomSpec& atom, const std::vector<double>& flights) {
    PacketTrajectory traj;
    GroundState state =
        plan.steps.empty() ? GroundState::g0 : initial_state(plan.steps.front().role);
    GaussianPacket cur = packet;
    double t = plan.steps.empty()
                   ? 0.0
                   : plan.steps.front().start - (flights.empty() ? 0.0 : flights.front());
    traj.points.push_back({t, cur, state});
    for (size_t i = 0; i < plan.steps.size(); ++i) {
        const StirapStep& step = plan.steps[i];
        if (i < flights.size() && flights[i] > 0.0) {
            cur = free_flight(cur, flights[i], atom.mass);
            t += flights[i];
            traj.points.push_back({t, cur, state});
        }
        if (initial_state(step.role) != state)
            throw Error(ErrorCode::invalid_role,
                        "plan step " + std::to_string(i) +
                            " does not continue the internal state of the previous step");
        StepGeometry g = step_geometry(step, atom);
        auto [next, ns] = ideal_step(cur, step, atom);
        traj.recoils.push_back({next.momentum - cur.momentum,
                                hbar * (g.k0 + g.k1) != 0.0 ? cos2_theta_integral(step) : 0.0});
        cur = next;
        state = ns;
        t = step.end();
        traj.points.push_back({t, cur, state});
    }
    if (flights.size() == plan.steps.size() + 1 && flights.back() > 0.0) {
        cur = free_flight(cur, flights.back(), atom.mass);
        t += flights.back();
        traj.points.push_back({t, cur, state});
    }
    return traj;
}

std::string PacketTrajectory::to_table(double mass) const {
    std::ostringstream os;
    os.precision(17);
    os << "# artifact " << artifact_version << "\n";
    os << "t[time]\tz[length]\tp[momentum]\tepsilon[length]\tphase[rad]\tstate[-]\n";
    for (const auto& pt : points)
        os << pt.t << '\t' << pt.packet.center << '\t' << pt.packet.momentum << '\t'
           << pt.packet.spreading(mass) << '\t' << pt.packet.phase << '\t'
           << (pt.state == GroundState::g0 ? "g0" : "g1") << '\n';
    return os.str();
}

CompressionReport compression_report(const SequencePlan& plan_d, const SequencePlan& plan_a,
                                     const AtomSpec& atom, double p0, int m_r, double dT,
                                     double Ts, double safety_multiplier) {
    if (m_r < 2) throw Error(ErrorCode::config_error, "compression_report requires m_r >= 2");
    double M = atom.mass;
    double p_d = p0;
    double dur_d = 0.0;
    for (const auto& st : plan_d.steps) {
        if (!is_decelerating(st.role))
            throw Error(ErrorCode::invalid_role, "plan_d must contain decelerating steps only");
        p_d -= hbar * (st.pump.wavenumber + st.stokes.wavenumber);
        dur_d += st.duration;
    }
    if (!(p_d > 0.0))
        throw Error(ErrorCode::non_positive_momentum,
                    "decelerated momentum is not positive; reduce n_d");
    double p_a = p_d;
    for (const auto& st : plan_a.steps) {
        if (is_decelerating(st.role))
            throw Error(ErrorCode::invalid_role, "plan_a must contain accelerating steps only");
        p_a += hbar * (st.pump.wavenumber + st.stokes.wavenumber);
    }

    CompressionReport rep;
    rep.safety_multiplier = safety_multiplier;
    rep.p_decelerated = p_d;
    rep.p_reaccelerated = p_a;
    rep.r_space = p_d / p0;
    rep.r_time = p_d / p_a;
    rep.delta_l.assign(m_r + 1, std::vector<double>(m_r + 1, 0.0));
    rep.delta_t.assign(m_r + 1, std::vector<double>(m_r + 1, 0.0));
    for (int i = 1; i <= m_r; ++i)
        for (int j = i + 1; j <= m_r; ++j) {
            rep.delta_l[i][j] = (j - i) * dT * (p_d / M);
            rep.delta_t[i][j] = (j - i) * dT * rep.r_time;
        }

    // Region geometry for a canonical packet entering the decelerating region
    // at z0 = 0 with fresh age; margins are set to safety * spreading.
    GaussianPacket probe{0.0, p0, 2500.0, 0.0, 0.0};
    GaussianPacket after = probe;
    double z_end = 0.0;
    if (!plan_d.steps.empty()) {
        PacketTrajectory tr = run_sequence(probe, plan_d, atom);
        after = tr.final_packet();
        z_end = after.center;
    }
    double wait = dT - dur_d;
    double eps_next = [&] {
        GaussianPacket p = probe;
        p.age += dur_d;
        return p.spreading(M);
    }();
    double eps_self = [&] {
        GaussianPacket p = after;
        p.age = probe.age + dT;
        return p.spreading(M);
    }();
    double neighbor_end_pos = probe.center - wait * (p0 / M);
    double self_exit_pos = z_end + wait * (p_d / M);
    rep.d_left = neighbor_end_pos + safety_multiplier * eps_next;
    rep.d_right = self_exit_pos - safety_multiplier * eps_self;
    rep.margin_left = rep.d_left - neighbor_end_pos - eps_next;
    rep.margin_right = self_exit_pos - rep.d_right - eps_self;

    // Accelerating region: bracket the re-acceleration span of the earliest
    // packet (i = 1, longest wait Ts) with the same safety margins.
    double z_acc_start = z_end + Ts * (p_d / M);
    GaussianPacket acc = after;
    acc = free_flight(acc, std::max(Ts, 0.0), M);
    double eps_acc0 = acc.spreading(M);
    if (!plan_a.steps.empty()) {
        PacketTrajectory tra = run_sequence(
            GaussianPacket{z_acc_start, p_d, acc.dx2, acc.age, acc.phase}, plan_a, atom);
        acc = tra.final_packet();
    }
    rep.a_left = z_acc_start - safety_multiplier * eps_acc0;
    rep.a_right = (plan_a.steps.empty() ? z_acc_start : acc.center) +
                  safety_multiplier * acc.spreading(M);
    return rep;
}

} // namespace stirap
