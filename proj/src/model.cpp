#include "stirap/model.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

namespace stirap {

namespace {

// Catmull-Rom cubic Hermite interpolation on sorted (t, v) samples; C1 inside
// the table, and 0 outside it.
double hermite_eval(const std::vector<std::pair<double, double>>& s, double t, bool deriv) {
    if (s.size() < 2 || t < s.front().first || t > s.back().first) return 0.0;
    auto it = std::upper_bound(s.begin(), s.end(), t,
                               [](double x, const auto& pr) { return x < pr.first; });
    size_t i1 = std::min<size_t>(std::max<ptrdiff_t>(it - s.begin() - 1, 0), s.size() - 2);
    size_t i0 = i1 == 0 ? 0 : i1 - 1;
    size_t i2 = i1 + 1;
    size_t i3 = std::min(i2 + 1, s.size() - 1);
    double t1 = s[i1].first, t2 = s[i2].first;
    double h = t2 - t1;
    double m1 = (s[i2].second - s[i0].second) / (s[i2].first - s[i0].first);
    double m2 = (s[i3].second - s[i1].second) / (s[i3].first - s[i1].first);
    double u = (t - t1) / h;
    double v1 = s[i1].second, v2 = s[i2].second;
    if (!deriv) {
        double h00 = (1 + 2 * u) * (1 - u) * (1 - u);
        double h10 = u * (1 - u) * (1 - u);
        double h01 = u * u * (3 - 2 * u);
        double h11 = u * u * (u - 1);
        return h00 * v1 + h10 * h * m1 + h01 * v2 + h11 * h * m2;
    }
    double d00 = 6 * u * (u - 1) / h;
    double d10 = (1 - 4 * u + 3 * u * u);
    double d01 = -6 * u * (u - 1) / h;
    double d11 = (3 * u * u - 2 * u);
    return d00 * v1 + d10 * m1 + d01 * v2 + d11 * m2;
}

} // namespace

double PulseEnvelope::value(double t) const {
    switch (kind) {
    case EnvelopeKind::gaussian: {
        double u = (t - center) / width;
        return amplitude * std::exp(-0.5 * u * u);
    }
    case EnvelopeKind::sine_squared: {
        double u = t - center;
        if (std::abs(u) >= width) return 0.0;
        double c = std::cos(std::numbers::pi * u / (2.0 * width));
        return amplitude * c * c;
    }
    case EnvelopeKind::tabulated:
        return hermite_eval(samples, t, false);
    }
    return 0.0;
}

double PulseEnvelope::derivative(double t) const {
    switch (kind) {
    case EnvelopeKind::gaussian: {
        double u = (t - center) / width;
        return -amplitude * u / width * std::exp(-0.5 * u * u);
    }
    case EnvelopeKind::sine_squared: {
        double u = t - center;
        if (std::abs(u) >= width) return 0.0;
        return -amplitude * std::numbers::pi / (2.0 * width) *
               std::sin(std::numbers::pi * u / width);
    }
    case EnvelopeKind::tabulated:
        return hermite_eval(samples, t, true);
    }
    return 0.0;
}

double MomentumGrid::weight_sum() const {
    double s = 0.0;
    for (const auto& gp : points) s += gp.weight;
    return s;
}

MomentumGrid MomentumGrid::build(const GaussianPacket& packet, double y_m, int n_points) {
    if (n_points < 2 || y_m <= 0.0)
        throw Error(ErrorCode::config_error, "momentum grid needs n_points >= 2 and y_m > 0");
    MomentumGrid g;
    g.center = packet.momentum;
    // y_M = DeltaP_M * Dx / (sqrt(2) hbar) with DeltaP_M the full width.
    double dx = std::sqrt(packet.dx2);
    double dpm = std::sqrt(2.0) * hbar * y_m / dx;
    g.half_width = 0.5 * dpm;
    double dp = dpm / (n_points - 1);
    double norm = std::sqrt(2.0 * packet.dx2 / std::numbers::pi);
    g.points.resize(n_points);
    for (int i = 0; i < n_points; ++i) {
        double p = g.center - g.half_width + i * dp;
        double q = (p - packet.momentum) / hbar;
        double rho2 = norm * std::exp(-2.0 * packet.dx2 * q * q);
        double w = rho2 * dp / hbar;
        if (i == 0 || i == n_points - 1) w *= 0.5;
        g.points[i] = {p, w};
    }
    return g;
}

ValidationReport validate_scenario(const AtomSpec& atom, const SequencePlan& plan,
                                   const GaussianPacket& packet, const MomentumGrid& grid,
                                   double theta_tol) {
    ValidationReport rep;
    if (!(atom.mass > 0.0)) rep.issues.push_back("atom mass must be positive");
    if (!(atom.e2 > atom.e0 && atom.e2 > atom.e1))
        rep.issues.push_back("excited level e2 must lie above both ground levels");
    if (!(packet.dx2 > 0.0)) rep.issues.push_back("packet dx2 must be positive");
    if (packet.age < 0.0) rep.issues.push_back("packet age must be nonnegative");

    if (!(grid.center > grid.half_width))
        rep.issues.push_back("momentum sign ambiguity: P0 must be much greater than dpm/2");

    GroundState state = plan.steps.empty() ? GroundState::g0 : initial_state(plan.steps.front().role);
    double t_d = -1.0, t_a = -1.0;
    double prev_end = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < plan.steps.size(); ++i) {
        const StirapStep& st = plan.steps[i];
        if (!(st.duration > 0.0)) {
            rep.issues.push_back("step " + std::to_string(i) + " has non-positive duration");
            continue;
        }
        if (st.start < prev_end)
            rep.issues.push_back("step " + std::to_string(i) + " overlaps the previous step");
        prev_end = st.end();
        if (initial_state(st.role) != state)
            rep.issues.push_back("step " + std::to_string(i) +
                                 " initial internal state does not continue the previous step");
        state = final_state(st.role);
        double& shared = is_decelerating(st.role) ? t_d : t_a;
        if (shared < 0.0)
            shared = st.duration;
        else if (std::abs(shared - st.duration) > 1e-12 * shared)
            rep.issues.push_back("step " + std::to_string(i) +
                                 (is_decelerating(st.role)
                                      ? " breaks the shared decelerating duration t_d"
                                      : " breaks the shared accelerating duration t_a"));
        // Counterintuitive ordering: tan(theta(t0)) and cot(theta(t0+T)) small.
        double op0 = st.pump.envelope.value(st.start);
        double os0 = st.stokes.envelope.value(st.start);
        double opf = st.pump.envelope.value(st.end());
        double osf = st.stokes.envelope.value(st.end());
        if (!(os0 > 0.0) || op0 / os0 > theta_tol)
            rep.issues.push_back("step " + std::to_string(i) +
                                 " ordering violation: tan(theta(t0)) exceeds theta_tol");
        if (!(opf > 0.0) || osf / opf > theta_tol)
            rep.issues.push_back("step " + std::to_string(i) +
                                 " ordering violation: cot(theta(t0+T)) exceeds theta_tol");
        // One net photon recoil pair must not exhaust the packet momentum.
        double recoil = hbar * (st.pump.wavenumber + st.stokes.wavenumber);
        if (is_decelerating(st.role) &&
            !(packet.momentum - grid.half_width > recoil))
            rep.issues.push_back("step " + std::to_string(i) +
                                 " recoil too large: p0 - dpm/2 must exceed hbar(k0+k1)");
    }
    return rep;
}

} // namespace stirap
