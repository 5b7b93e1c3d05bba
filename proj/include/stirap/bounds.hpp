#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include "stirap/model.hpp"

namespace stirap {

enum class BoundKind { dyson, first_order, eqtrans_total };

struct BoundReport {
    BoundKind kind = BoundKind::dyson;
    double value = 0.0;
    std::pair<double, double> sup_location{0.0, 0.0}; // (P or dP, t)
    double epsilon_target = 0.0;
    bool satisfied = false;
    std::map<std::string, double> ingredients;
};

// Tables of the equivalent-transformation ladder amplitudes over the time
// mesh for a fixed momentum offset dP = P - P0.
struct AmplitudeLadder {
    int order = 0;
    double dP = 0.0;
    std::vector<double> t; // uniform mesh
    // b+ family
    std::vector<std::complex<double>> gp_minus1, gp_zero1, g1_plus;  // order 1
    std::vector<std::complex<double>> thp_minus1, thp_zero1;
    std::vector<std::complex<double>> gp_minus1_hat, gp_zero1_hat;   // hatted
    std::vector<std::complex<double>> thp_minus1_hat, thp_zero1_hat;
    std::vector<std::complex<double>> gp_minus2, gp_zero2, g2_plus;  // order 2
    std::vector<std::complex<double>> thp_minus2, thp_zero2;
    std::vector<std::complex<double>> gp_minus2_hat, gp_zero2_hat;
    std::vector<std::complex<double>> thp_minus2_hat, thp_zero2_hat;
    std::vector<std::complex<double>> g3_plus;                       // order 3
    std::vector<std::complex<double>> thp_minus3, thp_zero3;
    // b- family
    std::vector<std::complex<double>> gm_plus1, gm_zero1, g1_minus;
    std::vector<std::complex<double>> thm_plus1, thm_zero1;
    std::vector<std::complex<double>> gm_plus1_hat, gm_zero1_hat;
    std::vector<std::complex<double>> thm_plus1_hat, thm_zero1_hat;
    std::vector<std::complex<double>> gm_plus2, gm_zero2, g2_minus;
    std::vector<std::complex<double>> thm_plus2, thm_zero2;
    std::vector<std::complex<double>> gm_plus2_hat, gm_zero2_hat;
    std::vector<std::complex<double>> thm_plus2_hat, thm_zero2_hat;
    std::vector<std::complex<double>> g3_minus;
    std::vector<std::complex<double>> thm_plus3, thm_zero3;
    // b0 family
    std::vector<std::complex<double>> g01_plus, g01_minus;
    std::vector<std::complex<double>> th01_plus, th01_minus;
    std::vector<std::complex<double>> g01_plus_hat, g01_minus_hat;
    std::vector<std::complex<double>> th01_plus_hat, th01_minus_hat;
    std::vector<std::complex<double>> g02_plus, g02_minus, g2_zero;
    std::vector<std::complex<double>> th02_plus, th02_minus;
    std::vector<std::complex<double>> g02_plus_hat, g02_minus_hat;
    std::vector<std::complex<double>> th02_plus_hat, th02_minus_hat;
    std::vector<std::complex<double>> g3_zero;
    std::vector<std::complex<double>> th03_plus, th03_minus;
    // auxiliary scalar mesh functions
    std::vector<double> omega, theta_dot;
    std::vector<std::complex<double>> theta_c;
    std::vector<double> gamma_c;
    std::vector<double> f_factor;          // F(P,t)
    std::vector<double> g_plus_factor, g_minus_factor; // G_+-(P,t)
};

double matrix_norm_max(const StirapStep& step, const AtomSpec& atom, double dpm,
                       int mesh = 2048);

BoundReport first_order_bound(const StirapStep& step, const AtomSpec& atom, double dpm,
                              int mesh = 2048, double theta_tol = default_theta_tol);

BoundReport dyson_bound(const StirapStep& step, const AtomSpec& atom, double dpm,
                        int mesh = 2048, double theta_tol = default_theta_tol);

int dyson_truncation_order(const StirapStep& step, const AtomSpec& atom, double dpm,
                           double eps_r, int mesh = 2048);

AmplitudeLadder eqtrans_ladder(const StirapStep& step, const AtomSpec& atom, double P,
                               int k_max, int mesh = 2048);

struct EqTransFirstOrder {
    // main terms delta_{+-m}(P,t) on the ladder mesh; delta_0m = 0
    std::vector<std::complex<double>> delta_plus, delta_minus;
    // truncation bounds |Er1^+|, |Er1^-|, |Er1^0| on the mesh
    std::vector<double> er1_plus, er1_minus, er1_zero;
    // optional second-order truncation bounds |Er2^.| (order-3 amplitudes)
    std::vector<double> er2_plus, er2_minus, er2_zero;
};

EqTransFirstOrder eqtrans_first_order_solution(const StirapStep& step, const AtomSpec& atom,
                                               double P, int mesh = 2048);

BoundReport eqtrans_total_bound(const StirapStep& step, const AtomSpec& atom, double dpm,
                                double eps_r, int mesh = 2048, int n_dp = 9,
                                bool second_order = false);

double sequence_bound(const SequencePlan& plan, const AtomSpec& atom, double dpm,
                      int mesh = 2048);

} // namespace stirap
