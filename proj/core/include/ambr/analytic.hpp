#ifndef AMBR_ANALYTIC_HPP
#define AMBR_ANALYTIC_HPP

#include <vector>

#include "ambr/rng.hpp"

namespace ambr::analytic {

// Closed-form routing-probability model. All functions are pure.
//
// Symbols: lambda = packet-arrival rate, mu = location-change rate,
// e_l = expected route length (hops), e_n = number of monitors,
// kk = hop count in a failed self-diagnosis, p0 = per-step next-node-found
// probability, k = failure hop index.

// P_B = mu / (mu + lambda). Rejects lambda = mu = 0.
double eval_pb(double lambda, double mu);

// P_N = 1 - (1 - (1 - pb)^3)^e_n, with rho = (1 - pb)^3 the per-monitor
// route-finding probability.
double eval_pn(double pb, int e_n);

// Binomial(e_n, rho) pmf over K = 0..e_n with rho = (1 - pb)^3.
std::vector<double> eval_pk_distribution(int e_n, double pb);

// P_F0 = (1 - p0)^kk : self diagnosis fails over kk hops.
double eval_pf0(double p0, double kk);

// P_F1 = (1 - p0)^(kk * e_n) : all e_n monitors also fail.
double eval_pf1(double p0, double kk, double e_n);

// P_R = 1 - P_F0 * P_F1.
double eval_pr(double p0, double kk, double e_n);

enum class PsMode { Literal, Dedup };

struct PsParams {
  double e_l = 1.0;   // expected route length
  double k = 1.0;     // failure hop index (1 <= k <= e_l)
  double kk = 1.0;    // K, self-diagnosis hop count
  double e_n = 1.0;   // number of monitors
  double p0 = 0.5;    // per-step success probability
  double pb = 0.5;    // route-break probability
};

struct PsResult {
  double term1 = 0.0;  // (1 - P_F0^{1/K})^{E_L}
  double term2 = 0.0;  // (E_L - k) (1 - P_F1^{1/(K E_N)})^{E_L - k}
  double term3 = 0.0;  // (1 - P_B)^k [1 - (1-P_0)^K (1-P_0)^{K E_N (E_L - k)}]
  double value = 0.0;  // term1 + 2*term2 + term3 (literal) or single term2 (dedup)
  bool in_unit_interval = false;
};

// End-to-end routing success expression. The printed formula is not
// normalized; the raw value is returned together with a bounds flag and the
// per-term breakdown so alternative readings can be audited. Literal mode
// counts the duplicated middle term twice, dedup mode once.
PsResult eval_ps(const PsParams& p, PsMode mode);

// Competing-exponentials sampler converging to eval_pb. mu = 0 never breaks.
double monte_carlo_pb(double lambda, double mu, std::size_t samples, RngStream& stream);

}  // namespace ambr::analytic

#endif
