#include "ambr/analytic.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ambr::analytic {

namespace {
// pow with 0^0 = 1 over nonnegative reals.
double xpow(double base, double exp) {
  if (base == 0.0 && exp == 0.0) return 1.0;
  return std::pow(base, exp);
}

void check_prob(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(name) + " must be in [0,1]");
}
}  // namespace

double eval_pb(double lambda, double mu) {
  if (lambda < 0.0 || mu < 0.0) throw std::invalid_argument("rates must be nonnegative");
  if (lambda + mu <= 0.0) throw std::invalid_argument("lambda + mu must be positive");
  return mu / (mu + lambda);
}

double eval_pn(double pb, int e_n) {
  check_prob(pb, "pb");
  if (e_n < 0) throw std::invalid_argument("e_n must be nonnegative");
  double rho = std::pow(1.0 - pb, 3);
  return 1.0 - std::pow(1.0 - rho, e_n);
}

std::vector<double> eval_pk_distribution(int e_n, double pb) {
  check_prob(pb, "pb");
  if (e_n < 0) throw std::invalid_argument("e_n must be nonnegative");
  double rho = std::pow(1.0 - pb, 3);
  std::vector<double> pmf(e_n + 1);
  for (int k = 0; k <= e_n; ++k) {
    double log_c = std::lgamma(e_n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(e_n - k + 1.0);
    pmf[k] = std::exp(log_c) * xpow(rho, k) * xpow(1.0 - rho, e_n - k);
  }
  return pmf;
}

double eval_pf0(double p0, double kk) {
  check_prob(p0, "p0");
  if (kk < 0.0) throw std::invalid_argument("kk must be nonnegative");
  return xpow(1.0 - p0, kk);
}

double eval_pf1(double p0, double kk, double e_n) {
  check_prob(p0, "p0");
  if (kk < 0.0 || e_n < 0.0) throw std::invalid_argument("kk and e_n must be nonnegative");
  return xpow(1.0 - p0, kk * e_n);
}

double eval_pr(double p0, double kk, double e_n) {
  return 1.0 - eval_pf0(p0, kk) * eval_pf1(p0, kk, e_n);
}

PsResult eval_ps(const PsParams& p, PsMode mode) {
  check_prob(p.p0, "p0");
  check_prob(p.pb, "pb");
  if (p.e_l < 1.0) throw std::invalid_argument("e_l must be >= 1");
  if (p.k < 1.0 || p.k > p.e_l) throw std::invalid_argument("k must lie in [1, e_l]");
  if (p.kk <= 0.0) throw std::invalid_argument("kk must be positive");
  double pf0 = eval_pf0(p.p0, p.kk);
  double pf1 = eval_pf1(p.p0, p.kk, p.e_n);
  if (p.kk * p.e_n == 0.0 && pf1 != 1.0)
    throw std::invalid_argument("kk * e_n = 0 leaves P_F1 exponent undefined");

  PsResult r;
  r.term1 = xpow(1.0 - xpow(pf0, 1.0 / p.kk), p.e_l);
  double inner2 = p.kk * p.e_n > 0.0 ? xpow(pf1, 1.0 / (p.kk * p.e_n)) : 1.0;
  r.term2 = (p.e_l - p.k) * xpow(1.0 - inner2, p.e_l - p.k);
  r.term3 = xpow(1.0 - p.pb, p.k) *
            (1.0 - xpow(1.0 - p.p0, p.kk) * xpow(1.0 - p.p0, p.kk * p.e_n * (p.e_l - p.k)));
  r.value = mode == PsMode::Literal ? r.term1 + 2.0 * r.term2 + r.term3
                                    : r.term1 + r.term2 + r.term3;
  r.in_unit_interval = r.value >= 0.0 && r.value <= 1.0;
  return r;
}

double monte_carlo_pb(double lambda, double mu, std::size_t samples, RngStream& stream) {
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  if (lambda < 0.0 || mu < 0.0) throw std::invalid_argument("rates must be nonnegative");
  if (mu == 0.0) return 0.0;
  if (lambda == 0.0) return 1.0;
  std::size_t broken = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    double t_break = stream.exponential(mu);
    double t_arrival = stream.exponential(lambda);
    if (t_break < t_arrival) ++broken;
  }
  return static_cast<double>(broken) / samples;
}

}  // namespace ambr::analytic
