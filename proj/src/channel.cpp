#include "platoon/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "platoon/errors.hpp"
#include "platoon/numerics.hpp"

namespace platoon::channel {

namespace {

constexpr double kFourPiSq = 16.0 * std::numbers::pi * std::numbers::pi;

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(name) + " must be positive and finite");
  }
}

}  // namespace

void ChannelParams::validate() const {
  require_positive(f0, "f0");
  require_positive(gt, "gt");
  require_positive(gr, "gr");
  require_positive(n0, "n0");
  require_positive(gamma_th, "gamma_th");
  require_positive(pt, "pt");
  if (!(alpha >= 1.0) || !std::isfinite(alpha)) throw DomainError("alpha must be >= 1");
  if (!(k_factor >= 0.0) || !std::isfinite(k_factor)) throw DomainError("K must be >= 0");
}

bool JammerParams::targets_link(std::size_t receiver) const {
  if (!targets) return true;
  return std::find(targets->begin(), targets->end(), receiver) != targets->end();
}

JammerParams JammerParams::with_power(double watts) const {
  if (!(watts >= 0.0) || !std::isfinite(watts)) throw DomainError("jammer power must be >= 0");
  JammerParams out = *this;
  const double current = power();
  if (current > 0.0) {
    const double scale = std::sqrt(watts / current);
    out.mu = mu * scale;
    out.sigma = sigma * scale;
  } else {
    out.mu = std::sqrt(watts);
    out.sigma = 0.0;
  }
  return out;
}

void JammerParams::validate(std::size_t n) const {
  if (!std::isfinite(mu)) throw DomainError("jammer mu must be finite");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw DomainError("jammer sigma must be >= 0");
  require_positive(gj, "jammer gain");
  require_positive(altitude, "jammer altitude");
  if (position > n) throw DomainError("jammer position must lie in [0, n]");
  if (targets) {
    for (std::size_t t : *targets) {
      if (t < 1 || t > n) throw DomainError("jammer target links must lie in [1, n]");
    }
  }
}

double jammer_distance(std::span<const double> gaps, std::size_t i, std::size_t j, double l) {
  if (gaps.empty()) throw DomainError("jammer_distance: empty gap vector");
  const std::size_t n = gaps.size() - 1;
  if (i < 1 || i > n) throw DomainError("jammer_distance: receiver index out of range");
  if (j > n) throw DomainError("jammer_distance: jammer index out of range");
  if (i == j) return l;
  // Sum the gaps strictly between the two vehicles' positions along the road.
  const std::size_t lo = std::min(i, j) + 1;
  const std::size_t hi = std::max(i, j);
  double span = 0.0;
  for (std::size_t m = lo; m <= hi; ++m) span += gaps[m];
  return std::sqrt(span * span + l * l);
}

double jammer_interference(const JammerParams& jp, const ChannelParams& cp, double s) {
  if (!(s > 0.0)) throw DomainError("jammer_interference: distance must be positive");
  const double lambda = cp.wavelength();
  return jp.gj * cp.gr * lambda * lambda * jp.power() / (kFourPiSq * std::pow(s, cp.alpha));
}

double received_power(const ChannelParams& cp, double d) {
  if (!(d > 0.0)) throw DomainError("received_power: distance must be positive");
  d = std::max(d, kMinLinkDistance);
  const double lambda = cp.wavelength();
  return cp.gt * cp.gr * lambda * lambda * cp.pt / (kFourPiSq * std::pow(d, cp.alpha));
}

double avg_sinr(const ChannelParams& cp, const JammerParams& jp, double d, double s,
                bool jam_active) {
  const double pr = received_power(cp, d);
  const double interference = jam_active ? jammer_interference(jp, cp, s) : 0.0;
  return pr / (cp.n0 + interference);
}

double delivery_prob(double gamma_bar, double k_factor, double gamma_th) {
  if (!(gamma_bar > 0.0)) throw DomainError("delivery_prob: average SINR must be positive");
  if (!(gamma_th > 0.0)) throw DomainError("delivery_prob: threshold must be positive");
  if (!(k_factor >= 0.0)) throw DomainError("delivery_prob: K must be non-negative");
  if (std::isinf(gamma_bar)) return 1.0;
  const double a = std::sqrt(2.0 * k_factor);
  const double b = std::sqrt(2.0 * (1.0 + k_factor) * gamma_th / gamma_bar);
  return numerics::marcum_q1(a, b);
}

bool sample_delivery(double p, RngStream& rng) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("sample_delivery: p must lie in [0, 1]");
  return rng.uniform() < p;
}

double update_buffer(CommBuffer& buf, std::size_t link, bool beta, double u_sent) {
  if (link < 1 || link > buf.links()) throw DomainError("update_buffer: link out of range");
  if (beta || !buf.initialized_[link]) {
    buf.held_[link] = u_sent;
    buf.initialized_[link] = true;
  }
  return buf.held_[link];
}

}  // namespace platoon::channel
