#include "qdc/fits.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

namespace qdc {

namespace {

/// exp(z^2) * erfc(z) for large positive z (asymptotic series).
double erfcx_large(double z) {
  const double iz2 = 1.0 / (2.0 * z * z);
  return (1.0 - iz2 * (1.0 - 3.0 * iz2)) / (z * std::sqrt(M_PI));
}

std::string diag_string(double tau, double t0, double amplitude, double baseline, double chi2,
                        int iterations) {
  std::ostringstream os;
  os << "tau=" << tau << " t0=" << t0 << " A=" << amplitude << " B=" << baseline
     << " chi2=" << chi2 << " iterations=" << iterations;
  return os.str();
}

}  // namespace

double decay_response(double t, double tau, double sigma_irf, double t0) {
  const double dt = t - t0;
  if (sigma_irf <= 0.0) return dt >= 0.0 ? std::exp(-dt / tau) / tau : 0.0;
  const double z = (sigma_irf / tau - dt / sigma_irf) / std::sqrt(2.0);
  if (z > 8.0) {
    const double gauss = std::exp(-0.5 * (dt / sigma_irf) * (dt / sigma_irf));
    return 0.5 / tau * gauss * erfcx_large(z);
  }
  const double arg = 0.5 * (sigma_irf / tau) * (sigma_irf / tau) - dt / tau;
  return 0.5 / tau * std::exp(arg) * std::erfc(z);
}

LifetimeFit fit_lifetime(const CoincidenceHistogram& decay, double irf_sigma_ps) {
  if (!(irf_sigma_ps >= 0.0)) throw ValidationError("fit_lifetime: irf_sigma must be >= 0");
  const std::size_t n = decay.bins();
  if (n < 8) throw FitError("fit_lifetime: too few bins", "bins=" + std::to_string(n));

  std::size_t peak = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (decay.counts[i] > decay.counts[peak]) peak = i;
  std::size_t populated_past_peak = 0;
  for (std::size_t i = peak + 1; i < n; ++i)
    if (decay.counts[i] > 0) ++populated_past_peak;
  if (populated_past_peak < 20)
    throw FitError("fit_lifetime: need >= 20 populated bins past the peak",
                   "populated=" + std::to_string(populated_past_peak));

  const double bw = decay.bin_width_ps;
  const double peak_count = static_cast<double>(decay.counts[peak]);
  const double t_peak = decay.bin_center(peak);

  // Starting values: t0 at the histogram peak, tau from the 1/e point,
  // baseline from the bins well before the rise.
  double baseline0 = 0.0;
  std::size_t pre = 0;
  for (std::size_t i = 0; i < n && decay.bin_center(i) < t_peak - 5.0 * irf_sigma_ps - 2.0 * bw;
       ++i) {
    baseline0 += static_cast<double>(decay.counts[i]);
    ++pre;
  }
  baseline0 = pre > 0 ? baseline0 / static_cast<double>(pre) : 0.0;
  double tau0 = bw;
  for (std::size_t i = peak + 1; i < n; ++i) {
    if (static_cast<double>(decay.counts[i]) <= baseline0 + (peak_count - baseline0) / M_E) {
      tau0 = std::max(bw, decay.bin_center(i) - t_peak);
      break;
    }
  }
  double total = 0.0;
  for (auto c : decay.counts) total += static_cast<double>(c);
  const double amplitude0 = std::max(1.0, total - baseline0 * static_cast<double>(n));

  Eigen::Vector4d theta(amplitude0, tau0, t_peak, baseline0);

  auto model = [&](const Eigen::Vector4d& th, std::size_t i) {
    return th(0) * decay_response(decay.bin_center(i), th(1), irf_sigma_ps, th(2)) * bw + th(3);
  };
  auto chi2_of = [&](const Eigen::Vector4d& th, const std::vector<double>& w) {
    double chi2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = static_cast<double>(decay.counts[i]) - model(th, i);
      chi2 += w[i] * r * r;
    }
    return chi2;
  };

  // Levenberg-Marquardt with Poisson weights taken from the model. The
  // weights are refreshed for the first few accepted steps and then frozen,
  // which keeps the objective monotone near the optimum.
  std::vector<double> weights(n);
  auto refresh_weights = [&](const Eigen::Vector4d& th) {
    for (std::size_t i = 0; i < n; ++i) weights[i] = 1.0 / std::max(model(th, i), 1.0);
  };
  refresh_weights(theta);

  double lambda = 1e-3;
  double chi2 = chi2_of(theta, weights);
  int iter = 0;
  int stale = 0;
  int accepted_steps = 0;
  constexpr int kMaxIter = 200;
  constexpr int kWeightRefreshSteps = 6;
  Eigen::Matrix4d jtj_final = Eigen::Matrix4d::Zero();
  for (; iter < kMaxIter && stale < 3; ++iter) {
    Eigen::Matrix<double, 4, Eigen::Dynamic> jac(4, n);
    const Eigen::Vector4d scale(theta(0), theta(1), bw, std::max(1.0, std::abs(theta(3))));
    for (int p = 0; p < 4; ++p) {
      const double h = std::max(1e-7 * std::abs(theta(p)), 1e-9 * std::abs(scale(p))) + 1e-12;
      Eigen::Vector4d up = theta, dn = theta;
      up(p) += h;
      dn(p) -= h;
      for (std::size_t i = 0; i < n; ++i) jac(p, i) = (model(up, i) - model(dn, i)) / (2.0 * h);
    }
    Eigen::Matrix4d jtj = Eigen::Matrix4d::Zero();
    Eigen::Vector4d jtr = Eigen::Vector4d::Zero();
    for (std::size_t i = 0; i < n; ++i) {
      const Eigen::Vector4d col = jac.col(i);
      const double r = static_cast<double>(decay.counts[i]) - model(theta, i);
      jtj += weights[i] * col * col.transpose();
      jtr += weights[i] * r * col;
    }
    jtj_final = jtj;

    bool accepted = false;
    for (int attempt = 0; attempt < 12 && !accepted; ++attempt) {
      Eigen::Matrix4d damped = jtj;
      for (int p = 0; p < 4; ++p) damped(p, p) *= 1.0 + lambda;
      const Eigen::Vector4d step = damped.ldlt().solve(jtr);
      const Eigen::Vector4d candidate = theta + step;
      if (candidate(1) > 0.0 && candidate(0) > 0.0) {
        const double chi2_new = chi2_of(candidate, weights);
        if (chi2_new <= chi2) {
          if (chi2 - chi2_new < 1e-8 * (chi2 + 1.0))
            ++stale;
          else
            stale = 0;
          theta = candidate;
          chi2 = chi2_new;
          if (++accepted_steps <= kWeightRefreshSteps) {
            refresh_weights(theta);
            chi2 = chi2_of(theta, weights);
          }
          lambda = std::max(1e-12, lambda * 0.3);
          accepted = true;
        }
      }
      if (!accepted) lambda *= 10.0;
    }
    if (!accepted) ++stale;
  }

  if (iter >= kMaxIter)
    throw FitError("fit_lifetime: no convergence",
                   diag_string(theta(1), theta(2), theta(0), theta(3), chi2, iter));

  const Eigen::Matrix4d cov = jtj_final.inverse();
  const double sigma_tau = std::sqrt(std::max(0.0, cov(1, 1)));
  return {{theta(1), sigma_tau}, theta(0), theta(2), theta(3), chi2, iter};
}

FssFit fit_fss(std::span<const double> angles_deg, std::span<const double> delta_e_uev) {
  if (angles_deg.size() != delta_e_uev.size())
    throw ValidationError("fit_fss: angle and energy series differ in length");
  const std::size_t n = angles_deg.size();
  if (n < 8) throw ValidationError("fit_fss: need at least 8 angle samples");
  const auto [lo, hi] = std::minmax_element(angles_deg.begin(), angles_deg.end());
  if (*hi - *lo < 180.0 - 1e-9)
    throw ValidationError("fit_fss: angle samples must span at least 180 degrees");

  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double two_theta = 2.0 * angles_deg[i] * M_PI / 180.0;
    design(i, 0) = 1.0;
    design(i, 1) = std::sin(two_theta);
    design(i, 2) = std::cos(two_theta);
    y(i) = delta_e_uev[i];
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < 3)
    throw FitError("fit_fss: rank-deficient design matrix", "rank=" + std::to_string(qr.rank()));
  const Eigen::Vector3d coef = qr.solve(y);
  const double rss = (y - design * coef).squaredNorm();
  const double var = rss / static_cast<double>(n - 3);
  const Eigen::Matrix3d cov = var * (design.transpose() * design).inverse();

  const double p = coef(1), q = coef(2);
  const double half_swing = std::hypot(p, q);
  double sigma;
  if (half_swing > 1e-12) {
    const double gp = p / half_swing, gq = q / half_swing;
    sigma = 2.0 * std::sqrt(std::max(
                      0.0, gp * gp * cov(1, 1) + 2.0 * gp * gq * cov(1, 2) + gq * gq * cov(2, 2)));
  } else {
    sigma = 2.0 * std::sqrt(std::max(0.0, std::max(cov(1, 1), cov(2, 2))));
  }
  return {{2.0 * half_swing, sigma}, coef(0), std::atan2(q, p)};
}

}  // namespace qdc
