#include "slavespin/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace slavespin {

void NoiseParams::validate() const {
  if (shots < 1) throw std::invalid_argument("shot count must be >= 1");
  if (!(epsilon >= 0.0 && epsilon <= 1.0) || !(epsilon_prime >= 0.0 && epsilon_prime <= 1.0)) {
    throw std::invalid_argument("readout error probabilities must lie in [0, 1]");
  }
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(stream)));
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void ShotRecord::write(std::ostream& os) const {
  std::string line(sites, '0');
  for (std::uint64_t s : shots) {
    for (int i = 0; i < sites; ++i) line[i] = ((s >> i) & 1U) ? '1' : '0';
    os << line << '\n';
  }
}

ShotRecord sample_bitstrings(const Eigen::VectorXd& probabilities, int sites,
                             const NoiseParams& params, std::uint64_t stream) {
  params.validate();
  if (probabilities.size() != (Eigen::Index{1} << sites)) {
    throw std::invalid_argument("probability vector does not match the site count");
  }
  std::vector<double> cdf(probabilities.size());
  double acc = 0.0;
  for (Eigen::Index a = 0; a < probabilities.size(); ++a) {
    acc += std::max(0.0, probabilities(a));
    cdf[a] = acc;
  }
  if (!(acc > 0.0)) throw std::invalid_argument("probability vector has no weight");

  std::mt19937_64 rng = make_stream(params.seed, stream);
  ShotRecord record;
  record.sites = sites;
  record.epsilon = params.epsilon;
  record.epsilon_prime = params.epsilon_prime;
  record.shots.reserve(params.shots);
  const bool noisy = params.epsilon > 0.0 || params.epsilon_prime > 0.0;
  for (int s = 0; s < params.shots; ++s) {
    const double u = uniform01(rng) * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    std::uint64_t bits = static_cast<std::uint64_t>(it - cdf.begin());
    if (noisy) {
      for (int i = 0; i < sites; ++i) {
        const std::uint64_t mask = std::uint64_t{1} << i;
        const double flip = (bits & mask) ? params.epsilon_prime : params.epsilon;
        if (uniform01(rng) < flip) bits ^= mask;
      }
    }
    record.shots.push_back(bits);
  }
  return record;
}

namespace {

// Readout maps a +-1 variable s to s' with E[s'|s] = a s + c.
struct ReadoutMap {
  double a;
  double c;
  explicit ReadoutMap(double eps, double eps_prime)
      : a(1.0 - eps - eps_prime), c(eps - eps_prime) {}
  bool invertible() const { return std::abs(a) > 1e-12; }
  double invert(double measured) const {
    return std::clamp((measured - c) / a, -1.0, 1.0);
  }
};

}  // namespace

ShotEstimates estimate_observables(const ShotRecord& record) {
  const int n = record.sites;
  const auto shots = static_cast<double>(record.shots.size());
  if (record.shots.size() < 2) throw std::invalid_argument("estimators need at least 2 shots");

  Eigen::VectorXd sum = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd pair = Eigen::MatrixXd::Zero(n, n);
  double m_sum = 0.0;
  double m_sq = 0.0;
  Eigen::VectorXd s(n);
  for (std::uint64_t bits : record.shots) {
    for (int i = 0; i < n; ++i) s(i) = ((bits >> i) & 1U) ? 1.0 : -1.0;
    sum += s;
    pair.noalias() += s * s.transpose();
    const double m = s.mean();
    m_sum += m;
    m_sq += m * m;
  }

  ShotEstimates out;
  out.magnetization = sum / shots;
  out.correlation = pair / shots;
  out.mean_magnetization = m_sum / shots;

  // Standard error of a sample mean: sqrt(var_sample / n).
  auto sem = [shots](double mean, double mean_sq) {
    const double var = std::max(0.0, mean_sq - mean * mean) * shots / (shots - 1.0);
    return std::sqrt(var / shots);
  };
  Eigen::VectorXd mag_stat(n);
  Eigen::MatrixXd corr_stat(n, n);
  for (int i = 0; i < n; ++i) {
    mag_stat(i) = sem(out.magnetization(i), 1.0);
    for (int k = 0; k < n; ++k) corr_stat(i, k) = i == k ? 0.0 : sem(out.correlation(i, k), 1.0);
  }
  out.mean_stat_err = sem(out.mean_magnetization, m_sq / shots);

  const ReadoutMap map(record.epsilon, record.epsilon_prime);
  Eigen::VectorXd mag_bias = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd corr_bias = Eigen::MatrixXd::Zero(n, n);
  if (map.a != 1.0 || map.c != 0.0) {
    if (!map.invertible()) {
      mag_bias.setConstant(record.epsilon + record.epsilon_prime);
      corr_bias.setConstant(record.epsilon + record.epsilon_prime);
      corr_bias.diagonal().setZero();
    } else {
      Eigen::VectorXd truth(n);
      for (int i = 0; i < n; ++i) {
        truth(i) = map.invert(out.magnetization(i));
        mag_bias(i) = std::abs(out.magnetization(i) - truth(i));
      }
      for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
          if (i == k) continue;
          // E[s_i' s_k'] = a^2 <s_i s_k> + a c (<s_i> + <s_k>) + c^2
          const double true_corr = std::clamp(
              (out.correlation(i, k) - map.a * map.c * (truth(i) + truth(k)) - map.c * map.c) /
                  (map.a * map.a),
              -1.0, 1.0);
          corr_bias(i, k) = std::abs(out.correlation(i, k) - true_corr);
        }
      }
    }
  }
  if (map.a != 1.0 || map.c != 0.0) {
    if (map.invertible()) {
      double truth_mean = 0.0;
      for (int i = 0; i < n; ++i) truth_mean += map.invert(out.magnetization(i));
      out.mean_readout_err = std::abs(out.mean_magnetization - truth_mean / n);
    } else {
      out.mean_readout_err = record.epsilon + record.epsilon_prime;
    }
  }
  out.magnetization_err = (mag_stat.array().square() + mag_bias.array().square()).sqrt();
  out.correlation_err = (corr_stat.array().square() + corr_bias.array().square()).sqrt();
  out.mean_err = std::hypot(out.mean_stat_err, out.mean_readout_err);
  return out;
}

ZObservables expected_observables(const Eigen::VectorXd& probabilities, int sites,
                                  double epsilon, double epsilon_prime) {
  Eigen::VectorXd p = probabilities;
  if (epsilon > 0.0 || epsilon_prime > 0.0) {
    for (int i = 0; i < sites; ++i) {
      const Eigen::Index bit = Eigen::Index{1} << i;
      for (Eigen::Index a = 0; a < p.size(); ++a) {
        if (a & bit) continue;
        const double g = p(a);
        const double r = p(a | bit);
        p(a) = (1.0 - epsilon) * g + epsilon_prime * r;
        p(a | bit) = epsilon * g + (1.0 - epsilon_prime) * r;
      }
    }
  }
  return z_observables(p, sites);
}

}  // namespace slavespin
