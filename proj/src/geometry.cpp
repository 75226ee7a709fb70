#include "slavespin/geometry.hpp"

#include "slavespin/sampling.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace slavespin {

namespace {

// Objective minimised internally: D^2 plus the optional distance penalty.
struct Objective {
  const Eigen::MatrixXd& j;
  double c6;
  double min_distance;
  double weight;

  // Scale of the targets, ||4 J||.
  double reference() const {
    return 4.0 * j.triangularView<Eigen::StrictlyUpper>().toDenseMatrix().norm();
  }

  double value(const Eigen::VectorXd& x, Eigen::VectorXd* grad) const {
    const Eigen::Index n = j.rows();
    if (grad) grad->setZero(x.size());
    double f = 0.0;
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index b = a + 1; b < n; ++b) {
        const Eigen::Vector2d d = x.segment<2>(2 * a) - x.segment<2>(2 * b);
        const double r2 = d.squaredNorm();
        if (!(r2 > 0.0)) return std::numeric_limits<double>::infinity();
        const double inv6 = 1.0 / (r2 * r2 * r2);
        const double e = c6 * inv6 + 4.0 * j(a, b);
        f += e * e;
        // d(C6 r^-6)/d r_a = -6 C6 r^-8 (r_a - r_b)
        Eigen::Vector2d g = 2.0 * e * (-6.0 * c6 * inv6 / r2) * d;
        if (weight > 0.0) {
          const double r = std::sqrt(r2);
          if (r < min_distance) {
            const double gap = min_distance - r;
            f += weight * gap * gap;
            g += -2.0 * weight * gap * d / r;
          }
        }
        if (grad) {
          grad->segment<2>(2 * a) += g;
          grad->segment<2>(2 * b) -= g;
        }
      }
    }
    return f;
  }
};

Eigen::VectorXd flatten(const std::vector<Eigen::Vector2d>& p) {
  Eigen::VectorXd x(2 * p.size());
  for (std::size_t i = 0; i < p.size(); ++i) x.segment<2>(2 * i) = p[i];
  return x;
}

std::vector<Eigen::Vector2d> unflatten(const Eigen::VectorXd& x) {
  std::vector<Eigen::Vector2d> p(x.size() / 2);
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = x.segment<2>(2 * i);
  return p;
}

GeometryResult run_cg(const Eigen::VectorXd& x0, const Objective& obj,
                      const GeometryOptions& options) {
  GeometryResult out;
  Eigen::VectorXd x = x0;
  Eigen::VectorXd g(x.size());
  double f = obj.value(x, &g);
  if (!std::isfinite(f)) throw std::invalid_argument("starting geometry has coincident atoms");
  out.history.push_back(std::sqrt(f));

  auto grad_d_norm = [](double f2, const Eigen::VectorXd& g2) {
    // grad D = grad D^2 / (2 D)
    return f2 > 0.0 ? g2.norm() / (2.0 * std::sqrt(f2)) : 0.0;
  };

  // D itself has a kink at zero, so an exact fit is detected by its size.
  const double exact_fit = 1e-12 * std::max(1e-300, obj.reference());

  Eigen::VectorXd dir = -g;
  Eigen::VectorXd g_new(x.size());
  double prev_alpha = 0.0;
  double prev_slope = 0.0;
  for (int it = 0; it < options.max_iterations; ++it) {
    out.iterations = it;
    if (grad_d_norm(f, g) <= options.gradient_tolerance || std::sqrt(f) <= exact_fit) {
      out.converged = true;
      break;
    }
    double slope = g.dot(dir);
    if (slope >= 0.0) {
      dir = -g;
      slope = -g.squaredNorm();
    }
    // First trial step: a move of about one percent of the configuration size
    // initially, then the previous step rescaled by the change in slope.
    double alpha = prev_alpha > 0.0
                       ? prev_alpha * prev_slope / slope
                       : 0.01 * std::max(1.0, x.cwiseAbs().maxCoeff()) / dir.norm();
    // Backtracking with Armijo condition, expanding while it keeps improving.
    double f_try = obj.value(x + alpha * dir, nullptr);
    int shrink = 0;
    while (!(f_try <= f + 1e-4 * alpha * slope) &&
           alpha * dir.norm() > 1e-15 * (1.0 + x.norm())) {
      alpha *= 0.5;
      f_try = obj.value(x + alpha * dir, nullptr);
      ++shrink;
    }
    if (!(f_try < f)) {
      if (dir.dot(-g) < g.squaredNorm() * (1.0 - 1e-12)) {
        dir = -g;  // retry once along steepest descent
        continue;
      }
      // No decrease along steepest descent: converged if the gradient is at
      // the rounding floor of D, stalled otherwise.
      const double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
      if (grad_d_norm(f, g) * scale <= 1e-6 * std::sqrt(f)) {
        out.converged = true;
      } else {
        out.line_search_failed = true;
      }
      break;
    }
    if (shrink == 0) {
      for (int grow = 0; grow < 20; ++grow) {
        const double f_more = obj.value(x + 2.0 * alpha * dir, nullptr);
        if (!(f_more < f_try)) break;
        alpha *= 2.0;
        f_try = f_more;
      }
    }
    x += alpha * dir;
    f = obj.value(x, &g_new);
    out.history.push_back(std::sqrt(f));
    prev_alpha = alpha;
    prev_slope = slope;
    const double beta = std::max(0.0, g_new.dot(g_new - g) / g.squaredNorm());
    dir = -g_new + beta * dir;
    g = g_new;
    if (it + 1 == options.max_iterations) out.iterations = it + 1;
  }
  out.array.positions = unflatten(x);
  return out;
}

}  // namespace

double geometry_cost(const std::vector<Eigen::Vector2d>& positions, const Eigen::MatrixXd& j,
                     double c6) {
  const Objective obj{j, c6, 0.0, 0.0};
  return std::sqrt(obj.value(flatten(positions), nullptr));
}

Eigen::VectorXd geometry_cost_gradient(const std::vector<Eigen::Vector2d>& positions,
                                       const Eigen::MatrixXd& j, double c6) {
  const Objective obj{j, c6, 0.0, 0.0};
  Eigen::VectorXd g(2 * positions.size());
  const double f = obj.value(flatten(positions), &g);
  if (f == 0.0) return Eigen::VectorXd::Zero(g.size());
  return g / (2.0 * std::sqrt(f));
}

AtomArray initial_guess(const Eigen::MatrixXd& j, const ClusterSpec& cluster, double c6) {
  if (j.rows() != cluster.size()) {
    throw std::invalid_argument("coupling matrix does not match the cluster");
  }
  double spacing = 0.0;
  for (Eigen::Index a = 0; a < j.rows(); ++a) {
    for (Eigen::Index b = a + 1; b < j.cols(); ++b) {
      if (j(a, b) != 0.0) spacing = std::max(spacing, std::pow(c6 / std::abs(4.0 * j(a, b)), 1.0 / 6.0));
    }
  }
  if (spacing == 0.0) throw std::invalid_argument("no target couplings");
  AtomArray array;
  array.c6 = c6;
  for (int i = 0; i < cluster.size(); ++i) {
    array.positions.emplace_back(spacing * cluster.column(i), spacing * cluster.row(i));
  }
  return array;
}

GeometryResult optimize_geometry(const AtomArray& start, const Eigen::MatrixXd& j,
                                 const GeometryOptions& options) {
  if (j.rows() != start.size()) throw std::invalid_argument("coupling matrix does not match the array");
  const Objective obj{j, start.c6, options.min_distance, options.min_distance_weight};
  const Eigen::VectorXd x0 = flatten(start.positions);

  double spacing = std::numeric_limits<double>::infinity();
  for (int a = 0; a < start.size(); ++a) {
    for (int b = a + 1; b < start.size(); ++b) {
      spacing = std::min(spacing, (start.positions[a] - start.positions[b]).norm());
    }
  }
  if (!std::isfinite(spacing)) spacing = 1.0;

  GeometryResult best;
  bool have_best = false;
  std::mt19937_64 rng = make_stream(options.seed, 0);
  for (int s = 0; s < std::max(1, options.starts); ++s) {
    Eigen::VectorXd x = x0;
    if (s > 0) {
      for (Eigen::Index k = 0; k < x.size(); ++k) {
        x(k) += options.jitter * spacing * (2.0 * uniform01(rng) - 1.0);
      }
    }
    GeometryResult r = run_cg(x, obj, options);
    if (!have_best || r.history.back() < best.history.back()) {
      best = std::move(r);
      have_best = true;
    }
  }
  best.array.c6 = start.c6;
  const double start_objective = std::sqrt(obj.value(x0, nullptr));
  if (best.history.back() > start_objective) {
    // A jittered start can lose to the unperturbed guess.
    best.array.positions = start.positions;
    best.history.assign(1, start_objective);
    best.converged = false;
  }
  best.initial_cost = geometry_cost(start.positions, j, start.c6);
  best.final_cost = geometry_cost(best.array.positions, j, start.c6);
  return best;
}

}  // namespace slavespin
