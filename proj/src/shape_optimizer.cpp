#include "thermoshield/shape_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <optional>
#include <ostream>
#include <stdexcept>

#include "thermoshield/errors.hpp"

namespace thermoshield {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kArmijo = 1e-4;
constexpr int kStagnationRun = 3;

struct Mode {
  bool constrained;
  double M;
  double lambda;
};

struct Evaluation {
  StarPair pair;
  EnergyBreakdown energy;
  ScalarField field;
  std::shared_ptr<const StateFactorization> preconditioner;
};

// Radius function of the closed curve theta -> r(theta) e(theta) seen from
// `center`, fitted to the given order on 512 rays.
FourierRadius reframe(const FourierRadius& r, double cx, double cy, int order) {
  constexpr int kRays = 512;
  std::vector<double> rho(kRays);
  for (int j = 0; j < kRays; ++j) {
    const double th = 2.0 * kPi * j / kRays;
    const double ex = std::cos(th), ey = std::sin(th);
    // Solve cross(r(phi) e(phi) - c, e(theta)) = 0 for phi by Newton.
    double phi = th;
    for (int it = 0; it < 50; ++it) {
      const double rv = r(phi), dr = r.derivative(phi);
      const double px = rv * std::cos(phi) - cx, py = rv * std::sin(phi) - cy;
      const double f = px * ey - py * ex;
      const double dpx = dr * std::cos(phi) - rv * std::sin(phi);
      const double dpy = dr * std::sin(phi) + rv * std::cos(phi);
      const double df = dpx * ey - dpy * ex;
      if (df == 0.0) break;
      const double delta = f / df;
      phi -= delta;
      if (std::abs(delta) < 1e-15) break;
    }
    const double px = r(phi) * std::cos(phi) - cx, py = r(phi) * std::sin(phi) - cy;
    if (px * ex + py * ey <= 0.0) throw GeometryError("reframe: curve is not star-shaped about the new center");
    rho[j] = std::hypot(px, py);
  }
  double a0 = 0.0;
  std::vector<double> cs(order, 0.0), sn(order, 0.0);
  for (int j = 0; j < kRays; ++j) {
    const double th = 2.0 * kPi * j / kRays;
    a0 += rho[j];
    for (int k = 1; k <= order; ++k) {
      cs[k - 1] += rho[j] * std::cos(k * th);
      sn[k - 1] += rho[j] * std::sin(k * th);
    }
  }
  for (int k = 0; k < order; ++k) {
    cs[k] *= 2.0 / kRays;
    sn[k] *= 2.0 / kRays;
  }
  return FourierRadius(a0 / kRays, std::move(cs), std::move(sn));
}

class Descent {
 public:
  Descent(const DissipationLaw& law, Mode mode, const OptimizeOptions& opts)
      : law_(law), mode_(mode), opts_(opts), m_(opts.fourier_order), width_(2 * m_ + 1) {}

  std::vector<double> pack(const StarPair& pair) const {
    std::vector<double> x = pair.inner().with_order(m_).coefficients();
    const std::vector<double> o = pair.outer().with_order(m_).coefficients();
    x.insert(x.end(), o.begin(), o.end());
    return x;
  }

  FourierRadius inner_of(const std::vector<double>& x) const {
    return FourierRadius::from_coefficients(std::span(x).subspan(0, width_));
  }
  FourierRadius outer_of(const std::vector<double>& x) const {
    return FourierRadius::from_coefficients(std::span(x).subspan(width_, width_));
  }

  // Feasible point nearest in the scaling sense, or nothing if the gap or
  // positivity conditions fail after projection.
  std::optional<std::vector<double>> project(const std::vector<double>& x) const {
    const FourierRadius raw_inner = inner_of(x);
    if (!(area(raw_inner) > 0.0) || !(raw_inner.a0() > 0.0)) return std::nullopt;
    const FourierRadius inner = project_inner_volume(raw_inner);
    FourierRadius outer = outer_of(x);
    if (mode_.constrained) outer = shrink_outer_to_area(inner, outer, mode_.M);
    auto pair = StarPair::try_make(inner, outer);
    if (!pair) return std::nullopt;
    return pack(*pair);
  }

  std::optional<Evaluation> evaluate(const std::vector<double>& x, const Evaluation* near,
                                     bool reuse_preconditioner) const {
    auto pair = StarPair::try_make(inner_of(x), outer_of(x));
    if (!pair) return std::nullopt;
    SolveOptions so;
    so.tol = opts_.solve_tol;
    if (near) {
      so.warm_start = &near->field;
      if (reuse_preconditioner) so.preconditioner = near->preconditioner;
    }
    StateSolution sol = solve_state(*pair, law_, opts_.mesh, so);
    const double penalty = mode_.constrained ? 0.0 : mode_.lambda * (area(pair->outer()) - kPi);
    const EnergyBreakdown e =
        EnergyBreakdown::make(sol.energy.dirichlet, sol.energy.boundary, penalty, sol.energy.trace);
    return Evaluation{std::move(*pair), e, std::move(sol.field), std::move(sol.preconditioner)};
  }

  std::vector<double> gradient(const std::vector<double>& x, const Evaluation& at) const {
    const double h = opts_.fd_step * x[0];
    std::vector<double> g(x.size(), 0.0);
    for (std::size_t k = 0; k < x.size(); ++k) {
      std::vector<double> xp = x, xm = x;
      xp[k] += h;
      xm[k] -= h;
      const auto ep = evaluate(xp, &at, true);
      const auto em = evaluate(xm, &at, true);
      if (ep && em) g[k] = (ep->energy.total - em->energy.total) / (2.0 * h);
      else if (ep) g[k] = (ep->energy.total - at.energy.total) / h;
      else if (em) g[k] = (at.energy.total - em->energy.total) / h;
    }
    return g;
  }

  // Gradient of area() with respect to [a0, a_k.., b_k..]: 2 pi a0, pi a_k, pi b_k.
  std::vector<double> area_normal(std::span<const double> c) const {
    std::vector<double> out(c.begin(), c.end());
    out[0] *= 2.0 * kPi;
    for (std::size_t k = 1; k < out.size(); ++k) out[k] *= kPi;
    return out;
  }

  // Steepest-descent direction tangent to |K| = pi and, when it is active,
  // to |Omega| = M.
  std::vector<double> descent_direction(const std::vector<double>& x, const std::vector<double>& g) const {
    std::vector<double> d(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) d[k] = -g[k];
    // Common translations are a symmetry; the inner k = 1 modes stay at zero.
    if (m_ >= 1) {
      d[1] = 0.0;
      d[1 + m_] = 0.0;
    }
    const auto remove_normal = [&](std::size_t offset, bool only_outward) {
      const std::vector<double> nrm = area_normal(std::span(x).subspan(offset, width_));
      double dn = 0.0, nn = 0.0;
      for (int k = 0; k < width_; ++k) {
        dn += d[offset + k] * nrm[k];
        nn += nrm[k] * nrm[k];
      }
      if (only_outward && dn <= 0.0) return;
      for (int k = 0; k < width_; ++k) d[offset + k] -= dn / nn * nrm[k];
    };
    remove_normal(0, false);
    if (mode_.constrained && area(outer_of(x)) >= mode_.M - opts_.volume_tolerance)
      remove_normal(width_, true);
    return d;
  }

  TraceRow row(int iter, const Evaluation& e, double step) const {
    return {iter,
            e.energy.total,
            e.energy.dirichlet,
            e.energy.boundary,
            e.energy.penalty,
            area(e.pair.inner()),
            area(e.pair.outer()),
            deficit(e.pair),
            step};
  }

  OptimizeResult run(const StarPair& init) const {
    if (init.order() > m_) throw std::invalid_argument("optimize: init order exceeds fourier_order");
    if (mode_.constrained && area(init.outer()) > mode_.M + opts_.volume_tolerance)
      throw std::invalid_argument("optimize: initial outer area exceeds M");
    const auto x0 = project(pack(center_on_inner(init.inner().with_order(m_), init.outer().with_order(m_))));
    if (!x0) throw std::invalid_argument("optimize: infeasible initial pair after volume projection");

    std::vector<double> x = *x0;
    Evaluation cur = *evaluate(x, nullptr, false);
    std::vector<TraceRow> trace{row(0, cur, 0.0)};
    std::vector<double> g = gradient(x, cur);
    double step = opts_.initial_step;
    int stagnant = 0;
    int iter = 0;
    StopReason reason = StopReason::max_iters;
    bool collapsed = cur.pair.gap() <= 2.0 * kGapMin;

    while (!collapsed) {
      if (iter >= opts_.max_outer_iters) break;
      const std::vector<double> dir = descent_direction(x, g);
      double dir_norm = 0.0;
      for (double v : dir) dir_norm += v * v;
      if (std::sqrt(dir_norm) < opts_.gradient_tol) {
        reason = StopReason::gradient;
        break;
      }
      std::optional<Evaluation> next;
      std::vector<double> xt;
      double s = step;
      for (; s >= opts_.min_step; s *= opts_.backtrack) {
        std::vector<double> y(x.size());
        for (std::size_t k = 0; k < x.size(); ++k) y[k] = x[k] + s * dir[k];
        const auto py = project(y);
        if (!py) continue;
        double decrease = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) decrease += g[k] * ((*py)[k] - x[k]);
        auto trial = evaluate(*py, &cur, true);
        if (!trial) continue;
        if (trial->energy.total < cur.energy.total &&
            trial->energy.total <= cur.energy.total + kArmijo * decrease) {
          next = std::move(trial);
          xt = *py;
          break;
        }
      }
      if (!next) {
        reason = StopReason::step;
        break;
      }
      ++iter;
      // Refactor the preconditioner at the accepted geometry.
      Evaluation accepted = *evaluate(xt, &*next, false);
      const double rel = (cur.energy.total - accepted.energy.total) / std::abs(cur.energy.total);
      stagnant = rel < opts_.energy_tol ? stagnant + 1 : 0;

      std::vector<double> g_new = gradient(xt, accepted);
      double sy = 0.0, ss = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k) {
        const double dx = xt[k] - x[k];
        sy += dx * (g_new[k] - g[k]);
        ss += dx * dx;
      }
      step = sy > 0.0 ? std::clamp(ss / sy, opts_.min_step, 1e3) : std::min(2.0 * s, 1e3);

      x = std::move(xt);
      g = std::move(g_new);
      cur = std::move(accepted);
      trace.push_back(row(iter, cur, s));
      if (cur.pair.gap() <= 2.0 * kGapMin) collapsed = true;
      if (stagnant >= kStagnationRun) {
        reason = StopReason::stagnation;
        break;
      }
    }
    if (collapsed) reason = StopReason::collapsed;

    EnergyBreakdown energy = cur.energy;
    if (collapsed) {
      // Omega = K: no annulus, boundary term Theta(1) Per(B_1), zero penalty.
      const double touching = eval(law_, 1.0) * 2.0 * kPi;
      if (touching < energy.total) energy = EnergyBreakdown::make(0.0, touching, 0.0, 1.0);
    }
    return {cur.pair, energy, deficit(cur.pair), collapsed, iter, reason, std::move(trace)};
  }

 private:
  const DissipationLaw& law_;
  Mode mode_;
  const OptimizeOptions& opts_;
  int m_;
  int width_;
};

}  // namespace

void OptimizeOptions::validate() const {
  if (fourier_order < 0 || fourier_order > kMaxFourierOrder)
    throw std::invalid_argument("optimize: fourier_order must be in [0, 16]");
  if (!(initial_step > 0.0) || !(backtrack > 0.0 && backtrack < 1.0) || !(min_step > 0.0) ||
      !(fd_step > 0.0) || max_outer_iters < 1 || !(volume_tolerance > 0.0) ||
      !(gradient_tol > 0.0) || !(energy_tol > 0.0) || !(solve_tol > 0.0))
    throw std::invalid_argument("optimize: options must be positive (backtrack in (0, 1))");
  mesh.validate();
}

std::string_view stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::gradient:
      return "gradient";
    case StopReason::step:
      return "step";
    case StopReason::stagnation:
      return "stagnation";
    case StopReason::collapsed:
      return "collapsed";
    case StopReason::max_iters:
      return "max_iters";
  }
  return "unknown";
}

StarPair center_on_inner(const FourierRadius& inner, const FourierRadius& outer) {
  FourierRadius in = inner, out = outer;
  const int m = std::max(in.order(), out.order());
  if (m < 1) return StarPair(in, out);
  double cx = 0.0, cy = 0.0;
  for (int it = 0; it < 20; ++it) {
    const double sx = in.with_order(1).cos_coeff(1), sy = in.with_order(1).sin_coeff(1);
    if (std::hypot(sx, sy) < 1e-13 * in.a0()) break;
    cx += sx;
    cy += sy;
    in = reframe(inner, cx, cy, m);
    out = reframe(outer, cx, cy, m);
  }
  return StarPair(in, out);
}

double deficit(const StarPair& pair) {
  return std::max(pair.inner().asymmetry(), pair.outer().asymmetry());
}

FourierRadius shrink_outer_to_area(const FourierRadius& inner, const FourierRadius& outer, double M) {
  const double a1 = area(outer);
  if (a1 <= M) return outer;
  const int m = std::max(inner.order(), outer.order());
  const FourierRadius in = inner.with_order(m);
  const FourierRadius out = outer.with_order(m);
  std::vector<double> diff = out.coefficients();
  const std::vector<double> ci = in.coefficients();
  for (std::size_t k = 0; k < diff.size(); ++k) diff[k] -= ci[k];
  // area(in + tau D) = a0 + b tau + c tau^2 (exact for the trapezoid rule).
  const double a0 = area(in);
  const double c = area(FourierRadius::from_coefficients(diff));
  const double b = a1 - a0 - c;
  if (a0 >= M) throw GeometryError("shrink_outer_to_area: inner area already exceeds M");
  double tau;
  if (c <= 0.0) {
    tau = (M - a0) / b;
  } else {
    const double disc = b * b + 4.0 * c * (M - a0);
    tau = (-b + std::sqrt(disc)) / (2.0 * c);
  }
  tau = std::clamp(tau, 0.0, 1.0);
  std::vector<double> coeffs = ci;
  for (std::size_t k = 0; k < coeffs.size(); ++k) coeffs[k] += tau * diff[k];
  return FourierRadius::from_coefficients(coeffs);
}

OptimizeResult optimize_constrained(const DissipationLaw& law, double M, const StarPair& init,
                                    const OptimizeOptions& opts) {
  opts.validate();
  if (!(M > kPi) || !std::isfinite(M)) throw std::invalid_argument("optimize_constrained: need M > pi");
  return Descent(law, Mode{true, M, 0.0}, opts).run(init);
}

OptimizeResult optimize_penalized(const DissipationLaw& law, double lambda, const StarPair& init,
                                  const OptimizeOptions& opts) {
  opts.validate();
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("optimize_penalized: lambda must be positive");
  return Descent(law, Mode{false, 0.0, lambda}, opts).run(init);
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace) {
  out << "iter,energy,dirichlet,boundary,penalty,inner_area,outer_area,deficit,step\n";
  out << std::setprecision(17);
  for (const TraceRow& r : trace)
    out << r.iter << ',' << r.energy << ',' << r.dirichlet << ',' << r.boundary << ',' << r.penalty
        << ',' << r.inner_area << ',' << r.outer_area << ',' << r.deficit << ',' << r.step << '\n';
}

}  // namespace thermoshield
