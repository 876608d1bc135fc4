#include "thermoshield/annulus_solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <Eigen/SparseCholesky>

#include "thermoshield/errors.hpp"

namespace thermoshield {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double theta_at(const Mesh& mesh, int j) { return kTwoPi * j / mesh.n_theta; }

void require_fourier_resolution(const Mesh& mesh, const StarPair& pair) {
  if (mesh.n_theta < 4 * pair.order() + 4)
    throw MeshMismatch("mesh: n_theta too small for the Fourier order of the pair");
}

}  // namespace

void Mesh::validate() const {
  if (n_s < 2 || n_theta < 8) throw std::invalid_argument("mesh: need n_s >= 2 and n_theta >= 8");
  if (static_cast<long long>(n_s) * n_theta > 4'000'000)
    throw std::invalid_argument("mesh: too many nodes");
}

ScalarField::ScalarField(Mesh mesh, std::vector<double> values)
    : mesh_(mesh), values_(std::move(values)) {
  mesh_.validate();
  if (static_cast<int>(values_.size()) != mesh_.nodes())
    throw MeshMismatch("field: value count does not match the mesh");
}

ScalarField ScalarField::constant(Mesh mesh, double value) {
  mesh.validate();
  return ScalarField(mesh, std::vector<double>(mesh.nodes(), value));
}

bool ScalarField::is_admissible() const {
  for (int j = 0; j < mesh_.n_theta; ++j)
    if ((*this)(0, j) != 1.0) return false;
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v >= 0.0 && v <= 1.0; });
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

AnnulusProblem::AnnulusProblem(const StarPair& pair, const Mesh& mesh) : mesh_(mesh) {
  mesh_.validate();
  require_fourier_resolution(mesh_, pair);
  const int ns = mesh_.n_s;
  const int nt = mesh_.n_theta;
  const double hs = 1.0 / (ns - 1);
  const double ht = kTwoPi / nt;

  // Per-node metric coefficients of the pulled-back integrand
  // a u_s^2 + 2 b u_s u_theta + c u_theta^2.
  std::vector<double> a(mesh_.nodes()), b(mesh_.nodes()), c(mesh_.nodes());
  weights_.resize(nt);
  for (int j = 0; j < nt; ++j) {
    const double th = theta_at(mesh_, j);
    const double rk = pair.inner()(th);
    const double dk = pair.inner().derivative(th);
    const double ro = pair.outer()(th);
    const double dro = pair.outer().derivative(th);
    const double g = ro - rk;
    const double dg = dro - dk;
    weights_[j] = std::hypot(ro, dro) * ht;
    for (int i = 0; i < ns; ++i) {
      const double s = i * hs;
      const double rho = rk + s * g;
      const double rho_t = dk + s * dg;
      const int p = mesh_.index(i, j);
      a[p] = (rho_t * rho_t + rho * rho) / (g * rho);
      b[p] = -rho_t / rho;
      c[p] = g / rho;
    }
  }

  // Vertex quadrature on each cell: every corner uses the two cell edges
  // through it, weighted by hs*ht/4. Entries are accumulated on the 9-point
  // stencil stencil[9 p + 3 (di+1) + (dj+1)], periodic in j.
  std::vector<double> stencil(9 * static_cast<std::size_t>(mesh_.nodes()), 0.0);
  struct Node {
    int i, j;
  };
  const auto wrap = [nt](int d) { return d > 1 ? d - nt : (d < -1 ? d + nt : d); };
  const auto add = [&](Node r, Node c, double v) {
    const int di = c.i - r.i;
    const int dj = wrap(c.j - r.j);
    stencil[9 * mesh_.index(r.i, r.j) + 3 * (di + 1) + dj + 1] += v;
  };
  // coef * (u[p1]-u[p0]) * (u[q1]-u[q0]), symmetrized.
  const auto add_product = [&](Node p0, Node p1, Node q0, Node q1, double coef) {
    const Node ps[2] = {p0, p1};
    const Node qs[2] = {q0, q1};
    const double sign[2] = {-1.0, 1.0};
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) {
        const double v = 0.5 * coef * sign[x] * sign[y];
        add(ps[x], qs[y], v);
        add(qs[y], ps[x], v);
      }
  };
  for (int i = 0; i + 1 < ns; ++i) {
    for (int j = 0; j < nt; ++j) {
      const int jn = (j + 1) % nt;
      for (int ci : {i, i + 1}) {
        for (int cj : {j, jn}) {
          const int p = mesh_.index(ci, cj);
          const double alpha = ht / (4.0 * hs) * a[p];
          const double cross = b[p] / 4.0;
          const double gamma = hs / (4.0 * ht) * c[p];
          const Node s0{i, cj}, s1{i + 1, cj}, t0{ci, j}, t1{ci, jn};
          add_product(s0, s1, s0, s1, alpha);
          add_product(s0, s1, t0, t1, 2.0 * cross);
          add_product(t0, t1, t0, t1, gamma);
        }
      }
    }
  }

  // Symmetric, so column p holds row p's stencil.
  matrix_.resize(mesh_.nodes(), mesh_.nodes());
  matrix_.reserve(Eigen::VectorXi::Constant(mesh_.nodes(), 9));
  for (int i = 0; i < ns; ++i) {
    for (int j = 0; j < nt; ++j) {
      const int p = mesh_.index(i, j);
      std::array<std::pair<int, double>, 9> col;
      int count = 0;
      for (int di = -1; di <= 1; ++di) {
        if (i + di < 0 || i + di >= ns) continue;
        for (int dj = -1; dj <= 1; ++dj)
          col[count++] = {mesh_.index(i + di, (j + dj + nt) % nt), stencil[9 * p + 3 * (di + 1) + dj + 1]};
      }
      std::sort(col.begin(), col.begin() + count);
      for (int k = 0; k < count; ++k) matrix_.insert(col[k].first, p) = col[k].second;
    }
  }
  matrix_.makeCompressed();
}

void AnnulusProblem::apply(std::span<const double> u, std::span<double> out) const {
  Eigen::Map<const Eigen::VectorXd> x(u.data(), static_cast<Eigen::Index>(u.size()));
  Eigen::Map<Eigen::VectorXd> y(out.data(), static_cast<Eigen::Index>(out.size()));
  y.noalias() = matrix_ * x;
}

double AnnulusProblem::dirichlet(std::span<const double> u) const {
  std::vector<double> au(u.size());
  apply(u, au);
  double sum = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) sum += u[k] * au[k];
  return std::max(sum, 0.0);
}

EnergyBreakdown AnnulusProblem::energy(std::span<const double> u, const DissipationLaw& law) const {
  if (static_cast<int>(u.size()) != mesh_.nodes())
    throw MeshMismatch("energy: value count does not match the mesh");
  const int outer = mesh_.n_s - 1;
  double boundary = 0.0, trace = 0.0, length = 0.0;
  for (int j = 0; j < mesh_.n_theta; ++j) {
    const double v = u[mesh_.index(outer, j)];
    boundary += weights_[j] * eval(law, v);
    trace += weights_[j] * v;
    length += weights_[j];
  }
  return EnergyBreakdown::make(dirichlet(u), boundary, 0.0, trace / length);
}

class StateFactorization {
 public:
  StateFactorization(const AnnulusProblem& problem, const DissipationLaw& law,
                     std::span<const double> u)
      : mesh_(problem.mesh()) {
    const int nt = mesh_.n_theta;
    const int nf = mesh_.nodes() - nt;
    const Eigen::SparseMatrix<double>& A = problem.matrix();
    Eigen::SparseMatrix<double> H = 2.0 * A.bottomRightCorner(nf, nf);
    const int outer = mesh_.n_s - 1;
    const auto w = problem.boundary_weights();
    for (int j = 0; j < nt; ++j) {
      const int f = mesh_.index(outer, j) - nt;
      H.coeffRef(f, f) += w[j] * curvature(law, u[mesh_.index(outer, j)]);
    }
    ldlt_.compute(H);
    if (ldlt_.info() != Eigen::Success) throw std::runtime_error("state preconditioner: factorization failed");
  }

  const Mesh& mesh() const { return mesh_; }

  // z = H^{-1} g over the free nodes (rows 1..n_s-1).
  void solve(const Eigen::VectorXd& g_free, Eigen::VectorXd& z_free) const { z_free = ldlt_.solve(g_free); }

 private:
  Mesh mesh_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
};

namespace {

struct Objective {
  const AnnulusProblem& problem;
  const DissipationLaw& law;

  double energy(const Eigen::VectorXd& u, const Eigen::VectorXd& au) const {
    double e = std::max(u.dot(au), 0.0);
    const auto w = problem.boundary_weights();
    const int nt = problem.mesh().n_theta;
    const Eigen::Index base = u.size() - nt;
    for (int j = 0; j < nt; ++j) e += w[j] * eval(law, u[base + j]);
    return e;
  }

  // Derivative of E(u + alpha d) in alpha.
  double slope_along(const Eigen::VectorXd& u, const Eigen::VectorXd& d, double dau, double dad,
                     double alpha) const {
    double s = 2.0 * dau + 2.0 * alpha * dad;
    const auto w = problem.boundary_weights();
    const int nt = problem.mesh().n_theta;
    const Eigen::Index base = u.size() - nt;
    for (int j = 0; j < nt; ++j) {
      const double dj = d[base + j];
      if (dj == 0.0) continue;
      const double v = std::clamp(u[base + j] + alpha * dj, 0.0, 1.0);
      s += w[j] * descent_slope(law, v) * dj;
    }
    return s;
  }
};

// Smallest alpha in (0, alpha_max] with phi'(alpha) >= 0, or alpha_max.
double line_minimize(const std::function<double(double)>& dphi, double guess, double alpha_max) {
  double lo = 0.0;
  double hi = std::min(guess > 0.0 && std::isfinite(guess) ? guess : 1.0, alpha_max);
  double d_hi = dphi(hi);
  if (std::abs(d_hi) <= 1e-14 * std::abs(dphi(0.0))) return hi;
  double d_lo = dphi(0.0);
  while (d_hi < 0.0) {
    if (hi >= alpha_max) return alpha_max;
    lo = hi;
    d_lo = d_hi;
    hi = std::min(2.0 * hi, alpha_max);
    d_hi = dphi(hi);
  }
  // Illinois regula falsi on the bracket [lo, hi] with d_lo < 0 <= d_hi.
  int side = 0;
  for (int it = 0; it < 100 && hi - lo > 1e-15 * hi; ++it) {
    double x = (lo * d_hi - hi * d_lo) / (d_hi - d_lo);
    if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
    const double dx = dphi(x);
    if (dx == 0.0) return x;
    if (dx < 0.0) {
      lo = x;
      d_lo = dx;
      if (side == -1) d_hi *= 0.5;
      side = -1;
    } else {
      hi = x;
      d_hi = dx;
      if (side == 1) d_lo *= 0.5;
      side = 1;
    }
  }
  return d_hi <= -d_lo ? hi : lo;
}

}  // namespace

StateSolution solve_state(const StarPair& pair, const DissipationLaw& law, const Mesh& mesh,
                          const SolveOptions& options) {
  if (!(options.tol > 0.0)) throw std::invalid_argument("solve_state: tol must be positive");
  if (options.max_iters < 1) throw std::invalid_argument("solve_state: max_iters must be >= 1");
  const AnnulusProblem problem(pair, mesh);
  const int nt = mesh.n_theta;
  const int n = mesh.nodes();

  Eigen::VectorXd u(n);
  if (options.warm_start) {
    if (!(options.warm_start->mesh() == mesh)) throw MeshMismatch("solve_state: warm start on a different mesh");
    const auto v = options.warm_start->values();
    for (int k = 0; k < n; ++k) u[k] = std::clamp(v[k], 0.0, 1.0);
  } else {
    for (int i = 0; i < mesh.n_s; ++i)
      for (int j = 0; j < nt; ++j) u[mesh.index(i, j)] = 1.0 - 0.5 * i / (mesh.n_s - 1);
  }
  for (int j = 0; j < nt; ++j) u[j] = 1.0;

  std::shared_ptr<const StateFactorization> precond = options.preconditioner;
  if (!precond || !(precond->mesh() == mesh))
    precond = std::make_shared<const StateFactorization>(problem, law,
                                                         std::span<const double>(u.data(), n));

  const Objective obj{problem, law};
  const auto w = problem.boundary_weights();
  const int nf = n - nt;
  Eigen::VectorXd au(n), ad(n), d = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd g_free(nf), z_free(nf), g_prev = Eigen::VectorXd::Zero(nf), z_prev = Eigen::VectorXd::Zero(nf);
  double rz_prev = 0.0;
  bool restart = true;

  const auto gradient = [&](Eigen::VectorXd& g) {
    au.noalias() = problem.matrix() * u;
    g = 2.0 * au.tail(nf);
    const Eigen::Index base = nf - nt;
    for (int j = 0; j < nt; ++j) g[base + j] += w[j] * descent_slope(law, u[n - nt + j]);
    // Freeze nodes pinned at a bound whose gradient points outward.
    for (int k = 0; k < nf; ++k) {
      const double v = u[nt + k];
      if ((v >= 1.0 && g[k] < 0.0) || (v <= 0.0 && g[k] > 0.0)) g[k] = 0.0;
    }
  };

  gradient(g_free);
  const double e_init = obj.energy(u, au);
  double e = e_init;
  for (int iter = 0; iter < options.max_iters; ++iter) {
    precond->solve(g_free, z_free);
    for (int k = 0; k < nf; ++k)
      if (g_free[k] == 0.0) z_free[k] = 0.0;
    double rz = g_free.dot(z_free);
    if (!(rz > 0.0)) {
      z_free = g_free;
      rz = g_free.squaredNorm();
      restart = true;
    }
    if (0.5 * rz <= options.tol * std::max(std::abs(e), 1e-8 * e_init) || rz == 0.0) {
      std::vector<double> values(u.data(), u.data() + n);
      ScalarField field(mesh, std::move(values));
      const EnergyBreakdown energy = energy_of(field, pair, law);
      return {std::move(field), energy, iter, precond};
    }

    double beta = 0.0;
    if (!restart) beta = std::max(0.0, z_free.dot(g_free - g_prev) / rz_prev);
    d.tail(nf) = -z_free + beta * d.tail(nf);
    // Never move a node out of the box.
    const auto clip = [&]() {
      for (int k = nt; k < n; ++k)
        if ((u[k] >= 1.0 && d[k] > 0.0) || (u[k] <= 0.0 && d[k] < 0.0)) d[k] = 0.0;
    };
    clip();
    if (!(d.tail(nf).dot(g_free) < 0.0)) {
      d.tail(nf) = -z_free;
      clip();
    }
    if (!(d.tail(nf).dot(g_free) < 0.0)) {
      d.tail(nf) = -g_free;
      clip();
    }

    double alpha_max = std::numeric_limits<double>::infinity();
    int blocking = -1;
    for (int k = nt; k < n; ++k) {
      double lim = std::numeric_limits<double>::infinity();
      if (d[k] > 0.0) lim = (1.0 - u[k]) / d[k];
      else if (d[k] < 0.0) lim = -u[k] / d[k];
      if (lim < alpha_max) {
        alpha_max = lim;
        blocking = k;
      }
    }

    ad.noalias() = problem.matrix() * d;
    const double dau = d.dot(au);
    const double dad = d.dot(ad);
    double curv = 2.0 * dad;
    for (int j = 0; j < nt; ++j) {
      const double dj = d[n - nt + j];
      curv += w[j] * curvature(law, u[n - nt + j]) * dj * dj;
    }
    const double dphi0 = obj.slope_along(u, d, dau, dad, 0.0);
    const double guess = curv > 0.0 ? -dphi0 / curv : 1.0;
    const auto dphi = [&](double a) { return obj.slope_along(u, d, dau, dad, a); };
    const double alpha = line_minimize(dphi, guess, alpha_max);

    u += alpha * d;
    for (int k = nt; k < n; ++k) u[k] = std::clamp(u[k], 0.0, 1.0);
    const bool hit_bound = alpha >= alpha_max && blocking >= 0;
    if (hit_bound) u[blocking] = d[blocking] > 0.0 ? 1.0 : 0.0;

    g_prev = g_free;
    rz_prev = rz;
    gradient(g_free);
    e = obj.energy(u, au);
    restart = hit_bound;
  }
  throw NonConvergence("solve_state: tolerance not met within max_iters", options.max_iters);
}

StateSolution solve_state(const StarPair& pair, const DissipationLaw& law, const Mesh& mesh,
                          double tol) {
  SolveOptions options;
  options.tol = tol;
  return solve_state(pair, law, mesh, options);
}

EnergyBreakdown energy_of(const ScalarField& field, const StarPair& pair, const DissipationLaw& law) {
  const AnnulusProblem problem(pair, field.mesh());
  return problem.energy(field.values(), law);
}

std::pair<ScalarField, StarPair> scale_field(const ScalarField& field, const StarPair& pair, double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("scale_field: t must be positive");
  StarPair scaled(pair.inner().scaled(t), pair.outer().scaled(t));
  return {field, std::move(scaled)};
}

std::vector<std::array<double, 2>> node_positions(const StarPair& pair, const Mesh& mesh) {
  mesh.validate();
  std::vector<std::array<double, 2>> pos(mesh.nodes());
  for (int j = 0; j < mesh.n_theta; ++j) {
    const double th = theta_at(mesh, j);
    const double rk = pair.inner()(th);
    const double g = pair.outer()(th) - rk;
    for (int i = 0; i < mesh.n_s; ++i) {
      const double rho = rk + g * i / (mesh.n_s - 1);
      pos[mesh.index(i, j)] = {rho * std::cos(th), rho * std::sin(th)};
    }
  }
  return pos;
}

void write_field_csv(std::ostream& out, const ScalarField& field, const StarPair& pair) {
  const Mesh& mesh = field.mesh();
  out << std::setprecision(17);
  out << mesh.n_s << ',' << mesh.n_theta << ',' << pair.order();
  for (double c : pair.inner().coefficients()) out << ',' << c;
  for (double c : pair.outer().coefficients()) out << ',' << c;
  out << '\n';
  for (int i = 0; i < mesh.n_s; ++i) {
    for (int j = 0; j < mesh.n_theta; ++j) out << (j ? "," : "") << field(i, j);
    out << '\n';
  }
}

namespace {

std::vector<double> parse_csv_line(const std::string& line) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(cell, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("field csv: malformed number '" + cell + "'");
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace

std::pair<ScalarField, StarPair> read_field_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("field csv: missing header");
  const std::vector<double> head = parse_csv_line(line);
  if (head.size() < 3) throw std::invalid_argument("field csv: short header");
  const int ns = static_cast<int>(head[0]);
  const int nt = static_cast<int>(head[1]);
  const int order = static_cast<int>(head[2]);
  const std::size_t ncoef = 1 + 2 * static_cast<std::size_t>(std::max(order, 0));
  if (order < 0 || head.size() != 3 + 2 * ncoef) throw std::invalid_argument("field csv: bad coefficient count");
  const Mesh mesh{ns, nt};
  mesh.validate();
  StarPair pair(FourierRadius::from_coefficients({head.begin() + 3, head.begin() + 3 + ncoef}),
                FourierRadius::from_coefficients({head.begin() + 3 + ncoef, head.end()}));
  std::vector<double> values;
  values.reserve(mesh.nodes());
  for (int i = 0; i < ns; ++i) {
    if (!std::getline(in, line)) throw MeshMismatch("field csv: missing rows");
    const std::vector<double> row = parse_csv_line(line);
    if (static_cast<int>(row.size()) != nt) throw MeshMismatch("field csv: row length mismatch");
    values.insert(values.end(), row.begin(), row.end());
  }
  return {ScalarField(mesh, std::move(values)), std::move(pair)};
}

}  // namespace thermoshield
