#include "thermoshield/verification.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "thermoshield/errors.hpp"
#include "thermoshield/geometry.hpp"
#include "thermoshield/radial_engine.hpp"

namespace thermoshield {

namespace {

constexpr double kPi = std::numbers::pi;

struct Triangulation {
  std::vector<std::array<double, 2>> pos;
  std::vector<std::array<int, 3>> tris;
};

Triangulation triangulate(const StarPair& pair, const Mesh& mesh) {
  Triangulation t{node_positions(pair, mesh), {}};
  t.tris.reserve(2 * static_cast<std::size_t>(mesh.n_s - 1) * mesh.n_theta);
  for (int i = 0; i + 1 < mesh.n_s; ++i) {
    for (int j = 0; j < mesh.n_theta; ++j) {
      const int jn = (j + 1) % mesh.n_theta;
      const int a = mesh.index(i, j), b = mesh.index(i + 1, j);
      const int c = mesh.index(i + 1, jn), d = mesh.index(i, jn);
      t.tris.push_back({a, b, c});
      t.tris.push_back({a, c, d});
    }
  }
  return t;
}

struct Vertex {
  double x, y, phi;
};

double signed_area(const Vertex& a, const Vertex& b, const Vertex& c) {
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

// int over a triangle of the square of a linear function with vertex values a, b, c.
double linear_square_integral(double area, double a, double b, double c) {
  return area / 6.0 * (a * a + b * b + c * c + a * b + b * c + c * a);
}

struct LevelStats {
  double interior_length = 0.0;
  double area = 0.0;
  double phi_line = 0.0;
  double phi_sq_area = 0.0;
  double phi_area = 0.0;
  double dirichlet = 0.0;
};

// Clips each triangle to {u > t}. Vertices with u == t count as outside, so a
// contour lying on a mesh edge is counted once, from the side where u > t.
LevelStats level_stats(const Triangulation& tri, std::span<const double> u, double t,
                       std::span<const double> phi) {
  LevelStats out;
  const bool has_phi = !phi.empty();
  for (const auto& T : tri.tris) {
    std::array<Vertex, 3> v;
    std::array<double, 3> f;
    for (int k = 0; k < 3; ++k) {
      const auto& p = tri.pos[T[k]];
      v[k] = {p[0], p[1], has_phi ? phi[T[k]] : 0.0};
      f[k] = u[T[k]] - t;
    }
    const int inside = (f[0] > 0.0) + (f[1] > 0.0) + (f[2] > 0.0);
    if (inside == 0) continue;
    const double full = std::abs(signed_area(v[0], v[1], v[2]));
    double grad_sq = 0.0;
    if (full > 0.0) {
      // Constant gradient of the linear interpolant.
      const double det = 2.0 * signed_area(v[0], v[1], v[2]);
      const double du1 = u[T[1]] - u[T[0]], du2 = u[T[2]] - u[T[0]];
      const double gx = (du1 * (v[2].y - v[0].y) - du2 * (v[1].y - v[0].y)) / det;
      const double gy = (du2 * (v[1].x - v[0].x) - du1 * (v[2].x - v[0].x)) / det;
      grad_sq = gx * gx + gy * gy;
    }
    if (inside == 3) {
      out.area += full;
      out.dirichlet += grad_sq * full;
      if (has_phi) {
        out.phi_sq_area += linear_square_integral(full, v[0].phi, v[1].phi, v[2].phi);
        out.phi_area += full * (v[0].phi + v[1].phi + v[2].phi) / 3.0;
      }
      continue;
    }
    std::array<Vertex, 4> poly;
    std::array<Vertex, 2> cut;
    int np = 0, nc = 0;
    for (int k = 0; k < 3; ++k) {
      const int l = (k + 1) % 3;
      if (f[k] > 0.0) poly[np++] = v[k];
      if ((f[k] > 0.0) != (f[l] > 0.0)) {
        const double s = f[k] / (f[k] - f[l]);
        const Vertex c{v[k].x + s * (v[l].x - v[k].x), v[k].y + s * (v[l].y - v[k].y),
                       v[k].phi + s * (v[l].phi - v[k].phi)};
        poly[np++] = c;
        cut[nc++] = c;
      }
    }
    for (int k = 1; k + 1 < np; ++k) {
      const double a = std::abs(signed_area(poly[0], poly[k], poly[k + 1]));
      out.area += a;
      out.dirichlet += grad_sq * a;
      if (has_phi) {
        out.phi_sq_area += linear_square_integral(a, poly[0].phi, poly[k].phi, poly[k + 1].phi);
        out.phi_area += a * (poly[0].phi + poly[k].phi + poly[k + 1].phi) / 3.0;
      }
    }
    if (nc == 2) {
      const double len = std::hypot(cut[1].x - cut[0].x, cut[1].y - cut[0].y);
      out.interior_length += len;
      out.phi_line += len * 0.5 * (cut[0].phi + cut[1].phi);
    }
  }
  return out;
}

std::vector<double> outer_weights(const StarPair& pair, const Mesh& mesh) {
  const AnnulusProblem problem(pair, mesh);
  const auto w = problem.boundary_weights();
  return {w.begin(), w.end()};
}

void require_same_mesh(const LevelDecomposition& dec, const ScalarField& other) {
  if (!(dec.field.mesh() == other.mesh())) throw MeshMismatch("level data: field lives on another mesh");
}

}  // namespace

LevelDecomposition decompose_at(const ScalarField& field, const StarPair& pair, std::vector<double> levels) {
  const Mesh& mesh = field.mesh();
  if (!(field.max() > field.min())) throw DegenerateField("decompose_levels: field is constant");
  const Triangulation tri = triangulate(pair, mesh);
  const std::vector<double> w = outer_weights(pair, mesh);
  const int outer = mesh.n_s - 1;

  LevelDecomposition dec{field, pair, std::move(levels), {}, {}, {}, 0.0, 1.0};
  for (int j = 0; j < mesh.n_theta; ++j) {
    dec.outer_length += w[j];
    dec.min_trace = std::min(dec.min_trace, field(outer, j));
  }
  for (double t : dec.levels) {
    if (!(t >= 0.0 && t < 1.0)) throw std::invalid_argument("decompose_levels: levels must lie in [0, 1)");
    const LevelStats s = level_stats(tri, field.values(), t, {});
    double ext = 0.0;
    for (int j = 0; j < mesh.n_theta; ++j)
      if (field(outer, j) > t) ext += w[j];
    dec.interior_length.push_back(s.interior_length);
    dec.exterior_length.push_back(ext);
    dec.area.push_back(s.area);
  }
  return dec;
}

LevelDecomposition decompose_levels(const ScalarField& field, const StarPair& pair, int n_levels) {
  if (n_levels < 1) throw std::invalid_argument("decompose_levels: n_levels must be >= 1");
  if (!(field.max() > field.min())) throw DegenerateField("decompose_levels: field is constant");
  const int outer = field.mesh().n_s - 1;
  double lo = 1.0;
  for (int j = 0; j < field.mesh().n_theta; ++j) lo = std::min(lo, field(outer, j));
  lo = std::max(lo, 0.0);
  std::vector<double> levels(n_levels);
  for (int k = 0; k < n_levels; ++k) levels[k] = lo + (1.0 - lo) * (k + 1) / (n_levels + 1);
  return decompose_at(field, pair, std::move(levels));
}

std::vector<double> level_integrals(const LevelDecomposition& dec, const ScalarField& density) {
  require_same_mesh(dec, density);
  const Triangulation tri = triangulate(dec.pair, dec.field.mesh());
  std::vector<double> out;
  out.reserve(dec.levels.size());
  for (double t : dec.levels) out.push_back(level_stats(tri, dec.field.values(), t, density.values()).phi_area);
  return out;
}

std::vector<double> h_function(const LevelDecomposition& dec, double beta, const ScalarField& phi) {
  require_same_mesh(dec, phi);
  const Triangulation tri = triangulate(dec.pair, dec.field.mesh());
  std::vector<double> H;
  H.reserve(dec.levels.size());
  for (std::size_t k = 0; k < dec.levels.size(); ++k) {
    const LevelStats s = level_stats(tri, dec.field.values(), dec.levels[k], phi.values());
    H.push_back(beta * dec.exterior_length[k] + s.phi_line - s.phi_sq_area);
  }
  return H;
}

ScalarField gradient_ratio_field(const ScalarField& field, const StarPair& pair) {
  const Mesh& mesh = field.mesh();
  const Triangulation tri = triangulate(pair, mesh);
  const auto u = field.values();
  std::vector<double> gx(mesh.nodes(), 0.0), gy(mesh.nodes(), 0.0), wsum(mesh.nodes(), 0.0);
  for (const auto& T : tri.tris) {
    const auto& p0 = tri.pos[T[0]];
    const auto& p1 = tri.pos[T[1]];
    const auto& p2 = tri.pos[T[2]];
    const double det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
    if (det == 0.0) continue;
    const double du1 = u[T[1]] - u[T[0]], du2 = u[T[2]] - u[T[0]];
    const double x = (du1 * (p2[1] - p0[1]) - du2 * (p1[1] - p0[1])) / det;
    const double y = (du2 * (p1[0] - p0[0]) - du1 * (p2[0] - p0[0])) / det;
    const double a = 0.5 * std::abs(det);
    for (int k = 0; k < 3; ++k) {
      gx[T[k]] += a * x;
      gy[T[k]] += a * y;
      wsum[T[k]] += a;
    }
  }
  std::vector<double> ratio(mesh.nodes(), 0.0);
  for (int p = 0; p < mesh.nodes(); ++p)
    if (u[p] > 0.0 && wsum[p] > 0.0) ratio[p] = std::hypot(gx[p], gy[p]) / wsum[p] / u[p];
  return ScalarField(mesh, std::move(ratio));
}

ScalarField dearrangement(const ScalarField& field, const StarPair& pair, const RadialReference& ref) {
  if (ref.n != 2) throw std::invalid_argument("dearrangement: planar fields need n = 2");
  if (!(ref.R > 1.0) || !std::isfinite(ref.R)) throw std::invalid_argument("dearrangement: need R > 1");
  if (!(ref.beta > 0.0)) throw std::invalid_argument("dearrangement: beta must be positive");
  const Mesh& mesh = field.mesh();
  const Triangulation tri = triangulate(pair, mesh);
  const double k_area = area(pair.inner());

  // Superlevel areas on a fine table of levels, interpolated linearly.
  constexpr int kTable = 2048;
  const double lo = std::max(field.min(), 0.0);
  const double hi = 1.0;
  std::vector<double> t(kTable + 1), a(kTable + 1);
  for (int k = 0; k <= kTable; ++k) {
    t[k] = lo + (hi - lo) * k / kTable;
    a[k] = k == kTable ? 0.0 : level_stats(tri, field.values(), t[k], {}).area;
  }
  std::vector<double> phi(mesh.nodes());
  const auto u = field.values();
  for (int p = 0; p < mesh.nodes(); ++p) {
    double A = 0.0;
    if (hi > lo) {
      const double pos = std::clamp((u[p] - lo) / (hi - lo) * kTable, 0.0, static_cast<double>(kTable));
      const int k = std::min(static_cast<int>(pos), kTable - 1);
      const double frac = pos - k;
      A = (1.0 - frac) * a[k] + frac * a[k + 1];
    }
    const double r = std::clamp(std::sqrt((k_area + A) / k_area), 1.0, ref.R);
    phi[p] = radial::convection_gradient_ratio(2, ref.beta, ref.R, r);
  }
  return ScalarField(mesh, std::move(phi));
}

HInequality h_inequality_check(const ScalarField& field, const StarPair& pair, double beta, int n_levels,
                               const ScalarField* phi) {
  if (!(beta > 0.0)) throw std::invalid_argument("h_inequality_check: beta must be positive");
  const double E = energy_of(field, pair, DissipationLaw::convection(beta)).total;
  LevelDecomposition dec = decompose_levels(field, pair, n_levels);
  const double t_min = std::max(dec.min_trace, 0.0);
  // The constant piece on [0, t_min] is represented by the level t = 0.
  std::vector<double> levels{0.0};
  levels.insert(levels.end(), dec.levels.begin(), dec.levels.end());
  dec = decompose_at(field, pair, levels);

  ScalarField own = phi ? *phi
                        : dearrangement(field, pair,
                                        {2, beta, std::sqrt(area(pair.outer()) / area(pair.inner()))});
  const std::vector<double> H = h_function(dec, beta, own);

  // Nodes t: 0, t_min, t_1..t_n, 1; H extended as a constant beyond t_n.
  std::vector<double> ts{0.0, t_min};
  std::vector<double> hs{H[0], H[0]};
  for (std::size_t k = 1; k < H.size(); ++k) {
    ts.push_back(dec.levels[k]);
    hs.push_back(H[k]);
  }
  ts.push_back(1.0);
  hs.push_back(H.back());
  double integral = 0.0;
  for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
    const double f0 = ts[k] * (hs[k] - E), f1 = ts[k + 1] * (hs[k + 1] - E);
    integral += 0.5 * (ts[k + 1] - ts[k]) * (f0 + f1);
  }
  const double min_H = *std::min_element(H.begin() + 1, H.end());
  const double tol = 0.02 * E;
  HInequality out{E, min_H, integral, integral <= tol && min_H <= E + tol, {}, {}};
  out.levels.assign(dec.levels.begin() + 1, dec.levels.end());
  out.H.assign(H.begin() + 1, H.end());
  return out;
}

namespace {

// Relaxed energy of u 1_{u>t} on the P1 triangulation. The boundary term is
// the trapezoid rule on the part of each outer chord where the P1 trace
// exceeds t, the same geometry that bounds the jump {u = t}.
class TruncationEvaluator {
 public:
  TruncationEvaluator(const ScalarField& field, const StarPair& pair, const DissipationLaw& law)
      : field_(field), law_(law), tri_(triangulate(pair, field.mesh())) {
    const Mesh& mesh = field.mesh();
    const int nt = mesh.n_theta;
    const int outer = mesh.n_s - 1;
    chord_.resize(nt);
    for (int j = 0; j < nt; ++j) {
      const auto& a = tri_.pos[mesh.index(outer, j)];
      const auto& b = tri_.pos[mesh.index(outer, (j + 1) % nt)];
      chord_[j] = std::hypot(b[0] - a[0], b[1] - a[1]);
    }
  }

  double operator()(double t) const {
    const LevelStats s = level_stats(tri_, field_.values(), t, {});
    const int outer = field_.mesh().n_s - 1;
    const int nt = field_.mesh().n_theta;
    const double cut = eval(law_, t);
    double boundary = 0.0;
    for (int j = 0; j < nt; ++j) {
      const double a = field_(outer, j), b = field_(outer, (j + 1) % nt);
      if (a > t && b > t) {
        boundary += 0.5 * chord_[j] * (eval(law_, a) + eval(law_, b));
      } else if (a > t || b > t) {
        const double in = a > t ? a : b, out = a > t ? b : a;
        const double frac = (in - t) / (in - out);
        boundary += 0.5 * frac * chord_[j] * (eval(law_, in) + cut);
      }
    }
    return s.dirichlet + boundary + cut * s.interior_length;
  }

 private:
  const ScalarField& field_;
  const DissipationLaw& law_;
  Triangulation tri_;
  std::vector<double> chord_;
};

}  // namespace

double truncated_energy(const ScalarField& field, const StarPair& pair, const DissipationLaw& law, double t) {
  if (!(t >= 0.0 && t < 1.0)) throw std::invalid_argument("truncated_energy: t must lie in [0, 1)");
  return TruncationEvaluator(field, pair, law)(t);
}

TruncationScan truncation_scan(const ScalarField& field, const StarPair& pair, const DissipationLaw& law,
                               int n_thresholds) {
  if (n_thresholds < 1) throw std::invalid_argument("truncation_scan: n_thresholds must be >= 1");
  const TruncationEvaluator energy_at(field, pair, law);

  std::vector<double> thresholds{0.0};
  for (int k = 1; k <= n_thresholds; ++k) thresholds.push_back(static_cast<double>(k) / (n_thresholds + 1));
  // Quantile thresholds sit between distinct nodal values, away from ties.
  std::vector<double> sorted(field.values().begin(), field.values().end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  if (sorted.size() >= 2) {
    for (int k = 0; k <= n_thresholds; ++k) {
      const std::size_t idx = static_cast<std::size_t>(k) * (sorted.size() - 2) / n_thresholds;
      const double q = 0.5 * (sorted[idx] + sorted[idx + 1]);
      if (q > 0.0 && q < 1.0) thresholds.push_back(q);
    }
  }

  TruncationScan out{energy_at(0.0), 0.0, 0.0, false};
  out.best_energy = out.baseline_energy;
  for (double t : thresholds) {
    const double e = energy_at(t);
    if (e < out.best_energy) {
      out.best_energy = e;
      out.best_t = t;
    }
  }
  out.improved = out.best_energy < out.baseline_energy - 1e-12;
  return out;
}

HighCutoff high_cutoff_bound(const DissipationLaw& law, int n, double M, double C_n) {
  if (n < 2) throw std::invalid_argument("high_cutoff_bound: n must be >= 2");
  const double omega = unit_ball_volume(n);
  if (!(M >= omega) || !std::isfinite(M)) throw std::invalid_argument("high_cutoff_bound: need M >= omega_n");
  if (!(C_n > 0.0)) throw std::invalid_argument("high_cutoff_bound: C_n must be positive");
  constexpr int kGrid = 4096;
  const double excess = std::pow(M - omega, 1.0 / (2.0 * n));
  const double theta1 = eval(law, 1.0);
  for (int k = kGrid; k >= 0; --k) {
    const double delta = static_cast<double>(k) / kGrid;
    double term = 0.0;
    if (excess > 0.0) {
      const double td = eval(law, delta);
      if (!(td > 0.0)) continue;
      term = C_n * theta1 / std::sqrt(td) * excess;
    }
    if (delta + term < 1.0) return {delta, true};
  }
  return {0.0, false};
}

void write_levels_csv(std::ostream& out, const LevelDecomposition& dec, const std::vector<double>& H) {
  if (H.size() != dec.levels.size()) throw std::invalid_argument("write_levels_csv: H size mismatch");
  out << "t,interior_length,exterior_length,area,H_value\n" << std::setprecision(17);
  for (std::size_t k = 0; k < dec.levels.size(); ++k)
    out << dec.levels[k] << ',' << dec.interior_length[k] << ',' << dec.exterior_length[k] << ','
        << dec.area[k] << ',' << H[k] << '\n';
}

}  // namespace thermoshield
