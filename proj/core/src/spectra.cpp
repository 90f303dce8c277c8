#include "ioprobe/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <fstream>
#include <numeric>

#include "ioprobe/csv.hpp"
#include "ioprobe/error.hpp"

namespace ioprobe {

namespace {

SpectralSummary sorted_descending(const Eigen::VectorXd& values, const Eigen::MatrixXd& vectors,
                                  ProblemKind kind) {
  const auto n = values.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return values(a) > values(b); });
  SpectralSummary out;
  out.problem_kind = kind;
  out.eigenvalues.resize(n);
  if (vectors.size() > 0) out.eigenvectors.resize(vectors.rows(), n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.eigenvalues(k) = values(order[static_cast<std::size_t>(k)]);
    if (vectors.size() > 0) out.eigenvectors.col(k) = vectors.col(order[static_cast<std::size_t>(k)]);
  }
  return out;
}

void check_square_symmetric(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw DimensionError("eigensolver needs a square matrix");
  if (m.size() == 0) throw DimensionError("eigensolver needs a non-empty matrix");
}

double largest_eigenvalue(const Eigen::MatrixXd& m) {
  if (static_cast<std::size_t>(m.rows()) <= kJacobiLimit) return jacobi_eigen(m).eigenvalues(0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(m.rows() - 1);
}

}  // namespace

SpectralSummary jacobi_eigen(const Eigen::MatrixXd& m, double tol) {
  check_square_symmetric(m);
  const Eigen::Index n = m.rows();
  Eigen::MatrixXd a = 0.5 * (m + m.transpose());
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  const double scale = std::max(a.norm(), std::numeric_limits<double>::min());

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += 2.0 * a(p, q) * a(p, q);
    if (std::sqrt(off) <= tol * scale) break;

    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::hypot(t, 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  return sorted_descending(a.diagonal(), v, ProblemKind::symmetric);
}

SpectralSummary symmetric_eigen(const Eigen::MatrixXd& m, bool vectors) {
  check_square_symmetric(m);
  if (static_cast<std::size_t>(m.rows()) <= kJacobiLimit) {
    SpectralSummary out = jacobi_eigen(m);
    if (!vectors) out.eigenvectors.resize(0, 0);
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      m, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error("symmetric eigensolver did not converge");
  return sorted_descending(es.eigenvalues(), vectors ? es.eigenvectors() : Eigen::MatrixXd(),
                           ProblemKind::symmetric);
}

SpectralSummary generalized_eigen(const Eigen::MatrixXd& m, const Eigen::MatrixXd& n,
                                  bool vectors) {
  check_square_symmetric(m);
  if (n.rows() != m.rows() || n.cols() != m.cols()) {
    throw DimensionError("pencil matrices differ in size");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(n);
  if (llt.info() != Eigen::Success || llt.matrixL().toDenseMatrix().diagonal().minCoeff() <= 0.0) {
    throw SingularOperatorError("pencil denominator is not positive definite");
  }
  // N = L L^T, so M x = lambda N x  <=>  (L^{-1} M L^{-T}) y = lambda y with y = L^T x.
  Eigen::MatrixXd c = llt.matrixL().solve(m);
  c = llt.matrixL().solve(c.transpose()).transpose();
  c = 0.5 * (c + c.transpose());
  SpectralSummary out = symmetric_eigen(c, vectors);
  out.problem_kind = ProblemKind::generalized_pencil;
  if (vectors) out.eigenvectors = llt.matrixU().solve(out.eigenvectors);
  return out;
}

Eigen::MatrixXd dense_operator(const Plant& plant) {
  const auto m = static_cast<Eigen::Index>(plant.channels());
  const auto n = static_cast<Eigen::Index>(plant.horizon());
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(m * n, m * n);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const auto taps = plant.block(static_cast<std::size_t>(i), static_cast<std::size_t>(j)).taps();
      for (Eigen::Index k = 0; k < n; ++k) {
        const double gk = taps[static_cast<std::size_t>(k)];
        if (gk == 0.0) continue;
        for (Eigen::Index t = k; t < n; ++t) g(i * n + t, j * n + t - k) = gk;
      }
    }
  }
  return g;
}

DenseOperators materialize(const Plant& plant) {
  DenseOperators ops;
  ops.g = dense_operator(plant);
  ops.gram.noalias() = ops.g.transpose() * ops.g;
  ops.sym = ops.g + ops.g.transpose();
  return ops;
}

Eigen::VectorXd to_vector(const Signal& u) {
  return Eigen::Map<const Eigen::VectorXd>(u.data().data(), static_cast<Eigen::Index>(u.size()));
}

Signal to_signal(const Eigen::VectorXd& v, std::size_t channels) {
  return Signal(std::vector<double>(v.data(), v.data() + v.size()), channels);
}

Eigen::MatrixXd cone_matrix(const DenseOperators& ops, double c) {
  Eigen::MatrixXd a = ops.gram - c * ops.sym;
  a.diagonal().array() += c * c;
  return a;
}

GainTruth true_gain(const DenseOperators& ops, std::size_t channels) {
  const SpectralSummary es = symmetric_eigen(ops.gram);
  Eigen::VectorXd v = es.eigenvectors.col(0);
  Eigen::Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  if (v(arg) < 0.0) v = -v;
  v.normalize();
  return {std::sqrt(std::max(es.eigenvalues(0), 0.0)), to_signal(v, channels)};
}

GainTruth true_gain(const Plant& plant) { return true_gain(materialize(plant), plant.channels()); }

PassivityTruth true_passivity(const DenseOperators& ops) {
  const Eigen::MatrixXd half_sym = 0.5 * ops.sym;
  const SpectralSummary pencil = generalized_eigen(half_sym, ops.gram, false);
  const SpectralSummary sym = symmetric_eigen(half_sym, false);
  return {-pencil.eigenvalues(pencil.eigenvalues.size() - 1),
          sym.eigenvalues(sym.eigenvalues.size() - 1)};
}

PassivityTruth true_passivity(const Plant& plant) {
  if (plant.is_siso() && plant.block(0, 0)[0] == 0.0) {
    throw SingularOperatorError("g0 = 0: G^T G is singular");
  }
  return true_passivity(materialize(plant));
}

ConeTruth true_cone(const DenseOperators& ops) {
  const double gamma = std::sqrt(std::max(largest_eigenvalue(ops.gram), 0.0));
  if (gamma == 0.0) return {0.0, 0.0};
  auto f = [&](double c) { return largest_eigenvalue(cone_matrix(ops, c)); };

  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = -2.0 * gamma, b = 2.0 * gamma;
  double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > 1e-8) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  double c = f1 <= f2 ? x1 : x2;
  double fc = std::min(f1, f2);

  // One parabolic step: exact when the top eigenvalue stays simple near c*,
  // where lambda_1(A(c)) is locally quadratic. Near a flat minimum the
  // bracket only resolves c to ~sqrt(eps), so the vertex is taken unless it
  // is worse by more than eigenvalue rounding.
  const double h = 1e-4 * std::max(1.0, std::abs(c));
  const double fl = f(c - h), fr = f(c + h);
  const double curvature = fl - 2.0 * fc + fr;
  if (curvature > 0.0) {
    const double cp = c - 0.5 * h * (fr - fl) / curvature;
    const double fp = f(cp);
    const double noise = 64.0 * std::numeric_limits<double>::epsilon() *
                         (gamma + std::abs(cp)) * (gamma + std::abs(cp));
    if (std::abs(cp - c) <= h && fp <= fc + noise) {
      c = cp;
      fc = fp;
    }
  }
  return {c, std::sqrt(std::max(fc, 0.0))};
}

ConeTruth true_cone(const Plant& plant) { return true_cone(materialize(plant)); }

double pg_dominant_magnitude(const Plant& plant) {
  if (!plant.is_siso()) throw DimensionError("PG is defined for SISO plants");
  const Eigen::MatrixXd g = dense_operator(plant);
  const Eigen::MatrixXd pg = g.colwise().reverse();
  const SpectralSummary es = symmetric_eigen(0.5 * (pg + pg.transpose()), false);
  return std::max(std::abs(es.eigenvalues(0)), std::abs(es.eigenvalues(es.eigenvalues.size() - 1)));
}

namespace {

ConditioningReport make_report(double l, double big_l, double scale) {
  ConditioningReport r;
  r.concavity_l = std::max(l, 0.0);
  r.lipschitz_L = std::max(big_l, r.concavity_l);
  r.simple = r.concavity_l > kDegenerateGap * std::max(scale, 1e-300);
  if (r.simple) {
    const double q = (r.lipschitz_L - r.concavity_l) / (r.lipschitz_L + r.concavity_l);
    r.predicted_rate = q * q;
  }
  return r;
}

}  // namespace

ConditioningReport conditioning(const Plant& plant, PropertyProblem problem) {
  const DenseOperators ops = materialize(plant);
  Eigen::VectorXd ev;
  switch (problem) {
    case PropertyProblem::gain:
      ev = symmetric_eigen(ops.gram, false).eigenvalues;
      break;
    case PropertyProblem::passivity:
      ev = generalized_eigen(0.5 * ops.sym, ops.gram, false).eigenvalues;
      break;
    case PropertyProblem::cone:
      ev = symmetric_eigen(cone_matrix(ops, true_cone(ops).c_star), false).eigenvalues;
      break;
  }
  const Eigen::Index n = ev.size();
  const double big_l = ev(0) - ev(n - 1);
  const double scale = std::max(std::abs(ev(0)), std::abs(ev(n - 1)));
  if (n < 2) return make_report(0.0, 0.0, scale);
  // Passivity minimizes, so its local constant is the gap at the bottom.
  const double l = problem == PropertyProblem::passivity ? ev(n - 2) - ev(n - 1) : ev(0) - ev(1);
  return make_report(l, big_l, scale);
}

ConeDiagnostics cone_diagnostics(const Plant& plant) {
  const DenseOperators ops = materialize(plant);
  ConeDiagnostics d;
  d.truth = true_cone(ops);
  const double c = d.truth.c_star;
  const Eigen::MatrixXd a = cone_matrix(ops, c);
  const SpectralSummary es = symmetric_eigen(a);
  const Eigen::Index n = es.eigenvalues.size();
  const double lambda1 = es.eigenvalues(0);
  const Eigen::VectorXd u = es.eigenvectors.col(0).normalized();
  d.u_star = to_signal(u, plant.channels());
  d.gap = n > 1 ? lambda1 - es.eigenvalues(1) : 0.0;
  d.double_eigenvalue = n > 1 && d.gap <= 1e-6 * std::max(1.0, std::abs(lambda1));

  if (d.double_eigenvalue) {
    const Eigen::VectorXd w1 = es.eigenvectors.col(0).normalized();
    const Eigen::VectorXd w2 = es.eigenvectors.col(1).normalized();
    const double p = w1.dot(ops.sym * w1), q = w1.dot(ops.sym * w2), r = w2.dot(ops.sym * w2);
    // v(theta) = cos w1 + sin w2; v^T S v = (p+r)/2 + R cos(2 theta - phi).
    const double mid = 0.5 * (p + r), half = 0.5 * (p - r);
    const double radius = std::hypot(half, q);
    const double phi = std::atan2(q, half);
    const double ratio = radius > 0.0 ? std::clamp((2.0 * c - mid) / radius, -1.0, 1.0) : 0.0;
    const double theta = 0.5 * (phi + std::acos(ratio));
    const Eigen::VectorXd v1 = std::cos(theta) * w1 + std::sin(theta) * w2;
    const Eigen::VectorXd v2 = -std::sin(theta) * w1 + std::cos(theta) * w2;
    d.assumption1_value = v1.dot(ops.sym * v2);
  }

  const Eigen::VectorXd su = ops.sym * u;
  const Eigen::VectorXd s = -2.0 * (su - u.dot(su) * u);
  Eigen::MatrixXd h = 2.0 * a;
  h.diagonal().array() -= 2.0 * lambda1;
  Eigen::MatrixXd mixed = s * s.transpose() - 2.0 * h;
  const Eigen::MatrixXd proj =
      Eigen::MatrixXd::Identity(u.size(), u.size()) - u * u.transpose();
  mixed = proj * mixed * proj;
  const SpectralSummary ms = symmetric_eigen(0.5 * (mixed + mixed.transpose()), false);
  const double norm = std::max(std::abs(ms.eigenvalues(0)),
                               std::abs(ms.eigenvalues(ms.eigenvalues.size() - 1)));
  d.uzawa_step_bound = norm > 0.0 ? 1.0 / (2.0 * norm) : std::numeric_limits<double>::infinity();
  return d;
}

std::vector<GoldenValue> read_golden_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open golden file " + path.string());
  std::vector<GoldenValue> out;
  std::string line;
  bool header = true;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto f = split_csv_line(line);
    if (header) {
      header = false;
      if (f.size() == 4 && f[0] == "plant_id") continue;
    }
    if (f.size() != 4) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected 4 fields");
    }
    const auto value = parse_double(f[2]);
    const auto tol = parse_double(f[3]);
    if (!value || !tol) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": bad number");
    }
    out.push_back({f[0], f[1], *value, *tol});
  }
  return out;
}

void write_golden_csv(const std::filesystem::path& path, const std::vector<GoldenValue>& values) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "plant_id,property,value,tolerance\n";
  for (const auto& v : values) {
    out << v.plant_id << ',' << v.property << ',' << format_double(v.value) << ','
        << format_double(v.tolerance) << '\n';
  }
}

const GoldenValue& find_golden(const std::vector<GoldenValue>& values, const std::string& plant_id,
                               const std::string& property) {
  for (const auto& v : values) {
    if (v.plant_id == plant_id && v.property == property) return v;
  }
  throw ConfigError("no golden value for " + plant_id + "/" + property);
}

}  // namespace ioprobe
