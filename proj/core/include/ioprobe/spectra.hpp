#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ioprobe/lti.hpp"
#include "ioprobe/signal.hpp"

// White-box validation oracle. Reads the plant directly; estimators never use
// anything from this header.

namespace ioprobe {

enum class ProblemKind { symmetric, generalized_pencil };

struct SpectralSummary {
  Eigen::VectorXd eigenvalues;   ///< descending
  Eigen::MatrixXd eigenvectors;  ///< columns; empty when not requested
  ProblemKind problem_kind = ProblemKind::symmetric;
};

/// Largest size handed to the Jacobi solver by symmetric_eigen().
inline constexpr std::size_t kJacobiLimit = 64;

/// Cyclic Jacobi with threshold `tol` on the off-diagonal Frobenius mass
/// (relative to ||M||_F).
SpectralSummary jacobi_eigen(const Eigen::MatrixXd& m, double tol = 1e-12);

/// Dense symmetric eigensolve: Jacobi up to kJacobiLimit, Eigen's
/// tridiagonal QR above.
SpectralSummary symmetric_eigen(const Eigen::MatrixXd& m, bool vectors = true);

/// M v = lambda N v for symmetric M and positive definite N via N = R^T R and
/// the standard problem R^{-T} M R^{-1}. Eigenvectors are N-orthonormal.
/// Throws SingularOperatorError when N is not positive definite.
SpectralSummary generalized_eigen(const Eigen::MatrixXd& m, const Eigen::MatrixXd& n,
                                  bool vectors = true);

/// Dense operators of a plant, materialized once.
struct DenseOperators {
  Eigen::MatrixXd g;     ///< Gamma (mn x mn), channel-major like Signal
  Eigen::MatrixXd gram;  ///< Gamma^T Gamma
  Eigen::MatrixXd sym;   ///< Gamma + Gamma^T
};

Eigen::MatrixXd dense_operator(const Plant& plant);
DenseOperators materialize(const Plant& plant);

Eigen::VectorXd to_vector(const Signal& u);
Signal to_signal(const Eigen::VectorXd& v, std::size_t channels);

/// A(c) = G^T G - c (G + G^T) + c^2 I
Eigen::MatrixXd cone_matrix(const DenseOperators& ops, double c);

struct GainTruth {
  double gamma = 0.0;
  Signal u_star;
};

struct PassivityTruth {
  double s = 0.0;
  double nu = 0.0;
};

struct ConeTruth {
  double c_star = 0.0;
  double r_min = 0.0;
};

/// gamma = sqrt(lambda_1(G^T G)); u_star has its largest-magnitude entry positive.
GainTruth true_gain(const Plant& plant);
PassivityTruth true_passivity(const Plant& plant);
ConeTruth true_cone(const Plant& plant);

GainTruth true_gain(const DenseOperators& ops, std::size_t channels);
PassivityTruth true_passivity(const DenseOperators& ops);
ConeTruth true_cone(const DenseOperators& ops);

/// |lambda|_max of P G (SISO).
double pg_dominant_magnitude(const Plant& plant);

enum class PropertyProblem { gain, passivity, cone };

struct ConditioningReport {
  double concavity_l = 0.0;
  double lipschitz_L = 0.0;
  double predicted_rate = 1.0;
  bool simple = false;  ///< false when the extreme eigenvalue is degenerate
};

/// Relative gap below which an extreme eigenvalue counts as degenerate.
inline constexpr double kDegenerateGap = 1e-9;

ConditioningReport conditioning(const Plant& plant, PropertyProblem problem);

/// Saddle-point diagnostics at (c*, u*).
struct ConeDiagnostics {
  ConeTruth truth;
  double gap = 0.0;  ///< lambda_1 - lambda_2 of A(c*)
  bool double_eigenvalue = false;
  /// v1^T (G + G^T) v2 for the basis of the top eigenspace on which
  /// v^T (G + G^T) v = 2 c*; set only when the top eigenvalue is double.
  std::optional<double> assumption1_value;
  /// 1 / (2 ||S S^T - 2 H||) with S the mixed and H the u-u second derivative,
  /// restricted to the tangent space at u*.
  double uzawa_step_bound = 0.0;
  Signal u_star;
};

ConeDiagnostics cone_diagnostics(const Plant& plant);

struct GoldenValue {
  std::string plant_id;
  std::string property;
  double value = 0.0;
  double tolerance = 0.0;
};

std::vector<GoldenValue> read_golden_csv(const std::filesystem::path& path);
void write_golden_csv(const std::filesystem::path& path, const std::vector<GoldenValue>& values);
/// Throws ConfigError if absent.
const GoldenValue& find_golden(const std::vector<GoldenValue>& values, const std::string& plant_id,
                               const std::string& property);

}  // namespace ioprobe
