#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "dslad/verification/report.hpp"

namespace dslad::verification {

/// r = M^-1 (v2 - v1) + v1 with objective weights . r.
struct SolveProblem {
  Eigen::MatrixXd M;
  Eigen::VectorXd v1, v2;
  Eigen::VectorXd weights;
};

/// Random diagonally dominant problem of size n.
SolveProblem makeSolveProblem(int n, std::uint64_t seed);

/// 2-norm condition number from the singular values; infinity for singular matrices.
double conditionNumber(const Eigen::MatrixXd& M);

inline constexpr double kMaxCondition = 1e12;

/// Throws std::invalid_argument if M is not square, sizes mismatch, or cond(M) > kMaxCondition.
void checkProblem(const SolveProblem& p);

/// Passive objective over the flattened inputs (M column-major, v1, v2).
double solveObjective(const SolveProblem& p, const std::vector<double>& x);
std::vector<double> flattenInputs(const SolveProblem& p);

enum class SolvePath { Dsl, ScalarGaussJordan, ScalarElimination };

const char* solvePathName(SolvePath path);

struct SolveResult {
  Eigen::VectorXd r;
  std::vector<double> gradient;  // same layout as flattenInputs
  BenchReport report;
};

/**
 * Records r on a fresh tape, seeds r with the weights and reverses.
 *   Dsl:                one statement through the generated Matrix/Vector operations
 *   ScalarGaussJordan:  explicit inverse by Gauss-Jordan on [M | I], then a mat-vec
 *   ScalarElimination:  Gaussian elimination with back substitution
 * The gradient is checked against central differences at `tolerance`.
 */
SolveResult solveStudy(const SolveProblem& p, SolvePath path, double tolerance = 1e-6);

}  // namespace dslad::verification
