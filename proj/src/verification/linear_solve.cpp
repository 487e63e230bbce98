#include "dslad/verification/linear_solve.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <utility>

#include "la/dsl_registry.gen.hpp"

namespace dslad::verification {

using Eigen::MatrixXd;
using Eigen::VectorXd;

SolveProblem makeSolveProblem(int n, std::uint64_t seed) {
  if (n < 1) {
    throw std::invalid_argument("linear solve: n must be positive");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  auto draw = [&] { return dist(rng); };
  SolveProblem p;
  p.M = MatrixXd::NullaryExpr(n, n, draw) + static_cast<double>(n) * MatrixXd::Identity(n, n);
  p.v1 = VectorXd::NullaryExpr(n, draw);
  p.v2 = VectorXd::NullaryExpr(n, draw);
  p.weights = VectorXd::NullaryExpr(n, draw);
  return p;
}

double conditionNumber(const MatrixXd& M) {
  const Eigen::JacobiSVD<MatrixXd> svd(M);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(s.size() - 1) == 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return s(0) / s(s.size() - 1);
}

void checkProblem(const SolveProblem& p) {
  const auto n = p.M.rows();
  if (p.M.cols() != n || p.v1.size() != n || p.v2.size() != n || p.weights.size() != n) {
    throw std::invalid_argument("linear solve: size mismatch");
  }
  const double cond = conditionNumber(p.M);
  if (!(cond <= kMaxCondition)) {
    throw std::invalid_argument("linear solve: matrix is singular or too ill-conditioned (cond = " +
                                std::to_string(cond) + ")");
  }
}

std::vector<double> flattenInputs(const SolveProblem& p) {
  std::vector<double> x(p.M.data(), p.M.data() + p.M.size());
  x.insert(x.end(), p.v1.data(), p.v1.data() + p.v1.size());
  x.insert(x.end(), p.v2.data(), p.v2.data() + p.v2.size());
  return x;
}

double solveObjective(const SolveProblem& p, const std::vector<double>& x) {
  const auto n = p.M.rows();
  const MatrixXd M = Eigen::Map<const MatrixXd>(x.data(), n, n);
  const VectorXd v1 = Eigen::Map<const VectorXd>(x.data() + n * n, n);
  const VectorXd v2 = Eigen::Map<const VectorXd>(x.data() + n * n + n, n);
  const VectorXd r = M.partialPivLu().solve(VectorXd(v2 - v1)) + v1;
  return p.weights.dot(r);
}

const char* solvePathName(SolvePath path) {
  switch (path) {
    case SolvePath::Dsl:
      return "dsl";
    case SolvePath::ScalarGaussJordan:
      return "scalar-gauss-jordan";
    case SolvePath::ScalarElimination:
      return "scalar-elimination";
  }
  return "?";
}

namespace {

using Row = std::vector<ActiveDouble>;

void pivot(std::vector<Row>& a, int k) {
  const int n = static_cast<int>(a.size());
  int best = k;
  for (int i = k + 1; i < n; ++i) {
    if (std::abs(a[i][k].getValue()) > std::abs(a[best][k].getValue())) {
      best = i;
    }
  }
  std::swap(a[k], a[best]);
}

/// r = inv(M) d + v1 with inv(M) from Gauss-Jordan on [M | I].
std::vector<ActiveDouble> gaussJordan(std::vector<Row> a, const std::vector<ActiveDouble>& d,
                                      const std::vector<ActiveDouble>& v1) {
  const int n = static_cast<int>(a.size());
  for (int i = 0; i < n; ++i) {
    a[i].resize(2 * n);
    a[i][n + i] = 1.0;
  }
  for (int k = 0; k < n; ++k) {
    pivot(a, k);
    const ActiveDouble inv = 1.0 / a[k][k];
    for (int j = k; j < 2 * n; ++j) {
      a[k][j] = a[k][j] * inv;
    }
    for (int i = 0; i < n; ++i) {
      if (i == k) {
        continue;
      }
      const ActiveDouble f = a[i][k];
      for (int j = k; j < 2 * n; ++j) {
        a[i][j] = a[i][j] - f * a[k][j];
      }
    }
  }
  std::vector<ActiveDouble> r(n);
  for (int i = 0; i < n; ++i) {
    r[i] = v1[i];
    for (int j = 0; j < n; ++j) {
      r[i] = r[i] + a[i][n + j] * d[j];
    }
  }
  return r;
}

/// r = M^-1 d + v1 by elimination on [M | d] and back substitution.
std::vector<ActiveDouble> elimination(std::vector<Row> a, const std::vector<ActiveDouble>& d,
                                      const std::vector<ActiveDouble>& v1) {
  const int n = static_cast<int>(a.size());
  for (int i = 0; i < n; ++i) {
    a[i].push_back(d[i]);
  }
  for (int k = 0; k < n; ++k) {
    pivot(a, k);
    for (int i = k + 1; i < n; ++i) {
      const ActiveDouble f = a[i][k] / a[k][k];
      for (int j = k + 1; j <= n; ++j) {
        a[i][j] = a[i][j] - f * a[k][j];
      }
    }
  }
  std::vector<ActiveDouble> x(n);
  for (int i = n - 1; i >= 0; --i) {
    ActiveDouble s = a[i][n];
    for (int j = i + 1; j < n; ++j) {
      s = s - a[i][j] * x[j];
    }
    x[i] = s / a[i][i];
  }
  std::vector<ActiveDouble> r(n);
  for (int i = 0; i < n; ++i) {
    r[i] = x[i] + v1[i];
  }
  return r;
}

void recordScalar(const SolveProblem& p, SolvePath path, Tape<double>& tape, SolveResult& out) {
  const int n = static_cast<int>(p.M.rows());
  std::vector<Row> a(n, Row(n));
  std::vector<ActiveDouble> v1(n), v2(n);
  std::vector<Index> ids;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      a[i][j] = p.M(i, j);
      a[i][j].registerInput();
      ids.push_back(a[i][j].getIdentifier());
    }
  }
  for (int i = 0; i < n; ++i) {
    v1[i] = p.v1(i);
    v1[i].registerInput();
    ids.push_back(v1[i].getIdentifier());
  }
  for (int i = 0; i < n; ++i) {
    v2[i] = p.v2(i);
    v2[i].registerInput();
    ids.push_back(v2[i].getIdentifier());
  }

  Stopwatch record;
  tape.setActive();
  std::vector<ActiveDouble> d(n);
  for (int i = 0; i < n; ++i) {
    d[i] = v2[i] - v1[i];
  }
  auto r = path == SolvePath::ScalarGaussJordan ? gaussJordan(std::move(a), d, v1) : elimination(std::move(a), d, v1);
  tape.setPassive();
  out.report.recordSeconds = record.seconds();
  out.report.statements = tape.statementCount();
  out.report.memory = tape.memoryReport();

  out.r.resize(n);
  for (int i = 0; i < n; ++i) {
    out.r(i) = r[i].getValue();
    r[i].setGradient(p.weights(i));
  }
  Stopwatch reverse;
  tape.evaluateReverse();
  out.report.reverseSeconds = reverse.seconds();
  for (Index id : ids) {
    out.gradient.push_back(tape.getGradient(id));
  }
}

void recordDsl(const SolveProblem& p, Tape<double>& tape, SolveResult& out) {
  la::registerTypes(tape);
  la::ActiveMatrix<double> M(p.M);
  la::ActiveVector<double> v1(p.v1);
  la::ActiveVector<double> v2(p.v2);
  M.registerInput();
  v1.registerInput();
  v2.registerInput();

  Stopwatch record;
  tape.setActive();
  la::ActiveVector<double> r = la::add(M.solve(la::sub(v2, v1)), v1);
  tape.setPassive();
  out.report.recordSeconds = record.seconds();
  out.report.statements = tape.statementCount();
  out.report.memory = tape.memoryReport();

  out.r = r.getValue();
  r.setAdjoint(p.weights);
  Stopwatch reverse;
  tape.evaluateReverse();
  out.report.reverseSeconds = reverse.seconds();
  const MatrixXd Mb = M.getAdjoint();
  const VectorXd v1b = v1.getAdjoint();
  const VectorXd v2b = v2.getAdjoint();
  out.gradient.assign(Mb.data(), Mb.data() + Mb.size());
  out.gradient.insert(out.gradient.end(), v1b.data(), v1b.data() + v1b.size());
  out.gradient.insert(out.gradient.end(), v2b.data(), v2b.data() + v2b.size());
}

}  // namespace

SolveResult solveStudy(const SolveProblem& p, SolvePath path, double tolerance) {
  checkProblem(p);
  SolveResult out;
  {
    Tape<double> tape;
    Tape<double>::Scope scope(tape);
    if (path == SolvePath::Dsl) {
      recordDsl(p, tape, out);
    } else {
      recordScalar(p, path, tape, out);
    }
  }
  const auto x = flattenInputs(p);
  out.report.gradCheck = checkGradient([&](const std::vector<double>& y) { return solveObjective(p, y); }, x,
                                       out.gradient, tolerance);
  out.report.caseName = std::string("solve-") + solvePathName(path);
  out.report.config = {{"n", p.M.rows()}, {"path", solvePathName(path)}, {"precision", "double"}};
  out.report.extra = {{"tapeBytes", out.report.memory.streamBytes()}, {"condition", conditionNumber(p.M)}};
  return out;
}

}  // namespace dslad::verification
