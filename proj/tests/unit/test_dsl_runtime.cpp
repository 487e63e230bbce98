#include <doctest.h>

#include <random>
#include <vector>

#include "la/dsl_registry.gen.hpp"
#include "dslad/simd/float4.hpp"
#include "dslad/verification/oracles.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;
using dslad::ActiveDouble;
using Tape = dslad::Tape<double>;
using Mat = la::ActiveMatrix<double>;
using Vec = la::ActiveVector<double>;
namespace v = dslad::verification;

namespace {

std::mt19937_64& rng() {
  static std::mt19937_64 r(1234);
  return r;
}

MatrixXd randomMatrix(int n, int m) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  MatrixXd out(n, m);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < n; ++i) {
      out(i, j) = d(rng());
    }
  }
  return out;
}

MatrixXd wellConditioned(int n) { return randomMatrix(n, n) + 4.0 * MatrixXd::Identity(n, n); }

std::vector<double> flatten(const std::vector<MatrixXd>& parts) {
  std::vector<double> out;
  for (const auto& p : parts) {
    out.insert(out.end(), p.data(), p.data() + p.size());
  }
  return out;
}

std::vector<MatrixXd> unflatten(const std::vector<double>& x, const std::vector<MatrixXd>& shapes) {
  std::vector<MatrixXd> out;
  std::size_t k = 0;
  for (const auto& s : shapes) {
    MatrixXd m(s.rows(), s.cols());
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      m.data()[i] = x[k++];
    }
    out.push_back(m);
  }
  return out;
}

struct Fixture {
  Tape tape;
  Tape::Scope scope{tape};
  Fixture() { la::registerTypes(tape); }
};

}  // namespace

TEST_CASE("each registered type has its own index manager") {
  Fixture f;
  Mat a(MatrixXd::Identity(2, 2));
  Mat b(MatrixXd::Identity(2, 2));
  a.registerInput();
  b.registerInput();
  Vec x(VectorXd::Ones(2));
  x.registerInput();
  CHECK(a.getIdentifier() == 1);
  CHECK(b.getIdentifier() == 2);
  CHECK(x.getIdentifier() == 1);
  CHECK(f.tape.storage<MatrixXd>().indices().highWaterMark() == 2);
  CHECK(f.tape.storage<VectorXd>().indices().highWaterMark() == 1);
  CHECK(f.tape.indexManager().highWaterMark() == 0);
}

TEST_CASE("type registration errors") {
  Tape tape;
  tape.registerType<MatrixXd>(3);
  CHECK_THROWS_AS(tape.registerType<VectorXd>(3), std::invalid_argument);
  CHECK_THROWS_AS(tape.registerType<MatrixXd>(4), std::invalid_argument);
  CHECK_THROWS_AS(tape.registerType<VectorXd>(0), std::invalid_argument);
  CHECK(tape.hasType<MatrixXd>());
  CHECK(!tape.hasType<VectorXd>());
  CHECK_THROWS_AS(tape.storage<VectorXd>(), std::logic_error);
}

TEST_CASE("interleaved acquires across three types match per-type counts") {
  Tape tape;
  tape.registerType<MatrixXd>(1);
  tape.registerType<VectorXd>(2);
  tape.registerType<dslad::simd::Float4>(3);
  std::size_t counts[3] = {0, 0, 0};
  std::vector<std::pair<int, dslad::Index>> live;
  std::uniform_int_distribution<int> pick(0, 2);
  for (int event = 0; event < 3000; ++event) {
    const int t = pick(rng());
    if (live.empty() || rng()() % 3 != 0) {
      dslad::Index id = t == 0 ? tape.acquireTyped<MatrixXd>()
                        : t == 1 ? tape.acquireTyped<VectorXd>()
                                 : tape.acquireTyped<dslad::simd::Float4>();
      live.emplace_back(t, id);
      ++counts[t];
    } else {
      const auto [type, id] = live.back();
      live.pop_back();
      if (type == 0) {
        tape.releaseTyped<MatrixXd>(id);
      } else if (type == 1) {
        tape.releaseTyped<VectorXd>(id);
      } else {
        tape.releaseTyped<dslad::simd::Float4>(id);
      }
    }
    std::size_t liveCounts[3] = {0, 0, 0};
    for (const auto& l : live) {
      ++liveCounts[l.first];
    }
    REQUIRE(tape.storage<MatrixXd>().indices().liveCount() == liveCounts[0]);
    REQUIRE(tape.storage<VectorXd>().indices().liveCount() == liveCounts[1]);
    REQUIRE(tape.storage<dslad::simd::Float4>().indices().liveCount() == liveCounts[2]);
  }
  CHECK(tape.storage<MatrixXd>().indices().highWaterMark() <= counts[0]);
  CHECK(tape.indexManager().highWaterMark() == 0);
}

TEST_CASE("codec round trips are bit exact") {
  for (int trial = 0; trial < 20; ++trial) {
    const MatrixXd m = randomMatrix(1 + trial % 5, 1 + trial % 3);
    dslad::ByteStream s;
    dslad::ConstantCodec<MatrixXd>::push(s, m);
    const VectorXd x = randomMatrix(1 + trial, 1);
    dslad::ConstantCodec<VectorXd>::push(s, x);
    const dslad::simd::Float4 p(1.5f * trial, -2.0f, 3.25f, 0.1f);
    dslad::ConstantCodec<dslad::simd::Float4>::push(s, p);
    CHECK(dslad::ConstantCodec<dslad::simd::Float4>::pop(s, "t") == p);
    const VectorXd x2 = dslad::ConstantCodec<VectorXd>::pop(s, "t");
    const MatrixXd m2 = dslad::ConstantCodec<MatrixXd>::pop(s, "t");
    CHECK(x2.size() == x.size());
    CHECK(std::memcmp(x2.data(), x.data(), sizeof(double) * x.size()) == 0);
    CHECK(m2.rows() == m.rows());
    CHECK(m2.cols() == m.cols());
    CHECK(std::memcmp(m2.data(), m.data(), sizeof(double) * m.size()) == 0);
    CHECK(s.usedBytes() == 0);
  }
}

TEST_CASE("aligned storage for 16-byte packs") {
  Tape tape;
  tape.registerType<dslad::simd::Float4>(1);
  auto& storage = tape.storage<dslad::simd::Float4>();
  for (int i = 0; i < 9; ++i) {
    const auto id = storage.acquire();
    CHECK(reinterpret_cast<std::uintptr_t>(&storage.primal(id)) % 16 == 0);
    CHECK(reinterpret_cast<std::uintptr_t>(&storage.adjoint(id)) % 16 == 0);
  }
}

TEST_CASE("adjoint accessors") {
  Fixture f;
  Vec p(VectorXd::Ones(3));
  CHECK(p.getAdjoint() == VectorXd::Zero(3));
  CHECK_THROWS_AS(p.setAdjoint(VectorXd::Ones(3)), std::invalid_argument);
  Vec x(VectorXd::Ones(3));
  x.registerInput();
  CHECK(x.getAdjoint() == VectorXd::Zero(3));
  x.setAdjoint(VectorXd::Constant(3, 2.0));
  CHECK(x.getAdjoint() == VectorXd::Constant(3, 2.0));
}

TEST_CASE("mult records one statement and reverses to the dense adjoints") {
  Fixture f;
  const MatrixXd M = randomMatrix(4, 3);
  const VectorXd x = randomMatrix(3, 1);
  const VectorXd seed = randomMatrix(4, 1);
  Mat m(M);
  Vec v(x);
  m.registerInput();
  v.registerInput();
  f.tape.setActive();
  Vec w = la::mult(m, v);
  f.tape.setPassive();
  CHECK(f.tape.statementCount() == 1);
  CHECK((w.getValue() - M * x).norm() == 0.0);
  w.setAdjoint(seed);
  f.tape.evaluateReverse();
  CHECK((m.getAdjoint() - seed * x.transpose()).norm() <= 1e-14);
  CHECK((v.getAdjoint() - M.transpose() * seed).norm() <= 1e-14);
}

TEST_CASE("zero seed leaves adjoints untouched") {
  Fixture f;
  Mat m(wellConditioned(3));
  Vec v(VectorXd::Ones(3));
  m.registerInput();
  v.registerInput();
  f.tape.setActive();
  Vec w = la::mult(m, v);
  f.tape.setPassive();
  w.setAdjoint(VectorXd::Zero(3));
  f.tape.evaluateReverse();
  CHECK(m.getAdjoint().norm() == 0.0);
  CHECK(v.getAdjoint().norm() == 0.0);
}

TEST_CASE("one statement for w = (1 - D + A).solve(c - b)") {
  Fixture f;
  const int n = 3;
  Mat A(wellConditioned(n));
  Mat D(randomMatrix(n, n) * 0.1);
  Vec b(VectorXd(randomMatrix(n, 1)));
  Vec c(VectorXd(randomMatrix(n, 1)));
  A.registerInput();
  D.registerInput();
  b.registerInput();
  c.registerInput();
  Vec w(VectorXd::Zero(n));
  w.registerInput();
  f.tape.setActive();
  w = la::add(la::sub(1.0, D), A).solve(la::sub(c, b));
  f.tape.setPassive();

  const auto report = f.tape.memoryReport();
  CHECK(report.statements == 1);
  CHECK(report.rhsIds == 4);
  CHECK(report.constants == 1);
  CHECK(f.tape.recordedArgumentCounts() == std::vector<std::size_t>{4});
  const auto args = f.tape.recordedArguments();
  const auto mTag = f.tape.tagOf<MatrixXd>();
  const auto vTag = f.tape.tagOf<VectorXd>();
  REQUIRE(args.size() == 4);
  CHECK(args[0] == dslad::TaggedIndex::make(mTag, D.getIdentifier()));
  CHECK(args[1] == dslad::TaggedIndex::make(mTag, A.getIdentifier()));
  CHECK(args[2] == dslad::TaggedIndex::make(vTag, c.getIdentifier()));
  CHECK(args[3] == dslad::TaggedIndex::make(vTag, b.getIdentifier()));
  CHECK(f.tape.recordedConstantBytes() == dslad::ConstantCodec<double>::toBytes(1.0));
  const auto lhs = f.tape.recordedLhs();
  CHECK(lhs[0] == dslad::TaggedIndex::make(vTag, w.getIdentifier()));
  CHECK(f.tape.recordedOldDataBytes() == dslad::ConstantCodec<VectorXd>::toBytes(VectorXd::Zero(n)));

  const MatrixXd K = MatrixXd::Constant(n, n, 1.0) - D.getValue() + A.getValue();
  CHECK((w.getValue() - K.partialPivLu().solve(c.getValue() - b.getValue())).norm() <= 1e-12);
  f.tape.evaluateReverse();
  CHECK(f.tape.storage<VectorXd>().primal(w.getIdentifier()) == VectorXd::Zero(n));
}

TEST_CASE("a plain passive D folds into the constant stream") {
  Fixture f;
  const int n = 3;
  Mat A(wellConditioned(n));
  const MatrixXd D = randomMatrix(n, n) * 0.1;
  Vec b(VectorXd(randomMatrix(n, 1)));
  Vec c(VectorXd(randomMatrix(n, 1)));
  A.registerInput();
  b.registerInput();
  c.registerInput();
  f.tape.setActive();
  Vec w = la::add(la::sub(1.0, D), A).solve(la::sub(c, b));
  f.tape.setPassive();
  CHECK(f.tape.statementCount() == 1);
  CHECK(f.tape.memoryReport().rhsIds == 3);
  CHECK(f.tape.memoryReport().constants == 1);
  f.tape.evaluateReverse();
}

TEST_CASE("linear solve adjoint matches finite differences") {
  const int n = 4;
  const MatrixXd M0 = wellConditioned(n);
  const VectorXd v10 = randomMatrix(n, 1);
  const VectorXd v20 = randomMatrix(n, 1);
  const VectorXd weights = randomMatrix(n, 1);
  const std::vector<MatrixXd> shapes{M0, v10, v20};

  auto primal = [&](const std::vector<double>& x) {
    const auto p = unflatten(x, shapes);
    const VectorXd r = p[0].partialPivLu().solve(VectorXd(p[2] - p[1])) + VectorXd(p[1]);
    return weights.dot(r);
  };

  Fixture f;
  Mat M(M0);
  Vec v1(v10);
  Vec v2(v20);
  M.registerInput();
  v1.registerInput();
  v2.registerInput();
  f.tape.setActive();
  Vec r = la::add(M.solve(la::sub(v2, v1)), v1);
  f.tape.setPassive();
  CHECK(f.tape.statementCount() == 1);
  r.setAdjoint(weights);
  f.tape.evaluateReverse();

  // Analytic form: s = M^-T rbar, v2bar = s, v1bar = rbar - s, Mbar = -s (M^-1 (v2 - v1))^T.
  const VectorXd s = M0.transpose().partialPivLu().solve(weights);
  const VectorXd y = M0.partialPivLu().solve(VectorXd(v20 - v10));
  CHECK((v2.getAdjoint() - s).norm() <= 1e-12);
  CHECK((v1.getAdjoint() - (weights - s)).norm() <= 1e-12);
  CHECK((M.getAdjoint() + s * y.transpose()).norm() <= 1e-12);

  const auto gradient = flatten({M.getAdjoint(), v1.getAdjoint(), v2.getAdjoint()});
  const auto check = v::checkGradient(primal, flatten(shapes), gradient, 1e-6);
  CHECK(check.pass);
  CHECK(check.checked == static_cast<std::size_t>(n * n + 2 * n));
}

TEST_CASE("every activity variant of mult and solve matches finite differences") {
  const int n = 3;
  const MatrixXd M0 = wellConditioned(n);
  const VectorXd x0 = randomMatrix(n, 1);
  const VectorXd weights = randomMatrix(n, 1);
  const std::vector<MatrixXd> shapes{M0, x0};
  const auto point = flatten(shapes);

  for (int op = 0; op < 2; ++op) {
    auto primal = [&](const std::vector<double>& x) {
      const auto p = unflatten(x, shapes);
      const VectorXd r = op == 0 ? VectorXd(p[0] * p[1]) : VectorXd(p[0].partialPivLu().solve(VectorXd(p[1])));
      return weights.dot(r);
    };
    std::vector<double> fdGradient(point.size());
    for (std::size_t k = 0; k < point.size(); ++k) {
      fdGradient[k] = v::centralPartial(primal, point, k);
    }
    for (int pattern = 0; pattern < 3; ++pattern) {
      const bool mActive = pattern != 2;
      const bool xActive = pattern != 1;
      Fixture f;
      Mat M(M0);
      Vec x(x0);
      if (mActive) {
        M.registerInput();
      }
      if (xActive) {
        x.registerInput();
      }
      f.tape.setActive();
      Vec r;
      if (op == 0) {
        if (pattern == 0) {
          r = la::mult(M, x);
        } else if (pattern == 1) {
          r = la::mult(M, x0);
        } else {
          r = la::mult(M0, x);
        }
      } else {
        if (pattern == 0) {
          r = M.solve(x);
        } else if (pattern == 1) {
          r = M.solve(x0);
        } else {
          r = la::solve(M0, x);
        }
      }
      f.tape.setPassive();
      REQUIRE(f.tape.statementCount() == 1);
      CHECK(f.tape.memoryReport().rhsIds == static_cast<std::size_t>(mActive + xActive));
      r.setAdjoint(weights);
      f.tape.evaluateReverse();
      const auto gradient = flatten({M.getAdjoint(), x.getAdjoint()});
      double worst = 0.0;
      for (std::size_t k = 0; k < point.size(); ++k) {
        const bool active = k < static_cast<std::size_t>(n * n) ? mActive : xActive;
        worst = std::max(worst, v::relativeError(gradient[k], active ? fdGradient[k] : 0.0));
      }
      INFO("op " << op << " pattern " << pattern);
      CHECK(worst <= 1e-6);
    }
  }
}

TEST_CASE("scalar and DSL statements share the streams") {
  Fixture f;
  Vec a(VectorXd(randomMatrix(4, 1)));
  Vec b(VectorXd(randomMatrix(4, 1)));
  ActiveDouble s = dslad::makeInput(1.5);
  a.registerInput();
  b.registerInput();
  f.tape.setActive();
  ActiveDouble t = s * s;
  Vec c = la::scale(t, a);
  ActiveDouble d = la::dot(c, b) + sin(t);
  f.tape.setPassive();
  CHECK(f.tape.statementCount() == 3);
  std::vector<dslad::HandleId> trace;
  f.tape.traceReverse(&trace);
  d.setGradient(1.0);
  f.tape.evaluateReverse();
  CHECK(trace.size() == 3);
  // d = (s^2 a).b + sin(s^2)
  const double expected = 2.0 * 1.5 * a.getValue().dot(b.getValue()) + std::cos(2.25) * 2.0 * 1.5;
  CHECK(s.getGradient() == doctest::Approx(expected).epsilon(1e-13));
  CHECK((a.getAdjoint() - 2.25 * b.getValue()).norm() <= 1e-13);
  CHECK((b.getAdjoint() - 2.25 * a.getValue()).norm() <= 1e-13);
}

TEST_CASE("unregistered types are reported") {
  Tape tape;
  Tape::Scope scope(tape);
  Vec a(VectorXd::Ones(2));
  CHECK_THROWS_AS(a.registerInput(), std::logic_error);
}

TEST_CASE("DSL primal restore with aliasing") {
  Fixture f;
  Mat M(wellConditioned(3));
  Vec x(VectorXd(randomMatrix(3, 1)));
  M.registerInput();
  x.registerInput();
  const VectorXd before = x.getValue();
  f.tape.setActive();
  for (int k = 0; k < 5; ++k) {
    x = la::mult(M, x);
  }
  f.tape.setPassive();
  CHECK(f.tape.statementCount() == 5);
  x.setAdjoint(VectorXd::Ones(3));
  f.tape.evaluateReverse();
  CHECK(f.tape.storage<VectorXd>().primal(x.getIdentifier()) == before);
  const MatrixXd M5 = M.getValue() * M.getValue() * M.getValue() * M.getValue() * M.getValue();
  CHECK((x.getAdjoint() - M5.transpose() * VectorXd::Ones(3)).norm() <= 1e-10);
}
