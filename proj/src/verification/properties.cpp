#include "dslad/verification/properties.hpp"

#include <complex>
#include <cstring>
#include <random>
#include <set>
#include <vector>

#include "dslad/scalar/active_scalar.hpp"
#include "dslad/tape/index_manager.hpp"
#include "la/dsl_registry.gen.hpp"

namespace dslad::verification {

IndexTraceResult indexReuseTrace(std::size_t events, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  IndexManager manager;
  std::set<Index> live;
  std::vector<Index> pool;
  std::vector<Index> liveList;
  Index high = 0;
  IndexTraceResult out;
  out.events = events;
  for (std::size_t e = 0; e < events; ++e) {
    // Phases of growth and shrinkage so the pool is exercised at different depths.
    const bool growing = (e / 5000) % 2 == 0;
    const bool acquire = liveList.empty() || rng() % 100 < (growing ? 60u : 40u);
    bool ok = true;
    if (acquire) {
      Index expected;
      if (!pool.empty()) {
        expected = pool.back();
        pool.pop_back();
      } else {
        expected = ++high;
      }
      const Index got = manager.acquire();
      ok = got == expected && live.insert(got).second;
      liveList.push_back(got);
    } else {
      const std::size_t k = rng() % liveList.size();
      const Index id = liveList[k];
      liveList[k] = liveList.back();
      liveList.pop_back();
      manager.release(id);
      live.erase(id);
      pool.push_back(id);
      ok = !manager.isLive(id);
    }
    ok = ok && manager.liveCount() == live.size() && manager.freeCount() == pool.size() &&
         manager.highWaterMark() == high;
    out.mismatches += ok ? 0 : 1;
    out.maxLive = std::max(out.maxLive, live.size());
  }
  for (Index id = 0; id <= high; ++id) {
    out.mismatches += manager.isLive(id) == (live.count(id) == 1) ? 0 : 1;
  }
  out.highWaterMark = high;
  out.pass = out.mismatches == 0;
  return out;
}

namespace {

struct PolyOp {
  int kind;
  std::size_t a, b;
  double c;
};

std::vector<PolyOp> randomPolynomial(std::mt19937_64& rng, std::size_t inputs, std::size_t length) {
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  std::vector<PolyOp> ops;
  for (std::size_t k = 0; k < length; ++k) {
    const std::size_t n = inputs + k;
    ops.push_back({static_cast<int>(rng() % 5), static_cast<std::size_t>(rng() % n),
                   static_cast<std::size_t>(rng() % n), coeff(rng)});
  }
  return ops;
}

template <typename T>
T applyOp(const PolyOp& op, const std::vector<T>& w) {
  const T& a = w[op.a];
  const T& b = w[op.b];
  switch (op.kind) {
    case 0:
      return a + b;
    case 1:
      return a - op.c * b;
    case 2:
      return a * b;
    case 3:
      return op.c * a * b + a - 0.5;
    default:
      return a * a * op.c + b;
  }
}

template <typename T>
std::vector<T> runPolynomial(const std::vector<PolyOp>& ops, std::vector<T> w) {
  for (const auto& op : ops) {
    T r = applyOp(op, w);
    w.push_back(std::move(r));
  }
  return w;
}

}  // namespace

IdentityResult dotProductIdentity(std::size_t trials, std::uint64_t seed, double tolerance) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  IdentityResult out;
  out.tolerance = tolerance;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const auto ops = randomPolynomial(rng, 3, 16);
    std::vector<double> x(3), xdot(3), ybar(2);
    for (auto* v : {&x, &xdot, &ybar}) {
      for (auto& e : *v) {
        e = dist(rng);
      }
    }

    Tape<double> tape;
    double adjointSide = 0.0;
    {
      Tape<double>::Scope scope(tape);
      std::vector<ActiveDouble> in(x.begin(), x.end());
      for (auto& v : in) {
        v.registerInput();
      }
      tape.setActive();
      auto w = runPolynomial(ops, in);
      tape.setPassive();
      w[w.size() - 2].setGradient(ybar[0]);
      w[w.size() - 1].setGradient(ybar[1]);
      tape.evaluateReverse();
      for (std::size_t i = 0; i < 3; ++i) {
        adjointSide += in[i].getGradient() * xdot[i];
      }
    }

    using C = std::complex<double>;
    const double h = 1e-20;
    std::vector<C> z(3);
    for (std::size_t i = 0; i < 3; ++i) {
      z[i] = {x[i], h * xdot[i]};
    }
    const auto wz = runPolynomial(ops, z);
    const double tangentSide = ybar[0] * wz[wz.size() - 2].imag() / h + ybar[1] * wz[wz.size() - 1].imag() / h;
    const double err = std::abs(tangentSide - adjointSide) / std::max(std::abs(adjointSide), 1e-300);
    out.maxRelErr = std::max(out.maxRelErr, err);
    ++out.trials;
  }
  out.pass = out.maxRelErr <= tolerance;
  return out;
}

namespace {

using Eigen::VectorXd;
using Vec = la::ActiveVector<double>;

bool sameVector(const VectorXd& a, const VectorXd& b) {
  return a.size() == b.size() && (a.size() == 0 || std::memcmp(a.data(), b.data(), sizeof(double) * a.size()) == 0);
}

bool sameScalar(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

void randomProgram(std::mt19937_64& rng, std::vector<ActiveDouble>& s, std::vector<Vec>& v, std::size_t length) {
  std::uniform_real_distribution<double> coeff(0.5, 1.5);
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  for (std::size_t k = 0; k < length; ++k) {
    const std::size_t a = pick(s.size());
    const std::size_t b = pick(s.size());
    const std::size_t p = pick(v.size());
    const std::size_t q = pick(v.size());
    switch (rng() % 10) {
      case 0:
        s[a] = s[a] * s[b];
        break;
      case 1:
        s[a] = sin(s[b]) * s[a] + coeff(rng);
        break;
      case 2:
        s[a] = s[b];
        break;
      case 3:
        s.push_back(s[a] - s[b] * coeff(rng));
        break;
      case 4:
        if (s.size() > 2) {
          s.erase(s.begin() + static_cast<std::ptrdiff_t>(a));
        }
        break;
      case 5:
        v[p] = la::add(v[p], v[q]);
        break;
      case 6:
        v[p] = la::scale(s[a], v[p]);
        break;
      case 7:
        s[a] = la::dot(v[p], v[q]) * s[a];
        break;
      case 8:
        v.push_back(la::sub(v[q], la::scale(s[b], v[p])));
        break;
      default:
        s[a] = s[a] + exp(s[a] * 0.01);
        break;
    }
  }
}

}  // namespace

RestoreResult primalRestoreInvariant(std::size_t programs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  RestoreResult out;
  for (std::size_t prog = 0; prog < programs; ++prog) {
    Tape<double> tape;
    Tape<double>::Scope scope(tape);
    la::registerTypes(tape);
    {
      std::vector<ActiveDouble> s;
      std::vector<Vec> v;
      for (int i = 0; i < 6; ++i) {
        s.emplace_back(dist(rng));
        s.back().registerInput();
      }
      for (int i = 0; i < 3; ++i) {
        v.emplace_back(VectorXd(VectorXd::NullaryExpr(3, [&] { return dist(rng); })));
        v.back().registerInput();
      }
      // Released inputs leave stale values in their slots.
      s.erase(s.begin() + 1);
      s.erase(s.begin() + 3);

      const std::vector<double> scalarsBefore(tape.primals().begin(), tape.primals().end());
      const auto vectorsBefore = tape.storage<VectorXd>().primals();

      tape.setActive();
      randomProgram(rng, s, v, 60);
      tape.setPassive();
      out.statements += tape.statementCount();
      s.front().setGradient(1.0);
      tape.evaluateReverse();

      const auto scalars = tape.primals();
      for (std::size_t k = 0; k < scalars.size(); ++k) {
        const double before = k < scalarsBefore.size() ? scalarsBefore[k] : 0.0;
        out.mismatches += sameScalar(scalars[k], before) ? 0 : 1;
      }
      const auto& vectors = tape.storage<VectorXd>().primals();
      for (std::size_t k = 0; k < vectors.size(); ++k) {
        const VectorXd before = k < vectorsBefore.size() ? VectorXd(vectorsBefore[k]) : VectorXd();
        out.mismatches += sameVector(vectors[k], before) ? 0 : 1;
      }
    }
    tape.reset();
    ++out.programs;
  }
  out.pass = out.mismatches == 0;
  return out;
}

}  // namespace dslad::verification
