#include <doctest.h>

#include <cmath>
#include <vector>

#include "dslad/scalar/active_scalar.hpp"

using dslad::ActiveDouble;
using dslad::HandleId;
using dslad::HandleRegistry;
using dslad::Index;
using dslad::ReverseContext;
using Tape = dslad::Tape<double>;

namespace {

// Hand-written handle for w = a * b.
void reverseMul(ReverseContext<double>& ctx) {
  const Index b = ctx.popArgument().index();
  const Index a = ctx.popArgument().index();
  const double pa = ctx.primal(a);
  const double pb = ctx.primal(b);
  ctx.adjoint(a) += pb * ctx.seed();
  ctx.adjoint(b) += pa * ctx.seed();
}

HandleId mulHandle() {
  static const HandleId h = HandleRegistry<double>::instance().add(&reverseMul);
  return h;
}

}  // namespace

TEST_CASE("low-level multiplication statement") {
  Tape tape;
  Index a = 0;
  Index b = 0;
  tape.registerInput(a, 3.0);
  tape.registerInput(b, 5.0);
  const Index w = tape.acquireIndex();
  tape.setActive();
  const std::vector<Index> args{a, b};
  tape.recordStatement(w, mulHandle(), args, {}, 15.0);
  tape.setPassive();
  CHECK(tape.primal(w) == 15.0);
  CHECK(tape.statementCount() == 1);
  tape.setGradient(w, 1.0);
  tape.evaluateReverse();
  CHECK(tape.getGradient(a) == 5.0);
  CHECK(tape.getGradient(b) == 3.0);
  CHECK(tape.getGradient(w) == 0.0);
  CHECK(tape.primal(w) == 0.0);
}

TEST_CASE("recording while passive stores nothing but writes the value") {
  Tape tape;
  Index a = 0;
  tape.registerInput(a, 2.0);
  const Index w = tape.acquireIndex();
  const std::vector<Index> args{a, a};
  tape.recordStatement(w, mulHandle(), args, {}, 4.0);
  CHECK(tape.statementCount() == 0);
  CHECK(tape.primal(w) == 4.0);
}

TEST_CASE("unregistered handles are rejected") {
  Tape tape;
  const Index w = tape.acquireIndex();
  tape.setActive();
  CHECK_THROWS_AS(tape.recordStatement(w, 60000, {}, {}, 1.0), std::invalid_argument);
  CHECK(tape.statementCount() == 0);
}

TEST_CASE("gradient access") {
  Tape tape;
  CHECK(tape.getGradient(0) == 0.0);
  CHECK_THROWS_AS(tape.setGradient(0, 1.0), std::invalid_argument);
  const Index a = tape.acquireIndex();
  tape.setGradient(a, 2.5);
  CHECK(tape.getGradient(a) == 2.5);
  CHECK_THROWS_AS(tape.getGradient(a + 10), std::out_of_range);
}

TEST_CASE("empty tape reverse is a no-op") {
  Tape tape;
  const Index a = tape.acquireIndex();
  tape.setGradient(a, 7.0);
  tape.evaluateReverse();
  CHECK(tape.getGradient(a) == 7.0);
}

TEST_CASE("reverse while recording is refused") {
  Tape tape;
  tape.setActive();
  CHECK_THROWS_AS(tape.evaluateReverse(), std::logic_error);
}

TEST_CASE("reverse visits handles in the opposite order") {
  Tape tape;
  Tape::Scope scope(tape);
  tape.setActive();
  ActiveDouble x = dslad::makeInput(1.5);
  ActiveDouble y = x * x;
  ActiveDouble z = sin(y) + x;
  ActiveDouble u = z / y;
  y = u * 2.0;
  tape.setPassive();
  const auto recorded = tape.recordedHandles();
  REQUIRE(recorded.size() == 4);
  std::vector<HandleId> trace;
  tape.traceReverse(&trace);
  tape.evaluateReverse();
  tape.traceReverse(nullptr);
  REQUIRE(trace.size() == recorded.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    CHECK(trace[i] == recorded[recorded.size() - 1 - i]);
  }
}

TEST_CASE("memory report counts") {
  Tape tape;
  Tape::Scope scope(tape);
  auto empty = tape.memoryReport();
  CHECK(empty.statements == 0);
  CHECK(empty.streamBytes() == 0);

  {
    ActiveDouble a = 2.0;
    ActiveDouble b = 1.0;
    ActiveDouble c = 3.0;
    ActiveDouble d = 1.0;
    a.registerInput();
    b.registerInput();
    c.registerInput();
    d.registerInput();
    tape.setActive();
    ActiveDouble w = sqrt(square(a - b) + square(c - d) - 1.0);
    tape.setPassive();
    const auto r = tape.memoryReport();
    CHECK(r.statements == 1);
    CHECK(r.rhsIds == 4);
    CHECK(r.constants == 1);
    CHECK(r.lhsIdentifiers.bytes == 4);
    CHECK(r.lhsOldData.bytes == 8);
    CHECK(r.functionHandles.bytes == 4);
    CHECK(r.activeArguments.bytes == 1);
    CHECK(r.rhsIdentifiers.bytes == 16);
    CHECK(r.constantData.bytes == 8);
    CHECK(r.streamBytes() == 41);
    const auto j = dslad::toJson(r);
    CHECK(j["statements"] == 1);
    CHECK(j["bytes"]["total"] == 41);
    CHECK(j["bytes"]["stmtStream"] == 17);
  }
  tape.reset();
  CHECK(tape.memoryReport().streamBytes() == 0);
}

TEST_CASE("repeated record, reverse and reset does not grow storage") {
  Tape tape(Tape::Options{256});
  Tape::Scope scope(tape);
  std::size_t firstAllocated = 0;
  std::size_t firstSlots = 0;
  for (int iteration = 0; iteration < 100; ++iteration) {
    {
      ActiveDouble x = 0.5;
      x.registerInput();
      tape.setActive();
      ActiveDouble y = x;
      for (int k = 0; k < 500; ++k) {
        y = sin(y) * x + 0.25;
      }
      tape.setPassive();
      y.setGradient(1.0);
      tape.evaluateReverse();
    }
    const auto report = tape.memoryReport();
    if (iteration == 0) {
      firstAllocated = report.allocatedStreamBytes();
      firstSlots = report.vectors[0].slots;
    }
    CHECK(report.allocatedStreamBytes() == firstAllocated);
    CHECK(report.vectors[0].slots == firstSlots);
    tape.reset();
  }
}

TEST_CASE("record, reset, record yields identical streams") {
  Tape tape;
  Tape::Scope scope(tape);
  auto program = [&] {
    ActiveDouble a = dslad::makeInput(1.25);
    ActiveDouble b = dslad::makeInput(-0.5);
    tape.setActive();
    ActiveDouble c = a * b + exp(b) * 3.0;
    ActiveDouble d = c / (a - 4.0);
    tape.setPassive();
  };
  program();
  const auto handles = tape.recordedHandles();
  const auto args = tape.recordedArguments();
  const auto constants = tape.recordedConstantBytes();
  const auto old = tape.recordedOldDataBytes();
  tape.reset();
  program();
  CHECK(tape.recordedHandles() == handles);
  CHECK(tape.recordedArguments() == args);
  CHECK(tape.recordedConstantBytes() == constants);
  CHECK(tape.recordedOldDataBytes() == old);
  tape.reset();
}

TEST_CASE("linearity under power-of-two seeds") {
  Tape tape;
  Tape::Scope scope(tape);
  auto run = [&](double seed) {
    std::pair<double, double> g;
    {
      ActiveDouble a = dslad::makeInput(0.7);
      ActiveDouble b = dslad::makeInput(1.9);
      tape.setActive();
      ActiveDouble w = a * sin(b) + log(a * b) / b;
      w = w * w - a;
      tape.setPassive();
      w.setGradient(seed);
      tape.evaluateReverse();
      g = {a.getGradient(), b.getGradient()};
    }
    tape.reset();
    return g;
  };
  const auto g1 = run(1.0);
  const auto g8 = run(8.0);
  CHECK(g8.first == 8.0 * g1.first);
  CHECK(g8.second == 8.0 * g1.second);
}
