#pragma once

#include <cstddef>
#include <cstdint>

namespace dslad::verification {

struct IndexTraceResult {
  std::size_t events = 0;
  std::size_t mismatches = 0;  // events where identifier, live count, pool size or high-water mark disagreed
  std::size_t maxLive = 0;
  std::size_t highWaterMark = 0;
  bool pass = false;
};

/// Random acquire/release trace against a reference model: a live set, a LIFO pool of released ids and a counter.
IndexTraceResult indexReuseTrace(std::size_t events, std::uint64_t seed);

struct IdentityResult {
  std::size_t trials = 0;
  double maxRelErr = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/**
 * <ybar, J xdot> against <xbar, xdot> for random polynomial programs with 3 inputs and 2 outputs.
 * xbar comes from the tape, J xdot from the complex-step method on the same program.
 */
IdentityResult dotProductIdentity(std::size_t trials, std::uint64_t seed, double tolerance = 1e-12);

struct RestoreResult {
  std::size_t programs = 0;
  std::size_t statements = 0;
  std::size_t mismatches = 0;  // primal slots differing from their state before recording
  bool pass = false;
};

/// Random scalar and Matrix/Vector programs with aliased updates; after record and reverse
/// every scalar and vector primal slot must equal its state before recording.
RestoreResult primalRestoreInvariant(std::size_t programs, std::uint64_t seed);

}  // namespace dslad::verification
