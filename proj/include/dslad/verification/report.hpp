#pragma once

#include <chrono>
#include <optional>
#include <string>

#include <json.hpp>

#include "dslad/tape/memory_report.hpp"
#include "dslad/verification/oracles.hpp"

namespace dslad::verification {

/// One measured run: tape statistics, an optional gradient check and timings.
struct BenchReport {
  std::string caseName;
  nlohmann::json config = nlohmann::json::object();
  std::size_t statements = 0;
  MemoryReport memory;
  std::optional<GradCheck> gradCheck;
  double recordSeconds = 0.0;
  double reverseSeconds = 0.0;
  nlohmann::json extra = nlohmann::json::object();  // case-specific results
};

nlohmann::json toJson(const BenchReport& report);

/// Scalar fields of a report as one CSV row; the header lists the same columns.
std::string csvHeader();
std::string csvRow(const BenchReport& report);

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace dslad::verification
