#include "dslad/tape/memory_report.hpp"

namespace dslad {

namespace {

nlohmann::json streamJson(const StreamStats& s) {
  return {{"entries", s.entries}, {"bytes", s.bytes}, {"allocatedBytes", s.allocatedBytes}};
}

}  // namespace

nlohmann::json toJson(const MemoryReport& report) {
  nlohmann::json vectors = nlohmann::json::array();
  for (const auto& v : report.vectors) {
    vectors.push_back({{"name", v.name},
                       {"tag", v.tag},
                       {"slots", v.slots},
                       {"bytes", v.bytes},
                       {"payloadBytes", v.payloadBytes},
                       {"live", v.live}});
  }
  return {
      {"statements", report.statements},
      {"rhsIds", report.rhsIds},
      {"constants", report.constants},
      {"bytes",
       {{"lhsIdentifiers", streamJson(report.lhsIdentifiers)},
        {"lhsOldData", streamJson(report.lhsOldData)},
        {"functionHandles", streamJson(report.functionHandles)},
        {"activeArguments", streamJson(report.activeArguments)},
        {"rhsIdentifiers", streamJson(report.rhsIdentifiers)},
        {"constantData", streamJson(report.constantData)},
        {"stmtStream", report.statementStreamBytes()},
        {"rhsStream", report.rhsIdentifiers.bytes},
        {"constantStream", report.constantData.bytes},
        {"total", report.streamBytes()},
        {"allocated", report.allocatedStreamBytes()}}},
      {"vectors", vectors},
  };
}

}  // namespace dslad
