#include "dslad/verification/report.hpp"

#include <sstream>

namespace dslad::verification {

nlohmann::json toJson(const BenchReport& report) {
  const auto memory = dslad::toJson(report.memory);
  nlohmann::json out = {
      {"case", report.caseName},
      {"config", report.config},
      {"statements", report.statements},
      {"rhsIds", report.memory.rhsIds},
      {"constants", report.memory.constants},
      {"bytesByStream", memory["bytes"]},
      {"times", {{"record_s", report.recordSeconds}, {"reverse_s", report.reverseSeconds}}},
  };
  if (report.gradCheck) {
    out["gradCheck"] = {{"maxRelErr", report.gradCheck->maxRelErr},
                        {"tolerance", report.gradCheck->tolerance},
                        {"checked", report.gradCheck->checked},
                        {"pass", report.gradCheck->pass}};
  } else {
    out["gradCheck"] = nullptr;
  }
  if (!report.extra.empty()) {
    out["results"] = report.extra;
  }
  return out;
}

std::string csvHeader() {
  return "case,statements,rhsIds,constants,tapeBytes,lhsIdentifiers,lhsOldData,functionHandles,activeArguments,"
         "rhsIdentifiers,constantData,gradMaxRelErr,gradTolerance,gradPass,record_s,reverse_s";
}

std::string csvRow(const BenchReport& report) {
  const auto& m = report.memory;
  std::ostringstream os;
  os.precision(17);
  os << report.caseName << ',' << report.statements << ',' << m.rhsIds << ',' << m.constants << ','
     << m.streamBytes() << ',' << m.lhsIdentifiers.bytes << ',' << m.lhsOldData.bytes << ','
     << m.functionHandles.bytes << ',' << m.activeArguments.bytes << ',' << m.rhsIdentifiers.bytes << ','
     << m.constantData.bytes << ',';
  if (report.gradCheck) {
    os << report.gradCheck->maxRelErr << ',' << report.gradCheck->tolerance << ','
       << (report.gradCheck->pass ? "true" : "false");
  } else {
    os << ",,";
  }
  os << ',' << report.recordSeconds << ',' << report.reverseSeconds;
  return os.str();
}

}  // namespace dslad::verification
