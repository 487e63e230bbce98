#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "dslad/dsl/type_storage.hpp"
#include "dslad/tape/chunked_stream.hpp"

namespace dslad {

/// Byte and entry counts of every tape stream and vector.
struct MemoryReport {
  std::size_t statements = 0;
  std::size_t rhsIds = 0;
  std::size_t constants = 0;

  StreamStats lhsIdentifiers;
  StreamStats lhsOldData;
  StreamStats functionHandles;
  StreamStats activeArguments;
  StreamStats rhsIdentifiers;
  StreamStats constantData;

  std::vector<VectorStats> vectors;  // scalar vectors first, then registered types by tag

  /// Bytes of the four per-statement streams.
  std::size_t statementStreamBytes() const {
    return lhsIdentifiers.bytes + lhsOldData.bytes + functionHandles.bytes + activeArguments.bytes;
  }
  /// Bytes of all six streams; this is what "tape memory" refers to.
  std::size_t streamBytes() const {
    return statementStreamBytes() + rhsIdentifiers.bytes + constantData.bytes;
  }
  std::size_t allocatedStreamBytes() const {
    return lhsIdentifiers.allocatedBytes + lhsOldData.allocatedBytes + functionHandles.allocatedBytes +
           activeArguments.allocatedBytes + rhsIdentifiers.allocatedBytes + constantData.allocatedBytes;
  }
  std::size_t vectorBytes() const {
    std::size_t n = 0;
    for (const auto& v : vectors) {
      n += v.bytes + v.payloadBytes;
    }
    return n;
  }
};

nlohmann::json toJson(const MemoryReport& report);

}  // namespace dslad
