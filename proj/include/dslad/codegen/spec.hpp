#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dslad/codegen/xml.hpp"

namespace dslad::codegen {

/// Invalid language description, reported at the offending element or attribute.
class SpecError : public std::runtime_error {
 public:
  SpecError(const std::string& message, SourceLocation where)
      : std::runtime_error(std::to_string(where.line) + ":" + std::to_string(where.column) + ": " + message),
        where_(where) {}
  SourceLocation where() const { return where_; }

 private:
  SourceLocation where_;
};

/// Name of the tape scalar when used as an argument or result type.
inline constexpr std::string_view kRealType = "Real";

struct StructureSpec {
  std::string name;
  std::string valueType;  // empty: use the generator default
  SourceLocation where;
};

struct ArgSpec {
  std::string name;
  std::string type;
  bool differentiable = false;
  std::string reverseCode;  // trimmed
  SourceLocation where;
};

struct FunctionSpec {
  std::string name;
  std::string resultType;
  std::optional<std::string> memberOf;       // enclosing structure
  std::optional<std::string> receiverReverse;  // reverse code for the receiver `t`
  std::vector<ArgSpec> args;
  std::string primalCode;  // trimmed
  SourceLocation where;

  /// Arguments including the receiver `t` of member functions, receiver first.
  std::vector<ArgSpec> allArgs() const;
};

struct LanguageSpec {
  std::vector<StructureSpec> structures;
  std::vector<FunctionSpec> functions;  // document order; member functions included

  const StructureSpec* findStructure(std::string_view name) const;
  bool empty() const { return structures.empty() && functions.empty(); }
};

/// Primitive argument types. Only Real may be differentiable.
bool isPrimitive(std::string_view type);

/// Parses and validates a language description. Throws XmlError or SpecError.
LanguageSpec parseSpec(std::string_view document);

/// Strips leading and trailing whitespace.
std::string trim(std::string_view s);

}  // namespace dslad::codegen
