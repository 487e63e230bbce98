#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dslad::codegen {

struct SourceLocation {
  int line = 1;
  int column = 1;
};

/// Malformed XML, with the position of the offending character.
class XmlError : public std::runtime_error {
 public:
  XmlError(const std::string& message, SourceLocation where)
      : std::runtime_error(std::to_string(where.line) + ":" + std::to_string(where.column) + ": " + message),
        where_(where) {}
  SourceLocation where() const { return where_; }

 private:
  SourceLocation where_;
};

struct XmlAttribute {
  std::string name;
  std::string value;
  SourceLocation where;
};

struct XmlElement {
  std::string name;
  SourceLocation where;
  std::vector<XmlAttribute> attributes;
  std::vector<std::unique_ptr<XmlElement>> children;
  std::string text;  // concatenated character data directly inside this element

  const XmlAttribute* attribute(std::string_view key) const;
};

/**
 * Parses a document fragment: any number of top-level elements, optionally
 * preceded by an XML declaration, with comments anywhere. Supports
 * attributes, character data, CDATA sections and the predefined and
 * numeric entities. DOCTYPE and processing instructions are rejected.
 */
std::vector<std::unique_ptr<XmlElement>> parseXmlFragment(std::string_view input);

}  // namespace dslad::codegen
