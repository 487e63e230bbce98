#include "dslad/codegen/xml.hpp"

#include <cctype>
#include <cstdint>

namespace dslad::codegen {

const XmlAttribute* XmlElement::attribute(std::string_view key) const {
  for (const auto& a : attributes) {
    if (a.name == key) {
      return &a;
    }
  }
  return nullptr;
}

namespace {

bool isNameStart(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == ':';
}

bool isNameChar(char c) {
  return isNameStart(c) || std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '.';
}

void appendUtf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

class Parser {
 public:
  explicit Parser(std::string_view in) : in_(in) {}

  std::vector<std::unique_ptr<XmlElement>> fragment() {
    std::vector<std::unique_ptr<XmlElement>> out;
    skipSpace();
    if (lookingAt("<?xml")) {
      declaration();
    }
    while (true) {
      skipSpace();
      if (atEnd()) {
        break;
      }
      if (lookingAt("<!--")) {
        comment();
      } else if (lookingAt("<!")) {
        fail("DOCTYPE and other declarations are not supported");
      } else if (lookingAt("<?")) {
        fail("processing instructions are not supported");
      } else if (lookingAt("</")) {
        fail("unexpected closing tag");
      } else if (peek() == '<') {
        out.push_back(element());
      } else {
        fail("text outside of an element");
      }
    }
    return out;
  }

 private:
  bool atEnd() const { return pos_ >= in_.size(); }
  char peek() const { return atEnd() ? '\0' : in_[pos_]; }
  bool lookingAt(std::string_view s) const { return in_.substr(pos_, s.size()) == s; }

  SourceLocation here() const { return {line_, column_}; }

  [[noreturn]] void fail(const std::string& message) const { throw XmlError(message, here()); }

  char get() {
    if (atEnd()) {
      fail("unexpected end of input");
    }
    const char c = in_[pos_++];
    if (c == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    return c;
  }

  void expect(std::string_view s) {
    if (!lookingAt(s)) {
      fail("expected '" + std::string(s) + "'");
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
      get();
    }
  }

  void skipSpace() {
    while (!atEnd() && std::isspace(static_cast<unsigned char>(peek()))) {
      get();
    }
  }

  std::string name() {
    if (!isNameStart(peek())) {
      fail("expected a name");
    }
    std::string out;
    while (!atEnd() && isNameChar(peek())) {
      out += get();
    }
    return out;
  }

  void declaration() {
    expect("<?xml");
    while (!lookingAt("?>")) {
      get();
    }
    expect("?>");
  }

  void comment() {
    expect("<!--");
    while (!lookingAt("-->")) {
      if (lookingAt("--")) {
        fail("'--' inside a comment");
      }
      get();
    }
    expect("-->");
  }

  void entity(std::string& out) {
    const SourceLocation start = here();
    expect("&");
    std::string ref;
    while (peek() != ';') {
      if (atEnd() || ref.size() > 10) {
        throw XmlError("unterminated entity reference", start);
      }
      ref += get();
    }
    get();
    if (ref == "lt") {
      out += '<';
    } else if (ref == "gt") {
      out += '>';
    } else if (ref == "amp") {
      out += '&';
    } else if (ref == "quot") {
      out += '"';
    } else if (ref == "apos") {
      out += '\'';
    } else if (ref.size() > 1 && ref[0] == '#') {
      std::uint32_t cp = 0;
      const bool hex = ref[1] == 'x';
      const std::string digits = ref.substr(hex ? 2 : 1);
      if (digits.empty()) {
        throw XmlError("malformed character reference", start);
      }
      for (char c : digits) {
        const int d = std::isdigit(static_cast<unsigned char>(c))             ? c - '0'
                      : hex && std::isxdigit(static_cast<unsigned char>(c)) ? std::tolower(c) - 'a' + 10
                                                                              : -1;
        if (d < 0 || cp > 0x10FFFF) {
          throw XmlError("malformed character reference", start);
        }
        cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(d);
      }
      if (cp == 0 || cp > 0x10FFFF) {
        throw XmlError("character reference out of range", start);
      }
      appendUtf8(out, cp);
    } else {
      throw XmlError("unknown entity '&" + ref + ";'", start);
    }
  }

  std::unique_ptr<XmlElement> element() {
    auto e = std::make_unique<XmlElement>();
    e->where = here();
    expect("<");
    e->name = name();
    while (true) {
      const bool spaced = !atEnd() && std::isspace(static_cast<unsigned char>(peek()));
      skipSpace();
      if (lookingAt("/>")) {
        expect("/>");
        return e;
      }
      if (peek() == '>') {
        get();
        break;
      }
      if (!spaced) {
        fail("expected whitespace before attribute");
      }
      XmlAttribute a;
      a.where = here();
      a.name = name();
      if (e->attribute(a.name) != nullptr) {
        throw XmlError("duplicate attribute '" + a.name + "'", a.where);
      }
      skipSpace();
      expect("=");
      skipSpace();
      const char quote = peek();
      if (quote != '"' && quote != '\'') {
        fail("expected a quoted attribute value");
      }
      get();
      while (peek() != quote) {
        if (atEnd()) {
          fail("unterminated attribute value");
        }
        if (peek() == '<') {
          fail("'<' in attribute value");
        }
        if (peek() == '&') {
          entity(a.value);
        } else {
          a.value += get();
        }
      }
      get();
      e->attributes.push_back(std::move(a));
    }
    content(*e);
    return e;
  }

  void content(XmlElement& e) {
    while (true) {
      if (atEnd()) {
        throw XmlError("element '" + e.name + "' is not closed", e.where);
      }
      if (lookingAt("</")) {
        expect("</");
        const SourceLocation at = here();
        const std::string closing = name();
        if (closing != e.name) {
          throw XmlError("closing tag '" + closing + "' does not match '" + e.name + "'", at);
        }
        skipSpace();
        expect(">");
        return;
      }
      if (lookingAt("<!--")) {
        comment();
      } else if (lookingAt("<![CDATA[")) {
        expect("<![CDATA[");
        while (!lookingAt("]]>")) {
          e.text += get();
        }
        expect("]]>");
      } else if (lookingAt("<!") || lookingAt("<?")) {
        fail("unsupported markup");
      } else if (peek() == '<') {
        e.children.push_back(element());
      } else if (peek() == '&') {
        entity(e.text);
      } else {
        e.text += get();
      }
    }
  }

  std::string_view in_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

}  // namespace

std::vector<std::unique_ptr<XmlElement>> parseXmlFragment(std::string_view input) {
  return Parser(input).fragment();
}

}  // namespace dslad::codegen
