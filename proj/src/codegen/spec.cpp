#include "dslad/codegen/spec.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>

namespace dslad::codegen {

namespace {

constexpr std::array<std::string_view, 3> kPrimitives{"Real", "int", "bool"};

// Names the generated code uses next to the argument names.
constexpr std::array<std::string_view, 9> kReserved{"r", "r_b", "t", "Real", "RType", "Value",
                                                   "value", "context", "recorder"};

bool isIdentifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) {
    return false;
  }
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

bool isTypeName(std::string_view s) {
  // Qualified C++ names such as dslad::simd::Float4 or Eigen::Matrix<double, 3, 3>.
  if (s.empty()) {
    return false;
  }
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == ':' || c == '<' || c == '>' ||
           c == ',' || c == ' ';
  });
}

void checkAttributes(const XmlElement& e, std::initializer_list<std::string_view> allowed) {
  for (const auto& a : e.attributes) {
    if (std::find(allowed.begin(), allowed.end(), a.name) == allowed.end()) {
      throw SpecError("unknown attribute '" + a.name + "' on <" + e.name + ">", a.where);
    }
  }
}

const XmlAttribute& required(const XmlElement& e, std::string_view key) {
  const XmlAttribute* a = e.attribute(key);
  if (a == nullptr) {
    throw SpecError("<" + e.name + "> requires attribute '" + std::string(key) + "'", e.where);
  }
  return *a;
}

void noText(const XmlElement& e) {
  if (!trim(e.text).empty()) {
    throw SpecError("unexpected text inside <" + e.name + ">", e.where);
  }
}

std::string code(const XmlElement& e) {
  if (!e.children.empty()) {
    throw SpecError("<" + e.name + "> must contain code only", e.children.front()->where);
  }
  checkAttributes(e, {});
  return trim(e.text);
}

class Reader {
 public:
  LanguageSpec read(const std::vector<std::unique_ptr<XmlElement>>& roots) {
    for (const auto& root : roots) {
      if (root->name == "structure") {
        structure(*root);
      } else if (root->name == "function") {
        function(*root, std::nullopt);
      } else {
        throw SpecError("unknown element <" + root->name + ">", root->where);
      }
    }
    validateTypes();
    return std::move(spec_);
  }

 private:
  void structure(const XmlElement& e) {
    checkAttributes(e, {"name", "valueType"});
    noText(e);
    const XmlAttribute& name = required(e, "name");
    if (!isIdentifier(name.value)) {
      throw SpecError("structure name '" + name.value + "' is not an identifier", name.where);
    }
    if (isPrimitive(name.value)) {
      throw SpecError("structure name '" + name.value + "' is a primitive type", name.where);
    }
    if (spec_.findStructure(name.value) != nullptr) {
      throw SpecError("structure '" + name.value + "' is declared twice", name.where);
    }
    StructureSpec s{name.value, "", e.where};
    if (const XmlAttribute* vt = e.attribute("valueType")) {
      if (!isTypeName(vt->value)) {
        throw SpecError("valueType '" + vt->value + "' is not a type name", vt->where);
      }
      s.valueType = vt->value;
    }
    spec_.structures.push_back(s);
    for (const auto& child : e.children) {
      if (child->name != "function") {
        throw SpecError("unknown element <" + child->name + "> inside <structure>", child->where);
      }
      function(*child, name.value);
    }
  }

  void function(const XmlElement& e, std::optional<std::string> owner) {
    checkAttributes(e, {"name", "rType"});
    noText(e);
    FunctionSpec f;
    f.where = e.where;
    f.memberOf = owner;
    const XmlAttribute& name = required(e, "name");
    if (!isIdentifier(name.value)) {
      throw SpecError("function name '" + name.value + "' is not an identifier", name.where);
    }
    f.name = name.value;
    const XmlAttribute& rType = required(e, "rType");
    f.resultType = rType.value;
    resultLocations_.push_back(rType.where);
    bool havePrimal = false;
    std::set<std::string> names;
    for (const auto& child : e.children) {
      if (child->name == "arg") {
        f.args.push_back(arg(*child));
        const ArgSpec& a = f.args.back();
        if (!names.insert(a.name).second) {
          throw SpecError("argument '" + a.name + "' appears twice in '" + f.name + "'", a.where);
        }
      } else if (child->name == "primal") {
        if (havePrimal) {
          throw SpecError("function '" + f.name + "' has more than one <primal>", child->where);
        }
        havePrimal = true;
        f.primalCode = code(*child);
        if (f.primalCode.empty()) {
          throw SpecError("empty <primal> in '" + f.name + "'", child->where);
        }
      } else if (child->name == "reverse") {
        if (!owner) {
          throw SpecError("<reverse> directly inside <function> is only allowed for member functions",
                          child->where);
        }
        if (f.receiverReverse) {
          throw SpecError("function '" + f.name + "' has more than one receiver <reverse>", child->where);
        }
        f.receiverReverse = code(*child);
        if (f.receiverReverse->empty()) {
          throw SpecError("empty receiver <reverse> in '" + f.name + "'", child->where);
        }
      } else {
        throw SpecError("unknown element <" + child->name + "> inside <function>", child->where);
      }
    }
    if (!havePrimal) {
      throw SpecError("function '" + f.name + "' has no <primal>", e.where);
    }
    spec_.functions.push_back(std::move(f));
  }

  ArgSpec arg(const XmlElement& e) {
    checkAttributes(e, {"input", "type", "name"});
    noText(e);
    ArgSpec a;
    a.where = e.where;
    const XmlAttribute& name = required(e, "name");
    if (!isIdentifier(name.value)) {
      throw SpecError("argument name '" + name.value + "' is not an identifier", name.where);
    }
    if (std::find(kReserved.begin(), kReserved.end(), name.value) != kReserved.end()) {
      throw SpecError("argument name '" + name.value + "' is reserved", name.where);
    }
    a.name = name.value;
    const XmlAttribute& type = required(e, "type");
    a.type = type.value;
    argLocations_.push_back(type.where);
    const XmlAttribute& input = required(e, "input");
    if (input.value != "0" && input.value != "1") {
      throw SpecError("input must be 0 or 1, not '" + input.value + "'", input.where);
    }
    a.differentiable = input.value == "1";
    bool haveReverse = false;
    for (const auto& child : e.children) {
      if (child->name != "reverse") {
        throw SpecError("unknown element <" + child->name + "> inside <arg>", child->where);
      }
      if (haveReverse) {
        throw SpecError("argument '" + a.name + "' has more than one <reverse>", child->where);
      }
      haveReverse = true;
      a.reverseCode = code(*child);
    }
    if (a.differentiable && a.reverseCode.empty()) {
      throw SpecError("argument '" + a.name + "' has input=\"1\" but no reverse code", e.where);
    }
    return a;
  }

  void validateTypes() const {
    std::size_t argIndex = 0;
    std::size_t resultIndex = 0;
    for (const auto& f : spec_.functions) {
      const SourceLocation rWhere = resultLocations_[resultIndex++];
      if (f.resultType != kRealType && spec_.findStructure(f.resultType) == nullptr) {
        if (isPrimitive(f.resultType)) {
          throw SpecError("result type '" + f.resultType + "' of '" + f.name + "' is not differentiable", rWhere);
        }
        throw SpecError("undeclared type '" + f.resultType + "'", rWhere);
      }
      for (const auto& a : f.args) {
        const SourceLocation where = argLocations_[argIndex++];
        if (!isPrimitive(a.type) && spec_.findStructure(a.type) == nullptr) {
          throw SpecError("undeclared type '" + a.type + "'", where);
        }
        if (a.differentiable && isPrimitive(a.type) && a.type != kRealType) {
          throw SpecError("argument '" + a.name + "' of type " + a.type + " cannot be differentiable", where);
        }
      }
    }
  }

  LanguageSpec spec_;
  std::vector<SourceLocation> argLocations_;
  std::vector<SourceLocation> resultLocations_;
};

}  // namespace

std::vector<ArgSpec> FunctionSpec::allArgs() const {
  std::vector<ArgSpec> out;
  if (memberOf) {
    ArgSpec t;
    t.name = "t";
    t.type = *memberOf;
    t.differentiable = receiverReverse.has_value();
    t.reverseCode = receiverReverse.value_or("");
    t.where = where;
    out.push_back(std::move(t));
  }
  out.insert(out.end(), args.begin(), args.end());
  return out;
}

const StructureSpec* LanguageSpec::findStructure(std::string_view name) const {
  for (const auto& s : structures) {
    if (s.name == name) {
      return &s;
    }
  }
  return nullptr;
}

bool isPrimitive(std::string_view type) {
  return std::find(kPrimitives.begin(), kPrimitives.end(), type) != kPrimitives.end();
}

std::string trim(std::string_view s) {
  const auto space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && space(s[b])) {
    ++b;
  }
  while (e > b && space(s[e - 1])) {
    --e;
  }
  return std::string(s.substr(b, e - b));
}

LanguageSpec parseSpec(std::string_view document) {
  return Reader().read(parseXmlFragment(document));
}

}  // namespace dslad::codegen
