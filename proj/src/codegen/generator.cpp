#include "dslad/codegen/generator.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "dslad/codegen/patterns.hpp"
#include "templates.hpp"

namespace dslad::codegen {

namespace {

using Vars = std::map<std::string, std::string>;

std::string render(std::string_view tmpl, const Vars& vars) {
  std::string out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t open = tmpl.find("{{", pos);
    if (open == std::string_view::npos) {
      out.append(tmpl.substr(pos));
      return out;
    }
    out.append(tmpl.substr(pos, open - pos));
    const std::size_t close = tmpl.find("}}", open);
    const std::string key(tmpl.substr(open + 2, close - open - 2));
    const auto it = vars.find(key);
    if (it == vars.end()) {
      throw std::logic_error("dslgen: template placeholder '" + key + "' has no value");
    }
    out += it->second;
    pos = close + 2;
  }
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) {
      out += sep;
    }
    out += parts[i];
  }
  return out;
}

std::string includeLine(const std::string& header) {
  if (!header.empty() && (header.front() == '<' || header.front() == '"')) {
    return "#include " + header + "\n";
  }
  return "#include \"" + header + "\"\n";
}

/// One argument of one activity variant.
struct ArgView {
  std::string name;
  std::string type;
  bool active = false;
  bool structure = false;
  bool real = false;
  std::string valueType;  // C++ type of the primal value
  std::string reverseCode;
};

class Generator {
 public:
  Generator(const LanguageSpec& spec, const GeneratorOptions& options) : spec_(spec), options_(options) {}

  std::vector<GeneratedFile> run() {
    if (spec_.empty()) {
      return {};
    }
    banner_ = render(templates::kBanner, {{"source", options_.sourceName}});
    checkNames();
    std::vector<GeneratedFile> files;
    files.push_back({"dsl_fwd.gen.hpp", forward()});
    for (const auto& s : spec_.structures) {
      files.push_back({s.name + ".gen.hpp", structure(s)});
    }
    for (const auto& name : functionNames()) {
      files.push_back({"ops_" + name + ".gen.hpp", ops(name)});
    }
    files.push_back({"dsl_registry.gen.hpp", registry(files)});
    return files;
  }

 private:
  std::string valueTypeOf(const std::string& structure) const {
    const StructureSpec* s = spec_.findStructure(structure);
    if (s != nullptr && !s->valueType.empty()) {
      return s->valueType;
    }
    std::string out = options_.valueType;
    for (std::size_t p = out.find("{name}"); p != std::string::npos; p = out.find("{name}", p + structure.size())) {
      out.replace(p, 6, structure);
    }
    return out;
  }

  std::string primalType(const std::string& type) const {
    return isPrimitive(type) ? type : valueTypeOf(type);
  }

  std::vector<std::string> functionNames() const {
    std::vector<std::string> names;
    std::set<std::string> seen;
    for (const auto& f : spec_.functions) {
      if (seen.insert(f.name).second) {
        names.push_back(f.name);
      }
    }
    return names;
  }

  void checkNames() const {
    std::map<std::string, SourceLocation> nodes;
    for (const auto& f : spec_.functions) {
      const auto all = f.allArgs();
      std::vector<bool> differentiable;
      for (const auto& a : all) {
        differentiable.push_back(a.differentiable);
      }
      for (const auto& p : enumeratePatterns(differentiable)) {
        const std::string node = expressionName(f, p.str());
        const auto [it, inserted] = nodes.emplace(node, f.where);
        if (!inserted) {
          throw GenerateError(std::to_string(f.where.line) + ":" + std::to_string(f.where.column) +
                              ": expression object " + node + " clashes with the function at line " +
                              std::to_string(it->second.line));
        }
      }
    }
  }

  std::vector<ArgView> view(const FunctionSpec& f, const ActivityPattern& p) const {
    std::vector<ArgView> out;
    const auto all = f.allArgs();
    for (std::size_t i = 0; i < all.size(); ++i) {
      ArgView a;
      a.name = all[i].name;
      a.type = all[i].type;
      a.active = p.active[i];
      a.structure = !isPrimitive(a.type);
      a.real = a.type == kRealType;
      a.valueType = primalType(a.type);
      a.reverseCode = all[i].reverseCode;
      out.push_back(std::move(a));
    }
    return out;
  }

  std::string resultValueType(const FunctionSpec& f) const { return primalType(f.resultType); }

  std::string exprBase(const std::string& type) const {
    return type == kRealType ? "dslad::ScalarExpression" : type + "Expression";
  }

  // File builders.

  std::string forward() const {
    std::string includes;
    if (!options_.includes.empty()) {
      includes += "\n";
      for (const auto& h : options_.includes) {
        includes += includeLine(h);
      }
    }
    std::string declarations;
    for (const auto& s : spec_.structures) {
      declarations += render(templates::kForwardStructure, {{"structure", s.name}, {"valueType", valueTypeOf(s.name)}});
    }
    return render(templates::kForward,
                  {{"banner", banner_}, {"includes", includes}, {"ns", options_.nameSpace}, {"declarations", declarations}});
  }

  std::string structure(const StructureSpec& s) const {
    std::string members;
    for (const auto& f : spec_.functions) {
      if (f.memberOf != s.name) {
        continue;
      }
      for (const auto& p : patternsOf(f)) {
        if (!p.active[0]) {
          continue;
        }
        const auto args = view(f, p);
        const Signature sig = signature(args, 1);
        members += render(templates::kMemberDeclaration, {{"template", sig.templateLine("\n  ")},
                                                          {"function", f.name},
                                                          {"params", sig.params}});
      }
    }
    return render(templates::kStructure, {{"banner", banner_},
                                          {"ns", options_.nameSpace},
                                          {"structure", s.name},
                                          {"valueType", valueTypeOf(s.name)},
                                          {"members", members}});
  }

  std::string ops(const std::string& name) const {
    std::string includes = "#include \"dsl_fwd.gen.hpp\"\n";
    for (const auto& s : spec_.structures) {
      includes += "#include \"" + s.name + ".gen.hpp\"\n";
    }
    std::string nodes;
    std::string factories;
    std::string members;
    for (const auto& f : spec_.functions) {
      if (f.name != name) {
        continue;
      }
      for (const auto& p : patternsOf(f)) {
        const auto args = view(f, p);
        const std::string node = expressionName(f, p.str());
        nodes += nodeCode(f, node, args);
        factories += factoryCode(f, node, args);
        if (f.memberOf && p.active[0]) {
          members += memberCode(f, node, args);
        }
      }
      factories += passiveCode(f);
    }
    return render(templates::kOps, {{"banner", banner_},
                                    {"includes", includes},
                                    {"ns", options_.nameSpace},
                                    {"body", nodes + factories + members}});
  }

  std::string registry(const std::vector<GeneratedFile>& files) const {
    std::string includes;
    for (const auto& file : files) {
      includes += "#include \"" + file.name + "\"\n";
    }
    std::vector<std::string> names;
    std::string registrations;
    for (std::size_t i = 0; i < spec_.structures.size(); ++i) {
      const auto& s = spec_.structures[i];
      names.push_back("\"" + s.name + "\"");
      registrations += "  tape.template registerType<" + valueTypeOf(s.name) +
                       ">(static_cast<dslad::TypeTag>(firstTag + " + std::to_string(i) + "));\n";
    }
    return render(templates::kRegistry, {{"banner", banner_},
                                         {"includes", includes},
                                         {"ns", options_.nameSpace},
                                         {"count", std::to_string(spec_.structures.size())},
                                         {"names", join(names, ", ")},
                                         {"registrations", registrations}});
  }

  std::vector<ActivityPattern> patternsOf(const FunctionSpec& f) const {
    std::vector<bool> differentiable;
    for (const auto& a : f.allArgs()) {
      differentiable.push_back(a.differentiable);
    }
    return enumeratePatterns(differentiable);
  }

  // Pieces of one activity variant.

  struct Signature {
    std::vector<std::string> templateParams;
    std::vector<std::string> requirements;
    std::string params;

    std::string templateLine(const std::string& newline) const {
      if (templateParams.empty()) {
        return "";
      }
      std::string out = "template <" + join(templateParams, ", ") + ">" + newline;
      if (!requirements.empty()) {
        out += "  requires " + join(requirements, " && ") + newline;
      }
      return out;
    }
  };

  /// Parameters of factories and member functions, skipping the first `skip` arguments.
  Signature signature(const std::vector<ArgView>& args, std::size_t skip) const {
    Signature sig;
    std::vector<std::string> params;
    for (std::size_t i = skip; i < args.size(); ++i) {
      const ArgView& a = args[i];
      if (a.active) {
        sig.templateParams.push_back("typename E_" + a.name);
        params.push_back("const " + exprBase(a.type) + "<E_" + a.name + ">& " + a.name);
      } else if (a.real) {
        sig.templateParams.push_back("typename R_" + a.name);
        sig.requirements.push_back("std::is_arithmetic_v<R_" + a.name + ">");
        params.push_back("R_" + a.name + " " + a.name);
      } else if (a.structure) {
        params.push_back("const " + a.valueType + "& " + a.name);
      } else {
        params.push_back(a.valueType + " " + a.name);
      }
    }
    sig.params = join(params, ", ");
    return sig;
  }

  static std::string nodeTemplateArgs(const std::vector<ArgView>& args, const std::string& receiver) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i].active) {
        out.push_back(i == 0 && !receiver.empty() ? receiver : "E_" + args[i].name);
      }
    }
    return join(out, ", ");
  }

  static std::string callArgs(const std::vector<ArgView>& args, const std::string& receiver) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (i == 0 && !receiver.empty()) {
        out.push_back(receiver);
      } else if (args[i].active) {
        out.push_back(args[i].name + ".cast()");
      } else {
        out.push_back(args[i].name);
      }
    }
    return join(out, ", ");
  }

  std::string nodeCode(const FunctionSpec& f, const std::string& node, const std::vector<ArgView>& args) const {
    std::vector<std::string> templateParams;
    std::vector<std::string> activeNames;
    std::string aliases;
    std::string members;
    std::vector<std::string> ctorParams;
    std::vector<std::string> ctorInits;
    std::vector<std::string> valueArgs;
    std::vector<std::string> primalParams;
    std::vector<std::string> countActive;
    std::string recordCalls;
    std::string replayMembers;
    std::vector<std::string> replayInits;
    std::vector<std::string> replayArgs;
    std::string backwardCalls;
    std::string diffs;

    for (const auto& a : args) {
      aliases += "  using A_" + a.name + " = " + (a.real ? std::string("Real") : a.valueType) + ";\n";
      if (a.active) {
        templateParams.push_back("typename E_" + a.name);
        activeNames.push_back(a.name);
        members += "  dslad::StoreAs<E_" + a.name + "> " + a.name + ";\n";
        ctorParams.push_back("const E_" + a.name + "& " + a.name + "_");
        countActive.push_back(a.name + ".countActive()");
      } else {
        members += "  dslad::Constant<A_" + a.name + "> " + a.name + ";\n";
        ctorParams.push_back("const A_" + a.name + "& " + a.name + "_");
      }
      ctorInits.push_back(a.name + "(" + a.name + "_)");
      valueArgs.push_back(a.name + ".getValue()");
      primalParams.push_back("[[maybe_unused]] const A_" + a.name + "& " + a.name);
      recordCalls += "    " + a.name + ".record(recorder);\n";
      replayArgs.push_back(a.name + ".value");
    }
    // Streams are read backwards: the last argument is replayed first.
    for (auto it = args.rbegin(); it != args.rend(); ++it) {
      const ArgView& a = *it;
      replayMembers += "    typename " +
                       (a.active ? "E_" + a.name : "dslad::Constant<A_" + a.name + ">") + "::Replay " + a.name +
                       ";\n";
      replayInits.push_back(a.name + "(context)");
    }
    const std::string primalParamList = join(primalParams, ", ");
    for (const auto& a : args) {
      if (!a.active) {
        continue;
      }
      diffs += render(templates::kDiff,
                      {{"arg", a.name}, {"primalParams", primalParamList}, {"reverseCode", a.reverseCode}});
      backwardCalls += "      " + a.name + ".backward(diff_b_" + a.name + "(" + join(replayArgs, ", ") +
                       ", value, r_b), context);\n";
    }
    std::string realChecks;
    for (std::size_t i = 1; i < activeNames.size(); ++i) {
      realChecks += "  static_assert(std::is_same_v<typename E_" + activeNames[i] +
                    "::Real, Real>, \"operands recorded on different tape types\");\n";
    }
    const std::string resultType =
        f.resultType == kRealType ? std::string("Real") : resultValueType(f);
    return render(templates::kNode, {{"templateParams", join(templateParams, ", ")},
                                     {"node", node},
                                     {"base", exprBase(f.resultType)},
                                     {"templateArgs", join([&] {
                                        std::vector<std::string> v;
                                        for (const auto& n : activeNames) {
                                          v.push_back("E_" + n);
                                        }
                                        return v;
                                      }(), ", ")},
                                     {"realSource", "typename E_" + activeNames.front() + "::Real"},
                                     {"resultType", resultType},
                                     {"aliases", aliases},
                                     {"realChecks", realChecks},
                                     {"members", members},
                                     {"ctorParams", join(ctorParams, ", ")},
                                     {"ctorInits", join(ctorInits, ", ")},
                                     {"valueArgs", join(valueArgs, ", ")},
                                     {"primalParams", primalParamList},
                                     {"primalCode", f.primalCode},
                                     {"diffs", diffs},
                                     {"countActive", join(countActive, " + ")},
                                     {"recordCalls", recordCalls},
                                     {"replayMembers", replayMembers},
                                     {"replayInits", join(replayInits, ", ")},
                                     {"replayArgs", join(replayArgs, ", ")},
                                     {"backwardCalls", backwardCalls}});
  }

  std::string factoryCode(const FunctionSpec& f, const std::string& node, const std::vector<ArgView>& args) const {
    const Signature sig = signature(args, 0);
    std::string requiresLine;
    if (!sig.requirements.empty()) {
      requiresLine = "  requires " + join(sig.requirements, " && ") + "\n";
    }
    return render(templates::kFactory, {{"templateParams", join(sig.templateParams, ", ")},
                                        {"requires", requiresLine},
                                        {"node", node},
                                        {"templateArgs", nodeTemplateArgs(args, "")},
                                        {"function", f.name},
                                        {"params", sig.params},
                                        {"args", callArgs(args, "")}});
  }

  std::string memberCode(const FunctionSpec& f, const std::string& node, const std::vector<ArgView>& args) const {
    const Signature sig = signature(args, 1);
    return render(templates::kMemberDefinition, {{"template", sig.templateLine("\n")},
                                                 {"structure", *f.memberOf},
                                                 {"function", f.name},
                                                 {"params", sig.params},
                                                 {"node", node},
                                                 {"templateArgs", nodeTemplateArgs(args, "D")},
                                                 {"args", callArgs(args, "cast()")}});
  }

  /// Plain overload for calls where every argument is passive.
  std::string passiveCode(const FunctionSpec& f) const {
    bool usesReal = f.resultType == kRealType;
    std::vector<std::string> params;
    std::string aliases;
    for (const auto& a : f.allArgs()) {
      std::string type;
      if (a.type == kRealType) {
        usesReal = true;
        type = "Real";
        params.push_back("std::type_identity_t<Real> " + a.name);
      } else if (isPrimitive(a.type)) {
        type = a.type;
        params.push_back(a.type + " " + a.name);
      } else {
        type = valueTypeOf(a.type);
        params.push_back("const " + type + "& " + a.name);
      }
      aliases += "  using A_" + a.name + " [[maybe_unused]] = " + type + ";\n";
    }
    return render(templates::kPassive, {{"template", usesReal ? "template <typename Real = double>\n" : "inline "},
                                        {"resultType", f.resultType == kRealType ? "Real" : resultValueType(f)},
                                        {"function", f.name},
                                        {"params", join(params, ", ")},
                                        {"aliases", aliases},
                                        {"primalCode", f.primalCode}});
  }

  const LanguageSpec& spec_;
  const GeneratorOptions& options_;
  std::string banner_;
};

}  // namespace

std::string typeAbbreviation(const std::string& type) { return type.substr(0, 3); }

std::string expressionName(const FunctionSpec& function, const std::string& pattern) {
  std::string types;
  for (const auto& a : function.allArgs()) {
    types += typeAbbreviation(a.type);
  }
  return "E_" + function.name + "_" + types + "_" + pattern;
}

std::vector<GeneratedFile> generate(const LanguageSpec& spec, const GeneratorOptions& options) {
  return Generator(spec, options).run();
}

std::vector<std::filesystem::path> emit(const std::vector<GeneratedFile>& files, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw EmitError("cannot create " + dir.string() + ": " + ec.message());
  }
  std::vector<std::filesystem::path> written;
  for (const auto& file : files) {
    const auto path = dir / file.name;
    // Leave identical files untouched so build systems do not rebuild needlessly.
    {
      std::ifstream existing(path, std::ios::binary);
      if (existing) {
        std::ostringstream current;
        current << existing.rdbuf();
        if (current.str() == file.content) {
          written.push_back(path);
          continue;
        }
      }
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw EmitError("cannot write " + path.string());
    }
    out << file.content;
    out.close();
    if (!out) {
      throw EmitError("error while writing " + path.string());
    }
    written.push_back(path);
  }
  return written;
}

}  // namespace dslad::codegen
