#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "multdsl/dsl_registry.gen.hpp"
#include "dslad/codegen/generator.hpp"
#include "dslad/codegen/patterns.hpp"
#include "dslad/codegen/spec.hpp"
#include "dslad/verification/oracles.hpp"

using namespace dslad::codegen;

namespace {

const char* kMult = R"(<structure name="Matrix">
</structure>
<structure name="Vector">
</structure>

<function name="mult" rType="Vector">
  <arg input="1" type="Matrix" name="m">
    <reverse> return r_b * v.transpose(); </reverse>
  </arg>
  <arg input="1" type="Vector" name="v">
    <reverse> return m.transpose() * r_b; </reverse>
  </arg>
  <primal> return m * v; </primal>
</function>
)";

const GeneratedFile& fileNamed(const std::vector<GeneratedFile>& files, const std::string& name) {
  for (const auto& f : files) {
    if (f.name == name) {
      return f;
    }
  }
  FAIL("missing generated file " << name);
  throw std::logic_error("unreachable");
}

SourceLocation errorAt(const std::string& doc) {
  try {
    parseSpec(doc);
  } catch (const SpecError& e) {
    return e.where();
  } catch (const XmlError& e) {
    return e.where();
  }
  return {0, 0};
}

}  // namespace

TEST_CASE("the mult description parses") {
  const auto spec = parseSpec(kMult);
  REQUIRE(spec.structures.size() == 2);
  REQUIRE(spec.functions.size() == 1);
  const auto& f = spec.functions[0];
  CHECK(f.name == "mult");
  CHECK(f.resultType == "Vector");
  REQUIRE(f.args.size() == 2);
  CHECK(f.args[0].differentiable);
  CHECK(f.args[0].reverseCode == "return r_b * v.transpose();");
  CHECK(f.primalCode == "return m * v;");
}

TEST_CASE("undeclared types are reported at the type attribute") {
  std::string doc = kMult;
  doc.replace(doc.find("type=\"Matrix\""), 13, "type=\"Tensor\"");
  try {
    parseSpec(doc);
    FAIL("expected an error");
  } catch (const SpecError& e) {
    CHECK(e.where().line == 7);
    CHECK(e.where().column == 18);
    CHECK(std::string(e.what()).find("Tensor") != std::string::npos);
  }
}

TEST_CASE("malformed descriptions are rejected with locations") {
  CHECK(errorAt("<structure name=\"A\">").line == 1);
  CHECK(errorAt("<structure name=\"A\"></structure>\n<bogus/>").line == 2);
  CHECK(errorAt("<structure name=\"A\"/><structure name=\"A\"/>").column == 33);
  CHECK(errorAt("<structure name=\"A\"/>\n<function name=\"f\" rType=\"A\">\n  <arg type=\"A\" name=\"x\" input=\"1\"/>\n"
                "  <primal>return x;</primal>\n</function>")
            .line == 3);
  CHECK(errorAt("<structure name=\"A\"/>\n<function name=\"f\" rType=\"A\">\n  <arg type=\"A\" name=\"x\" input=\"0\"/>\n"
                "</function>")
            .line == 2);
  CHECK(errorAt("<structure name=\"A\"/>\n<function name=\"f\" rType=\"A\">\n  <arg type=\"A\" name=\"r_b\" input=\"0\"/>\n"
                "  <primal>return r_b;</primal>\n</function>")
            .line == 3);
  CHECK(errorAt("<structure name=\"A\"/>\n<function name=\"f\" rType=\"int\">\n  <arg type=\"A\" name=\"x\" input=\"0\"/>\n"
                "  <primal>return 1;</primal>\n</function>")
            .line == 2);
  CHECK(errorAt("<structure name=\"A\"/>\n<function name=\"f\" rType=\"A\">\n  <arg type=\"int\" name=\"k\" input=\"1\">\n"
                "    <reverse>return 0;</reverse>\n  </arg>\n  <primal>return A();</primal>\n</function>")
            .line == 3);
  CHECK(errorAt("<!DOCTYPE x><structure name=\"A\"/>").line == 1);
  CHECK(errorAt("<structure name=\"A\" extra=\"1\"/>").column == 21);
}

TEST_CASE("XML entities and CDATA in code snippets") {
  const auto spec = parseSpec(
      "<structure name=\"A\"/>\n<function name=\"f\" rType=\"A\">\n"
      "  <arg type=\"A\" name=\"x\" input=\"1\"><reverse><![CDATA[return x < x ? r_b : r_b;]]></reverse></arg>\n"
      "  <primal>return x &lt; x &amp;&amp; true ? x : x;</primal>\n</function>");
  CHECK(spec.functions[0].args[0].reverseCode == "return x < x ? r_b : r_b;");
  CHECK(spec.functions[0].primalCode == "return x < x && true ? x : x;");
}

TEST_CASE("an empty description generates nothing") {
  const auto spec = parseSpec("  <!-- nothing here -->  ");
  CHECK(spec.empty());
  CHECK(generate(spec, {}).empty());
}

TEST_CASE("activity patterns") {
  CHECK(enumeratePatterns({true, true}).size() == 3);
  CHECK(enumeratePatterns({true, true, true, true}).size() == 15);
  CHECK(enumeratePatterns({true, false, true}).size() == 3);
  CHECK(enumeratePatterns({false, false}).empty());
  std::vector<std::string> names;
  for (const auto& p : enumeratePatterns({true, true})) {
    names.push_back(p.str());
  }
  CHECK(names == std::vector<std::string>{"AA", "AP", "PA"});
  for (std::size_t d = 1; d <= 6; ++d) {
    const auto patterns = enumeratePatterns(std::vector<bool>(d, true));
    CHECK(patterns.size() == (std::size_t{1} << d) - 1);
    std::set<std::string> unique;
    for (const auto& p : patterns) {
      unique.insert(p.str());
    }
    CHECK(unique.size() == patterns.size());
  }
}

TEST_CASE("generated names and contents") {
  const auto spec = parseSpec(kMult);
  CHECK(expressionName(spec.functions[0], "AP") == "E_mult_MatVec_AP");
  GeneratorOptions options;
  options.nameSpace = "multdsl";
  const auto files = generate(spec, options);
  std::vector<std::string> names;
  for (const auto& f : files) {
    names.push_back(f.name);
  }
  CHECK(names == std::vector<std::string>{"dsl_fwd.gen.hpp", "Matrix.gen.hpp", "Vector.gen.hpp", "ops_mult.gen.hpp",
                                          "dsl_registry.gen.hpp"});
  const auto& ops = fileNamed(files, "ops_mult.gen.hpp").content;
  for (const char* pattern : {"E_mult_MatVec_AA", "E_mult_MatVec_AP", "E_mult_MatVec_PA"}) {
    CHECK(ops.find(std::string("struct ") + pattern) != std::string::npos);
  }
  CHECK(ops.find("E_mult_MatVec_PP") == std::string::npos);
  CHECK(ops.find("return r_b * v.transpose();") != std::string::npos);
  CHECK(ops.find("return m.transpose() * r_b;") != std::string::npos);
  CHECK(ops.find("return m * v;") != std::string::npos);
  CHECK(ops.find("namespace multdsl") != std::string::npos);
}

TEST_CASE("generation is deterministic") {
  const auto spec = parseSpec(kMult);
  const auto a = generate(spec, {});
  const auto b = generate(parseSpec(kMult), {});
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].name == b[i].name);
    CHECK(a[i].content == b[i].content);
  }
}

TEST_CASE("emit writes only changed files") {
  const auto dir = std::filesystem::temp_directory_path() / "dslad_codegen_emit";
  std::filesystem::remove_all(dir);
  const auto files = generate(parseSpec(kMult), {});
  CHECK(emit(files, dir).size() == files.size());
  const auto stamp = std::filesystem::last_write_time(dir / "ops_mult.gen.hpp");
  CHECK(emit(files, dir).size() == files.size());
  CHECK(std::filesystem::last_write_time(dir / "ops_mult.gen.hpp") == stamp);
  std::ifstream in(dir / "ops_mult.gen.hpp");
  std::stringstream text;
  text << in.rdbuf();
  CHECK(text.str() == fileNamed(files, "ops_mult.gen.hpp").content);
  std::filesystem::remove_all(dir);
}

TEST_CASE("clashing generated names are rejected") {
  const char* doc = R"(<structure name="Matrix"/><structure name="Matter"/>
<function name="f" rType="Matrix"><arg type="Matrix" name="x" input="1"><reverse>return r_b;</reverse></arg>
  <primal>return x;</primal></function>
<function name="f" rType="Matrix"><arg type="Matter" name="x" input="1"><reverse>return r_b;</reverse></arg>
  <primal>return x;</primal></function>
)";
  CHECK_THROWS_AS(generate(parseSpec(doc), {}), GenerateError);
}

TEST_CASE("generated mult variants agree with finite differences") {
  using Eigen::MatrixXd;
  using Eigen::VectorXd;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const MatrixXd M0 = MatrixXd::NullaryExpr(4, 3, [&] { return u(rng); });
  const VectorXd v0 = VectorXd::NullaryExpr(3, [&] { return u(rng); });
  const VectorXd weights = VectorXd::NullaryExpr(4, [&] { return u(rng); });
  std::vector<double> point(M0.data(), M0.data() + M0.size());
  point.insert(point.end(), v0.data(), v0.data() + v0.size());
  auto primal = [&](const std::vector<double>& x) {
    const MatrixXd M = Eigen::Map<const MatrixXd>(x.data(), 4, 3);
    const VectorXd v = Eigen::Map<const VectorXd>(x.data() + 12, 3);
    return weights.dot(M * v);
  };
  for (const std::string pattern : {"AA", "AP", "PA"}) {
    dslad::Tape<double> tape;
    dslad::Tape<double>::Scope scope(tape);
    multdsl::registerTypes(tape);
    multdsl::ActiveMatrix<double> m(M0);
    multdsl::ActiveVector<double> v(v0);
    if (pattern[0] == 'A') {
      m.registerInput();
    }
    if (pattern[1] == 'A') {
      v.registerInput();
    }
    tape.setActive();
    multdsl::ActiveVector<double> w;
    if (pattern == "AA") {
      w = multdsl::mult(m, v);
    } else if (pattern == "AP") {
      w = multdsl::mult(m, v0);
    } else {
      w = multdsl::mult(M0, v);
    }
    tape.setPassive();
    CHECK(tape.statementCount() == 1);
    w.setAdjoint(weights);
    tape.evaluateReverse();
    const MatrixXd mb = m.getAdjoint();
    const VectorXd vb = v.getAdjoint();
    for (std::size_t k = 0; k < point.size(); ++k) {
      const bool active = k < 12 ? pattern[0] == 'A' : pattern[1] == 'A';
      const double ad = k < 12 ? mb.data()[k] : vb[static_cast<Eigen::Index>(k - 12)];
      const double fd = active ? dslad::verification::centralPartial(primal, point, k) : 0.0;
      INFO(pattern << " component " << k);
      CHECK(dslad::verification::relativeError(ad, fd) <= 1e-6);
    }
  }
  CHECK(multdsl::mult(M0, v0) == M0 * v0);
}
