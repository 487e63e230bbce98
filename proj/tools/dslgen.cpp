// Command line front end of the code generator.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "dslad/codegen/generator.hpp"
#include "dslad/codegen/spec.hpp"

namespace {

constexpr int kValidationError = 1;
constexpr int kIoError = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dslgen: generate active DSL types and operations from an XML language spec"};
  std::string specPath;
  std::string outDir;
  dslad::codegen::GeneratorOptions options;
  bool checkOnly = false;
  app.add_option("--spec", specPath, "XML language specification")->required();
  app.add_option("--out", outDir, "output directory");
  app.add_option("--value-type", options.valueType,
                 "value type of structures without a valueType attribute; {name} expands to the structure name")
      ->capture_default_str();
  app.add_option("--namespace", options.nameSpace, "namespace of the generated code")->capture_default_str();
  app.add_option("--include", options.includes, "header included by the generated code (repeatable)");
  app.add_flag("--check", checkOnly, "validate the spec without writing files");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidationError;
  }
  if (!checkOnly && outDir.empty()) {
    std::cerr << "dslgen: --out is required unless --check is given\n";
    return kValidationError;
  }

  std::ifstream in(specPath, std::ios::binary);
  if (!in) {
    std::cerr << "dslgen: cannot read " << specPath << "\n";
    return kIoError;
  }
  std::ostringstream text;
  text << in.rdbuf();

  try {
    const auto spec = dslad::codegen::parseSpec(text.str());
    options.sourceName = std::filesystem::path(specPath).filename().string();
    const auto files = dslad::codegen::generate(spec, options);
    if (checkOnly) {
      std::cout << specPath << ": ok, " << spec.structures.size() << " structures, " << spec.functions.size()
                << " functions\n";
      return 0;
    }
    for (const auto& path : dslad::codegen::emit(files, outDir)) {
      std::cout << path.string() << "\n";
    }
  } catch (const dslad::codegen::XmlError& e) {
    std::cerr << specPath << ":" << e.what() << "\n";
    return kValidationError;
  } catch (const dslad::codegen::SpecError& e) {
    std::cerr << specPath << ":" << e.what() << "\n";
    return kValidationError;
  } catch (const dslad::codegen::GenerateError& e) {
    std::cerr << specPath << ":" << e.what() << "\n";
    return kValidationError;
  } catch (const dslad::codegen::EmitError& e) {
    std::cerr << "dslgen: " << e.what() << "\n";
    return kIoError;
  }
  return 0;
}
