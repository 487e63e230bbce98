#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "dslad/codegen/spec.hpp"

namespace dslad::codegen {

struct GeneratorOptions {
  std::string nameSpace = "dsl";
  /// Value type of structures without a valueType attribute; "{name}" expands to the structure name.
  std::string valueType = "{name}";
  /// Extra headers included by every generated file, e.g. the value-type definitions.
  std::vector<std::string> includes;
  /// Shown in the header comment of every file.
  std::string sourceName = "<input>";
};

struct GeneratedFile {
  std::string name;
  std::string content;
};

/// Raised for specs that parse but cannot be emitted (for example clashing generated names).
class GenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an output file cannot be written.
class EmitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/**
 * Translates a validated spec into headers:
 *   dsl_fwd.gen.hpp        forward declarations and Active<Structure> aliases
 *   <Structure>.gen.hpp    expression base per structure
 *   ops_<name>.gen.hpp     expression objects and factories per function name
 *   dsl_registry.gen.hpp   umbrella header with registerTypes()
 * An empty spec produces no files.
 */
std::vector<GeneratedFile> generate(const LanguageSpec& spec, const GeneratorOptions& options);

/// Writes the files into `dir` (created if missing) and returns their paths.
std::vector<std::filesystem::path> emit(const std::vector<GeneratedFile>& files, const std::filesystem::path& dir);

/// Abbreviation of a type in expression object names, e.g. Matrix -> Mat.
std::string typeAbbreviation(const std::string& type);

/// Name of the expression object for one activity variant, e.g. E_mult_MatVec_AA.
std::string expressionName(const FunctionSpec& function, const std::string& pattern);

}  // namespace dslad::codegen
