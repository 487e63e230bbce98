#pragma once

#include <string_view>

// Text templates of the emitted C++. Placeholders are {{key}}; the generator
// fills them and concatenates the per-argument fragments.

namespace dslad::codegen::templates {

inline constexpr std::string_view kBanner =
    R"(// Generated by dslgen from {{source}}. Do not edit.
#pragma once
)";

inline constexpr std::string_view kForward = R"({{banner}}
#include <array>
#include <cstddef>
#include <stdexcept>
#include <type_traits>

#include "dslad/dsl/active_object.hpp"
#include "dslad/scalar/active_scalar.hpp"
{{includes}}
namespace {{ns}} {
{{declarations}}
}  // namespace {{ns}}
)";

inline constexpr std::string_view kForwardStructure = R"(
template <typename D>
struct {{structure}}Expression;

template <typename Real>
using Active{{structure}} = dslad::ActiveObject<{{valueType}}, Real, {{structure}}Expression>;
)";

inline constexpr std::string_view kStructure = R"({{banner}}
#include "dsl_fwd.gen.hpp"

namespace {{ns}} {

/// Base of every expression whose value is a {{structure}}.
template <typename D>
struct {{structure}}Expression {
  using RType = {{valueType}};

  const D& cast() const { return static_cast<const D&>(*this); }
{{members}}};

}  // namespace {{ns}}
)";

inline constexpr std::string_view kMemberDeclaration = R"(
  {{template}}auto {{function}}({{params}}) const;
)";

inline constexpr std::string_view kOps = R"({{banner}}
{{includes}}
namespace {{ns}} {
{{body}}
}  // namespace {{ns}}
)";

inline constexpr std::string_view kNode = R"(
template <{{templateParams}}>
struct {{node}} : public {{base}}<{{node}}<{{templateArgs}}>> {
  using Real = {{realSource}};
  using RType = {{resultType}};
  using Value = RType;
{{aliases}}  static constexpr bool kStoreByReference = false;
{{realChecks}}
{{members}}  RType value;

  {{node}}({{ctorParams}})
      : {{ctorInits}}, value(computeValue({{valueArgs}})) {}

  static RType computeValue({{primalParams}}) {
    {{primalCode}}
  }
{{diffs}}
  const RType& getValue() const { return value; }

  std::size_t countActive() const { return {{countActive}}; }

  template <typename Recorder>
  void record(Recorder& recorder) const {
{{recordCalls}}  }

  struct Replay {
{{replayMembers}}    RType value;

    template <typename Context>
    explicit Replay(Context& context)
        : {{replayInits}}, value(computeValue({{replayArgs}})) {}

    template <typename Context>
    void backward(const RType& r_b, Context& context) {
{{backwardCalls}}    }
  };
};
)";

inline constexpr std::string_view kDiff = R"(
  static A_{{arg}} diff_b_{{arg}}({{primalParams}},
      [[maybe_unused]] const RType& r, [[maybe_unused]] const RType& r_b) {
    {{reverseCode}}
  }
)";

inline constexpr std::string_view kFactory = R"(
template <{{templateParams}}>
{{requires}}{{node}}<{{templateArgs}}> {{function}}({{params}}) {
  return {{node}}<{{templateArgs}}>({{args}});
}
)";

inline constexpr std::string_view kMemberDefinition = R"(
template <typename D>
{{template}}auto {{structure}}Expression<D>::{{function}}({{params}}) const {
  return {{node}}<{{templateArgs}}>({{args}});
}
)";

inline constexpr std::string_view kPassive = R"(
{{template}}{{resultType}} {{function}}({{params}}) {
{{aliases}}  {{primalCode}}
}
)";

inline constexpr std::string_view kRegistry = R"({{banner}}
{{includes}}
namespace {{ns}} {

inline constexpr std::array<const char*, {{count}}> kStructureNames{ {{names}} };

/// Registers every structure on `tape` with consecutive tags starting at
/// firstTag and returns the next unused tag.
template <typename Real>
dslad::TypeTag registerTypes(dslad::Tape<Real>& tape, dslad::TypeTag firstTag = 1) {
  if (static_cast<std::size_t>(firstTag) + {{count}} > 256) {
    throw std::out_of_range("{{ns}}: not enough type tags left");
  }
{{registrations}}  return static_cast<dslad::TypeTag>(firstTag + {{count}});
}

}  // namespace {{ns}}
)";

}  // namespace dslad::codegen::templates
