#include "linkstat/model.hpp"
#include "linkstat/statics.hpp"

namespace linkstat {

std::string_view to_string(OpeningRule rule) {
  switch (rule) {
    case OpeningRule::ReactionSign:
      return "reaction";
    case OpeningRule::LiteralSign:
      return "literal";
  }
  return "reaction";
}

std::optional<OpeningRule> opening_rule_from_string(std::string_view text) {
  if (text == "reaction") return OpeningRule::ReactionSign;
  if (text == "literal") return OpeningRule::LiteralSign;
  return std::nullopt;
}

std::optional<ParameterKind> parameter_kind(std::string_view name) {
  for (const auto& info : kParameters)
    if (info.name == name) return info.kind;
  return std::nullopt;
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Opens:
      return "opens";
    case Verdict::Blocked:
      return "blocked";
    case Verdict::Singular:
      return "singular";
  }
  return "singular";
}

std::string_view to_string(BlockReason reason) {
  switch (reason) {
    case BlockReason::None:
      return "none";
    case BlockReason::NegativeXi:
      return "negative_xi";
    case BlockReason::ContactMaintained:
      return "contact_maintained";
  }
  return "none";
}

}  // namespace linkstat
