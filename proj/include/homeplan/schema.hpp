#pragma once

// Machine-readable table of the 21 robot actions.

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace homeplan {

enum class ArgKind { Literal, LocationName, ObjectName, PersonDesc, VlmQuery };

std::string_view to_string(ArgKind kind);

enum class Register : std::uint8_t { Focus = 1, Held = 2, Answer = 4 };

/// Small bit set over the three implicit robot registers.
class RegisterSet {
 public:
  constexpr RegisterSet() = default;
  constexpr RegisterSet(std::initializer_list<Register> regs) {
    for (Register r : regs) bits_ |= static_cast<std::uint8_t>(r);
  }

  constexpr bool contains(Register r) const { return (bits_ & static_cast<std::uint8_t>(r)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr bool operator==(const RegisterSet&) const = default;

  std::vector<std::string_view> names() const;

 private:
  std::uint8_t bits_ = 0;
};

std::string_view to_string(Register r);

struct ParamSpec {
  std::string name;
  ArgKind kind = ArgKind::Literal;
};

struct ActionSchema {
  std::string canonical_name;
  std::vector<ParamSpec> params;
  std::string description;
  RegisterSet reads;
  RegisterSet writes;
  RegisterSet clears;

  std::size_t arity() const { return params.size(); }
  std::vector<ArgKind> arg_kinds() const;
  /// e.g. "Search_Object(name, desc)"
  std::string signature() const;
};

class SchemaRegistry {
 public:
  explicit SchemaRegistry(std::vector<ActionSchema> schemas);

  /// Case-insensitive lookup.
  const ActionSchema* find(std::string_view name) const;
  std::span<const ActionSchema> all() const { return schemas_; }
  std::size_t size() const { return schemas_.size(); }

  /// JSON export used for documentation and prompt construction.
  std::string to_json() const;

 private:
  std::vector<ActionSchema> schemas_;
};

/// The built-in registry. Immutable, constructed once.
const SchemaRegistry& schema_registry();

std::string ascii_lower(std::string_view s);

}  // namespace homeplan
