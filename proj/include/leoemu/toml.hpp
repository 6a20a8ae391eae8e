#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace leoemu::toml {

// Minimal TOML subset: top-level key/value pairs, [table] sections,
// [[table]] arrays, scalars (string, integer, float, boolean) and
// single-line arrays of scalars. Enough for the emulation config schema;
// no dotted keys, inline tables, or multi-line strings.

struct ParseError : std::runtime_error {
    int line;
    ParseError(int line_, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line_) + ": " + msg), line(line_) {}
};

struct Value {
    enum class Type { String, Integer, Float, Boolean, Array };
    Type type = Type::String;
    std::string str;
    std::int64_t integer = 0;
    double number = 0.0;
    bool boolean = false;
    std::vector<Value> array;
    int line = 0;

    bool is_number() const { return type == Type::Integer || type == Type::Float; }
    double as_number() const { return type == Type::Integer ? static_cast<double>(integer) : number; }
};

struct Table {
    std::map<std::string, Value> values;
    int line = 0;
};

struct Document {
    Table root;
    std::map<std::string, Table> tables;                    // [name]
    std::map<std::string, std::vector<Table>> table_arrays; // [[name]]
};

/// Throws ParseError on the first syntax error; duplicate keys within one
/// table are syntax errors too.
Document parse(std::string_view text);

}  // namespace leoemu::toml
