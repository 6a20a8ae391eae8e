#include "leoemu/toml.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace leoemu::toml {

namespace {

std::string_view strip(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

bool is_bare_key_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

// Removes a trailing comment that is not inside a string literal.
std::string_view strip_comment(std::string_view s) {
    bool in_string = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) in_string = !in_string;
        if (s[i] == '#' && !in_string) return s.substr(0, i);
    }
    return s;
}

struct Cursor {
    std::string_view text;
    int line;
};

std::string parse_string_literal(Cursor& c) {
    // c.text starts at the opening quote
    std::string out;
    std::size_t i = 1;
    for (; i < c.text.size(); ++i) {
        const char ch = c.text[i];
        if (ch == '\\') {
            if (i + 1 >= c.text.size()) throw ParseError(c.line, "dangling escape in string");
            const char esc = c.text[++i];
            switch (esc) {
                case '"': out.push_back('"'); break;
                case '\\': out.push_back('\\'); break;
                case 'n': out.push_back('\n'); break;
                case 't': out.push_back('\t'); break;
                default: throw ParseError(c.line, std::string("unsupported escape \\") + esc);
            }
        } else if (ch == '"') {
            c.text.remove_prefix(i + 1);
            return out;
        } else {
            out.push_back(ch);
        }
    }
    throw ParseError(c.line, "unterminated string");
}

Value parse_scalar(Cursor& c);

Value parse_array(Cursor& c) {
    Value v;
    v.type = Value::Type::Array;
    v.line = c.line;
    c.text.remove_prefix(1);  // '['
    for (;;) {
        c.text = strip(c.text);
        if (c.text.empty()) throw ParseError(c.line, "unterminated array");
        if (c.text.front() == ']') {
            c.text.remove_prefix(1);
            return v;
        }
        v.array.push_back(parse_scalar(c));
        c.text = strip(c.text);
        if (!c.text.empty() && c.text.front() == ',') {
            c.text.remove_prefix(1);
        } else if (!c.text.empty() && c.text.front() == ']') {
            c.text.remove_prefix(1);
            return v;
        } else {
            throw ParseError(c.line, "expected ',' or ']' in array");
        }
    }
}

Value parse_scalar(Cursor& c) {
    c.text = strip(c.text);
    if (c.text.empty()) throw ParseError(c.line, "missing value");
    Value v;
    v.line = c.line;
    const char first = c.text.front();
    if (first == '"') {
        v.type = Value::Type::String;
        v.str = parse_string_literal(c);
        return v;
    }
    if (first == '[') return parse_array(c);
    if (c.text.starts_with("true") || c.text.starts_with("false")) {
        v.type = Value::Type::Boolean;
        v.boolean = first == 't';
        c.text.remove_prefix(v.boolean ? 4 : 5);
        return v;
    }
    // number: consume up to delimiter, drop TOML digit separators
    std::size_t end = 0;
    while (end < c.text.size() && c.text[end] != ',' && c.text[end] != ']' &&
           c.text[end] != ' ' && c.text[end] != '\t')
        ++end;
    std::string token(c.text.substr(0, end));
    c.text.remove_prefix(end);
    token.erase(std::remove(token.begin(), token.end(), '_'), token.end());
    if (token.empty()) throw ParseError(c.line, "missing value");

    const bool looks_float = token.find_first_of(".eE") != std::string::npos &&
                             !(token.size() > 1 && token[0] == '0' && token[1] == 'x');
    if (!looks_float) {
        std::int64_t iv = 0;
        auto [p, ec] = std::from_chars(token.data(), token.data() + token.size(), iv);
        if (ec == std::errc{} && p == token.data() + token.size()) {
            v.type = Value::Type::Integer;
            v.integer = iv;
            return v;
        }
    }
    double dv = 0.0;
    auto [p, ec] = std::from_chars(token.data(), token.data() + token.size(), dv);
    if (ec != std::errc{} || p != token.data() + token.size())
        throw ParseError(c.line, "invalid value '" + token + "'");
    v.type = Value::Type::Float;
    v.number = dv;
    return v;
}

}  // namespace

Document parse(std::string_view text) {
    Document doc;
    Table* current = &doc.root;

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view raw = text.substr(pos, eol == std::string_view::npos ? text.size() - pos
                                                                              : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        std::string_view line = strip(strip_comment(raw));
        if (line.empty()) continue;

        if (line.front() == '[') {
            const bool array = line.size() > 1 && line[1] == '[';
            const std::string_view closer = array ? "]]" : "]";
            const std::size_t name_start = array ? 2 : 1;
            const std::size_t close = line.find(closer, name_start);
            if (close == std::string_view::npos || strip(line.substr(close + closer.size())) != "")
                throw ParseError(line_no, "malformed table header");
            std::string name(strip(line.substr(name_start, close - name_start)));
            if (name.empty() || !std::all_of(name.begin(), name.end(), is_bare_key_char))
                throw ParseError(line_no, "invalid table name '" + name + "'");
            if (array) {
                auto& vec = doc.table_arrays[name];
                vec.push_back(Table{{}, line_no});
                current = &vec.back();
            } else {
                auto [it, inserted] = doc.tables.emplace(name, Table{{}, line_no});
                if (!inserted) throw ParseError(line_no, "duplicate table [" + name + "]");
                current = &it->second;
            }
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParseError(line_no, "expected key = value");
        std::string key(strip(line.substr(0, eq)));
        if (key.empty() || !std::all_of(key.begin(), key.end(), is_bare_key_char))
            throw ParseError(line_no, "invalid key '" + key + "'");

        Cursor c{strip(line.substr(eq + 1)), line_no};
        Value v = parse_scalar(c);
        if (!strip(c.text).empty())
            throw ParseError(line_no, "trailing content after value");
        if (!current->values.emplace(key, std::move(v)).second)
            throw ParseError(line_no, "duplicate key '" + key + "'");
    }
    return doc;
}

}  // namespace leoemu::toml
