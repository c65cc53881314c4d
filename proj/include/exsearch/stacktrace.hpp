#pragma once

#include <charconv>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "text.hpp"

namespace exsearch {

// One method call reference. position is the 1-based index in the trace,
// counted across `Caused by` segments in textual order.
struct stack_frame {
    std::string package_name;  // dotted path, empty for the default package
    std::string class_name;    // inner-class '$' kept intact
    std::string method_name;
    std::string source_file;   // empty when the frame carries no source
    int line = 0;              // 0 when absent
    int position = 0;

    bool operator==(const stack_frame&) const = default;
};

struct exception_entry {
    std::string type;     // fully qualified
    std::string message;  // may be empty

    bool operator==(const exception_entry&) const = default;
};

struct stack_trace {
    std::vector<exception_entry> exceptions;
    std::vector<stack_frame> frames;

    std::size_t frame_count() const { return frames.size(); }
    bool operator==(const stack_trace&) const = default;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline bool is_type_start(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == '$';
}

inline bool is_type_char(unsigned char c) { return is_ascii_alnum(c) || c == '_' || c == '$'; }

// Dotted identifier path, or a bare name that looks like a throwable.
inline bool plausible_exception_type(std::string_view s) {
    if (s.empty()) return false;
    bool at_segment_start = true;
    for (unsigned char c : s) {
        if (c == '.') {
            if (at_segment_start) return false;
            at_segment_start = true;
        } else if (at_segment_start) {
            if (!is_type_start(c)) return false;
            at_segment_start = false;
        } else if (!is_type_char(c)) {
            return false;
        }
    }
    if (at_segment_start) return false;  // trailing dot
    if (s.find('.') != std::string_view::npos) return true;
    return s.ends_with("Exception") || s.ends_with("Error") || s.ends_with("Throwable");
}

inline std::optional<exception_entry> parse_exception_header(std::string_view line) {
    line = trim(line);
    if (line.empty()) return std::nullopt;
    std::string_view type = line;
    std::string_view message;
    if (auto colon = line.find(':'); colon != std::string_view::npos) {
        type = trim(line.substr(0, colon));
        message = trim(line.substr(colon + 1));
    }
    if (!plausible_exception_type(type)) return std::nullopt;
    return exception_entry{std::string(type), std::string(message)};
}

// `at pkg.Class.method(Source)`, tolerating Java 9 module prefixes and
// trailing artifact annotations.
inline std::optional<stack_frame> parse_frame_line(std::string_view line) {
    line = trim(line);
    if (!line.starts_with("at ") && !line.starts_with("at\t")) return std::nullopt;
    line = trim(line.substr(3));
    const auto open = line.find('(');
    if (open == std::string_view::npos) return std::nullopt;
    const auto close = line.find(')', open + 1);
    if (close == std::string_view::npos) return std::nullopt;

    std::string_view qualified = trim(line.substr(0, open));
    if (auto slash = qualified.rfind('/'); slash != std::string_view::npos)
        qualified = qualified.substr(slash + 1);  // drop `module/` or `loader//`
    const auto last_dot = qualified.rfind('.');
    if (last_dot == std::string_view::npos || last_dot == 0 || last_dot + 1 == qualified.size())
        return std::nullopt;
    std::string_view method = qualified.substr(last_dot + 1);
    std::string_view class_path = qualified.substr(0, last_dot);
    const auto class_dot = class_path.rfind('.');
    std::string_view class_name = class_dot == std::string_view::npos ? class_path : class_path.substr(class_dot + 1);
    std::string_view package = class_dot == std::string_view::npos ? std::string_view{} : class_path.substr(0, class_dot);
    if (class_name.empty() || method.empty()) return std::nullopt;

    stack_frame frame;
    frame.package_name = std::string(package);
    frame.class_name = std::string(class_name);
    frame.method_name = std::string(method);

    std::string_view source = trim(line.substr(open + 1, close - open - 1));
    if (!source.empty() && source != "Native Method" && source != "Unknown Source") {
        if (auto colon = source.rfind(':'); colon != std::string_view::npos) {
            std::string_view file = source.substr(0, colon);
            std::string_view digits = source.substr(colon + 1);
            int value = 0;
            auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
            if (ec == std::errc{} && ptr == digits.data() + digits.size() && value > 0) {
                frame.source_file = std::string(file);
                frame.line = value;
            } else {
                frame.source_file = std::string(source);
            }
        } else {
            frame.source_file = std::string(source);
        }
    }
    return frame;
}

}  // namespace detail

// Recognizes exception headers, `at ...` frame lines and `Caused by:` /
// `Suppressed:` chain markers; everything else is skipped. Returns nullopt
// when no trace content is found at all.
inline std::optional<stack_trace> try_parse_trace(std::string_view raw) {
    stack_trace trace;
    std::size_t pos = 0;
    while (pos <= raw.size()) {
        const auto eol = raw.find('\n', pos);
        std::string_view line = raw.substr(pos, eol == std::string_view::npos ? raw.size() - pos : eol - pos);
        pos = eol == std::string_view::npos ? raw.size() + 1 : eol + 1;

        std::string_view trimmed = detail::trim(line);
        if (trimmed.empty()) continue;
        if (auto frame = detail::parse_frame_line(trimmed)) {
            frame->position = static_cast<int>(trace.frames.size()) + 1;
            trace.frames.push_back(std::move(*frame));
            continue;
        }
        if (trimmed.starts_with("...")) continue;  // `... N more`
        std::string_view header_text = trimmed;
        if (trimmed.starts_with("Caused by:"))
            header_text = trimmed.substr(10);
        else if (trimmed.starts_with("Suppressed:"))
            header_text = trimmed.substr(11);
        if (auto entry = detail::parse_exception_header(header_text)) trace.exceptions.push_back(std::move(*entry));
    }
    if (trace.frames.empty() && trace.exceptions.empty()) return std::nullopt;
    return trace;
}

inline stack_trace parse_trace(std::string_view raw) {
    if (auto trace = try_parse_trace(raw)) return std::move(*trace);
    throw no_trace_found("no stack trace content recognized");
}

// 1 - (position - 1) / N
inline double degree_of_interest(const stack_trace& trace, std::size_t position) {
    const std::size_t n = trace.frame_count();
    if (position < 1 || position > n)
        throw position_out_of_range("frame position " + std::to_string(position) + " outside [1, " +
                                    std::to_string(n) + "]");
    return 1.0 - static_cast<double>(position - 1) / static_cast<double>(n);
}

// Exception type and reference identifiers keep their camel case; header
// messages contribute prose terms.
inline token_bag trace_tokens(const stack_trace& trace) {
    token_bag bag;
    for (const auto& entry : trace.exceptions) {
        bag.merge(normalize(entry.type, normalize_mode::identifier));
        bag.merge(normalize(entry.message, normalize_mode::prose));
    }
    for (const auto& frame : trace.frames) {
        bag.merge(normalize(frame.package_name, normalize_mode::identifier));
        bag.merge(normalize(frame.class_name, normalize_mode::identifier));
        bag.merge(normalize(frame.method_name, normalize_mode::identifier));
    }
    return bag;
}

namespace detail {

inline bool is_hex_digit(unsigned char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

inline bool token_is_url(std::string_view t) { return t.find("://") != std::string_view::npos; }

inline bool token_is_path(std::string_view t) {
    int separators = 0;
    for (char c : t)
        if (c == '/' || c == '\\') ++separators;
    return separators >= 2;
}

inline bool token_has_hex_address(std::string_view t) {
    for (std::size_t i = 0; i + 2 < t.size(); ++i) {
        if (t[i] == '0' && (t[i + 1] == 'x' || t[i + 1] == 'X') &&
            is_hex_digit(static_cast<unsigned char>(t[i + 2])))
            return true;
    }
    return false;
}

inline std::string_view strip_punct(std::string_view t) {
    while (!t.empty() && !is_ascii_alnum(static_cast<unsigned char>(t.front()))) t.remove_prefix(1);
    while (!t.empty() && !is_ascii_alnum(static_cast<unsigned char>(t.back()))) t.remove_suffix(1);
    return t;
}

inline bool is_number(std::string_view t) {
    if (t.empty()) return false;
    bool seen_dot = false;
    for (char c : t) {
        if (c == '.') {
            if (seen_dot) return false;
            seen_dot = true;
        } else if (c < '0' || c > '9') {
            return false;
        }
    }
    return t != ".";
}

inline bool is_memory_unit(std::string_view t) {
    std::string lower = to_lower_ascii(t);
    return lower == "b" || lower == "kb" || lower == "mb" || lower == "gb" || lower == "tb" ||
           lower == "kib" || lower == "mib" || lower == "gib" || lower == "byte" || lower == "bytes";
}

// `64MB`, `1.5gb`, `128bytes`
inline bool token_is_memory_size(std::string_view t) {
    t = strip_punct(t);
    std::size_t i = 0;
    while (i < t.size() && ((t[i] >= '0' && t[i] <= '9') || t[i] == '.')) ++i;
    if (i == 0 || i == t.size()) return false;
    return is_number(t.substr(0, i)) && is_memory_unit(t.substr(i));
}

}  // namespace detail

// Strips absolute paths, URLs, hex addresses and memory sizes from an
// exception message, leaving the class name and residual words.
inline std::string filter_message(std::string_view raw) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < raw.size()) {
        while (i < raw.size() && std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
        std::size_t start = i;
        while (i < raw.size() && !std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
        if (i > start) tokens.push_back(raw.substr(start, i - start));
    }

    std::string out;
    for (std::size_t t = 0; t < tokens.size(); ++t) {
        std::string_view token = tokens[t];
        if (detail::token_is_url(token) || detail::token_is_path(token) ||
            detail::token_has_hex_address(token) || detail::token_is_memory_size(token))
            continue;
        if (detail::is_number(detail::strip_punct(token)) && t + 1 < tokens.size() &&
            detail::is_memory_unit(detail::strip_punct(tokens[t + 1]))) {
            ++t;  // drop `1048576 bytes` pairs
            continue;
        }
        if (!out.empty()) out.push_back(' ');
        out.append(token);
    }
    return out;
}

// `at pkg.Class.method(File.java:123)`; frames without source render as
// `(Unknown Source)` so field-level round trips hold.
inline std::string render_frame(const stack_frame& frame) {
    std::string out = "at ";
    if (!frame.package_name.empty()) {
        out += frame.package_name;
        out += '.';
    }
    out += frame.class_name;
    out += '.';
    out += frame.method_name;
    out += '(';
    if (frame.source_file.empty()) {
        out += "Unknown Source";
    } else {
        out += frame.source_file;
        if (frame.line > 0) {
            out += ':';
            out += std::to_string(frame.line);
        }
    }
    out += ')';
    return out;
}

}  // namespace exsearch
