#include "factcheck/structured.hpp"

#include "factcheck/error.hpp"
#include "factcheck/text.hpp"

#include <json.hpp>

namespace factcheck {

using nlohmann::json;

namespace {

std::string strip_fences(std::string_view s) {
    std::string out;
    for (const auto& line : text::split(s, '\n')) {
        if (text::trim(line).starts_with("```")) continue;
        out += line;
        out += '\n';
    }
    return out;
}

// End index (exclusive) of the bracketed value opening at `start`, or npos.
std::size_t match_close(std::string_view s, std::size_t start) {
    std::string stack;
    bool in_string = false;
    for (std::size_t i = start; i < s.size(); ++i) {
        const char c = s[i];
        if (in_string) {
            if (c == '\\') {
                ++i;
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        switch (c) {
            case '"': in_string = true; break;
            case '[': stack.push_back(']'); break;
            case '{': stack.push_back('}'); break;
            case ']':
            case '}':
                if (stack.empty() || stack.back() != c) return std::string_view::npos;
                stack.pop_back();
                if (stack.empty()) return i + 1;
                break;
            default: break;
        }
    }
    return std::string_view::npos;
}

std::optional<json> first_value(std::string_view s, char open) {
    for (auto pos = s.find(open); pos != std::string_view::npos; pos = s.find(open, pos + 1)) {
        const auto end = match_close(s, pos);
        if (end == std::string_view::npos) continue;
        auto j = json::parse(s.substr(pos, end - pos), nullptr, false);
        if (!j.is_discarded()) return j;
    }
    return std::nullopt;
}

// Direct parse, then the single repair pass.
json parse_with_repair(std::string_view reply, char open, bool (json::*kind)() const noexcept,
                       const char* what) {
    const auto trimmed = text::trim(reply);
    if (trimmed.empty()) throw ParseError("empty model output", std::string(reply));
    auto direct = json::parse(trimmed, nullptr, false);
    if (!direct.is_discarded() && (direct.*kind)()) return direct;

    const auto stripped = strip_fences(trimmed);
    if (auto repaired = first_value(stripped, open); repaired && ((*repaired).*kind)()) return *repaired;
    throw ParseError(std::string("no well-formed ") + what + " in model output", std::string(reply));
}

std::optional<std::string> optional_text(const json& obj, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) return std::nullopt;
    auto value = std::string(text::trim(it->get<std::string>()));
    const auto lower = text::ascii_lower(value);
    if (value.empty() || lower == "none" || lower == "null" || lower == "n/a") return std::nullopt;
    return value;
}

std::optional<BinaryLabel> label_of(const json& v) {
    if (v.is_boolean()) return v.get<bool>() ? BinaryLabel::True : BinaryLabel::False;
    if (v.is_string()) return parse_binary_label(v.get<std::string>());
    return std::nullopt;
}

}  // namespace

std::vector<std::string> parse_itemized_list(std::string_view reply) {
    const auto j = parse_with_repair(reply, '[', &json::is_array, "JSON list");
    std::vector<std::string> items;
    for (const auto& item : j) {
        if (!item.is_string()) throw ParseError("list item is not a string", std::string(reply));
        auto s = std::string(text::trim(item.get<std::string>()));
        if (!s.empty()) items.push_back(std::move(s));
    }
    return items;
}

Judgment parse_judgment(std::string_view reply) {
    const auto j = parse_with_repair(reply, '{', &json::is_object, "JSON object");
    std::optional<BinaryLabel> label;
    for (const char* key : {"factuality", "label", "verdict"}) {
        if (const auto it = j.find(key); it != j.end()) {
            label = label_of(*it);
            if (label) break;
        }
    }
    if (!label) throw ParseError("judgment has no true/false factuality label", std::string(reply));
    auto reasoning = optional_text(j, "reasoning");
    if (!reasoning) throw ParseError("judgment has no reasoning", std::string(reply));
    return Judgment{*label, std::move(*reasoning), optional_text(j, "error"), optional_text(j, "correction")};
}

std::string parse_free_text(std::string_view reply) {
    const auto trimmed = text::trim(reply);
    if (trimmed.empty()) throw ParseError("empty model output", std::string(reply));
    return std::string(trimmed);
}

StructuredValue parse_structured(std::string_view reply, OutputShape shape) {
    switch (shape) {
        case OutputShape::ItemizedList: return parse_itemized_list(reply);
        case OutputShape::LabeledJudgment: return parse_judgment(reply);
        case OutputShape::FreeText: break;
    }
    return parse_free_text(reply);
}

}  // namespace factcheck
