#include "factcheck/labels.hpp"

#include "factcheck/text.hpp"

namespace factcheck {

std::optional<SourceLabel> parse_source_label(std::string_view text) {
    auto s = text::ascii_lower(text::trim(text));
    for (auto& c : s) {
        if (c == ' ' || c == '_') c = '-';
    }
    if (s == "supported") return SourceLabel::Supported;
    if (s == "partially-supported") return SourceLabel::PartiallySupported;
    if (s == "not-supported") return SourceLabel::NotSupported;
    if (s == "refuted") return SourceLabel::Refuted;
    return std::nullopt;
}

std::string_view to_string(SourceLabel label) {
    switch (label) {
        case SourceLabel::Supported: return "supported";
        case SourceLabel::PartiallySupported: return "partially-supported";
        case SourceLabel::NotSupported: return "not-supported";
        case SourceLabel::Refuted: return "refuted";
    }
    return "supported";
}

std::optional<BinaryLabel> parse_binary_label(std::string_view text) {
    const auto s = text::ascii_lower(text::trim(text));
    if (s == "true") return BinaryLabel::True;
    if (s == "false") return BinaryLabel::False;
    return std::nullopt;
}

std::string_view to_string(BinaryLabel label) {
    return label == BinaryLabel::True ? "true" : "false";
}

}  // namespace factcheck
