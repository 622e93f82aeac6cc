#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace factcheck {

// Four-way label used by the source claim datasets before standardization.
enum class SourceLabel { Supported, PartiallySupported, NotSupported, Refuted };

enum class BinaryLabel { True, False };

// Case-insensitive; accepts "partially-supported", "partially supported" and
// "partially_supported" spellings.
std::optional<SourceLabel> parse_source_label(std::string_view text);
std::string_view to_string(SourceLabel label);

// Accepts true/false in any case. Serialized form is always lowercase.
std::optional<BinaryLabel> parse_binary_label(std::string_view text);
std::string_view to_string(BinaryLabel label);

constexpr BinaryLabel opposite(BinaryLabel label) {
    return label == BinaryLabel::True ? BinaryLabel::False : BinaryLabel::True;
}

}  // namespace factcheck
