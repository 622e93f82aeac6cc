#pragma once

#include "factcheck/labels.hpp"
#include "factcheck/prompts.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace factcheck {

struct Judgment {
    BinaryLabel label = BinaryLabel::True;
    std::string reasoning;
    std::optional<std::string> error;
    std::optional<std::string> correction;
};

using StructuredValue = std::variant<std::string, std::vector<std::string>, Judgment>;

// Parsers for model replies. Each first tries the whole trimmed reply as
// JSON; if that fails, a single repair pass strips Markdown code fences and
// takes the first balanced JSON value of the expected kind found in the text.
// Anything still unparseable raises ParseError carrying the raw reply.
std::vector<std::string> parse_itemized_list(std::string_view reply);
Judgment parse_judgment(std::string_view reply);
std::string parse_free_text(std::string_view reply);

StructuredValue parse_structured(std::string_view reply, OutputShape shape);

}  // namespace factcheck
