#include "factcheck/translation.hpp"

#include "factcheck/error.hpp"
#include "factcheck/prompts.hpp"
#include "factcheck/text.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <array>

namespace factcheck {

bool looks_like_refusal(std::string_view reply) {
    static constexpr std::array<std::string_view, 6> openers{
        "i'm sorry", "i am sorry", "i cannot", "i can't", "as an ai", "sorry, i"};
    const auto lower = text::ascii_lower(text::trim(reply).substr(0, 40));
    for (const auto o : openers) {
        if (lower.starts_with(o)) return true;
    }
    return false;
}

std::string Translator::translate(const TranslationRequest& request) const {
    if (text::trim(request.text).empty()) throw TranslationError("nothing to translate");
    const auto& tmpl =
        request.direction == Direction::UrduToEnglish ? prompts::translate_ur_en() : prompts::translate_en_ur();

    ChatRequest chat;
    chat.model_id = settings_.model_id;
    chat.temperature = settings_.temperature;
    chat.max_output_tokens = settings_.max_output_tokens;
    chat.prompt_name = tmpl.name;
    chat.fingerprint_key = request.text;
    chat.user_text = render(tmpl, {{"input", request.text}});

    const auto response = llm_.complete(chat);
    const auto out = text::trim(response.text);
    if (out.empty()) throw TranslationError("empty translation for: " + request.text.substr(0, 80));
    if (looks_like_refusal(out)) throw TranslationError("model refused to translate: " + std::string(out.substr(0, 80)));
    return std::string(out);
}

TranslatedSnippets Translator::translate_snippets(const std::vector<EvidenceSnippet>& snippets) const {
    TranslatedSnippets result;
    for (const auto& s : snippets) {
        try {
            EvidenceSnippet out = s;
            if (!text::trim(s.snippet_text).empty()) {
                out.snippet_text = translate({s.snippet_text, Direction::EnglishToUrdu});
            }
            if (!text::trim(s.title).empty()) out.title = translate({s.title, Direction::EnglishToUrdu});
            out.language = Language::EnUr;
            result.snippets.push_back(std::move(out));
        } catch (const TranslationError& e) {
            result.warnings.push_back(fmt::format("dropped snippet {}: {}", s.url, e.what()));
        } catch (const AuthError&) {
            throw;
        } catch (const MockMissError&) {
            throw;
        } catch (const TransportError& e) {
            result.warnings.push_back(fmt::format("dropped snippet {}: {}", s.url, e.what()));
        }
    }
    for (const auto& w : result.warnings) spdlog::warn("{}", w);
    return result;
}

}  // namespace factcheck
