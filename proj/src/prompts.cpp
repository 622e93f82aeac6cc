#include "factcheck/prompts.hpp"

#include "factcheck/error.hpp"
#include "factcheck/text.hpp"

#include <cctype>

namespace factcheck {

namespace {

bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

// Walks the template, handing literal runs and placeholder names to callbacks.
template <typename OnText, typename OnSlot>
void scan(std::string_view t, OnText&& on_text, OnSlot&& on_slot) {
    std::size_t i = 0;
    while (i < t.size()) {
        const char c = t[i];
        if (c == '{' && i + 1 < t.size() && t[i + 1] == '{') {
            on_text(std::string_view("{"));
            i += 2;
            continue;
        }
        if (c == '}' && i + 1 < t.size() && t[i + 1] == '}') {
            on_text(std::string_view("}"));
            i += 2;
            continue;
        }
        if (c == '{' && i + 1 < t.size() && ident_start(t[i + 1])) {
            std::size_t j = i + 1;
            while (j < t.size() && ident_char(t[j])) ++j;
            if (j < t.size() && t[j] == '}') {
                on_slot(t.substr(i + 1, j - i - 1));
                i = j + 1;
                continue;
            }
        }
        on_text(t.substr(i, 1));
        ++i;
    }
}

}  // namespace

std::string render(const PromptTemplate& tmpl, const Bindings& bindings) {
    std::string out;
    out.reserve(tmpl.text.size());
    scan(
        tmpl.text, [&](std::string_view s) { out.append(s); },
        [&](std::string_view name) {
            const auto it = bindings.find(name);
            if (it == bindings.end()) throw TemplateError(std::string(name));
            out.append(it->second);
        });
    return out;
}

std::vector<std::string> placeholders(const PromptTemplate& tmpl) {
    std::vector<std::string> names;
    scan(
        tmpl.text, [](std::string_view) {},
        [&](std::string_view name) {
            for (const auto& n : names) {
                if (n == name) return;
            }
            names.emplace_back(name);
        });
    return names;
}

namespace prompts {

const PromptTemplate& pre_translation() {
    static const PromptTemplate t{std::string(kPreTranslation), R"PROMPT(You are an expert English-to-Urdu translator preparing a fact-checking dataset. You are given a record in English. Your task is to translate it into formal Urdu.
Follow these guidelines:
1. Write grammatically correct, formal Urdu in the Urdu script.
2. Proper nouns: transliterate names of people, places and organizations into Urdu script (for example, "Barack Obama" becomes "باراک اوباما").
3. Acronyms: keep well-known acronyms in Latin script (for example NASA, UNESCO, FIFA) and place them where they read naturally in the right-to-left sentence.
4. Numerals: write numbers with Western digits and keep each number in left-to-right order inside the right-to-left Urdu sentence.
5. Dates: translate month names into Urdu and keep the day and the year as digits (for example, "4 July 1776" becomes "4 جولائی 1776").
6. Technical terms: keep technical and scientific terms that have no common Urdu equivalent as transliterations.
7. Keep the field names and the layout of the record unchanged and translate only the values. Do not translate or change the label.
DO NOT RESPOND WITH ANYTHING ELSE. ADDING ANY OTHER EXTRA NOTES THAT VIOLATE THE RESPONSE FORMAT IS BANNED.

{examples}
Record:
{record}
Translation:
)PROMPT",
                                  OutputShape::FreeText};
    return t;
}

const PromptTemplate& claim_extraction() {
    static const PromptTemplate t{std::string(kClaimExtraction), R"PROMPT(You are given a piece of text in Urdu. Your task is to identify the factual claims in the text and decompose them into atomic, check-worthy claims.
Follow these rules:
1. Each claim must state exactly one fact that can be checked against external world knowledge. Skip opinions, questions, greetings and other subjective statements.
2. Resolve co-references: replace pronouns and vague references (such as وہ، یہ، اس، ان) with the entity they refer to, so that every claim can be understood on its own.
3. Keep every claim concise, written in Urdu, and faithful to the original text. Do not add information that is not in the text.
4. If the text contains no factual claim, return an empty list.
Return a JSON list of strings, one string per claim, in the order in which the claims appear in the text.
DO NOT RESPOND WITH ANYTHING ELSE. ADDING ANY OTHER EXTRA NOTES THAT VIOLATE THE RESPONSE FORMAT IS BANNED.

Example 1:
Text: علامہ اقبال 1877 میں سیالکوٹ میں پیدا ہوئے۔ وہ ایک شاعر اور فلسفی تھے۔
Claims: ["علامہ اقبال 1877 میں پیدا ہوئے۔", "علامہ اقبال سیالکوٹ میں پیدا ہوئے۔", "علامہ اقبال ایک شاعر تھے۔", "علامہ اقبال ایک فلسفی تھے۔"]

Example 2:
Text: مجھے لاہور کے کھانے بہت پسند ہیں۔ آپ کو کیا پسند ہے؟
Claims: []

Example 3:
Text: دریائے سندھ پاکستان کا سب سے لمبا دریا ہے اور یہ بحیرہ عرب میں گرتا ہے۔
Claims: ["دریائے سندھ پاکستان کا سب سے لمبا دریا ہے۔", "دریائے سندھ بحیرہ عرب میں گرتا ہے۔"]

Text: {input}
Claims:
)PROMPT",
                                  OutputShape::ItemizedList};
    return t;
}

const PromptTemplate& query_generation() {
    static const PromptTemplate t{std::string(kQueryGeneration), R"PROMPT(You are given a claim in Urdu that has to be fact-checked with a web search engine. Your task is to write exactly two search queries in Urdu:
1. A question-based query that asks about the fact in the claim without revealing whether the claim is true.
2. A claim-based query that states the claim directly as a search phrase.
Return a JSON list with exactly two strings: the question-based query first and the claim-based query second.
DO NOT RESPOND WITH ANYTHING ELSE. ADDING ANY OTHER EXTRA NOTES THAT VIOLATE THE RESPONSE FORMAT IS BANNED.

Example 1:
Claim: پاکستان کا دارالحکومت اسلام آباد ہے۔
Queries: ["پاکستان کا دارالحکومت کون سا شہر ہے؟", "پاکستان کا دارالحکومت اسلام آباد"]

Example 2:
Claim: ماؤنٹ ایورسٹ دنیا کا سب سے اونچا پہاڑ ہے۔
Queries: ["دنیا کا سب سے اونچا پہاڑ کون سا ہے؟", "ماؤنٹ ایورسٹ دنیا کا سب سے اونچا پہاڑ"]

Claim: {input}
Queries:
)PROMPT",
                                  OutputShape::ItemizedList};
    return t;
}

const PromptTemplate& verification() {
    static const PromptTemplate t{std::string(kVerification), R"PROMPT(You are given a claim in Urdu and a list of evidence snippets retrieved from the web. Your task is to decide whether the claim is factually correct based on the evidence.
Follow these steps:
1. Read every evidence snippet and identify the parts that are relevant to the claim.
2. If the evidence is missing or does not cover the claim, rely on your own knowledge and say so in the reasoning.
3. Explain your reasoning in Urdu.
4. If the claim is incorrect, identify the factual error and write a corrected version of the claim in Urdu.
Return a JSON object with these fields:
"reasoning": your reasoning in Urdu,
"error": the factual error in the claim in Urdu, or "None" if there is no error,
"correction": the corrected claim in Urdu, or "None" if the claim is correct,
"factuality": true if the claim is correct, false otherwise.
DO NOT RESPOND WITH ANYTHING ELSE. ADDING ANY OTHER EXTRA NOTES THAT VIOLATE THE RESPONSE FORMAT IS BANNED.

Example 1:
Claim: قائداعظم محمد علی جناح لاہور میں پیدا ہوئے۔
Evidence:
[1] محمد علی جناح 25 دسمبر 1876 کو کراچی میں پیدا ہوئے۔
Output: {{"reasoning": "ثبوت کے مطابق محمد علی جناح کراچی میں پیدا ہوئے، لاہور میں نہیں۔", "error": "جائے پیدائش لاہور بتائی گئی ہے جو غلط ہے۔", "correction": "قائداعظم محمد علی جناح کراچی میں پیدا ہوئے۔", "factuality": false}}

Example 2:
Claim: اردو پاکستان کی قومی زبان ہے۔
Evidence:
[1] اردو پاکستان کی قومی زبان اور رابطے کی زبان ہے۔
[2] آئین پاکستان کے آرٹیکل 251 کے تحت اردو قومی زبان ہے۔
Output: {{"reasoning": "دونوں ثبوت تصدیق کرتے ہیں کہ اردو پاکستان کی قومی زبان ہے۔", "error": "None", "correction": "None", "factuality": true}}

Claim: {claim}
Evidence:
{evidence}
Output:
)PROMPT",
                                  OutputShape::LabeledJudgment};
    return t;
}

const PromptTemplate& translate_ur_en() {
    static const PromptTemplate t{std::string(kTranslateUrEn), R"PROMPT(You are given a piece of text in Urdu. Your task is to translate it into English. The translation should be accurate and maintain the original meaning of the text. Please ensure that the translation is grammatically correct and coherent in English.
DO NOT RESPOND WITH ANYTHING ELSE. ADDING ANY OTHER EXTRA NOTES THAT VIOLATE THE RESPONSE FORMAT IS BANNED.

{input})PROMPT",
                                  OutputShape::FreeText};
    return t;
}

const PromptTemplate& translate_en_ur() {
    static const PromptTemplate t{std::string(kTranslateEnUr), R"PROMPT(You are given a piece of text in English. Your task is to translate it into Urdu. The translation should be accurate and maintain the original meaning of the text. Please ensure that the translation is grammatically correct and coherent in Urdu.
DO NOT RESPOND WITH ANYTHING ELSE. ADDING ANY OTHER EXTRA NOTES THAT VIOLATE THE RESPONSE FORMAT IS BANNED.

{input})PROMPT",
                                  OutputShape::FreeText};
    return t;
}

const std::vector<const PromptTemplate*>& all() {
    static const std::vector<const PromptTemplate*> v{&pre_translation(), &claim_extraction(), &query_generation(),
                                                      &verification(),    &translate_ur_en(),  &translate_en_ur()};
    return v;
}

std::string_view format_reminder(OutputShape shape) {
    switch (shape) {
        case OutputShape::ItemizedList:
            return "\n\nYour previous reply could not be parsed. Reply with a JSON list of strings only.";
        case OutputShape::LabeledJudgment:
            return "\n\nYour previous reply could not be parsed. Reply with a single JSON object with the fields "
                   "\"reasoning\", \"error\", \"correction\" and \"factuality\" only.";
        case OutputShape::FreeText: break;
    }
    return "";
}

std::map<std::string, std::string> asset_hashes() {
    std::map<std::string, std::string> out;
    for (const auto* t : all()) out[t->name] = text::sha256_hex(t->text);
    return out;
}

}  // namespace prompts
}  // namespace factcheck
