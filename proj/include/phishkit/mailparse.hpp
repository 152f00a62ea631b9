#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace phishkit::mail {

// Output of the raw-message split: one text stream, one URL stream.
struct ParsedEmail {
    // Header order preserved; names kept verbatim, matched case-insensitively.
    std::vector<std::pair<std::string, std::string>> headers;
    std::string body_text; // decoded, tag-free, NOT lowercased
    std::vector<std::string> urls;
    std::vector<std::string> warnings;

    // First header with the given name, case-insensitive.
    std::optional<std::string> header(std::string_view name) const;
};

// Total over arbitrary bytes: headers + blank line + body, single-level
// multipart (nested parts resolved depth-first to the first text leaf),
// quoted-printable and base64 transfer encodings, HTML fallback with tag
// stripping. Malformed input degrades to a body-only parse with a warning.
ParsedEmail parse_email(std::string_view raw);

// Permissive URL lexer: tokens starting with http://, https:// or www.
// (case-insensitive), ended by whitespace or < > ", with trailing sentence
// punctuation stripped. Duplicates preserved in order of appearance.
std::vector<std::string> extract_urls(std::string_view text);

// Building blocks, exposed for direct testing.
std::string decode_quoted_printable(std::string_view s);
std::string decode_base64(std::string_view s);
std::string strip_html(std::string_view html);
std::string decode_entities(std::string_view s);

} // namespace phishkit::mail
