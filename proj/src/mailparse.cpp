#include "phishkit/mailparse.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "phishkit/utf8.hpp"

namespace phishkit::mail {

namespace {

bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i]))) {
            return false;
        }
    }
    return true;
}

std::string lower(std::string_view s) { return utf8::lowercase_ascii(s); }

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

// Splits into lines; accepts LF and CRLF, keeps no terminators.
std::vector<std::string_view> split_lines(std::string_view s) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == '\n') {
            std::string_view line = s.substr(start, i - start);
            if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
            if (i < s.size() || !line.empty()) lines.push_back(line);
            start = i + 1;
        }
    }
    return lines;
}

bool is_header_line(std::string_view line) {
    const std::size_t colon = line.find(':');
    if (colon == 0 || colon == std::string_view::npos) return false;
    for (std::size_t i = 0; i < colon; ++i) {
        const auto c = static_cast<unsigned char>(line[i]);
        if (c <= ' ' || c > '~') return false;
    }
    return true;
}

struct HeaderBlock {
    std::vector<std::pair<std::string, std::string>> headers;
    std::size_t body_start = 0; // line index where the body begins
    bool ok = false;            // false: treat the whole input as body
};

// Parses folded headers up to the first blank line. Continuation lines
// (leading whitespace) are unfolded with a single space.
HeaderBlock parse_headers(const std::vector<std::string_view>& lines) {
    HeaderBlock block;
    if (lines.empty() || !is_header_line(lines[0])) return block;
    std::size_t i = 0;
    for (; i < lines.size(); ++i) {
        const std::string_view line = lines[i];
        if (line.empty()) {
            block.body_start = i + 1;
            block.ok = true;
            return block;
        }
        if (line[0] == ' ' || line[0] == '\t') {
            if (block.headers.empty()) return HeaderBlock{};
            std::string& value = block.headers.back().second;
            if (!value.empty()) value.push_back(' ');
            value += trim(line);
            continue;
        }
        if (!is_header_line(line)) return HeaderBlock{};
        const std::size_t colon = line.find(':');
        block.headers.emplace_back(std::string(line.substr(0, colon)),
                                   std::string(trim(line.substr(colon + 1))));
    }
    // Headers ran to EOF without a separator; empty body.
    block.body_start = i;
    block.ok = true;
    return block;
}

struct ContentType {
    std::string type = "text/plain"; // lowercased media type/subtype
    std::string boundary;
};

ContentType parse_content_type(std::string_view value) {
    ContentType ct;
    const std::size_t semi = value.find(';');
    ct.type = lower(trim(value.substr(0, semi)));
    if (ct.type.empty()) ct.type = "text/plain";
    std::string_view rest = semi == std::string_view::npos ? std::string_view{}
                                                           : value.substr(semi + 1);
    while (!rest.empty()) {
        const std::size_t next = rest.find(';');
        std::string_view param = trim(rest.substr(0, next));
        rest = next == std::string_view::npos ? std::string_view{} : rest.substr(next + 1);
        const std::size_t eq = param.find('=');
        if (eq == std::string_view::npos) continue;
        if (!iequals(trim(param.substr(0, eq)), "boundary")) continue;
        std::string_view v = trim(param.substr(eq + 1));
        if (v.size() >= 2 && v.front() == '"' && v.back() == '"') {
            v = v.substr(1, v.size() - 2);
        }
        ct.boundary = std::string(v);
    }
    return ct;
}

std::optional<std::string> find_header(
    const std::vector<std::pair<std::string, std::string>>& headers,
    std::string_view name) {
    for (const auto& [key, value] : headers) {
        if (iequals(key, name)) return value;
    }
    return std::nullopt;
}

std::string join_lines(const std::vector<std::string_view>& lines,
                       std::size_t begin, std::size_t end) {
    std::string out;
    for (std::size_t i = begin; i < end; ++i) {
        out += lines[i];
        out.push_back('\n');
    }
    return out;
}

std::string decode_transfer_encoding(const std::string& content,
                                     std::optional<std::string> encoding) {
    if (!encoding) return content;
    const std::string enc = lower(trim(*encoding));
    if (enc == "quoted-printable") return decode_quoted_printable(content);
    if (enc == "base64") return decode_base64(content);
    return content; // 7bit / 8bit / binary / unknown: pass through
}

struct TextLeaf {
    std::string type;    // "text/plain" or "text/html"
    std::string decoded; // transfer encoding undone, tags still present
};

constexpr int kMaxMultipartDepth = 4;

// Depth-first walk collecting the first text/plain and first text/html leaf.
void collect_leaves(const std::vector<std::pair<std::string, std::string>>& headers,
                    const std::vector<std::string_view>& lines,
                    std::size_t begin, std::size_t end, int depth,
                    std::optional<TextLeaf>& plain, std::optional<TextLeaf>& html) {
    if (plain) return;
    const ContentType ct =
        parse_content_type(find_header(headers, "Content-Type").value_or("text/plain"));

    if (ct.type.rfind("multipart/", 0) == 0 && !ct.boundary.empty() &&
        depth < kMaxMultipartDepth) {
        const std::string delim = "--" + ct.boundary;
        const std::string closing = delim + "--";
        std::size_t part_start = std::string::npos;
        for (std::size_t i = begin; i <= end; ++i) {
            const bool at_end = i == end;
            const std::string_view line = at_end ? std::string_view{} : lines[i];
            const bool is_close = !at_end && trim(line) == closing;
            const bool is_delim = is_close || (!at_end && trim(line) == delim);
            if (!at_end && !is_delim) continue;
            if (part_start != std::string::npos && i > part_start) {
                // Parse one part: headers + blank line + content.
                std::vector<std::string_view> part_lines(lines.begin() + part_start,
                                                         lines.begin() + i);
                HeaderBlock part_head = parse_headers(part_lines);
                std::vector<std::pair<std::string, std::string>> part_headers;
                std::size_t content_begin = part_start;
                if (part_head.ok) {
                    part_headers = std::move(part_head.headers);
                    content_begin = part_start + part_head.body_start;
                }
                collect_leaves(part_headers, lines, content_begin, i, depth + 1,
                               plain, html);
                if (plain) return;
            }
            if (is_close || at_end) break;
            part_start = i + 1;
        }
        return;
    }

    if (ct.type == "text/plain" || ct.type == "text/html") {
        const std::string decoded = decode_transfer_encoding(
            join_lines(lines, begin, end),
            find_header(headers, "Content-Transfer-Encoding"));
        if (ct.type == "text/plain" && !plain) {
            plain = TextLeaf{ct.type, decoded};
        } else if (ct.type == "text/html" && !html) {
            html = TextLeaf{ct.type, decoded};
        }
    }
}

bool is_word_char(char c) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u)) return true;
    switch (c) {
    case '.': case '_': case '-': case '/': case '@': case '%':
    case '#': case '&': case '~': case '+':
        return true;
    default:
        return false;
    }
}

bool has_prefix_at(std::string_view text, std::size_t i, std::string_view prefix) {
    if (i + prefix.size() > text.size()) return false;
    return iequals(text.substr(i, prefix.size()), prefix);
}

} // namespace

std::optional<std::string> ParsedEmail::header(std::string_view name) const {
    return find_header(headers, name);
}

std::string decode_quoted_printable(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    auto hex = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        return -1;
    };
    for (std::size_t i = 0; i < s.size();) {
        if (s[i] != '=') {
            out.push_back(s[i]);
            ++i;
            continue;
        }
        if (i + 1 < s.size() && s[i + 1] == '\n') { // soft break
            i += 2;
            continue;
        }
        if (i + 2 < s.size() && s[i + 1] == '\r' && s[i + 2] == '\n') {
            i += 3;
            continue;
        }
        if (i + 2 < s.size()) {
            const int hi = hex(s[i + 1]);
            const int lo = hex(s[i + 2]);
            if (hi >= 0 && lo >= 0) {
                out.push_back(static_cast<char>(hi * 16 + lo));
                i += 3;
                continue;
            }
        }
        out.push_back('='); // malformed escape kept literally
        ++i;
    }
    return out;
}

std::string decode_base64(std::string_view s) {
    auto value = [](char c) -> int {
        if (c >= 'A' && c <= 'Z') return c - 'A';
        if (c >= 'a' && c <= 'z') return c - 'a' + 26;
        if (c >= '0' && c <= '9') return c - '0' + 52;
        if (c == '+') return 62;
        if (c == '/') return 63;
        return -1;
    };
    std::string out;
    out.reserve(s.size() / 4 * 3);
    std::uint32_t acc = 0;
    int bits = 0;
    for (char c : s) {
        if (c == '=') break;
        const int v = value(c);
        if (v < 0) continue; // whitespace and stray bytes skipped
        acc = (acc << 6) | static_cast<std::uint32_t>(v);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<char>((acc >> bits) & 0xFF));
        }
    }
    return out;
}

std::string strip_html(std::string_view html) {
    std::string out;
    out.reserve(html.size());
    std::size_t i = 0;
    while (i < html.size()) {
        if (html[i] != '<') {
            out.push_back(html[i]);
            ++i;
            continue;
        }
        // Collect the tag, respecting quoted attribute values.
        std::size_t j = i + 1;
        char quote = 0;
        while (j < html.size()) {
            const char c = html[j];
            if (quote != 0) {
                if (c == quote) quote = 0;
            } else if (c == '"' || c == '\'') {
                quote = c;
            } else if (c == '>') {
                break;
            }
            ++j;
        }
        if (j >= html.size()) { // unterminated tag: keep the text as-is
            out.append(html.substr(i));
            break;
        }
        std::string_view tag = html.substr(i + 1, j - i - 1);
        const bool closing = !tag.empty() && tag[0] == '/';
        if (closing) tag.remove_prefix(1);
        std::size_t name_end = 0;
        while (name_end < tag.size() &&
               std::isalnum(static_cast<unsigned char>(tag[name_end]))) {
            ++name_end;
        }
        const std::string name = lower(tag.substr(0, name_end));

        if (!closing && (name == "script" || name == "style")) {
            const std::string close = "</" + name;
            std::size_t k = j + 1;
            for (; k + close.size() <= html.size(); ++k) {
                if (iequals(html.substr(k, close.size()), close)) break;
            }
            std::size_t close_end = html.find('>', k);
            i = close_end == std::string_view::npos ? html.size() : close_end + 1;
            continue;
        }

        static constexpr std::array<std::string_view, 10> kBlockBreaks{
            "br", "p", "div", "li", "tr", "table", "h1", "h2", "h3", "h4"};
        const bool breaks = (name == "br" && !closing) ||
                            (closing && std::find(kBlockBreaks.begin(), kBlockBreaks.end(),
                                                  name) != kBlockBreaks.end());
        if (breaks) out.push_back('\n');
        i = j + 1;
    }
    return out;
}

std::string decode_entities(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size();) {
        if (s[i] != '&') {
            out.push_back(s[i]);
            ++i;
            continue;
        }
        const std::size_t semi = s.find(';', i + 1);
        if (semi == std::string_view::npos || semi - i > 9) {
            out.push_back('&');
            ++i;
            continue;
        }
        const std::string_view body = s.substr(i + 1, semi - i - 1);
        if (body == "amp") {
            out.push_back('&');
        } else if (body == "lt") {
            out.push_back('<');
        } else if (body == "gt") {
            out.push_back('>');
        } else if (body == "quot") {
            out.push_back('"');
        } else if (body.size() >= 2 && body[0] == '#' &&
                   std::all_of(body.begin() + 1, body.end(), [](char c) {
                       return c >= '0' && c <= '9';
                   })) {
            unsigned long cp = 0;
            for (std::size_t k = 1; k < body.size(); ++k) {
                cp = cp * 10 + static_cast<unsigned long>(body[k] - '0');
                if (cp > 0x10FFFF) break;
            }
            if (cp == 0 || cp > 0x10FFFF) {
                out.push_back('&');
                ++i;
                continue;
            }
            utf8::append(out, static_cast<char32_t>(cp));
        } else {
            out.push_back('&');
            ++i;
            continue;
        }
        i = semi + 1;
    }
    return out;
}

std::vector<std::string> extract_urls(std::string_view text) {
    static constexpr std::array<std::string_view, 3> kPrefixes{"http://", "https://",
                                                               "www."};
    static constexpr std::string_view kTrailing = ".,;:!?)]}'\"";
    std::vector<std::string> urls;
    std::size_t i = 0;
    while (i < text.size()) {
        std::size_t prefix_len = 0;
        for (std::string_view p : kPrefixes) {
            if (has_prefix_at(text, i, p)) {
                prefix_len = p.size();
                break;
            }
        }
        if (prefix_len == 0 || (i > 0 && is_word_char(text[i - 1]))) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < text.size()) {
            const char c = text[j];
            if (std::isspace(static_cast<unsigned char>(c)) || c == '<' || c == '>' ||
                c == '"') {
                break;
            }
            ++j;
        }
        std::string_view token = text.substr(i, j - i);
        while (!token.empty() && kTrailing.find(token.back()) != std::string_view::npos) {
            token.remove_suffix(1);
        }
        if (token.size() > prefix_len) {
            urls.emplace_back(token);
        }
        i = j;
    }
    return urls;
}

ParsedEmail parse_email(std::string_view raw) {
    ParsedEmail email;
    const std::vector<std::string_view> lines = split_lines(raw);

    HeaderBlock head = parse_headers(lines);
    std::size_t body_begin = 0;
    if (head.ok) {
        email.headers = std::move(head.headers);
        body_begin = head.body_start;
    } else if (!lines.empty() && is_header_line(lines[0])) {
        email.warnings.push_back("malformed header block; treating entire input as body");
    }

    std::optional<TextLeaf> plain, html;
    collect_leaves(email.headers, lines, body_begin, lines.size(), 0, plain, html);

    std::string decoded;
    bool is_html = false;
    if (plain) {
        decoded = std::move(plain->decoded);
    } else if (html) {
        decoded = std::move(html->decoded);
        is_html = true;
    } else {
        decoded = join_lines(lines, body_begin, lines.size());
        email.warnings.push_back("no decodable text part; using raw body");
    }

    bool had_bad_bytes = false;
    decoded = utf8::sanitize(decoded, &had_bad_bytes);
    if (had_bad_bytes) {
        email.warnings.push_back("undecodable bytes replaced with U+FFFD");
    }

    // URLs are lexed before tag stripping so href attributes are seen.
    email.urls = extract_urls(decoded);

    std::string body = is_html ? decode_entities(strip_html(decoded)) : decoded;
    email.body_text = std::string(trim(body));
    return email;
}

} // namespace phishkit::mail
