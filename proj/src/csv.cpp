#include "phishkit/csv.hpp"

#include <fstream>
#include <sstream>

#include "phishkit/errors.hpp"

namespace phishkit::csv {

std::vector<Record> parse(const std::string& content) {
    std::vector<Record> records;
    std::vector<std::string> fields;
    std::string field;
    std::size_t line = 1;
    std::size_t record_line = 1;
    bool in_quotes = false;
    bool field_was_quoted = false;
    bool record_started = false;

    auto end_field = [&] {
        fields.push_back(std::move(field));
        field.clear();
        field_was_quoted = false;
    };
    auto end_record = [&] {
        end_field();
        records.push_back({std::move(fields), record_line});
        fields.clear();
        record_started = false;
    };

    std::size_t i = 0;
    while (i < content.size()) {
        const char c = content[i];
        if (!record_started) {
            record_started = true;
            record_line = line;
        }
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < content.size() && content[i + 1] == '"') {
                    field.push_back('"');
                    i += 2;
                } else {
                    in_quotes = false;
                    ++i;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
                ++i;
            }
            continue;
        }
        switch (c) {
        case '"':
            if (!field.empty() || field_was_quoted) {
                throw DataError("csv: line " + std::to_string(line) +
                                ": quote character inside unquoted field");
            }
            in_quotes = true;
            field_was_quoted = true;
            ++i;
            break;
        case ',':
            end_field();
            ++i;
            break;
        case '\r':
            if (i + 1 < content.size() && content[i + 1] == '\n') {
                end_record();
                ++line;
                i += 2;
            } else {
                field.push_back(c); // lone CR is not a record separator
                ++i;
            }
            break;
        case '\n':
            end_record();
            ++line;
            ++i;
            break;
        default:
            if (field_was_quoted) {
                throw DataError("csv: line " + std::to_string(line) +
                                ": text after closing quote");
            }
            field.push_back(c);
            ++i;
            break;
        }
    }
    if (in_quotes) {
        throw DataError("csv: line " + std::to_string(record_line) +
                        ": unterminated quoted field");
    }
    if (record_started || !field.empty() || !fields.empty()) {
        end_record();
    }
    return records;
}

std::vector<Record> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("csv: cannot open file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) {
        throw DataError("csv: read failure: " + path);
    }
    return parse(buf.str());
}

std::string escape_field(const std::string& field) {
    const bool needs_quoting =
        field.find_first_of(",\"\r\n") != std::string::npos;
    if (!needs_quoting) return field;
    std::string out;
    out.reserve(field.size() + 2);
    out.push_back('"');
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string format_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) out.push_back(',');
        out += escape_field(fields[i]);
    }
    out.push_back('\n');
    return out;
}

} // namespace phishkit::csv
