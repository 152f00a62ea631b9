#pragma once

#include <string>
#include <vector>

namespace phishkit::csv {

struct Record {
    std::vector<std::string> fields;
    std::size_t line; // 1-based line where the record starts, header = line 1
};

// RFC-4180-style parsing: fields quoted with '"' may contain commas, newlines
// and doubled quotes; CRLF and LF both accepted; last line may lack a newline.
// Throws DataError (with the line number) on unreadable files or a quote
// opened mid-field / left unterminated.
std::vector<Record> parse(const std::string& content);
std::vector<Record> read_file(const std::string& path);

// Quotes the field only when it contains ',', '"', CR or LF.
std::string escape_field(const std::string& field);
std::string format_row(const std::vector<std::string>& fields);

} // namespace phishkit::csv
