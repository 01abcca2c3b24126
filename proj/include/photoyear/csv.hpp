#pragma once

#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace photoyear::csv {

/// Comma-separated rows with RFC 4180 quoting ("" escapes a quote, quoted
/// fields may span lines). CRLF and LF line endings both accepted.
class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    /// Next row, or nullopt at end of input. A trailing empty line is not a row.
    std::optional<std::vector<std::string>> next();

    /// 1-based physical line where the last returned row started.
    std::size_t line() const { return row_line_; }

private:
    std::istream& in_;
    std::size_t line_ = 1;
    std::size_t row_line_ = 0;
};

std::string quote_field(const std::string& field);
std::string join_row(const std::vector<std::string>& fields);

}  // namespace photoyear::csv
