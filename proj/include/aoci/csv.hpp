#pragma once

// RFC 4180 CSV with LF line endings and round-trip number formatting.

#include <cmath>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

namespace aoci::csv {

[[nodiscard]] inline std::string number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

[[nodiscard]] inline std::string field(std::string_view s) {
    const bool quote = s.find_first_of(",\"\r\n") != std::string_view::npos;
    if (!quote) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

class Writer {
public:
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) text_ += ',';
            text_ += field(cells[i]);
        }
        text_ += '\n';
    }

    [[nodiscard]] const std::string& str() const noexcept { return text_; }

private:
    std::string text_;
};

}  // namespace aoci::csv
