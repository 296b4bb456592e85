#include "iuh/types.hpp"

#include <cstdio>
#include <stdexcept>

namespace iuh {

namespace {

bool parse_int(const std::string& s, std::size_t from, std::size_t len, int& out) {
    if (from + len > s.size()) return false;
    int v = 0;
    for (std::size_t i = from; i < from + len; ++i) {
        const char c = s[i];
        if (c < '0' || c > '9') return false;
        v = v * 10 + (c - '0');
    }
    out = v;
    return true;
}

}  // namespace

Date parse_date(const std::string& text) {
    int y = 0, m = 0, d = 0;
    const bool shape_ok = text.size() == 10 && text[4] == '-' && text[7] == '-' &&
                          parse_int(text, 0, 4, y) && parse_int(text, 5, 2, m) &&
                          parse_int(text, 8, 2, d);
    if (!shape_ok) {
        throw std::invalid_argument("unparseable date: '" + text + "' (expected YYYY-MM-DD)");
    }
    const Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                    std::chrono::day{static_cast<unsigned>(d)}};
    if (!date.ok()) {
        throw std::invalid_argument("invalid calendar date: '" + text + "'");
    }
    return date;
}

std::string format_date(const Date& date) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                  static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
    return buf;
}

Date add_days(const Date& date, int days) {
    const std::chrono::sys_days sd{date};
    return Date{sd + std::chrono::days{days}};
}

long day_number(const Date& date) {
    return std::chrono::sys_days{date}.time_since_epoch().count();
}

}  // namespace iuh
