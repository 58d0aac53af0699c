#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace sharpefolio {

/// Calendar date stored as days since 1970-01-01.
class Date {
public:
    constexpr Date() = default;
    constexpr explicit Date(std::chrono::sys_days days) : days_(days) {}

    /// Parses strict ISO-8601 `YYYY-MM-DD`; nullopt on malformed or impossible dates.
    static std::optional<Date> parse(std::string_view text);

    std::string to_string() const;
    constexpr std::chrono::sys_days days() const { return days_; }

    friend constexpr auto operator<=>(const Date&, const Date&) = default;

private:
    std::chrono::sys_days days_{};
};

} // namespace sharpefolio
