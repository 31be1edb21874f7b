#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace spillnet {

/// Calendar date of a trading day.
using Date = std::chrono::sys_days;

/// Exchange-local wall-clock time. Offsets are resolved at parse time, so
/// values of this type never carry a zone.
using LocalTime = std::chrono::local_time<std::chrono::milliseconds>;

/// Error categories; each maps to one CLI exit code.
enum class ErrorKind { Config, Data, Numerical };

/// Exit code the CLI reports for an error kind (2 config, 3 data, 4 numerical).
int exit_code(ErrorKind kind) noexcept;

/// The library's single exception type. `stage` names the pipeline stage
/// ("ingest", "measures", "var", ...) so messages can be traced to a step.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string stage, const std::string& message);

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& stage() const noexcept { return stage_; }

private:
    ErrorKind kind_;
    std::string stage_;
};

[[noreturn]] void throw_config(std::string stage, const std::string& message);
[[noreturn]] void throw_data(std::string stage, const std::string& message);
[[noreturn]] void throw_numerical(std::string stage, const std::string& message);

/// ISO-8601 `YYYY-MM-DD`.
std::string format_date(Date d);
std::optional<Date> parse_date(std::string_view text);

/// `HH:MM` as minutes after midnight.
std::optional<std::chrono::minutes> parse_time_of_day(std::string_view text);
std::string format_time_of_day(std::chrono::minutes tod);

/// Shortest round-trip decimal form of a double (used for every machine output).
std::string format_double(double v);

/// Mixes two 64-bit values into a well-distributed seed (splitmix64 finalizer).
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept;

}  // namespace spillnet
