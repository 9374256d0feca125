#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>

namespace tract {

enum class ErrorKind {
    SyntaxError,
    ArityError,
    UnknownIdentifier,
    EvalDomain,
    BeyondRank,
    Unbounded,
    ValidationFailed,
    InvalidModel,
    DimensionOutOfRange,
    DegenerateGrid,
    NoPassingPoint,
    NotCertified,
    ConfigError,
};

const char* to_string(ErrorKind kind);

// Failing coordinates are attached where they exist so callers can report
// (d, j, eps) without re-deriving them.
struct Error {
    ErrorKind kind;
    std::string message;
    std::optional<std::int64_t> d;
    std::optional<std::int64_t> j;
    std::optional<double> eps;
    std::optional<std::size_t> offset;  // byte offset for parse errors

    std::string describe() const;
};

inline Error make_error(ErrorKind kind, std::string message) {
    return Error{kind, std::move(message), {}, {}, {}, {}};
}

// Minimal value-or-error carrier; std::expected is C++23.
template <class T>
class [[nodiscard]] Result {
public:
    Result(T value) : data_(std::in_place_index<0>, std::move(value)) {}
    Result(Error error) : data_(std::in_place_index<1>, std::move(error)) {}

    bool has_value() const { return data_.index() == 0; }
    explicit operator bool() const { return has_value(); }

    T& value() & { return std::get<0>(data_); }
    const T& value() const& { return std::get<0>(data_); }
    T&& value() && { return std::get<0>(std::move(data_)); }

    const Error& error() const { return std::get<1>(data_); }

    T& operator*() & { return value(); }
    const T& operator*() const& { return value(); }
    T* operator->() { return &value(); }
    const T* operator->() const { return &value(); }

    T value_or(T fallback) const { return has_value() ? value() : fallback; }

private:
    std::variant<T, Error> data_;
};

}  // namespace tract
