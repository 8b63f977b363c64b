#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ddosml {

/// Base for every error raised by the library. The CLI maps each subclass
/// to its own exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Header/column layout problems: missing header, missing label column,
/// feature-name mismatch between a model and its input.
class SchemaError : public Error {
public:
    using Error::Error;
};

/// Precondition violations on call arguments.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// File system and stream failures.
class IoError : public Error {
public:
    using Error::Error;
};

/// A malformed data line. Carries the 1-based physical line number.
class RowError : public Error {
public:
    RowError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line), detail_(what) {}
    std::size_t line() const noexcept { return line_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    std::size_t line_;
    std::string detail_;
};

/// A column that cannot be turned into numbers under the active policy.
class ColumnError : public Error {
public:
    ColumnError(std::string column, const std::string& what)
        : Error("column '" + column + "': " + what), column_(std::move(column)), detail_(what) {}
    const std::string& column() const noexcept { return column_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    std::string column_;
    std::string detail_;
};

/// A label text that is not in the label dictionary.
class LabelError : public Error {
public:
    LabelError(std::string label, std::size_t row)
        : Error("unknown label '" + label + "' at row " + std::to_string(row)),
          label_(std::move(label)), row_(row) {}
    const std::string& label() const noexcept { return label_; }
    std::size_t row() const noexcept { return row_; }

private:
    std::string label_;
    std::size_t row_;
};

/// A metric requested on input for which it has no value (e.g. accuracy of
/// an empty confusion matrix).
class UndefinedMetric : public Error {
public:
    using Error::Error;
};

/// Artifact/format problems: bad JSON, unsupported format_version.
class FormatError : public Error {
public:
    using Error::Error;
};

}  // namespace ddosml
