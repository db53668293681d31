#pragma once

#include <stdexcept>
#include <string>

namespace pedx {

// Error categories map one-to-one onto CLI exit codes.
enum class ErrorKind { Usage = 1, Data = 2, Runtime = 3 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class UsageError : public Error {
public:
    explicit UsageError(const std::string& what) : Error(ErrorKind::Usage, what) {}
};

class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

class RuntimeError : public Error {
public:
    explicit RuntimeError(const std::string& what) : Error(ErrorKind::Runtime, what) {}
};

class ShapeError : public RuntimeError {
public:
    explicit ShapeError(const std::string& what) : RuntimeError("shape: " + what) {}
};

}  // namespace pedx
