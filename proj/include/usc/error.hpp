#pragma once

#include <stdexcept>
#include <string>

namespace usc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidLayout : public Error {
 public:
  using Error::Error;
};

class InvalidSpec : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NotHermitian : public Error {
 public:
  using Error::Error;
};

// Raised by the master-equation integrator when trace or positivity drift
// beyond tolerance.
class IntegrationFailure : public Error {
 public:
  using Error::Error;
};

// Config file problems. line() is 0 when the problem is not tied to a line.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& message, int line = 0, std::string field = {}, std::string source = {})
      : Error(format(message, line, field, source)),
        detail_(message),
        line_(line),
        field_(std::move(field)),
        source_(std::move(source)) {}

  int line() const { return line_; }
  const std::string& field() const { return field_; }
  const std::string& detail() const { return detail_; }  // message without location
  const std::string& source() const { return source_; }

  ConfigError with_source(const std::string& source) const {
    return ConfigError(detail_, line_, field_, source);
  }

 private:
  static std::string format(const std::string& message, int line, const std::string& field,
                            const std::string& source) {
    std::string out;
    if (!source.empty()) out += source + ": ";
    if (line > 0) out += "line " + std::to_string(line) + ": ";
    if (!field.empty()) out += "'" + field + "': ";
    return out + message;
  }

  std::string detail_;
  int line_;
  std::string field_;
  std::string source_;
};

}  // namespace usc
