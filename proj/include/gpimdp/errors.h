#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gpimdp {

// Base for every error raised by the library. `module()` names the component
// that raised it so the CLI can report provenance.
class Error : public std::runtime_error {
   public:
    Error(std::string module, std::string const& message)
        : std::runtime_error(module + ": " + message), moduleName(std::move(module)) {}

    std::string const& module() const { return moduleName; }

   private:
    std::string moduleName;
};

class ParseError : public Error {
   public:
    ParseError(std::string const& message, std::size_t position)
        : Error("ltlf", message + " at position " + std::to_string(position)), pos(position) {}

    std::size_t position() const { return pos; }

   private:
    std::size_t pos;
};

class CapacityError : public Error {
   public:
    using Error::Error;
};

class NumericalError : public Error {
   public:
    using Error::Error;
};

class ModelError : public Error {
   public:
    using Error::Error;
};

class ConfigError : public Error {
   public:
    explicit ConfigError(std::string const& message) : Error("config", message) {}
};

class IoError : public Error {
   public:
    explicit IoError(std::string const& message) : Error("io", message) {}
};

}  // namespace gpimdp
