#include "resvol/error.hpp"

#include <utility>

namespace resvol {

ConfigError::ConfigError(std::string key, const std::string& what)
    : Error(ErrorKind::Config, key.empty() ? what : key + ": " + what), key_(std::move(key)) {}

ParseError::ParseError(std::size_t line, const std::string& what)
    : InputError(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

}  // namespace resvol
