#pragma once

#include <stdexcept>
#include <string>

namespace poplink {

/// Invalid or inconsistent configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

/// Input file does not match the expected layout (CLI exit code 2).
class SchemaError : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

/// Internal data structures disagree with each other, e.g. a link that
/// references a record the store does not know.
class IntegrityError : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

} // namespace poplink
