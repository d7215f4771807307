#pragma once

#include <stdexcept>
#include <string>

namespace emopipe {

/// Header/column layout problems in an input file.
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A cell or field holds a value outside its domain.
class ValueError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A key that must be unique appears more than once.
class UniquenessError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An operation was called outside its stated preconditions.
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Invalid configuration value.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File missing, unreadable, or structurally corrupt.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace emopipe
