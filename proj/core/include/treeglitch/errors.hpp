/**
 * \file errors.hpp
 *
 * Copyright 2026 the treeglitch authors.
 * License: Apache License 2.0
 */

#ifndef TREEGLITCH_ERRORS_HPP
#define TREEGLITCH_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace treeglitch {

/** Base class of all errors thrown by this library. */
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/** Malformed input text (model files, DIMACS, solution files, ...). */
class ParseError : public Error {
public:
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

/** A type invariant is violated (dangling children, cyclic trees, ...). */
class StructureError : public Error {
public:
    explicit StructureError(const std::string& msg) : Error(msg) {}
};

/** An argument violates a documented precondition. */
class ArgumentError : public Error {
public:
    explicit ArgumentError(const std::string& msg) : Error(msg) {}
};

/** File system failure. */
class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

/** External solver process failed or produced unusable output. */
class SolverError : public Error {
public:
    explicit SolverError(const std::string& msg) : Error(msg) {}
};

/** A solver assignment disagrees with true model evaluation. */
class SoundnessError : public Error {
public:
    explicit SoundnessError(const std::string& msg) : Error(msg) {}
};

} // namespace treeglitch

#endif // TREEGLITCH_ERRORS_HPP
