#pragma once

// Error taxonomy shared across the pipeline.

#include <stdexcept>
#include <string>

namespace deonmf {

// Base for everything raised while reading or checking a theory.
class SurfaceError : public std::runtime_error {
 public:
  SurfaceError(std::string what, int line, int col)
      : std::runtime_error(std::move(what)), line(line), col(col) {}
  int line, col;
};

class ParseError : public SurfaceError {
 public:
  using SurfaceError::SurfaceError;
};

class SortError : public SurfaceError {
 public:
  using SurfaceError::SurfaceError;
};

class SortMismatch : public SortError {
 public:
  SortMismatch(const std::string& expected, const std::string& found, int line,
               int col)
      : SortError("sort mismatch: expected " + expected + ", found " + found,
                  line, col) {}
};

class UnknownSort : public SortError {
 public:
  UnknownSort(const std::string& name, int line, int col)
      : SortError("unknown sort: " + name, line, col) {}
};

class UnboundVariable : public SortError {
 public:
  UnboundVariable(const std::string& name, int line, int col)
      : SortError("unbound name: " + name, line, col) {}
};

class DuplicateName : public SurfaceError {
 public:
  DuplicateName(const std::string& name, int line, int col)
      : SurfaceError("duplicate name: " + name, line, col) {}
};

class ArityError : public SortError {
 public:
  ArityError(const std::string& what, int line, int col)
      : SortError(what, line, col) {}
};

// A scope or expansion request that exceeds the configured cell budget.
class ScopeTooLarge : public std::runtime_error {
 public:
  explicit ScopeTooLarge(const std::string& what)
      : std::runtime_error(what) {}
};

// Interpreting a constant or quantifier over a sort with no finite universe.
class UnsupportedSort : public std::runtime_error {
 public:
  explicit UnsupportedSort(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace deonmf
