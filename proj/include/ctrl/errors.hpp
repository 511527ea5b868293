#pragma once

#include <stdexcept>
#include <string>

namespace ctrl {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct WidthError : Error {
  using Error::Error;
};

struct ParseError : Error {
  int line;
  int col;
  ParseError(const std::string& msg, int line_, int col_)
      : Error(msg + " (line " + std::to_string(line_) + ", col " +
              std::to_string(col_) + ")"),
        line(line_),
        col(col_) {}
};

struct UnsupportedError : Error {
  using Error::Error;
};

struct EvalError : Error {
  using Error::Error;
};

struct BudgetError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace ctrl
