#ifndef BOND_ERROR_HPP
#define BOND_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bond {

/// Machine-readable failure classes. The CLI prints these as `error[CODE]:`.
enum class ErrorCode { Parse, Arity, Unbounded, Stiff, Domain };

std::string_view to_string(ErrorCode code);

/// Byte range into a source text plus the 1-based line/column of its start.
struct SourceSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  int line = 1;
  int column = 1;
};

class BondError : public std::runtime_error {
 public:
  BondError(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

/// Error raised while reading a `.bond` file. Always carries a span inside the
/// input text; `expected` lists token descriptions when the failure was a
/// syntax error.
class ParseError : public BondError {
 public:
  ParseError(ErrorCode code, SourceSpan span, const std::string& message,
             std::vector<std::string> expected = {})
      : BondError(code, message), span_(span), expected_(std::move(expected)) {}

  const SourceSpan& span() const { return span_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  SourceSpan span_;
  std::vector<std::string> expected_;
};

}  // namespace bond

#endif  // BOND_ERROR_HPP
