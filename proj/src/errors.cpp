#include "kmpe/errors.hpp"

namespace kmpe {

ParseError::ParseError(const std::string& what, std::size_t row)
    : std::runtime_error(row == 0 ? what : "row " + std::to_string(row) + ": " + what),
      row_(row) {}

}  // namespace kmpe
