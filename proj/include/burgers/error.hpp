#pragma once

#include <stdexcept>
#include <string>

namespace burgers {

// Every failure raised by the library carries a short machine-readable kind
// ("invalid-material", "not-spd", ...) next to the human message. The CLI
// prints both on one line.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

inline void require(bool condition, const char* kind, const std::string& message) {
  if (!condition) throw Error(kind, message);
}

}  // namespace burgers
