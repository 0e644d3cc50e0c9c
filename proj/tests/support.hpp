#pragma once

#include <optional>

#include "ssf/errors.hpp"

// Kind of the ssf::Error raised by f, or nullopt when f returns normally.
template <class F>
std::optional<ssf::ErrorKind> error_kind(F&& f) {
  try {
    f();
  } catch (const ssf::Error& e) {
    return e.kind();
  }
  return std::nullopt;
}
