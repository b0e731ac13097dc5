#include "manie/error.hpp"

#include <iostream>
#include <mutex>
#include <utility>

namespace manie {

namespace {

std::mutex& handler_mutex() {
  static std::mutex m;
  return m;
}

WarningHandler& handler_slot() {
  static WarningHandler handler = [](std::string_view msg) { std::cerr << "warning: " << msg << '\n'; };
  return handler;
}

}  // namespace

void warn(std::string_view message) {
  std::lock_guard lock(handler_mutex());
  if (auto& h = handler_slot()) h(message);
}

WarningHandler set_warning_handler(WarningHandler handler) {
  std::lock_guard lock(handler_mutex());
  return std::exchange(handler_slot(), std::move(handler));
}

}  // namespace manie
