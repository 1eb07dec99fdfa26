#pragma once

#include <stdexcept>
#include <string>

namespace wavecast {

// Base class for every error thrown by this library. Subcommands catch this
// type at the top level and map it to a labelled stderr line plus a nonzero
// exit code, so anything thrown below must derive from it.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define WAVECAST_DEFINE_ERROR(Name)                                           \
  class Name : public ::wavecast::Error {                                     \
  public:                                                                     \
    explicit Name(const std::string& msg)                                     \
        : ::wavecast::Error(std::string(#Name ": ") + msg) {}                 \
  }

}  // namespace wavecast
