#pragma once

#include <stdexcept>
#include <string>

namespace palign {

// Error categories, also used as process exit codes by the CLI.
enum class ErrorCode : int {
  Usage = 64,        // bad arguments / unknown flags
  BadData = 65,      // malformed file contents or inconsistent inputs
  MissingInput = 66, // input file or directory not found
  Internal = 70,     // numerical failure (e.g. diverged optimization)
  CantWrite = 73,    // output could not be created
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline Error bad_data(const std::string& what) { return Error(ErrorCode::BadData, what); }
inline Error missing_input(const std::string& what) { return Error(ErrorCode::MissingInput, what); }
inline Error internal_error(const std::string& what) { return Error(ErrorCode::Internal, what); }

}  // namespace palign
