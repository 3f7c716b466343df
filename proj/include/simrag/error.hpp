#pragma once

#include <stdexcept>
#include <string>

namespace simrag {

/// Broad failure class of an error. The numeric values double as CLI exit
/// codes.
enum class ErrorCategory : int {
  config = 2,
  transport = 3,
  data = 4,
  statistics = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorCategory::config, what) {}
};

// ---- dataset ---------------------------------------------------------------

class MissingFile : public Error {
 public:
  explicit MissingFile(const std::string& path)
      : Error(ErrorCategory::config, "missing file: " + path), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class MalformedRow : public Error {
 public:
  MalformedRow(const std::string& file, std::size_t line,
               const std::string& reason)
      : Error(ErrorCategory::data,
              file + ":" + std::to_string(line) + ": malformed row: " + reason),
        line_(line),
        reason_(reason) {}
  std::size_t line() const noexcept { return line_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

class EmptySplit : public Error {
 public:
  explicit EmptySplit(const std::string& split)
      : Error(ErrorCategory::data, "split '" + split + "' has no rows"),
        split_(split) {}
  const std::string& split() const noexcept { return split_; }

 private:
  std::string split_;
};

class KTooLarge : public Error {
 public:
  KTooLarge(std::size_t k, std::size_t available)
      : Error(ErrorCategory::config,
              "requested " + std::to_string(k) + " examples but the train split has only " +
                  std::to_string(available) + " rows"),
        k_(k),
        available_(available) {}
  std::size_t k() const noexcept { return k_; }
  std::size_t available() const noexcept { return available_; }

 private:
  std::size_t k_;
  std::size_t available_;
};

// ---- parser ----------------------------------------------------------------

class ParseError : public Error {
 public:
  using Error::Error;
};

class NoMatch : public ParseError {
 public:
  NoMatch()
      : ParseError(ErrorCategory::data,
                   "response does not contain 'Similarity score : <number>'") {}
};

class OutOfRange : public ParseError {
 public:
  explicit OutOfRange(double value)
      : ParseError(ErrorCategory::data,
                   "parsed score " + std::to_string(value) + " lies outside [0, 4]"),
        value_(value) {}
  double value() const noexcept { return value_; }

 private:
  double value_;
};

// ---- statistics ------------------------------------------------------------

class LengthMismatch : public Error {
 public:
  LengthMismatch(std::size_t a, std::size_t b)
      : Error(ErrorCategory::statistics,
              "series lengths differ: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

class TooFewObservations : public Error {
 public:
  explicit TooFewObservations(std::size_t n)
      : Error(ErrorCategory::statistics,
              "correlation needs at least 2 observations, got " + std::to_string(n)) {}
};

class DegenerateVariance : public Error {
 public:
  explicit DegenerateVariance(const std::string& which)
      : Error(ErrorCategory::statistics,
              "series '" + which + "' has zero variance; correlation is undefined"),
        which_(which) {}
  const std::string& which() const noexcept { return which_; }

 private:
  std::string which_;
};

// ---- llm client ------------------------------------------------------------

class TransportError : public Error {
 public:
  explicit TransportError(const std::string& what, int status = 0)
      : Error(ErrorCategory::transport, what), status_(status) {}
  /// HTTP status, or 0 when no response was received.
  int status() const noexcept { return status_; }

 private:
  int status_;
};

class RateLimited : public TransportError {
 public:
  explicit RateLimited(const std::string& what) : TransportError(what, 429) {}
};

class ProviderError : public Error {
 public:
  explicit ProviderError(const std::string& payload)
      : Error(ErrorCategory::transport, "provider error: " + payload),
        payload_(payload) {}
  const std::string& payload() const noexcept { return payload_; }

 private:
  std::string payload_;
};

class FormatExhausted : public Error {
 public:
  FormatExhausted(int pair_id, std::string last_response, int attempts)
      : Error(ErrorCategory::data,
              "pair " + std::to_string(pair_id) + ": no well-formed score after " +
                  std::to_string(attempts) + " attempts"),
        pair_id_(pair_id),
        last_response_(std::move(last_response)),
        attempts_(attempts) {}
  int pair_id() const noexcept { return pair_id_; }
  const std::string& last_response() const noexcept { return last_response_; }
  int attempts() const noexcept { return attempts_; }

 private:
  int pair_id_;
  std::string last_response_;
  int attempts_;
};

// ---- sweep -----------------------------------------------------------------

class AllPairsExcluded : public Error {
 public:
  explicit AllPairsExcluded(std::size_t count)
      : Error(ErrorCategory::statistics,
              "all " + std::to_string(count) +
                  " pairs failed the output-format check; no correlation available") {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::config, what) {}
};

}  // namespace simrag
