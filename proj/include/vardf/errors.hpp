#pragma once

#include <stdexcept>
#include <string>

namespace vardf {

// Base class for every error the toolkit raises deliberately.
class error : public std::runtime_error {
public:
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Input bytes cannot be decoded as text at all (e.g. embedded NUL bytes).
// Tag-soup HTML is never malformed; it is parsed best-effort.
class malformed_input : public error {
public:
  using error::error;
};

// A serialized artifact (index file, outcome log) does not match its
// documented shape.
class format_error : public error {
public:
  using error::error;
};

// The crawl seed normalizes to nothing.
class empty_seed : public error {
public:
  using error::error;
};

// A crawl step was requested but no unused candidate term remains.
class pool_exhausted : public error {
public:
  using error::error;
};

// The query interface could not answer a search or document fetch.
class search_failure : public error {
public:
  using error::error;
};

// HTTP transport failure that survived the retry policy.
class network_error : public search_failure {
public:
  using search_failure::search_failure;
};

// The fetched page contains no form element.
class no_form_found : public error {
public:
  using error::error;
};

// The search form is not a single-textbox keyword interface.
class not_keyword_interface : public error {
public:
  using error::error;
};

// The simulator could not bind its listening address.
class bind_error : public error {
public:
  using error::error;
};

// Filesystem-level failure (unreadable corpus directory, unwritable output).
class io_error : public error {
public:
  using error::error;
};

}  // namespace vardf
