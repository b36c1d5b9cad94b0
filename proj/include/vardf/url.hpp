#pragma once

#include <string>
#include <string_view>

#include "vardf/errors.hpp"
#include "vardf/text.hpp"

namespace vardf {

inline std::string percent_encode(std::string_view raw) {
  static constexpr char hex[] = "0123456789ABCDEF";
  std::string out;
  out.reserve(raw.size());
  for (unsigned char c : raw) {
    if (is_term_char(static_cast<char>(c)) || c == '-' || c == '.' ||
        c == '_' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(hex[c >> 4]);
      out.push_back(hex[c & 0xF]);
    }
  }
  return out;
}

inline std::string percent_decode(std::string_view encoded) {
  auto hex_value = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  std::string out;
  out.reserve(encoded.size());
  for (std::size_t i = 0; i < encoded.size(); ++i) {
    if (encoded[i] == '%' && i + 2 < encoded.size()) {
      int hi = hex_value(encoded[i + 1]);
      int lo = hex_value(encoded[i + 2]);
      if (hi >= 0 && lo >= 0) {
        out.push_back(static_cast<char>((hi << 4) | lo));
        i += 2;
        continue;
      }
    }
    out.push_back(encoded[i]);
  }
  return out;
}

struct split_url_result {
  std::string origin;  // scheme://host[:port]
  std::string path;    // leading '/', never empty
};

// Splits an http(s) URL into origin and path. Query strings stay attached
// to the path.
inline split_url_result split_url(std::string_view url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) {
    throw network_error("not an absolute http URL: " + std::string(url));
  }
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string_view::npos) {
    return {std::string(url), "/"};
  }
  return {std::string(url.substr(0, path_start)),
          std::string(url.substr(path_start))};
}

// Resolves a form action against the page path. Absolute URLs must share
// the origin; the simulator and the crawler always stay on one host.
inline std::string resolve_action(const std::string& origin,
                                  const std::string& page_path,
                                  const std::string& action) {
  if (action.empty()) return page_path;
  if (action.front() == '/') return action;
  if (action.find("://") != std::string::npos) {
    auto split = split_url(action);
    if (split.origin != origin) {
      throw network_error("form action leaves the search origin: " + action);
    }
    return split.path;
  }
  auto dir_end = page_path.rfind('/');
  return page_path.substr(0, dir_end + 1) + action;
}

}  // namespace vardf
