// Copyright 2026 The spokenvec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef SPOKENVEC_CLI_SETTINGS_HPP_
#define SPOKENVEC_CLI_SETTINGS_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace spokenvec::cli {

// Flat `key = value` settings for one subcommand. Keys must be declared
// before they can be set; values are kept as text and parsed on access.
class Settings {
 public:
  void declare(std::string key, std::string default_value);

  // Throws ConfigError for an undeclared key.
  void set(std::string_view key, std::string value);

  // UTF-8 file of `key = value` lines; blank lines and lines starting with
  // '#' are ignored. Throws ParseError for malformed lines and ConfigError
  // for unknown keys.
  void load_file(const std::filesystem::path& path);
  void load_text(std::string_view text);

  bool is_set(std::string_view key) const;  // differs from the default
  const std::string& text(std::string_view key) const;
  std::string path(std::string_view key) const { return text(key); }
  double real(std::string_view key) const;
  int integer(std::string_view key) const;
  std::uint64_t unsigned_integer(std::string_view key) const;
  bool boolean(std::string_view key) const;
  // "none" maps to nullopt.
  std::optional<double> optional_real(std::string_view key) const;

  // Every key in declaration order, one `key = value` line each. Feeding
  // the output back through load_text reproduces the same settings.
  std::string dump() const;

 private:
  struct Entry {
    std::string key;
    std::string value;
    std::string default_value;
  };
  const Entry& find(std::string_view key) const;
  Entry& find(std::string_view key);
  std::vector<Entry> entries_;
};

}  // namespace spokenvec::cli

#endif  // SPOKENVEC_CLI_SETTINGS_HPP_
