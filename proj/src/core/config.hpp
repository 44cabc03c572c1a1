#pragma once

#include <map>
#include <string>
#include <vector>

namespace hesselm {

struct KeySpec {
  const char* name;
  const char* default_value;
  const char* help;
};

// Flat key-value configuration addressed as section.key. Every key has a
// default; setting an unknown key or a value the owning module would reject
// fails immediately.
class Config {
public:
  Config();

  static const std::vector<KeySpec>& keys();
  static Config load(const std::string& path);

  void set(const std::string& key, const std::string& value);
  const std::string& get(const std::string& key) const;
  double get_double(const std::string& key) const;
  long long get_int(const std::string& key) const;
  bool get_bool(const std::string& key) const;

  // canonical INI rendering: stable section and key order
  std::string serialize() const;
  void save(const std::string& path) const;

private:
  std::map<std::string, std::string> values_;
};

}  // namespace hesselm
