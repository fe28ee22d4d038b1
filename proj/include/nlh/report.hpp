#pragma once

#include "nlh/cochain.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace nlh::report {

using Series = std::vector<std::pair<double, double>>;

enum class Sense {
  /// pass iff measured <= threshold; margin = threshold - measured.
  AtMost,
  /// pass iff measured >= threshold; margin = measured - threshold.
  AtLeast,
};

struct CheckEntry {
  std::string check;
  std::string anchor;
  std::string inputs_digest;
  double measured = 0.0;
  double threshold = 0.0;
  double margin = 0.0;
  bool pass = false;
  Series series;
  std::string note;
};

/// Builds an entry; non-finite measurements give a finite, failing margin.
CheckEntry make_check(std::string check, std::string anchor, std::string inputs_digest, double measured,
                      double threshold, Sense sense, Series series = {}, std::string note = {});

class Report {
public:
  void add(CheckEntry e) { checks_.push_back(std::move(e)); }
  /// Free-form section (e.g. "flow", "gauge").
  nlohmann::json& section(const std::string& name) { return sections_[name]; }
  const std::vector<CheckEntry>& checks() const { return checks_; }
  bool all_passed() const;
  /// Checks sorted by name; sections keyed alphabetically.
  nlohmann::json to_json() const;
  void write(const std::filesystem::path& path) const;

private:
  std::vector<CheckEntry> checks_;
  nlohmann::json sections_ = nlohmann::json::object();
};

nlohmann::json to_json(const CheckEntry& e);
CheckEntry check_from_json(const nlohmann::json& j);

/// Finite replacement for inf / nan (+-DBL_MAX, nan -> -DBL_MAX).
double finite(double x);

std::string sha256_hex(const void* data, std::size_t size);
std::string sha256_hex(const std::string& s);
std::string sha256_file(const std::filesystem::path& path);
/// Digest of the raw little-endian bytes of the values.
std::string digest_values(const std::vector<double>& values);
std::string digest_cochain(const Cochain& c);

/// Row-major image of `width x height` values rendered with a fixed
/// blue-white-red ramp between min and max (P6 binary PPM).
void write_ppm(const std::filesystem::path& path, const std::vector<double>& values, int width, int height);

/// Top-cell values of an n-cochain as an image: n = 2 directly, n >= 3 the
/// middle slice in the remaining axes.  Returns (values, width, height).
struct Image {
  std::vector<double> values;
  int width = 0;
  int height = 0;
};
Image top_cell_image(const Cochain& c);

void write_series_csv(const std::filesystem::path& path, const Series& s, const std::string& x_name,
                      const std::string& y_name);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace nlh::report
