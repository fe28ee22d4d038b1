#include "nlh/report.hpp"

#include "nlh/errors.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace nlh::report {

double finite(double x) {
  constexpr double big = std::numeric_limits<double>::max();
  if (std::isnan(x)) return -big;
  return std::clamp(x, -big, big);
}

CheckEntry make_check(std::string check, std::string anchor, std::string inputs_digest, double measured,
                      double threshold, Sense sense, Series series, std::string note) {
  CheckEntry e;
  e.check = std::move(check);
  e.anchor = std::move(anchor);
  e.inputs_digest = std::move(inputs_digest);
  e.measured = measured;
  e.threshold = threshold;
  if (std::isnan(measured)) {
    e.pass = false;
    e.margin = -std::numeric_limits<double>::max();
  } else {
    e.pass = sense == Sense::AtMost ? measured <= threshold : measured >= threshold;
    e.margin = finite(sense == Sense::AtMost ? threshold - measured : measured - threshold);
  }
  e.series = std::move(series);
  e.note = std::move(note);
  return e;
}

bool Report::all_passed() const {
  return std::all_of(checks_.begin(), checks_.end(), [](const CheckEntry& e) { return e.pass; });
}

nlohmann::json to_json(const CheckEntry& e) {
  nlohmann::json j;
  j["check"] = e.check;
  j["anchor"] = e.anchor;
  j["inputs_digest"] = e.inputs_digest;
  j["measured"] = finite(e.measured);
  j["threshold"] = finite(e.threshold);
  j["margin"] = e.margin;
  j["pass"] = e.pass;
  if (!e.series.empty()) {
    nlohmann::json s = nlohmann::json::array();
    for (const auto& [x, y] : e.series) s.push_back({finite(x), finite(y)});
    j["series"] = s;
  }
  if (!e.note.empty()) j["note"] = e.note;
  return j;
}

CheckEntry check_from_json(const nlohmann::json& j) {
  CheckEntry e;
  e.check = j.at("check").get<std::string>();
  e.anchor = j.value("anchor", "");
  e.inputs_digest = j.value("inputs_digest", "");
  e.measured = j.at("measured").get<double>();
  e.threshold = j.at("threshold").get<double>();
  e.margin = j.at("margin").get<double>();
  e.pass = j.at("pass").get<bool>();
  if (j.contains("series"))
    for (const auto& p : j["series"]) e.series.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
  e.note = j.value("note", "");
  return e;
}

nlohmann::json Report::to_json() const {
  std::vector<CheckEntry> sorted = checks_;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const CheckEntry& a, const CheckEntry& b) { return a.check < b.check; });
  nlohmann::json j = sections_;
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : sorted) arr.push_back(nlh::report::to_json(e));
  j["checks"] = arr;
  j["all_passed"] = all_passed();
  return j;
}

void Report::write(const std::filesystem::path& path) const { write_text(path, to_json().dump(2) + "\n"); }

std::string sha256_hex(const void* data, std::size_t size) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data, size, md, &len, EVP_sha256(), nullptr) != 1) throw Error("SHA-256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 15]);
  }
  return out;
}

std::string sha256_hex(const std::string& s) { return sha256_hex(s.data(), s.size()); }

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot read " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return sha256_hex(ss.str());
}

std::string digest_values(const std::vector<double>& values) {
  std::string bytes;
  bytes.reserve(values.size() * 8);
  for (double v : values) {
    const auto u = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<char>((u >> (8 * i)) & 0xffu));
  }
  return sha256_hex(bytes);
}

std::string digest_cochain(const Cochain& c) {
  std::vector<double> head{static_cast<double>(c.degree()), static_cast<double>(c.components())};
  const Complex& k = c.complex();
  for (int a = 0; a < k.dim(); ++a) {
    head.push_back(k.cells_along(a));
    head.push_back(k.spacing(a));
  }
  head.insert(head.end(), c.values().begin(), c.values().end());
  return digest_values(head);
}

void write_ppm(const std::filesystem::path& path, const std::vector<double>& values, int width, int height) {
  if (width <= 0 || height <= 0 || values.size() != static_cast<std::size_t>(width) * height)
    throw InvalidArgument("heatmap size does not match its values");
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : values)
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path.string());
  os << "P6\n" << width << " " << height << "\n255\n";
  // Image rows run top to bottom; data rows bottom to top.
  for (int y = height - 1; y >= 0; --y)
    for (int x = 0; x < width; ++x) {
      const double v = values[static_cast<std::size_t>(y) * width + x];
      double t = (hi > lo && std::isfinite(v)) ? (v - lo) / (hi - lo) : 0.5;
      unsigned char r, g, b;
      if (t < 0.5) {
        const double s = 2.0 * t;
        r = static_cast<unsigned char>(std::lround(255 * s));
        g = r;
        b = 255;
      } else {
        const double s = 2.0 * (1.0 - t);
        r = 255;
        g = static_cast<unsigned char>(std::lround(255 * s));
        b = g;
      }
      const unsigned char px[3] = {r, g, b};
      os.write(reinterpret_cast<const char*>(px), 3);
    }
}

Image top_cell_image(const Cochain& c) {
  const Complex& k = c.complex();
  const int n = k.dim();
  if (c.degree() != n) throw DegreeError("heatmaps need a top-degree cochain");
  if (n < 2) throw InvalidArgument("heatmaps need dimension >= 2");
  Image img;
  img.width = k.cells_along(0);
  img.height = k.cells_along(1);
  img.values.resize(static_cast<std::size_t>(img.width) * img.height);
  MultiIndex base{};
  for (int a = 2; a < n; ++a) base[a] = k.cells_along(a) / 2;
  const unsigned mask = (1u << n) - 1u;
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      base[0] = x;
      base[1] = y;
      img.values[static_cast<std::size_t>(y) * img.width + x] = c.at(k.index(n, mask, base));
    }
  return img;
}

void write_series_csv(const std::filesystem::path& path, const Series& s, const std::string& x_name,
                      const std::string& y_name) {
  std::ostringstream os;
  os << x_name << "," << y_name << "\n";
  char buf[64];
  for (const auto& [x, y] : s) {
    std::snprintf(buf, sizeof buf, "%.17g,", x);
    os << buf;
    std::snprintf(buf, sizeof buf, "%.17g\n", y);
    os << buf;
  }
  write_text(path, os.str());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path.string());
  os << text;
  if (!os) throw Error("failed writing " + path.string());
}

}  // namespace nlh::report
