#pragma once

// Coefficient files: a JSON document with 17-significant-digit decimals and
// an FNV-1a checksum over the canonical text of every stored number.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "sqbessel/chebyshev.hpp"
#include "sqbessel/errors.hpp"

namespace sqbessel {

inline constexpr const char* kPatchFormat = "sqbessel-chebyshev-patches";
inline constexpr int kPatchSchemaVersion = 1;

namespace detail {

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

// Canonical text of all numbers in a patch set, in file order.
inline std::string canonical_text(const PatchSet& set) {
  std::string s;
  auto add = [&s](double v) {
    s += fmt17(v);
    s += ',';
  };
  for (const auto& g : set.groups) {
    add(g.delta_lo);
    add(g.delta_hi);
    add(g.target_accuracy);
    const auto& r = g.spec();
    add(r.w_minus);
    add(r.w_plus);
    add(r.tail_u_cap);
    add(r.tail_w_cap);
    for (const auto& p : g.patches) {
      s += region_name(p.region.region_id);
      s += ',';
      add(p.order_delta);
      add(p.order_u);
      add(p.omitted_max);
      for (double c : p.coeffs) add(c);
    }
  }
  return s;
}

inline std::string checksum_string(const PatchSet& set) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016" PRIx64, fnv1a(canonical_text(set)));
  return buf;
}

}  // namespace detail

inline std::string patches_to_string(const PatchSet& set) {
  set.validate();
  using detail::fmt17;
  std::ostringstream o;
  o << "{\n  \"format\": \"" << kPatchFormat << "\",\n";
  o << "  \"schema_version\": " << kPatchSchemaVersion << ",\n";
  o << "  \"groups\": [";
  for (std::size_t gi = 0; gi < set.groups.size(); ++gi) {
    const auto& g = set.groups[gi];
    const auto& r = g.spec();
    o << (gi ? ",\n" : "\n") << "    {\n";
    o << "      \"delta_lo\": " << fmt17(g.delta_lo) << ",\n";
    o << "      \"delta_hi\": " << fmt17(g.delta_hi) << ",\n";
    o << "      \"target_accuracy\": " << fmt17(g.target_accuracy) << ",\n";
    o << "      \"w_minus\": " << fmt17(r.w_minus) << ",\n";
    o << "      \"w_plus\": " << fmt17(r.w_plus) << ",\n";
    o << "      \"tail_u_cap\": " << fmt17(r.tail_u_cap) << ",\n";
    o << "      \"tail_w_cap\": " << fmt17(r.tail_w_cap) << ",\n";
    o << "      \"patches\": [";
    for (std::size_t pi = 0; pi < 3; ++pi) {
      const auto& p = g.patches[pi];
      o << (pi ? ",\n" : "\n") << "        {\n";
      o << "          \"region\": \"" << region_name(p.region.region_id) << "\",\n";
      o << "          \"order_delta\": " << p.order_delta << ",\n";
      o << "          \"order_u\": " << p.order_u << ",\n";
      o << "          \"omitted_max\": " << fmt17(p.omitted_max) << ",\n";
      o << "          \"coefficients\": [";
      for (int m = 0; m <= p.order_delta; ++m) {
        o << (m ? ",\n" : "\n") << "            [";
        for (int n = 0; n <= p.order_u; ++n) o << (n ? ", " : "") << fmt17(p.coeff(m, n));
        o << "]";
      }
      o << "\n          ]\n        }";
    }
    o << "\n      ]\n    }";
  }
  o << "\n  ],\n";
  o << "  \"checksum\": \"" << detail::checksum_string(set) << "\"\n}\n";
  return o.str();
}

inline PatchSet patches_from_string(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw PatchFormatError(std::string("patch file is not valid JSON: ") + e.what());
  }
  PatchSet set;
  try {
    if (j.at("format").get<std::string>() != kPatchFormat)
      throw PatchFormatError("not a coefficient patch file");
    const int version = j.at("schema_version").get<int>();
    if (version != kPatchSchemaVersion)
      throw PatchFormatError("unsupported schema_version " + std::to_string(version));
    for (const auto& jg : j.at("groups")) {
      PatchGroup g;
      g.delta_lo = jg.at("delta_lo").get<double>();
      g.delta_hi = jg.at("delta_hi").get<double>();
      g.target_accuracy = jg.at("target_accuracy").get<double>();
      RegionSpec spec;
      spec.w_minus = jg.at("w_minus").get<double>();
      spec.w_plus = jg.at("w_plus").get<double>();
      spec.tail_u_cap = jg.at("tail_u_cap").get<double>();
      spec.tail_w_cap = jg.at("tail_w_cap").get<double>();
      const auto& jp = jg.at("patches");
      if (jp.size() != 3) throw PatchFormatError("each group needs exactly three patches");
      for (std::size_t i = 0; i < 3; ++i) {
        ChebyshevPatch p;
        p.delta_lo = g.delta_lo;
        p.delta_hi = g.delta_hi;
        p.target_accuracy = g.target_accuracy;
        p.region = spec;
        p.region.region_id = region_from_name(jp[i].at("region").get<std::string>());
        p.order_delta = jp[i].at("order_delta").get<int>();
        p.order_u = jp[i].at("order_u").get<int>();
        p.omitted_max = jp[i].at("omitted_max").get<double>();
        const auto& rows = jp[i].at("coefficients");
        if (rows.size() != static_cast<std::size_t>(p.order_delta + 1))
          throw PatchFormatError("coefficient rows do not match order_delta");
        for (const auto& row : rows) {
          if (row.size() != static_cast<std::size_t>(p.order_u + 1))
            throw PatchFormatError("coefficient row length does not match order_u");
          for (const auto& v : row) p.coeffs.push_back(v.get<double>());
        }
        g.patches[i] = std::move(p);
      }
      set.groups.push_back(std::move(g));
    }
    set.validate();
    if (j.at("checksum").get<std::string>() != detail::checksum_string(set))
      throw PatchFormatError("checksum mismatch");
  } catch (const nlohmann::json::exception& e) {
    throw PatchFormatError(std::string("malformed patch file: ") + e.what());
  }
  return set;
}

inline void save_patches(const PatchSet& set, const std::string& path) {
  const std::string text = patches_to_string(set);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << text;
  if (!f) throw std::runtime_error("write failed for " + path);
}

inline PatchSet load_patches(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return patches_from_string(ss.str());
}

// Several files merged into one set, groups in argument order.
template <class Paths>
PatchSet load_patch_files(const Paths& paths) {
  PatchSet out;
  for (const auto& p : paths) {
    auto s = load_patches(p);
    for (auto& g : s.groups) out.groups.push_back(std::move(g));
  }
  return out;
}

}  // namespace sqbessel
