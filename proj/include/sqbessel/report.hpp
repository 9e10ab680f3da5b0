#pragma once

// Result records emitted by the CLI, with CSV and JSON writers and readers.
// Reals are written with 17 significant digits so reading back is exact.
// Timing columns can be dropped to make outputs byte-comparable.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace sqbessel {

struct PriceRecord {
  std::string option;  // put | asian | basket
  std::string scheme;  // exact | fte
  double h = 0.0;
  std::int64_t fixings = 1;
  std::int64_t n_paths = 0;
  std::int64_t seed = 0;
  std::string coeffs;  // patch accuracy label, empty for fte
  double price = 0.0;
  double std_error = 0.0;
  double std_error_x1e3 = 0.0;
  double reference = std::numeric_limits<double>::quiet_NaN();
  double relative_error = std::numeric_limits<double>::quiet_NaN();
  double elapsed_s = 0.0;
};

struct MomentRecord {
  double delta = 0.0;
  double lambda = 0.0;
  std::int64_t n = 0;
  std::int64_t seed = 0;
  std::int64_t k = 0;
  double analytic = 0.0;
  double sample = 0.0;
  double rel_error = 0.0;
  double jackknife_se = 0.0;
};

struct SampleRecord {
  std::int64_t index = 0;
  double value = 0.0;
};

template <class T>
struct Field {
  const char* name;
  double T::*real = nullptr;
  std::int64_t T::*integer = nullptr;
  std::string T::*text = nullptr;
  bool timing = false;
};

template <class T>
const std::vector<Field<T>>& record_fields();

template <>
inline const std::vector<Field<PriceRecord>>& record_fields<PriceRecord>() {
  using R = PriceRecord;
  static const std::vector<Field<R>> f = {
      {"option", nullptr, nullptr, &R::option},
      {"scheme", nullptr, nullptr, &R::scheme},
      {"h", &R::h},
      {"fixings", nullptr, &R::fixings},
      {"n_paths", nullptr, &R::n_paths},
      {"seed", nullptr, &R::seed},
      {"coeffs", nullptr, nullptr, &R::coeffs},
      {"price", &R::price},
      {"std_error", &R::std_error},
      {"std_error_x1e3", &R::std_error_x1e3},
      {"reference", &R::reference},
      {"relative_error", &R::relative_error},
      {"elapsed_s", &R::elapsed_s, nullptr, nullptr, true},
  };
  return f;
}

template <>
inline const std::vector<Field<MomentRecord>>& record_fields<MomentRecord>() {
  using R = MomentRecord;
  static const std::vector<Field<R>> f = {
      {"delta", &R::delta},         {"lambda", &R::lambda},
      {"n", nullptr, &R::n},        {"seed", nullptr, &R::seed},
      {"k", nullptr, &R::k},        {"analytic", &R::analytic},
      {"sample", &R::sample},       {"rel_error", &R::rel_error},
      {"jackknife_se", &R::jackknife_se},
  };
  return f;
}

template <>
inline const std::vector<Field<SampleRecord>>& record_fields<SampleRecord>() {
  using R = SampleRecord;
  static const std::vector<Field<R>> f = {{"index", nullptr, &R::index}, {"value", &R::value}};
  return f;
}

namespace detail {

inline std::string real_text(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_real(const std::string& s) {
  if (s == "nan" || s.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("bad real '" + s + "'");
  return v;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace detail

template <class T>
std::string to_csv(const std::vector<T>& rows, bool omit_timing = false) {
  const auto& fields = record_fields<T>();
  std::string out;
  bool first = true;
  for (const auto& f : fields) {
    if (omit_timing && f.timing) continue;
    if (!first) out += ',';
    out += f.name;
    first = false;
  }
  out += '\n';
  for (const auto& r : rows) {
    first = true;
    for (const auto& f : fields) {
      if (omit_timing && f.timing) continue;
      if (!first) out += ',';
      first = false;
      if (f.real) out += detail::real_text(r.*(f.real));
      else if (f.integer) out += std::to_string(r.*(f.integer));
      else out += r.*(f.text);
    }
    out += '\n';
  }
  return out;
}

// Columns are matched by header name; missing columns keep their defaults.
template <class T>
std::vector<T> from_csv(const std::string& text) {
  const auto& fields = record_fields<T>();
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty CSV");
  const auto header = detail::split_csv_line(line);
  std::vector<const Field<T>*> map;
  for (const auto& h : header) {
    const Field<T>* hit = nullptr;
    for (const auto& f : fields)
      if (h == f.name) hit = &f;
    map.push_back(hit);
  }
  std::vector<T> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != header.size()) throw std::invalid_argument("CSV row width mismatch");
    T r{};
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const auto* f = map[i];
      if (!f) continue;
      if (f->real) r.*(f->real) = detail::parse_real(cells[i]);
      else if (f->integer) r.*(f->integer) = std::stoll(cells[i]);
      else r.*(f->text) = cells[i];
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

template <class T>
nlohmann::json to_json(const std::vector<T>& rows, bool omit_timing = false) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json o = nlohmann::json::object();
    for (const auto& f : record_fields<T>()) {
      if (omit_timing && f.timing) continue;
      if (f.real) {
        const double v = r.*(f.real);
        if (std::isnan(v)) o[f.name] = nullptr;
        else o[f.name] = v;
      } else if (f.integer) {
        o[f.name] = r.*(f.integer);
      } else {
        o[f.name] = r.*(f.text);
      }
    }
    arr.push_back(std::move(o));
  }
  return arr;
}

template <class T>
std::vector<T> from_json(const nlohmann::json& arr) {
  std::vector<T> rows;
  for (const auto& o : arr) {
    T r{};
    for (const auto& f : record_fields<T>()) {
      if (!o.contains(f.name)) continue;
      const auto& v = o.at(f.name);
      if (f.real) r.*(f.real) = v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.template get<double>();
      else if (f.integer) r.*(f.integer) = v.template get<std::int64_t>();
      else r.*(f.text) = v.template get<std::string>();
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace sqbessel
