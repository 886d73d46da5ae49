#include "fbs/harness/io.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fbs/errors.h"

namespace fbs::harness {

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void ensure_dir(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw std::runtime_error("cannot create directory " + path + ": " + ec.message());
}

void write_text(const std::string& path, const std::string& text) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) ensure_dir(parent.string());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

void write_field_csv(const std::string& path, const FieldSample& s) {
  std::ostringstream o;
  const int N = s.grid.n_axes();
  for (int l = 0; l < N; ++l) o << (l ? "," : "") << "t_" << l + 1;
  for (int c = 0; c < s.d; ++c) o << ",B_" << c + 1;
  o << '\n';
  for (std::size_t i = 0; i < s.grid.size(); ++i) {
    const Point t = s.grid.point(i);
    for (int l = 0; l < N; ++l) o << (l ? "," : "") << csv_number(t[l]);
    for (int c = 0; c < s.d; ++c) o << ',' << csv_number(s.at(c, i));
    o << '\n';
  }
  write_text(path, o.str());
}

json field_sidecar(const FieldSample& s) {
  json axes = json::array();
  for (int l = 0; l < s.grid.n_axes(); ++l) {
    const auto& a = s.grid.axis(l);
    axes.push_back(json{{"points", a.size()}, {"first", a.front()}, {"last", a.back()}});
  }
  return json{{"schema_version", kSchemaVersion},
              {"kind", "field-sample"},
              {"H", s.hurst.h},
              {"d", s.d},
              {"grid", axes},
              {"master_seed", s.seed.master_seed},
              {"stream_id", s.seed.stream_id},
              {"jitter", s.jitter},
              {"columns", "t_1..t_N, B_1..B_d"}};
}

void write_localtime_csv(const std::string& path, const LocalTimeField& f) {
  std::ostringstream o;
  const int d = f.lattice.d();
  for (int c = 0; c < d; ++c) o << (c ? "," : "") << "x_" << c + 1;
  o << ",value,mass\n";
  for (std::size_t b = 0; b < f.values.size(); ++b) {
    const auto x = f.lattice.center(b);
    for (int c = 0; c < d; ++c) o << (c ? "," : "") << csv_number(x[c]);
    o << ',' << csv_number(f.values[b]) << ',' << csv_number(f.mass[b]) << '\n';
  }
  write_text(path, o.str());
}

json localtime_sidecar(const LocalTimeField& f, double exact_tol) {
  const double rec = f.recovered_mass();
  const double diff = std::fabs(rec - f.time_mass);
  return json{{"schema_version", kSchemaVersion},
              {"kind", "local-time-field"},
              {"box", {{"lower", f.box.lower}, {"upper", f.box.upper}}},
              {"bins", {{"lower", f.lattice.lower}, {"width", f.lattice.width}, {"count", f.lattice.bins}}},
              {"bin_volume", f.bin_volume},
              {"grid_spacing", f.grid_spacing},
              {"mass_check",
               {{"time_mass", f.time_mass},
                {"recovered_mass", rec},
                {"overflow_mass", f.overflow_mass},
                {"abs_difference", diff},
                {"pass", diff <= exact_tol * f.time_mass}}},
              {"columns", "x_1..x_d, value, mass"}};
}

void write_scaling_csv(const std::string& path, const std::vector<FitRecord>& fits) {
  std::ostringstream o;
  o << "series,r,value,spread\n";
  for (const auto& f : fits) {
    for (std::size_t k = 0; k < f.radii.size(); ++k) {
      o << f.name << ',' << csv_number(f.radii[k]) << ',' << csv_number(f.values[k]) << ','
        << (k < f.spread.size() ? csv_number(f.spread[k]) : "") << '\n';
    }
  }
  write_text(path, o.str());
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
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

}  // namespace

Pairs read_pairs_csv(const std::string& path, const std::string& series) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open input");
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path + ": empty file");
  const auto head = split_csv_line(line);
  auto col = [&](const std::string& name) -> int {
    for (std::size_t i = 0; i < head.size(); ++i) {
      if (head[i] == name) return static_cast<int>(i);
    }
    return -1;
  };
  const int cr = col("r"), cv = col("value"), cw = col("weight"), cs = col("series");
  if (cr < 0 || cv < 0) throw ConfigError(path + ": header needs columns r and value");
  if (!series.empty() && cs < 0) throw ConfigError(path + ": no series column to filter on");
  Pairs p;
  int n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != head.size()) throw ConfigError(path + ":" + std::to_string(n) + ": wrong number of fields");
    if (!series.empty() && f[cs] != series) continue;
    auto parse = [&](int c) {
      char* end = nullptr;
      const double v = std::strtod(f[c].c_str(), &end);
      if (f[c].empty() || *end != '\0') {
        throw ConfigError(path + ":" + std::to_string(n) + ": '" + f[c] + "' is not a number");
      }
      return v;
    };
    p.r.push_back(parse(cr));
    p.value.push_back(parse(cv));
    if (cw >= 0) p.weight.push_back(parse(cw));
  }
  return p;
}

}  // namespace fbs::harness
