// SPDX-FileCopyrightText: © 2026 connectikit contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "connectikit/io.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "connectikit/error.hpp"

namespace connectikit {

using nlohmann::json;

std::string format_double(double v) {
  if (!std::isfinite(v)) throw NumericError("cannot serialize non-finite value");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string quote(const std::string& s) { return json(s).dump(); }

void write_vec(std::ostringstream& os, std::span<const double> v) {
  os << '[';
  for (std::size_t k = 0; k < v.size(); ++k) os << (k ? ", " : "") << format_double(v[k]);
  os << ']';
}

void write_rows(std::ostringstream& os, const Mat& a, const std::string& indent) {
  os << '[';
  for (std::size_t r = 0; r < a.rows(); ++r) {
    os << (r ? ",\n" : "\n") << indent << "  ";
    write_vec(os, a.row(r));
  }
  if (a.rows() > 0) os << '\n' << indent;
  os << ']';
}

void write_net_fields(std::ostringstream& os, const TwoLayerNet& net, const std::string& indent) {
  os << indent << "  \"d\": " << net.input_dim() << ",\n";
  os << indent << "  \"m\": " << net.width() << ",\n";
  os << indent << "  \"W\": ";
  write_rows(os, net.w, indent + "  ");
  os << ",\n" << indent << "  \"alpha\": ";
  write_vec(os, net.alpha);
}

void write_net(std::ostringstream& os, const TwoLayerNet& net, const std::string& indent) {
  os << "{\n";
  write_net_fields(os, net, indent);
  os << '\n' << indent << '}';
}

json parse(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string(what) + ": malformed JSON (" + e.what() + ")");
  }
}

const json& field(const json& j, const char* key, const char* what) {
  if (!j.is_object() || !j.contains(key)) throw UsageError(std::string(what) + ": missing key '" + key + "'");
  return j.at(key);
}

std::size_t read_count(const json& j, const char* key, const char* what) {
  const json& v = field(j, key, what);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    throw UsageError(std::string(what) + ": '" + key + "' must be a nonnegative integer");
  }
  return v.get<std::size_t>();
}

Vec read_vec(const json& v, std::size_t expected, const char* what, const char* key) {
  if (!v.is_array() || v.size() != expected) {
    throw UsageError(std::string(what) + ": '" + key + "' must be an array of " + std::to_string(expected) +
                     " numbers");
  }
  Vec out;
  out.reserve(expected);
  for (const auto& e : v) {
    if (!e.is_number()) throw UsageError(std::string(what) + ": non-numeric entry in '" + key + "'");
    out.push_back(e.get<double>());
  }
  return out;
}

Mat read_rows(const json& v, std::size_t rows, std::size_t cols, const char* what, const char* key) {
  if (!v.is_array() || v.size() != rows) {
    throw UsageError(std::string(what) + ": '" + key + "' must have " + std::to_string(rows) + " rows");
  }
  Mat out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const Vec row = read_vec(v[r], cols, what, key);
    for (std::size_t c = 0; c < cols; ++c) out(r, c) = row[c];
  }
  return out;
}

TwoLayerNet read_net(const json& j, const char* what) {
  const std::size_t d = read_count(j, "d", what);
  const std::size_t m = read_count(j, "m", what);
  Mat w = read_rows(field(j, "W", what), d, m, what, "W");
  Vec alpha = read_vec(field(j, "alpha", what), m, what, "alpha");
  try {
    return TwoLayerNet(std::move(w), std::move(alpha));
  } catch (const Error& e) {
    throw UsageError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

std::string checkpoint_to_text(const Checkpoint& ckpt) {
  std::ostringstream os;
  os << "{\n";
  write_net_fields(os, ckpt.net, "");
  os << ",\n  \"meta\": {";
  std::size_t k = 0;
  for (const auto& [key, value] : ckpt.meta) {
    os << (k++ ? ",\n" : "\n") << "    " << quote(key) << ": ";
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, double>) os << format_double(v);
          else if constexpr (std::is_same_v<T, bool>) os << (v ? "true" : "false");
          else os << quote(v);
        },
        value);
  }
  os << (ckpt.meta.empty() ? "}" : "\n  }") << "\n}\n";
  return os.str();
}

Checkpoint checkpoint_from_text(const std::string& text) {
  constexpr const char* what = "checkpoint";
  const json j = parse(text, what);
  Checkpoint ck;
  ck.net = read_net(j, what);
  if (j.contains("meta")) {
    const json& meta = j.at("meta");
    if (!meta.is_object()) throw UsageError("checkpoint: 'meta' must be an object");
    for (const auto& [key, v] : meta.items()) {
      if (v.is_boolean()) ck.meta[key] = v.get<bool>();
      else if (v.is_number()) ck.meta[key] = v.get<double>();
      else if (v.is_string()) ck.meta[key] = v.get<std::string>();
      else ck.meta[key] = v.dump();
    }
  }
  return ck;
}

std::string dataset_to_text(const Dataset& data) {
  data.validate();
  std::ostringstream os;
  os << "{\n  \"n\": " << data.n() << ",\n  \"d\": " << data.d() << ",\n  \"X\": ";
  write_rows(os, data.x, "  ");
  os << ",\n  \"y\": ";
  write_vec(os, data.y);
  os << "\n}\n";
  return os.str();
}

Dataset dataset_from_text(const std::string& text) {
  constexpr const char* what = "dataset";
  const json j = parse(text, what);
  const std::size_t n = read_count(j, "n", what);
  const std::size_t d = read_count(j, "d", what);
  Dataset data{read_rows(field(j, "X", what), n, d, what, "X"), read_vec(field(j, "y", what), n, what, "y")};
  try {
    data.validate();
  } catch (const Error& e) {
    throw UsageError(std::string("dataset: ") + e.what());
  }
  return data;
}

std::string path_to_text(const PiecewisePath& path) {
  std::ostringstream os;
  os << "{\n  \"segments\": [";
  for (std::size_t k = 0; k < path.size(); ++k) {
    const Segment& s = path.segments()[k];
    os << (k ? ",\n" : "\n") << "    {\n      \"kind\": " << quote(std::string(to_string(s.kind)))
       << ",\n      \"reversed\": " << (s.reversed ? "true" : "false") << ",\n      \"i\": " << s.i
       << ",\n      \"j\": " << s.j << ",\n      \"targets\": ";
    write_vec(os, s.targets);
    os << ",\n      \"groups\": [";
    for (std::size_t g = 0; g < s.groups.size(); ++g) {
      os << (g ? ", " : "") << '[';
      for (std::size_t c = 0; c < s.groups[g].size(); ++c) os << (c ? ", " : "") << s.groups[g][c];
      os << ']';
    }
    os << "],\n      \"base\": ";
    write_net(os, s.base, "      ");
    os << ",\n      \"other\": ";
    write_net(os, s.other, "      ");
    os << "\n    }";
  }
  os << (path.empty() ? "]" : "\n  ]") << "\n}\n";
  return os.str();
}

PiecewisePath path_from_text(const std::string& text) {
  constexpr const char* what = "path";
  const json j = parse(text, what);
  const json& segs = field(j, "segments", what);
  if (!segs.is_array()) throw UsageError("path: 'segments' must be an array");
  std::vector<Segment> out;
  for (const auto& js : segs) {
    Segment s;
    const json& kind = field(js, "kind", what);
    if (!kind.is_string()) throw UsageError("path: 'kind' must be a string");
    s.kind = parse_segment_kind(kind.get<std::string>());
    s.reversed = js.value("reversed", false);
    s.i = read_count(js, "i", what);
    s.j = read_count(js, "j", what);
    s.base = read_net(field(js, "base", what), what);
    s.other = read_net(field(js, "other", what), what);
    const json& targets = field(js, "targets", what);
    s.targets = read_vec(targets, targets.is_array() ? targets.size() : 0, what, "targets");
    for (const auto& g : field(js, "groups", what)) {
      std::vector<std::size_t> group;
      for (const auto& c : g) group.push_back(c.get<std::size_t>());
      s.groups.push_back(std::move(group));
    }
    out.push_back(std::move(s));
  }
  try {
    return PiecewisePath(std::move(out));
  } catch (const NumericError& e) {
    throw UsageError(std::string("path: ") + e.what());
  }
}

std::string profile_to_csv(const PathProfile& profile) {
  std::ostringstream os;
  os << "t,loss,R_W,R_alpha,stable_rank\n";
  for (const auto& s : profile.samples) {
    os << format_double(s.t) << ',' << format_double(s.loss) << ',' << format_double(s.r_w) << ','
       << format_double(s.r_alpha) << ',' << format_double(s.stable_rank) << '\n';
  }
  return os.str();
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + p.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& content) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw UsageError("cannot open '" + p.string() + "' for writing");
  out << content;
  if (!out) throw UsageError("write to '" + p.string() + "' failed");
}

void save_checkpoint(const std::filesystem::path& p, const Checkpoint& ckpt) { write_file(p, checkpoint_to_text(ckpt)); }
Checkpoint load_checkpoint(const std::filesystem::path& p) { return checkpoint_from_text(read_file(p)); }
void save_dataset(const std::filesystem::path& p, const Dataset& data) { write_file(p, dataset_to_text(data)); }
Dataset load_dataset(const std::filesystem::path& p) { return dataset_from_text(read_file(p)); }

}  // namespace connectikit
