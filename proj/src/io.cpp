#include <cstdlib>
#include <fstream>
#include <mutex>
#include <set>

#include <omp.h>
#include <openssl/evp.h>

#include "jcsta/cli.hpp"
#include "jcsta/errors.hpp"
#include "jcsta/format.hpp"

namespace jcsta {

using nlohmann::json;

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw IoError("sha256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

int default_workers() {
  if (const char* env = std::getenv("JC_STA_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return omp_get_max_threads();
}

namespace {

const json* lookup(const json& doc, const std::string& path) {
  const json* cur = &doc;
  size_t pos = 0;
  while (pos <= path.size()) {
    const size_t dot = path.find('.', pos);
    const std::string part = path.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
    if (!cur->is_object() || !cur->contains(part)) return nullptr;
    cur = &(*cur)[part];
    if (dot == std::string::npos) break;
    pos = dot + 1;
  }
  return cur;
}

std::string cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_number()) return fmt_num(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  std::string s = v.dump();
  for (char& c : s)
    if (c == ',') c = ';';
  return s;
}

void write_file(const std::filesystem::path& p, const std::string& data) {
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + p.string() + " for writing");
  os.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!os) throw IoError("write failed for " + p.string());
}

std::mutex& write_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

std::string SweepTable::to_csv() const {
  // scalar top-level metrics of successful rows, in key order
  std::set<std::string> keys;
  for (const auto& s : summaries)
    if (s.is_object())
      for (auto it = s.begin(); it != s.end(); ++it)
        if (it.value().is_number() || it.value().is_string()) keys.insert(it.key());
  keys.erase("experiment");
  std::string out = axis;
  for (const auto& k : keys) out += "," + k;
  out += ",error\n";
  for (size_t i = 0; i < values.size(); ++i) {
    out += cell(values[i]);
    for (const auto& k : keys) {
      out += ',';
      if (summaries[i].is_object() && summaries[i].contains(k)) out += cell(summaries[i][k]);
    }
    std::string err = errors[i];
    for (char& c : err)
      if (c == ',' || c == '\n') c = ';';
    out += "," + err + "\n";
  }
  return out;
}

SweepTable sweep(const json& resolved, const std::string& axis, const std::vector<json>& values, int workers) {
  if (!lookup(resolved, axis)) throw ConfigError(axis, "sweep axis is not a config key");
  SweepTable t{axis, values, std::vector<json>(values.size()), std::vector<std::string>(values.size())};
  const int n = static_cast<int>(values.size());
  const int w = workers > 0 ? workers : default_workers();
#pragma omp parallel for schedule(dynamic) num_threads(w)
  for (int i = 0; i < n; ++i) {
    try {
      json doc = resolved;
      set_path(doc, axis, values[i]);
      ExperimentOutput out = run_experiment(parse_config(doc));
      out.summary.erase("config");
      t.summaries[i] = std::move(out.summary);
    } catch (const std::exception& e) {
      t.errors[i] = e.what();
    }
  }
  return t;
}

json write_outputs(const ExperimentOutput& out, const std::filesystem::path& dir) {
  std::lock_guard<std::mutex> lock(write_mutex());
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  std::map<std::string, std::string> files = out.files;
  files["summary.json"] = (out.summary.is_null() ? json::object() : out.summary).dump(2) + "\n";
  json list = json::array();
  for (const auto& [name, data] : files) {
    write_file(dir / name, data);
    list.push_back({{"name", name}, {"bytes", data.size()}, {"sha256", sha256_hex(data)}});
  }
  json manifest = {{"files", list}};
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  return manifest;
}

}  // namespace jcsta
