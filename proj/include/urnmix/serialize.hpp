#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "urnmix/coupling.hpp"
#include "urnmix/rational.hpp"
#include "urnmix/two_urn.hpp"
#include "urnmix/version.hpp"

// CSV and provenance plumbing. Every file starts with `# key=value` lines
// carrying the schema id, library version, and all inputs needed to rerun
// the command that produced it. Doubles are printed with %.17g so equal
// runs produce byte-identical files.
namespace urnmix::io {

inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

using Provenance = std::vector<std::pair<std::string, std::string>>;

inline std::string csv_header(const std::string& schema, const Provenance& prov) {
  std::ostringstream os;
  os << "# schema=" << schema << "\n";
  os << "# version=" << library_version << "\n";
  for (auto& [k, v] : prov) os << "# " << k << "=" << v << "\n";
  return os.str();
}

// parse `# key=value` comment lines back into a map (round-trip support)
inline std::map<std::string, std::string> parse_csv_provenance(std::istream& in) {
  std::map<std::string, std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] != '#') break;
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(2, eq - 2);
    out[key] = line.substr(eq + 1);
  }
  return out;
}

inline std::string trace_csv(const coupling::TraceRecord& rec,
                             const Provenance& prov) {
  std::ostringstream os;
  os << csv_header("urnmix.trace.v1", prov);
  os << "t,mean,stderr,uncoupled_fraction\n";
  for (const auto& r : rec.rows)
    os << r.t << ',' << fmt_double(r.mean) << ',' << fmt_double(r.stderr_) << ','
       << fmt_double(r.uncoupled_fraction) << "\n";
  return os.str();
}

template <typename T>
inline std::string value_csv_cell(const T& v);

template <>
inline std::string value_csv_cell<Rational>(const Rational& v) {
  return v.get_str();
}
template <>
inline std::string value_csv_cell<double>(const double& v) {
  return fmt_double(v);
}

template <typename T>
inline std::string kernel_csv(const two_urn::Kernel<T>& K, const std::string& mode,
                              const Provenance& extra = {}) {
  Provenance prov = {{"n", std::to_string(K.n)},
                     {"k", std::to_string(K.k)},
                     {"mode", mode}};
  prov.insert(prov.end(), extra.begin(), extra.end());
  std::ostringstream os;
  os << csv_header("urnmix.kernel.v1", prov);
  os << "row,entries...\n";
  for (int i = 0; i <= K.n; ++i) {
    os << i;
    for (int j = 0; j <= K.n; ++j) os << ',' << value_csv_cell<T>(K(i, j));
    os << "\n";
  }
  return os.str();
}

template <typename T>
inline std::string distribution_csv(const std::vector<T>& d, const std::string& mode,
                                    const Provenance& extra = {}) {
  Provenance prov = {{"n", std::to_string(long(d.size()) - 1)}, {"mode", mode}};
  prov.insert(prov.end(), extra.begin(), extra.end());
  std::ostringstream os;
  os << csv_header("urnmix.distribution.v1", prov);
  os << "state,prob\n";
  for (std::size_t j = 0; j < d.size(); ++j)
    os << j << ',' << value_csv_cell<T>(d[j]) << "\n";
  return os.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << content;
}

}  // namespace urnmix::io
