#pragma once

// JSON file formats:
//   function       {"bases": [m_0, ...], "values": [[re, im], ...]}
//   spectrum       {"bases": [m_0, ...], "coeffs": [[re, im], ...]}
//   decomposition  {"p": p, "atoms": [{"interval": {"depth": j, "anchor": [...]},
//                                       "mu": mu, "values_file": "a.json"}, ...]}
// Values are in rank order; values_file paths resolve against the
// decomposition file's directory.

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vlab/core.hpp"
#include "vlab/hardy.hpp"
#include "vlab/transform.hpp"

namespace vlab::io {

using nlohmann::json;

namespace detail {

inline std::vector<Complex> read_pairs(const json& arr, const char* key) {
  vlab::detail::require(arr.is_array(), std::string("'") + key + "' must be an array");
  std::vector<Complex> out;
  out.reserve(arr.size());
  for (const auto& v : arr) {
    vlab::detail::require(v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number(),
                          std::string("entries of '") + key + "' must be [re, im] pairs");
    out.emplace_back(v[0].get<double>(), v[1].get<double>());
  }
  return out;
}

inline json write_pairs(std::span<const Complex> values) {
  json arr = json::array();
  for (const auto& v : values) arr.push_back({v.real(), v.imag()});
  return arr;
}

inline BaseSequence read_bases(const json& j) {
  vlab::detail::require(j.contains("bases") && j["bases"].is_array(), "missing 'bases' array");
  std::vector<std::uint32_t> bases;
  for (const auto& m : j["bases"]) {
    vlab::detail::require(m.is_number_integer() && m.get<long long>() >= 2, "bases must be integers >= 2");
    bases.push_back(m.get<std::uint32_t>());
  }
  return BaseSequence(std::move(bases));
}

inline json read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  vlab::detail::require(in.good(), "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DomainError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

inline void write_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  vlab::detail::require(out.good(), "cannot write " + path.string());
  out << j.dump() << '\n';
}

}  // namespace detail

inline json to_json(const FiniteFunction& f) {
  return {{"bases", std::vector<std::uint32_t>(f.base().bases().begin(), f.base().bases().end())},
          {"values", detail::write_pairs(f.values())}};
}

inline json to_json(const Spectrum& s) {
  return {{"bases", std::vector<std::uint32_t>(s.base().bases().begin(), s.base().bases().end())},
          {"coeffs", detail::write_pairs(s.coeffs())}};
}

inline FiniteFunction function_from_json(const json& j) {
  vlab::detail::require(j.contains("values"), "missing 'values' array");
  return FiniteFunction(detail::read_bases(j), detail::read_pairs(j["values"], "values"));
}

inline Spectrum spectrum_from_json(const json& j) {
  vlab::detail::require(j.contains("coeffs"), "missing 'coeffs' array");
  return Spectrum(detail::read_bases(j), detail::read_pairs(j["coeffs"], "coeffs"));
}

inline FiniteFunction read_function(const std::filesystem::path& path) {
  return function_from_json(detail::read_file(path));
}
inline void write_function(const std::filesystem::path& path, const FiniteFunction& f) {
  detail::write_file(path, to_json(f));
}
inline Spectrum read_spectrum(const std::filesystem::path& path) {
  return spectrum_from_json(detail::read_file(path));
}
inline void write_spectrum(const std::filesystem::path& path, const Spectrum& s) {
  detail::write_file(path, to_json(s));
}

struct Decomposition {
  double p = 1;
  std::vector<double> mu;
  std::vector<AtomSpec> atoms;
};

inline Decomposition read_decomposition(const std::filesystem::path& path) {
  const json j = detail::read_file(path);
  vlab::detail::require(j.contains("p") && j["p"].is_number(), "decomposition needs a numeric 'p'");
  vlab::detail::require(j.contains("atoms") && j["atoms"].is_array(), "decomposition needs an 'atoms' array");
  Decomposition d;
  d.p = j["p"].get<double>();
  for (const auto& entry : j["atoms"]) {
    vlab::detail::require(entry.contains("interval") && entry.contains("mu") && entry.contains("values_file"),
                          "each atom needs 'interval', 'mu' and 'values_file'");
    FiniteFunction a = read_function(path.parent_path() / entry["values_file"].get<std::string>());
    IntervalSpec support;
    support.depth = entry["interval"].at("depth").get<std::size_t>();
    support.anchor.digits = entry["interval"].at("anchor").get<std::vector<std::uint32_t>>();
    support.check(a.base());
    d.mu.push_back(entry["mu"].get<double>());
    d.atoms.push_back(AtomSpec{std::move(support), d.p, std::move(a)});
  }
  return d;
}

/// Writes the decomposition file plus one values file per atom next to it.
inline void write_decomposition(const std::filesystem::path& path, const Decomposition& d) {
  json atoms = json::array();
  for (std::size_t k = 0; k < d.atoms.size(); ++k) {
    const std::string name = path.stem().string() + "_atom" + std::to_string(k) + ".json";
    write_function(path.parent_path() / name, d.atoms[k].a);
    atoms.push_back({{"interval", {{"depth", d.atoms[k].support.depth}, {"anchor", d.atoms[k].support.anchor.digits}}},
                     {"mu", d.mu[k]},
                     {"values_file", name}});
  }
  detail::write_file(path, json{{"p", d.p}, {"atoms", atoms}});
}

}  // namespace vlab::io
