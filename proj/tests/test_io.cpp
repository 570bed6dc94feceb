#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "vlab/csv.hpp"
#include "vlab/io.hpp"
#include "vlab/random.hpp"

using namespace vlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("vlab-io-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& path, const std::string& text) { std::ofstream(path) << text; }

}  // namespace

TEST(Io, FunctionAndSpectrumRoundTrip) {
  const fs::path dir = scratch("roundtrip");
  const BaseSequence b({2, 3, 2});
  Rng rng(1);
  const FiniteFunction f = random_function(b, rng);
  io::write_function(dir / "f.json", f);
  const FiniteFunction g = io::read_function(dir / "f.json");
  EXPECT_EQ(g.base(), b);
  for (std::size_t r = 0; r < f.size(); ++r) EXPECT_EQ(f[r], g[r]);

  const Spectrum s = analyze_fast(f);
  io::write_spectrum(dir / "s.json", s);
  const Spectrum t = io::read_spectrum(dir / "s.json");
  for (std::size_t k = 0; k < s.size(); ++k) EXPECT_EQ(s[k], t[k]);
}

TEST(Io, HandWrittenFunction) {
  const fs::path dir = scratch("hand");
  write_text(dir / "f.json", R"({"bases": [2, 2], "values": [[1, 0], [0, 1], [-1, 0], [0, -1]]})");
  const FiniteFunction f = io::read_function(dir / "f.json");
  EXPECT_EQ(f.size(), 4u);
  EXPECT_EQ(f[1], Complex(0, 1));
}

TEST(Io, RejectsMalformedInput) {
  const fs::path dir = scratch("bad");
  write_text(dir / "broken.json", "{\"bases\": [2, 2], ");
  EXPECT_THROW(io::read_function(dir / "broken.json"), DomainError);
  write_text(dir / "short.json", R"({"bases": [2, 2], "values": [[1, 0]]})");
  EXPECT_THROW(io::read_function(dir / "short.json"), DomainError);
  write_text(dir / "scalar.json", R"({"bases": [2, 2], "values": [1, 2, 3, 4]})");
  EXPECT_THROW(io::read_function(dir / "scalar.json"), DomainError);
  write_text(dir / "base1.json", R"({"bases": [1, 2], "values": [[1, 0], [1, 0]]})");
  EXPECT_THROW(io::read_function(dir / "base1.json"), DomainError);
  write_text(dir / "nocoeffs.json", R"({"bases": [2]})");
  EXPECT_THROW(io::read_spectrum(dir / "nocoeffs.json"), DomainError);
  EXPECT_THROW(io::read_function(dir / "missing.json"), DomainError);
}

TEST(Io, DecompositionRoundTrip) {
  const fs::path dir = scratch("decomp");
  const BaseSequence b({2, 3, 2, 2});
  Rng rng(3);
  io::Decomposition d;
  d.p = 0.5;
  GroupPoint anchor = zero_point(b);
  anchor.digits[0] = 1;
  d.atoms.push_back(random_atom(b, IntervalSpec{1, anchor}, 0.5, rng));
  d.atoms.push_back(random_atom(b, IntervalSpec::at_zero(2, b), 0.5, rng));
  d.mu = {0.25, 2.0};
  io::write_decomposition(dir / "d.json", d);
  EXPECT_TRUE(fs::exists(dir / "d_atom1.json"));

  const io::Decomposition e = io::read_decomposition(dir / "d.json");
  ASSERT_EQ(e.atoms.size(), 2u);
  EXPECT_EQ(e.p, 0.5);
  EXPECT_EQ(e.mu, d.mu);
  EXPECT_EQ(e.atoms[0].support.depth, 1u);
  EXPECT_EQ(e.atoms[0].support.anchor.digits, anchor.digits);
  for (std::size_t r = 0; r < b.size(); ++r) EXPECT_EQ(e.atoms[1].a[r], d.atoms[1].a[r]);
  const Assembly a = atomic_assemble(b, e.p, e.mu, e.atoms);
  EXPECT_TRUE(a.bound_holds);
}

TEST(Io, DecompositionErrors) {
  const fs::path dir = scratch("decomp-bad");
  write_text(dir / "nop.json", R"({"atoms": []})");
  EXPECT_THROW(io::read_decomposition(dir / "nop.json"), DomainError);
  write_text(dir / "noatoms.json", R"({"p": 0.5})");
  EXPECT_THROW(io::read_decomposition(dir / "noatoms.json"), DomainError);
  write_text(dir / "a.json", R"({"bases": [2, 2], "values": [[1, 0], [0, 0], [-1, 0], [0, 0]]})");
  write_text(dir / "depth.json",
             R"({"p": 1, "atoms": [{"interval": {"depth": 3, "anchor": [0, 0]}, "mu": 1, "values_file": "a.json"}]})");
  EXPECT_THROW(io::read_decomposition(dir / "depth.json"), DomainError);
  write_text(dir / "ok.json",
             R"({"p": 1, "atoms": [{"interval": {"depth": 1, "anchor": [0, 0]}, "mu": 1, "values_file": "a.json"}]})");
  EXPECT_TRUE(validate_atom(io::read_decomposition(dir / "ok.json").atoms[0]).ok());
}

TEST(Csv, FormattingAndEscaping) {
  CsvTable t({"name", "value", "count"});
  t.add({std::string("a,b"), 0.1, std::size_t{3}});
  t.add({std::string("say \"hi\""), 1e-20, std::size_t{0}});
  EXPECT_EQ(t.str(), "name,value,count\r\n\"a,b\",0.1,3\r\n\"say \"\"hi\"\"\",1e-20,0\r\n");
  EXPECT_EQ(format_double(1.0 / 3), "0.333333333333");
}
