#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spectral_forge.hpp"

namespace sf = spectral_forge;
namespace fs = std::filesystem;

namespace {

constexpr int kPass = 0;
constexpr int kVerificationFailure = 1;
constexpr int kUsageError = 2;
constexpr int kNumericalError = 3;

struct Options {
  std::optional<double> tol_rel;
  std::optional<double> tol_abs;
  std::optional<double> cluster;
  std::optional<std::uint64_t> seed;
  std::string input;
  std::string output;
  std::string emit = "all";
  bool allow_ill_conditioned = false;

  bool cross_check = false;
  std::string decomposition_file;
  std::string pvm_file;
  std::string dir;

  std::string kind;
  std::size_t dim = 0;
  double scale = 1.0;
  std::string path;
};

// Flag beats SPECTRAL_FORGE_TOL beats the per-dimension default.
sf::Tolerances tolerances_for(std::size_t n, const Options& opt) {
  sf::Tolerances tol = sf::Tolerances::for_dim(n);
  if (const char* env = std::getenv("SPECTRAL_FORGE_TOL")) {
    try {
      std::size_t used = 0;
      const double v = std::stod(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument("trailing characters");
      tol.rtol = v;
    } catch (const std::exception&) {
      throw sf::Error(sf::ErrorKind::BadSpec, std::string("SPECTRAL_FORGE_TOL is not a number: '") + env + "'");
    }
  }
  if (opt.tol_rel) tol.rtol = *opt.tol_rel;
  if (opt.tol_abs) tol.atol = *opt.tol_abs;
  if (opt.cluster) tol.cluster = *opt.cluster;
  tol.validate();
  return tol;
}

sf::Matrix require_input(const Options& opt) {
  if (opt.input.empty()) throw sf::Error(sf::ErrorKind::BadSpec, "--input is required");
  return sf::io::read_matrix(opt.input);
}

void emit(const Options& opt, const sf::io::json& j) {
  const std::string text = sf::io::dump(j);
  if (opt.output.empty()) {
    std::cout << text;
  } else {
    sf::io::write_text(opt.output, text);
  }
}

int status(bool pass) { return pass ? kPass : kVerificationFailure; }

int run_decompose(const Options& opt) {
  const sf::Matrix t = require_input(opt);
  const sf::Tolerances tol = tolerances_for(t.rows(), opt);
  const sf::Decomposition d = sf::decompose(t, tol);
  const sf::VerificationReport r = sf::verify(t, d, tol);
  emit(opt, {{"decomposition", sf::io::to_json(d)}, {"report", sf::io::to_json(r)}});
  return status(r.all_pass());
}

int run_spectrum(const Options& opt) {
  const sf::Matrix t = require_input(opt);
  const sf::Tolerances tol = tolerances_for(t.rows(), opt);
  const sf::SpectralMeasure e = sf::pvm_from_normal(t, tol);
  emit(opt, sf::io::to_json(e));
  const sf::VerificationReport r = sf::pvm_validate(e, tol);
  if (!r.all_pass()) std::cerr << "spectral measure failed validation\n";
  return status(r.all_pass());
}

int run_pipeline(const Options& opt) {
  const sf::Matrix t = require_input(opt);
  const sf::io::Emit what = sf::io::parse_emit(opt.emit);
  sf::PipelineOptions po;
  po.tol = tolerances_for(t.rows(), opt);
  po.allow_ill_conditioned = opt.allow_ill_conditioned;
  sf::PipelineResult res = sf::spectral_theorem(t, po);
  if (opt.cross_check) {
    const sf::SpectralMeasure direct = sf::pvm_from_normal(t, po.tol);
    const sf::VerificationReport cc = sf::cross_check(res, direct, po.tol);
    for (const auto& [name, value] : cc.residuals) {
      const auto bound = cc.tolerances.find(name);
      if (cc.pass.contains(name)) {
        res.report.check("cross_check_" + name, value, bound->second);
      } else {
        res.report.residuals["cross_check_" + name] = value;
      }
    }
  }
  emit(opt, sf::io::to_json(res, what));
  return status(res.report.all_pass());
}

sf::VerificationReport verify_measure_against(const sf::SpectralMeasure& e, const std::optional<sf::Matrix>& t,
                                              const sf::Tolerances& tol) {
  sf::VerificationReport r = sf::pvm_validate(e, tol);
  if (t) {
    if (t->rows() != e.dim()) throw sf::Error(sf::ErrorKind::DimensionMismatch, "matrix and measure differ in dim");
    const sf::Matrix recovered = sf::pvm_integrate([](sf::Complex z) { return z; }, e);
    r.check("reconstruction", sf::frobenius(recovered - *t), 100.0 * tol.rtol * (1.0 + sf::frobenius(*t)));
  }
  return r;
}

int run_verify_dir(const Options& opt) {
  std::vector<fs::path> files;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(opt.dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  if (ec) throw sf::Error(sf::ErrorKind::FileError, "cannot list '" + opt.dir + "': " + ec.message());
  std::sort(files.begin(), files.end());

  bool all = true;
  sf::io::json out = sf::io::json::array();
  for (const auto& file : files) {
    const sf::Matrix t = sf::io::read_matrix(file.string());
    const sf::Tolerances tol = tolerances_for(t.rows(), opt);
    sf::VerificationReport r = sf::verify(t, sf::decompose(t, tol), tol);
    const sf::VerificationReport pv = sf::pvm_validate(sf::pvm_from_normal(t, tol), tol);
    for (const auto& [name, value] : pv.residuals) {
      if (pv.pass.contains(name)) {
        r.check("pvm_" + name, value, pv.tolerances.at(name));
      } else {
        r.residuals["pvm_" + name] = value;
      }
    }
    all = all && r.all_pass();
    out.push_back({{"file", file.filename().string()}, {"report", sf::io::to_json(r)}});
  }
  emit(opt, {{"files", std::move(out)}});
  return status(all);
}

int run_verify(const Options& opt) {
  if (!opt.dir.empty()) return run_verify_dir(opt);
  if (opt.decomposition_file.empty() == opt.pvm_file.empty()) {
    throw sf::Error(sf::ErrorKind::BadSpec, "verify needs exactly one of --decomposition, --pvm, --dir");
  }
  if (!opt.decomposition_file.empty()) {
    const sf::Matrix t = require_input(opt);
    const sf::Tolerances tol = tolerances_for(t.rows(), opt);
    const sf::Decomposition d = sf::io::read_decomposition(opt.decomposition_file);
    if (d.a.rows() != t.rows() || d.b.rows() != t.rows()) {
      throw sf::Error(sf::ErrorKind::DimensionMismatch, "decomposition and matrix differ in dim");
    }
    const sf::VerificationReport r = sf::verify(t, d, tol);
    emit(opt, sf::io::to_json(r));
    return status(r.all_pass());
  }
  const sf::SpectralMeasure e = sf::io::read_measure(opt.pvm_file);
  std::optional<sf::Matrix> t;
  if (!opt.input.empty()) t = sf::io::read_matrix(opt.input);
  const sf::Tolerances tol = tolerances_for(e.dim(), opt);
  const sf::VerificationReport r = verify_measure_against(e, t, tol);
  emit(opt, sf::io::to_json(r));
  return status(r.all_pass());
}

int run_gen(const Options& opt) {
  sf::OperatorSpec spec;
  if (opt.kind.empty()) throw sf::Error(sf::ErrorKind::BadSpec, "--kind is required");
  spec.kind = sf::parse_operator_kind(opt.kind);
  spec.dim = opt.dim;
  spec.scale = opt.scale;
  spec.seed = opt.seed;
  if (!opt.path.empty()) spec.path = opt.path;
  emit(opt, sf::io::to_json(sf::generate(spec)));
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral resolution of normal matrices through their bounded transform pair"};
  app.require_subcommand(1);
  app.fallthrough();

  Options opt;
  app.add_option("--tol-rel", opt.tol_rel, "Relative tolerance (default 1e-10*n; env SPECTRAL_FORGE_TOL)");
  app.add_option("--tol-abs", opt.tol_abs, "Absolute tolerance (default 1e-12)");
  app.add_option("--cluster", opt.cluster, "Absolute eigenvalue merge radius (default 1e-8*(1+|spectrum|))");
  app.add_option("--seed", opt.seed, "Seed for random generator kinds");
  app.add_option("--input", opt.input, "Input matrix JSON file");
  app.add_option("--output", opt.output, "Output file (default: standard output)");
  app.add_option("--emit", opt.emit, "Pipeline output subset: all, measure or report")
      ->check(CLI::IsMember({"all", "measure", "report"}));
  app.add_flag("--allow-ill-conditioned", opt.allow_ill_conditioned,
               "Run the pipeline even when the operator norm exceeds 1e8");

  auto* decompose = app.add_subcommand("decompose", "Matrix -> bounded pair A, B with verification report");
  auto* spectrum = app.add_subcommand("spectrum", "Matrix -> spectral measure (projection-valued)");
  auto* pipeline = app.add_subcommand("pipeline", "Matrix -> full reconstruction through the bounded pair");
  pipeline->add_flag("--cross-check", opt.cross_check, "Compare against direct diagonalization");
  auto* verify = app.add_subcommand("verify", "Check a decomposition or measure file, or a directory of matrices");
  verify->add_option("--decomposition", opt.decomposition_file, "Decomposition JSON to check against --input");
  verify->add_option("--pvm", opt.pvm_file, "Spectral measure JSON to validate (and integrate against --input)");
  verify->add_option("--dir", opt.dir, "Directory of matrix JSON files, processed in sorted order");
  auto* gen = app.add_subcommand("gen", "Generate a test operator");
  gen->add_option("--kind", opt.kind,
                  "random_normal, random_hermitian, random_unitary, multiplication, laplacian_1d, "
                  "momentum_1d, jordan_block or from_file");
  gen->add_option("--dim", opt.dim, "Dimension");
  gen->add_option("--scale", opt.scale, "Scale factor (default 1)");
  gen->add_option("--path", opt.path, "Source file for from_file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (*decompose) return run_decompose(opt);
    if (*spectrum) return run_spectrum(opt);
    if (*pipeline) return run_pipeline(opt);
    if (*verify) return run_verify(opt);
    if (*gen) return run_gen(opt);
  } catch (const sf::Error& e) {
    std::cerr << "error (" << sf::to_string(e.kind()) << "): " << e.what() << "\n";
    return e.is_numerical() ? kNumericalError : kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  }
  return kUsageError;
}
